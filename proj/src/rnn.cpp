#include "trackmode/rnn.hpp"

#include <cmath>
#include <stdexcept>

#include "trackmode/rng.hpp"

namespace trackmode {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// logits row -> log-probabilities (in place), max-subtracted for stability.
void log_softmax_row(double* row, size_t n) {
    double m = row[0];
    for (size_t i = 1; i < n; ++i) m = std::max(m, row[i]);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += std::exp(row[i] - m);
    const double lse = m + std::log(sum);
    for (size_t i = 0; i < n; ++i) row[i] -= lse;
}

void fill_uniform(Tensor& t, Rng& rng, double lo, double hi) {
    for (double& x : t.v) x = rng.next_uniform(lo, hi);
}

} // namespace

const char* cell_kind_name(CellKind k) { return k == CellKind::gru ? "gru" : "maxout"; }

bool parse_cell_kind(const std::string& name, CellKind& out) {
    if (name == "gru") out = CellKind::gru;
    else if (name == "maxout") out = CellKind::maxout;
    else return false;
    return true;
}

const char* input_kind_name(InputKind k) { return k == InputKind::embedded ? "embedded" : "raw"; }

bool parse_input_kind(const std::string& name, InputKind& out) {
    if (name == "embedded") out = InputKind::embedded;
    else if (name == "raw") out = InputKind::raw;
    else return false;
    return true;
}

CellStep cell_forward(const CellParams& p, CellKind kind, const Vec& x_gate, const Vec& x_cand,
                      const Vec& h_prev) {
    const size_t H = p.hidden();
    check(p.U_g.rows == 2 * H && p.W_g.rows == 2 * H, "cell: gate shapes inconsistent");
    check(!p.pieces.empty(), "cell: needs at least one candidate piece");
    check(kind == CellKind::maxout || p.pieces.size() == 1, "gru cell: exactly one piece");
    check(h_prev.size() == H, "cell: h_prev length mismatch");

    CellStep s;
    s.x_gate = x_gate;
    s.x_cand = x_cand;
    s.h_prev = h_prev;

    Vec a_g(2 * H);
    matvec(p.U_g, x_gate, a_g);
    matvec(p.W_g, h_prev, a_g, /*accumulate=*/true);
    if (!p.b_g.empty()) axpy(1.0, p.b_g, a_g);

    s.r.resize(H);
    s.z.resize(H);
    s.rh.resize(H);
    for (size_t u = 0; u < H; ++u) {
        s.r[u] = sigmoid(a_g[u]);
        s.z[u] = sigmoid(a_g[H + u]);
        s.rh[u] = s.r[u] * h_prev[u];
    }

    if (kind == CellKind::gru) {
        const auto& piece = p.pieces.front();
        Vec pre(H);
        matvec(piece.U, x_cand, pre);
        matvec(piece.W_c, s.rh, pre, true);
        if (!piece.b.empty()) axpy(1.0, piece.b, pre);
        s.cand.resize(H);
        for (size_t u = 0; u < H; ++u) s.cand[u] = std::tanh(pre[u]);
    } else {
        s.cand.assign(H, 0.0);
        s.argmax.assign(H, 0);
        Vec piece_val(H);
        for (size_t j = 0; j < p.pieces.size(); ++j) {
            const auto& piece = p.pieces[j];
            matvec(piece.U, x_cand, piece_val);
            matvec(piece.W_c, s.rh, piece_val, true);
            if (!piece.b.empty()) axpy(1.0, piece.b, piece_val);
            if (j == 0) {
                s.cand = piece_val;
            } else {
                for (size_t u = 0; u < H; ++u) {
                    // Strict > keeps the lowest index on exact ties.
                    if (piece_val[u] > s.cand[u]) {
                        s.cand[u] = piece_val[u];
                        s.argmax[u] = static_cast<int32_t>(j);
                    }
                }
            }
        }
    }

    s.h.resize(H);
    for (size_t u = 0; u < H; ++u)
        s.h[u] = (1.0 - s.z[u]) * h_prev[u] + s.z[u] * s.cand[u];
    return s;
}

void cell_backward(const CellParams& p, CellKind kind, const CellStep& step, const Vec& dh,
                   CellParams& grads, Vec& dh_prev, Vec& dx_gate, Vec& dx_cand) {
    const size_t H = p.hidden();
    check(dh.size() == H, "cell_backward: dh length mismatch");

    Vec dcand(H), dz(H);
    for (size_t u = 0; u < H; ++u) {
        dz[u] = dh[u] * (step.cand[u] - step.h_prev[u]);
        dcand[u] = dh[u] * step.z[u];
        dh_prev[u] += dh[u] * (1.0 - step.z[u]);
    }

    Vec drh(H, 0.0);
    if (kind == CellKind::gru) {
        const auto& piece = p.pieces.front();
        auto& gpiece = grads.pieces.front();
        Vec dpre(H);
        for (size_t u = 0; u < H; ++u)
            dpre[u] = dcand[u] * (1.0 - step.cand[u] * step.cand[u]);
        outer_acc(gpiece.U, dpre, step.x_cand);
        outer_acc(gpiece.W_c, dpre, step.rh);
        if (!gpiece.b.empty()) axpy(1.0, dpre, gpiece.b);
        matvec_transposed_acc(piece.U, dpre, dx_cand);
        matvec_transposed_acc(piece.W_c, dpre, drh);
    } else {
        // Gradient flows only through each unit's winning piece.
        for (size_t u = 0; u < H; ++u) {
            const double g = dcand[u];
            if (g == 0.0) continue;
            const size_t j = static_cast<size_t>(step.argmax[u]);
            const auto& piece = p.pieces[j];
            auto& gpiece = grads.pieces[j];
            double* gu = gpiece.U.row(u);
            const double* xu = step.x_cand.data();
            for (size_t c = 0; c < piece.U.cols; ++c) gu[c] += g * xu[c];
            double* gw = gpiece.W_c.row(u);
            for (size_t c = 0; c < H; ++c) gw[c] += g * step.rh[c];
            if (!gpiece.b.empty()) gpiece.b[u] += g;
            const double* pu = piece.U.row(u);
            for (size_t c = 0; c < piece.U.cols; ++c) dx_cand[c] += g * pu[c];
            const double* pw = piece.W_c.row(u);
            for (size_t c = 0; c < H; ++c) drh[c] += g * pw[c];
        }
    }

    Vec da_g(2 * H);
    for (size_t u = 0; u < H; ++u) {
        const double dr = drh[u] * step.h_prev[u];
        dh_prev[u] += drh[u] * step.r[u];
        da_g[u] = dr * step.r[u] * (1.0 - step.r[u]);
        da_g[H + u] = dz[u] * step.z[u] * (1.0 - step.z[u]);
    }
    outer_acc(grads.U_g, da_g, step.x_gate);
    outer_acc(grads.W_g, da_g, step.h_prev);
    if (!grads.b_g.empty()) axpy(1.0, da_g, grads.b_g);
    matvec_transposed_acc(p.U_g, da_g, dx_gate);
    matvec_transposed_acc(p.W_g, da_g, dh_prev);
}

CellParams to_cell_params(const GruParams& p) {
    CellParams c;
    c.U_g = p.U_g;
    c.W_g = p.W_g;
    c.b_g = p.b_g;
    c.pieces.push_back({p.U, p.W_c, p.b_c});
    return c;
}

CellParams to_cell_params(const MaxoutGruParams& p) {
    CellParams c;
    c.U_g = p.U_g;
    c.W_g = p.W_g;
    c.b_g = p.b_g;
    c.pieces = p.pieces;
    return c;
}

Vec gru_cell(const Vec& x, const Vec& h_prev, const GruParams& p) {
    return cell_forward(to_cell_params(p), CellKind::gru, x, x, h_prev).h;
}

Vec maxout_gru_cell(const Vec& x, const Vec& h_prev, const MaxoutGruParams& p) {
    check(!p.pieces.empty(), "maxout cell: k >= 1");
    return cell_forward(to_cell_params(p), CellKind::maxout, x, x, h_prev).h;
}

size_t NetworkConfig::layer_input_dim(size_t layer) const {
    if (layer == 0) return input == InputKind::embedded ? embedding_dim : n_features;
    return 2 * hidden;
}

void NetworkConfig::validate() const {
    check(n_features >= 1, "config: n_features >= 1");
    check(n_classes >= 2, "config: n_classes >= 2");
    check(hidden >= 1, "config: hidden >= 1");
    check(layers >= 1, "config: layers >= 1");
    check(pieces >= 1, "config: pieces >= 1");
    if (cell == CellKind::gru) check(pieces == 1, "config: gru cell uses exactly one piece");
    if (input == InputKind::embedded) {
        check(embedding_dim >= 1, "config: embedding_dim >= 1");
        check(feature_bins.size() == n_features, "config: feature_bins size mismatch");
        for (size_t b : feature_bins) check(b >= 1, "config: zero intervals for a feature");
    }
}

NetworkParams init_network(const NetworkConfig& cfg, uint64_t seed) {
    cfg.validate();
    NetworkParams p;
    p.config = cfg;
    if (cfg.input == InputKind::embedded) {
        p.gate_embedding = init_embedding(cfg.feature_bins, cfg.embedding_dim, Rng::mix(seed, 101));
        p.cand_embedding = init_embedding(cfg.feature_bins, cfg.embedding_dim, Rng::mix(seed, 102));
    }
    Rng rng(Rng::mix(seed, 103));
    const size_t H = cfg.hidden;
    const size_t n_pieces = cfg.cell == CellKind::gru ? 1 : cfg.pieces;
    for (size_t layer = 0; layer < cfg.layers; ++layer) {
        const size_t D = cfg.layer_input_dim(layer);
        std::array<CellParams, 2> pair;
        for (auto& cell : pair) {
            cell.U_g = Tensor(2 * H, D);
            cell.W_g = Tensor(2 * H, H);
            cell.b_g.assign(2 * H, 0.0);
            fill_uniform(cell.U_g, rng, 0.0, 0.001);
            fill_uniform(cell.W_g, rng, 0.0, 0.001);
            for (size_t j = 0; j < n_pieces; ++j) {
                MaxoutGruParams::Piece piece;
                piece.U = Tensor(H, D);
                piece.W_c = Tensor(H, H);
                piece.b.assign(H, 0.0);
                fill_uniform(piece.U, rng, 0.0, 0.001);
                fill_uniform(piece.W_c, rng, 0.0, 0.001);
                cell.pieces.push_back(std::move(piece));
            }
        }
        p.cells.push_back(std::move(pair));
    }
    p.output_w = Tensor(cfg.n_classes, 2 * H);
    fill_uniform(p.output_w, rng, 0.0, 0.001);
    p.output_b.assign(cfg.n_classes, 0.0);
    return p;
}

NetworkParams zero_like(const NetworkParams& p) {
    NetworkParams z = p;
    for (auto& ref : collect_params(z)) std::fill(ref.data, ref.data + ref.size(), 0.0);
    return z;
}

EncodedSequence EncodedSequence::from_indices(const std::vector<std::vector<size_t>>& indices) {
    EncodedSequence seq;
    seq.steps.reserve(indices.size());
    for (const auto& step : indices) {
        std::vector<std::vector<BinWeight>> enc;
        enc.reserve(step.size());
        for (size_t idx : step) enc.push_back({BinWeight{static_cast<uint32_t>(idx), 1.0}});
        seq.steps.push_back(std::move(enc));
    }
    return seq;
}

namespace {

// Layer-0 inputs for one step: summed weighted embedding rows per path.
void embed_step(const NetworkParams& p, const std::vector<std::vector<BinWeight>>& step,
                Vec& x_gate, Vec& x_cand) {
    const size_t dim = p.config.embedding_dim;
    x_gate.assign(dim, 0.0);
    x_cand.assign(dim, 0.0);
    check(step.size() == p.config.n_features, "input: per-step feature count mismatch");
    for (size_t f = 0; f < step.size(); ++f) {
        const Tensor& gm = p.gate_embedding.per_feature[f];
        const Tensor& cm = p.cand_embedding.per_feature[f];
        for (const BinWeight& bw : step[f]) {
            check(bw.index < gm.rows, "input: interval index out of range");
            const double* gr = gm.row(bw.index);
            const double* cr = cm.row(bw.index);
            if (bw.weight == 1.0) {
                for (size_t c = 0; c < dim; ++c) x_gate[c] += gr[c];
                for (size_t c = 0; c < dim; ++c) x_cand[c] += cr[c];
            } else {
                for (size_t c = 0; c < dim; ++c) x_gate[c] += bw.weight * gr[c];
                for (size_t c = 0; c < dim; ++c) x_cand[c] += bw.weight * cr[c];
            }
        }
    }
}

} // namespace

NetworkForward network_forward(const NetworkParams& p, const EncodedSequence& input) {
    const NetworkConfig& cfg = p.config;
    const size_t T = input.length();
    check(T > 0, "network_forward: empty sequence");
    const bool embedded = cfg.input == InputKind::embedded;
    check(embedded ? !input.steps.empty() : !input.raw.empty(),
          "network_forward: input encoding does not match the model's input kind");

    NetworkForward out;
    NetworkCache& cache = out.cache;
    if (embedded) cache.encoding = input.steps;
    cache.x_gate.resize(T);
    cache.x_cand.resize(T);
    for (size_t t = 0; t < T; ++t) {
        if (embedded) {
            embed_step(p, input.steps[t], cache.x_gate[t], cache.x_cand[t]);
        } else {
            check(input.raw[t].size() == cfg.n_features, "input: raw feature count mismatch");
            cache.x_gate[t] = input.raw[t];
            cache.x_cand[t] = input.raw[t];
        }
    }

    const size_t H = cfg.hidden;
    cache.steps.resize(cfg.layers * 2);
    cache.concat.assign(cfg.layers, {});
    for (size_t layer = 0; layer < cfg.layers; ++layer) {
        auto input_of = [&](size_t t) -> const Vec& {
            return layer == 0 ? cache.x_gate[t] : cache.concat[layer - 1][t];
        };
        auto cand_input_of = [&](size_t t) -> const Vec& {
            return layer == 0 ? cache.x_cand[t] : cache.concat[layer - 1][t];
        };
        for (size_t dir = 0; dir < 2; ++dir) {
            auto& steps = cache.steps[layer * 2 + dir];
            steps.resize(T);
            const CellParams& cell = p.cells[layer][dir];
            Vec h(H, 0.0);
            for (size_t i = 0; i < T; ++i) {
                const size_t t = dir == 0 ? i : T - 1 - i;
                steps[t] = cell_forward(cell, cfg.cell, input_of(t), cand_input_of(t), h);
                h = steps[t].h;
            }
        }
        auto& concat = cache.concat[layer];
        concat.assign(T, Vec(2 * H));
        for (size_t t = 0; t < T; ++t) {
            const Vec& hf = cache.steps[layer * 2][t].h;
            const Vec& hb = cache.steps[layer * 2 + 1][t].h;
            std::copy(hf.begin(), hf.end(), concat[t].begin());
            std::copy(hb.begin(), hb.end(), concat[t].begin() + static_cast<long>(H));
        }
    }

    out.logp = Tensor(T, cfg.n_classes);
    cache.probs = Tensor(T, cfg.n_classes);
    const auto& top = cache.concat[cfg.layers - 1];
    for (size_t t = 0; t < T; ++t) {
        double* row = out.logp.row(t);
        matvec(p.output_w, top[t], {row, cfg.n_classes});
        axpy(1.0, p.output_b, {row, cfg.n_classes});
        log_softmax_row(row, cfg.n_classes);
        double* prow = cache.probs.row(t);
        for (size_t c = 0; c < cfg.n_classes; ++c) prow[c] = std::exp(row[c]);
    }
    return out;
}

Tensor network_predict(const NetworkParams& p, const EncodedSequence& input) {
    const NetworkConfig& cfg = p.config;
    const size_t T = input.length();
    check(T > 0, "network_predict: empty sequence");
    const bool embedded = cfg.input == InputKind::embedded;
    check(embedded ? !input.steps.empty() : !input.raw.empty(),
          "network_predict: input encoding does not match the model's input kind");
    const size_t H = cfg.hidden;

    std::vector<Vec> below(T), below_cand(T);
    for (size_t t = 0; t < T; ++t) {
        if (embedded) {
            embed_step(p, input.steps[t], below[t], below_cand[t]);
        } else {
            check(input.raw[t].size() == cfg.n_features, "input: raw feature count mismatch");
            below[t] = input.raw[t];
            below_cand[t] = input.raw[t];
        }
    }

    for (size_t layer = 0; layer < cfg.layers; ++layer) {
        std::vector<Vec> states(T, Vec(2 * H));
        for (size_t dir = 0; dir < 2; ++dir) {
            const CellParams& cell = p.cells[layer][dir];
            Vec h(H, 0.0);
            for (size_t i = 0; i < T; ++i) {
                const size_t t = dir == 0 ? i : T - 1 - i;
                const Vec& xg = below[t];
                const Vec& xc = layer == 0 ? below_cand[t] : below[t];
                h = cell_forward(cell, cfg.cell, xg, xc, h).h;
                std::copy(h.begin(), h.end(), states[t].begin() + static_cast<long>(dir * H));
            }
        }
        below = std::move(states);
    }

    Tensor logp(T, cfg.n_classes);
    for (size_t t = 0; t < T; ++t) {
        double* row = logp.row(t);
        matvec(p.output_w, below[t], {row, cfg.n_classes});
        axpy(1.0, p.output_b, {row, cfg.n_classes});
        log_softmax_row(row, cfg.n_classes);
    }
    return logp;
}

double sequence_loss(const Tensor& logp, const std::vector<size_t>& labels) {
    check(logp.rows == labels.size() && logp.rows > 0, "sequence_loss: length mismatch");
    double sum = 0.0;
    for (size_t t = 0; t < logp.rows; ++t) {
        check(labels[t] < logp.cols, "sequence_loss: label out of range");
        sum -= logp.at(t, labels[t]);
    }
    return sum / static_cast<double>(logp.rows);
}

void network_backward(const NetworkParams& p, const NetworkForward& fwd,
                      const std::vector<size_t>& labels, NetworkParams& grads, double scale) {
    const NetworkConfig& cfg = p.config;
    const NetworkCache& cache = fwd.cache;
    const size_t T = fwd.logp.rows;
    check(labels.size() == T, "network_backward: cache/label length mismatch");
    if (scale < 0.0) scale = 1.0 / static_cast<double>(T);
    const size_t H = cfg.hidden;
    const size_t C = cfg.n_classes;

    // Output layer.
    std::vector<Vec> dconcat(T, Vec(2 * H, 0.0));
    Vec dlogits(C);
    const auto& top = cache.concat[cfg.layers - 1];
    for (size_t t = 0; t < T; ++t) {
        check(labels[t] < C, "network_backward: label out of range");
        const double* prow = cache.probs.row(t);
        for (size_t c = 0; c < C; ++c) dlogits[c] = scale * prow[c];
        dlogits[labels[t]] -= scale;
        outer_acc(grads.output_w, dlogits, top[t]);
        axpy(1.0, dlogits, grads.output_b);
        matvec_transposed_acc(p.output_w, dlogits, dconcat[t]);
    }

    // Layers, top down. dconcat holds the gradient flowing into this
    // layer's concatenated states; dbelow collects the one for the layer
    // beneath (or the embeddings at layer 0).
    for (size_t layer = cfg.layers; layer-- > 0;) {
        std::vector<Vec> dbelow;
        const bool to_embeddings = layer == 0;
        if (!to_embeddings) dbelow.assign(T, Vec(2 * H, 0.0));
        std::vector<Vec> dx_gate, dx_cand;
        if (to_embeddings && cfg.input == InputKind::embedded) {
            dx_gate.assign(T, Vec(cfg.embedding_dim, 0.0));
            dx_cand.assign(T, Vec(cfg.embedding_dim, 0.0));
        }
        Vec sink(cfg.layer_input_dim(layer), 0.0); // raw-input gradients are discarded

        for (size_t dir = 0; dir < 2; ++dir) {
            const auto& steps = cache.steps[layer * 2 + dir];
            const CellParams& cell = p.cells[layer][dir];
            CellParams& gcell = grads.cells[layer][dir];
            Vec carry(H, 0.0), carry_next(H);
            Vec dh(H);
            for (size_t i = 0; i < T; ++i) {
                // Direction 0 depends on the past: walk time backwards.
                // Direction 1 depends on the future: walk time forwards.
                const size_t t = dir == 0 ? T - 1 - i : i;
                for (size_t u = 0; u < H; ++u) dh[u] = dconcat[t][dir * H + u] + carry[u];
                std::fill(carry_next.begin(), carry_next.end(), 0.0);
                if (!to_embeddings) {
                    cell_backward(cell, cfg.cell, steps[t], dh, gcell, carry_next, dbelow[t],
                                  dbelow[t]);
                } else if (cfg.input == InputKind::embedded) {
                    cell_backward(cell, cfg.cell, steps[t], dh, gcell, carry_next, dx_gate[t],
                                  dx_cand[t]);
                } else {
                    std::fill(sink.begin(), sink.end(), 0.0);
                    cell_backward(cell, cfg.cell, steps[t], dh, gcell, carry_next, sink, sink);
                }
                std::swap(carry, carry_next);
            }
        }

        if (to_embeddings && cfg.input == InputKind::embedded) {
            // Route input gradients into the selected embedding rows.
            for (size_t t = 0; t < T; ++t) {
                for (size_t f = 0; f < cfg.n_features; ++f) {
                    for (const BinWeight& bw : cache.encoding[t][f]) {
                        double* grow = grads.gate_embedding.per_feature[f].row(bw.index);
                        double* crow = grads.cand_embedding.per_feature[f].row(bw.index);
                        const size_t dim = cfg.embedding_dim;
                        for (size_t c = 0; c < dim; ++c) grow[c] += bw.weight * dx_gate[t][c];
                        for (size_t c = 0; c < dim; ++c) crow[c] += bw.weight * dx_cand[t][c];
                    }
                }
            }
        }
        if (!to_embeddings) dconcat = std::move(dbelow);
    }
}

std::vector<ParamRef> collect_params(NetworkParams& p) {
    std::vector<ParamRef> out;
    auto add_tensor = [&](const std::string& name, Tensor& t) {
        out.push_back({name, t.v.data(), t.rows, t.cols});
    };
    auto add_vec = [&](const std::string& name, Vec& v) {
        out.push_back({name, v.data(), v.size(), 1});
    };
    if (p.config.input == InputKind::embedded) {
        for (size_t f = 0; f < p.gate_embedding.per_feature.size(); ++f)
            add_tensor("embed.gate.f" + std::to_string(f), p.gate_embedding.per_feature[f]);
        for (size_t f = 0; f < p.cand_embedding.per_feature.size(); ++f)
            add_tensor("embed.cand.f" + std::to_string(f), p.cand_embedding.per_feature[f]);
    }
    for (size_t layer = 0; layer < p.cells.size(); ++layer) {
        for (size_t dir = 0; dir < 2; ++dir) {
            const std::string base =
                "l" + std::to_string(layer) + (dir == 0 ? ".fwd." : ".bwd.");
            CellParams& cell = p.cells[layer][dir];
            add_tensor(base + "U_g", cell.U_g);
            add_tensor(base + "W_g", cell.W_g);
            add_vec(base + "b_g", cell.b_g);
            for (size_t j = 0; j < cell.pieces.size(); ++j) {
                const std::string pbase = base + "p" + std::to_string(j) + ".";
                add_tensor(pbase + "U", cell.pieces[j].U);
                add_tensor(pbase + "W_c", cell.pieces[j].W_c);
                add_vec(pbase + "b", cell.pieces[j].b);
            }
        }
    }
    add_tensor("out.W", p.output_w);
    add_vec("out.b", p.output_b);
    return out;
}

} // namespace trackmode
