#include "trackmode/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trackmode/error.hpp"
#include "trackmode/rng.hpp"

namespace trackmode {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("train: beta1 in (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("train: beta2 in (0,1)");
    if (!(adam_epsilon > 0.0)) throw std::invalid_argument("train: adam_epsilon > 0");
    if (chunk_length < 1) throw std::invalid_argument("train: chunk_length >= 1");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size >= 1");
    if (max_epochs < 1) throw std::invalid_argument("train: max_epochs >= 1");
}

OptimizerState make_optimizer_state(const NetworkParams& params) {
    return {zero_like(params), zero_like(params), 0};
}

void adam_step(NetworkParams& params, NetworkParams& grads, OptimizerState& state,
               const TrainConfig& config) {
    auto prefs = collect_params(params);
    auto grefs = collect_params(grads);
    auto mrefs = collect_params(state.m);
    auto vrefs = collect_params(state.v);
    if (prefs.size() != grefs.size() || prefs.size() != mrefs.size() ||
        prefs.size() != vrefs.size())
        throw std::invalid_argument("adam: parameter/gradient shape mismatch");

    ++state.step;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (size_t i = 0; i < prefs.size(); ++i) {
        if (prefs[i].size() != grefs[i].size())
            throw std::invalid_argument("adam: tensor shape mismatch");
        double* theta = prefs[i].data;
        const double* g = grefs[i].data;
        double* m = mrefs[i].data;
        double* v = vrefs[i].data;
        const size_t n = prefs[i].size();
        for (size_t k = 0; k < n; ++k) {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            const double m_hat = m[k] / bias1;
            const double v_hat = v[k] / bias2;
            theta[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
        }
    }
}

void clip_gradients(NetworkParams& grads, double max_norm) {
    if (max_norm <= 0.0) return;
    double sq = 0.0;
    auto refs = collect_params(grads);
    for (const auto& r : refs)
        for (size_t k = 0; k < r.size(); ++k) sq += r.data[k] * r.data[k];
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    const double scale = max_norm / norm;
    for (const auto& r : refs)
        for (size_t k = 0; k < r.size(); ++k) r.data[k] *= scale;
}

std::vector<std::vector<ChunkRef>> chunk_sequences(const std::vector<TrainSequence>& dataset,
                                                   size_t chunk_length, size_t batch_size,
                                                   uint64_t seed, size_t epoch) {
    if (chunk_length < 1) throw std::invalid_argument("chunk_sequences: chunk_length >= 1");
    if (batch_size < 1) throw std::invalid_argument("chunk_sequences: batch_size >= 1");
    if (dataset.empty()) throw std::invalid_argument("chunk_sequences: empty dataset");
    std::vector<ChunkRef> chunks;
    for (size_t s = 0; s < dataset.size(); ++s) {
        const size_t len = dataset[s].input.length();
        if (len != dataset[s].labels.size())
            throw std::invalid_argument("chunk_sequences: labels/input length mismatch");
        for (size_t b = 0; b < len; b += chunk_length)
            chunks.push_back({s, b, std::min(len, b + chunk_length)});
    }
    Rng rng(Rng::mix(seed, epoch));
    rng.shuffle(chunks);
    std::vector<std::vector<ChunkRef>> batches;
    for (size_t i = 0; i < chunks.size(); i += batch_size) {
        batches.emplace_back(chunks.begin() + static_cast<long>(i),
                             chunks.begin() + static_cast<long>(std::min(chunks.size(), i + batch_size)));
    }
    return batches;
}

bool EarlyStopper::observe(double value) {
    ++observed_;
    if (!has_best_ || value < best_value_) {
        best_value_ = value;
        best_epoch_ = observed_;
        has_best_ = true;
        stale_ = 0;
        return true;
    }
    ++stale_;
    return false;
}

namespace {

EncodedSequence slice_sequence(const EncodedSequence& seq, size_t begin, size_t end) {
    EncodedSequence out;
    if (!seq.steps.empty()) {
        out.steps.assign(seq.steps.begin() + static_cast<long>(begin),
                         seq.steps.begin() + static_cast<long>(end));
    } else {
        out.raw.assign(seq.raw.begin() + static_cast<long>(begin),
                       seq.raw.begin() + static_cast<long>(end));
    }
    return out;
}

} // namespace

std::pair<double, double> evaluate_loss_accuracy(const NetworkParams& params,
                                                 const std::vector<TrainSequence>& data,
                                                 size_t eval_window) {
    if (eval_window < 1) throw std::invalid_argument("evaluate: eval_window >= 1");
    double loss_sum = 0.0;
    size_t correct = 0;
    size_t total = 0;
    for (const auto& seq : data) {
        const size_t len = seq.input.length();
        for (size_t b = 0; b < len; b += eval_window) {
            const size_t e = std::min(len, b + eval_window);
            Tensor logp = network_predict(params, slice_sequence(seq.input, b, e));
            for (size_t t = 0; t < logp.rows; ++t) {
                const size_t y = seq.labels[b + t];
                loss_sum -= logp.at(t, y);
                const double* row = logp.row(t);
                size_t arg = 0;
                for (size_t c = 1; c < logp.cols; ++c)
                    if (row[c] > row[arg]) arg = c;
                correct += arg == y ? 1 : 0;
            }
            total += e - b;
        }
    }
    if (total == 0) throw std::invalid_argument("evaluate: no points");
    return {loss_sum / static_cast<double>(total),
            static_cast<double>(correct) / static_cast<double>(total)};
}

TrainResult train_network(const std::vector<TrainSequence>& train_set,
                          const std::vector<TrainSequence>& validation_set,
                          NetworkParams params, const TrainConfig& config,
                          const std::function<void(const EpochLog&)>& on_epoch) {
    config.validate();
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    if (validation_set.empty()) throw std::invalid_argument("train: empty validation set");

    OptimizerState opt = make_optimizer_state(params);
    NetworkParams grads = zero_like(params);
    TrainResult result;
    result.best_params = params;
    EarlyStopper stopper(config.patience);

    for (size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        auto batches = chunk_sequences(train_set, config.chunk_length, config.batch_size,
                                       config.seed, epoch);
        double epoch_loss_sum = 0.0;
        size_t epoch_points = 0;
        for (size_t b = 0; b < batches.size(); ++b) {
            const auto& batch = batches[b];
            size_t batch_points = 0;
            for (const ChunkRef& c : batch) batch_points += c.end - c.begin;
            const double scale = 1.0 / static_cast<double>(batch_points);

            for (auto& ref : collect_params(grads))
                std::fill(ref.data, ref.data + ref.size(), 0.0);
            double batch_loss_sum = 0.0;
            for (const ChunkRef& c : batch) {
                const auto& seq = train_set[c.sequence];
                EncodedSequence window = slice_sequence(seq.input, c.begin, c.end);
                std::vector<size_t> labels(seq.labels.begin() + static_cast<long>(c.begin),
                                           seq.labels.begin() + static_cast<long>(c.end));
                NetworkForward fwd = network_forward(params, window);
                batch_loss_sum +=
                    sequence_loss(fwd.logp, labels) * static_cast<double>(labels.size());
                network_backward(params, fwd, labels, grads, scale);
            }
            if (!std::isfinite(batch_loss_sum))
                throw DivergenceError("training loss is not finite", epoch, b + 1);
            clip_gradients(grads, config.grad_clip);
            adam_step(params, grads, opt, config);
            epoch_loss_sum += batch_loss_sum;
            epoch_points += batch_points;
        }

        auto [val_loss, val_acc] = evaluate_loss_accuracy(params, validation_set);
        if (!std::isfinite(val_loss))
            throw DivergenceError("validation loss is not finite", epoch, 0);
        EpochLog log{epoch, epoch_loss_sum / static_cast<double>(epoch_points), val_loss, val_acc};
        result.log.push_back(log);
        if (on_epoch) on_epoch(log);

        if (stopper.observe(val_loss)) {
            result.best_params = params;
            result.best_epoch = epoch;
        }
        if (stopper.should_stop()) break;
    }
    return result;
}

} // namespace trackmode
