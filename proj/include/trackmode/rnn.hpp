#ifndef TRACKMODE_RNN_HPP
#define TRACKMODE_RNN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trackmode/embed.hpp"
#include "trackmode/tensor.hpp"

namespace trackmode {

/// Candidate-state activation of a recurrent cell: `gru` is the tanh
/// candidate; `maxout` takes the element-wise max of k linear pieces.
enum class CellKind { gru, maxout };

enum class InputKind { embedded, raw };

const char* cell_kind_name(CellKind k);
bool parse_cell_kind(const std::string& name, CellKind& out);
const char* input_kind_name(InputKind k);
bool parse_input_kind(const std::string& name, InputKind& out);

/// Classic gated recurrent unit parameters: stacked reset/update gates fed
/// by U_g/W_g and a tanh candidate fed by U/W_c. Biases default to zero so
/// the plain cell matches the bias-free equations exactly.
struct GruParams {
    Tensor U_g; // 2H x D, rows [0,H) reset, [H,2H) update
    Tensor W_g; // 2H x H
    Tensor U;   // H x D
    Tensor W_c; // H x H
    Vec b_g;    // 2H
    Vec b_c;    // H

    size_t hidden() const { return U.rows; }
    size_t input_dim() const { return U.cols; }
};

/// Maxout variant: the candidate is the element-wise maximum of k linear
/// transformations (no squashing).
struct MaxoutGruParams {
    struct Piece {
        Tensor U;   // H x D
        Tensor W_c; // H x H
        Vec b;      // H
    };
    Tensor U_g; // 2H x D
    Tensor W_g; // 2H x H
    Vec b_g;    // 2H
    std::vector<Piece> pieces;

    size_t hidden() const { return W_g.cols; }
    size_t input_dim() const { return U_g.cols; }
    size_t k() const { return pieces.size(); }
};

/// Cached activations of one cell step, enough to run the exact backward
/// pass. Gate and candidate paths may receive different input vectors
/// (decoupled embeddings); plain use passes the same vector twice.
struct CellStep {
    Vec x_gate, x_cand;
    Vec h_prev;
    Vec r, z;            // gate activations
    Vec rh;              // r ⊙ h_prev
    Vec cand;            // post-activation candidate
    std::vector<int32_t> argmax; // winning piece per unit (maxout only)
    Vec h;
};

/// Unified cell used by the network; for kind == gru there is exactly one
/// piece and tanh is applied to its output.
struct CellParams {
    Tensor U_g;
    Tensor W_g;
    Vec b_g;
    std::vector<MaxoutGruParams::Piece> pieces;

    size_t hidden() const { return W_g.cols; }
};

CellStep cell_forward(const CellParams& p, CellKind kind, const Vec& x_gate, const Vec& x_cand,
                      const Vec& h_prev);

/// Exact gradients for one step. Parameter gradients accumulate into
/// `grads`; input-side gradients accumulate into dh_prev/dx_gate/dx_cand.
void cell_backward(const CellParams& p, CellKind kind, const CellStep& step, const Vec& dh,
                   CellParams& grads, Vec& dh_prev, Vec& dx_gate, Vec& dx_cand);

/// Eq.-style GRU step (tanh candidate). Returns the new cell state.
Vec gru_cell(const Vec& x, const Vec& h_prev, const GruParams& p);

/// Maxout GRU step. Returns the new cell state; ties between pieces break
/// toward the lowest piece index.
Vec maxout_gru_cell(const Vec& x, const Vec& h_prev, const MaxoutGruParams& p);

CellParams to_cell_params(const GruParams& p);
CellParams to_cell_params(const MaxoutGruParams& p);

/// Whole-model configuration.
struct NetworkConfig {
    size_t n_features = 3;
    size_t n_classes = 4;
    size_t embedding_dim = 50;
    size_t hidden = 50;
    size_t pieces = 5;
    size_t layers = 2;
    CellKind cell = CellKind::maxout;
    InputKind input = InputKind::embedded;
    std::vector<size_t> feature_bins; // embedded mode: intervals per feature

    /// Input width of a layer's cells: embeddings (or raw features) feed
    /// layer 0; the 2H concatenated states feed the layers above.
    size_t layer_input_dim(size_t layer) const;
    void validate() const;
};

/// All weights of the two-layer bidirectional model: decoupled gate/candidate
/// embedding tables, per-layer per-direction cells, and the softmax
/// projection over the top layer's concatenated states.
struct NetworkParams {
    NetworkConfig config;
    EmbeddingTable gate_embedding; // embedded mode only
    EmbeddingTable cand_embedding;
    std::vector<std::array<CellParams, 2>> cells; // [layer][0=fwd, 1=bwd]
    Tensor output_w;                              // C x 2H
    Vec output_b;                                 // C
};

/// Uniform [0, 0.001] initialization of every weight; biases zero.
NetworkParams init_network(const NetworkConfig& cfg, uint64_t seed);

/// Same shapes, all values zero (gradient / optimizer-state container).
NetworkParams zero_like(const NetworkParams& p);

/// Weighted interval indicator: hard assignments carry one entry of weight
/// 1; fuzzy assignments carry up to two entries summing to 1.
struct BinWeight {
    uint32_t index = 0;
    double weight = 1.0;
};

/// One input sequence in either encoding.
struct EncodedSequence {
    // embedded mode: [step][feature][<=2 weighted bins]
    std::vector<std::vector<std::vector<BinWeight>>> steps;
    // raw mode: [step][feature values]
    std::vector<Vec> raw;

    size_t length() const { return steps.empty() ? raw.size() : steps.size(); }

    static EncodedSequence from_indices(const std::vector<std::vector<size_t>>& indices);
};

/// Per-step activations retained for backpropagation through time.
struct NetworkCache {
    std::vector<std::vector<std::vector<BinWeight>>> encoding; // embedded-mode selections
    std::vector<Vec> x_gate, x_cand;          // [t] layer-0 inputs
    std::vector<std::vector<CellStep>> steps; // [layer*2+dir][t]
    std::vector<std::vector<Vec>> concat;     // [layer][t] flattened 2H states
    Tensor probs;                             // T x C softmax outputs
};

struct NetworkForward {
    Tensor logp; // T x C per-step log-probabilities
    NetworkCache cache;
};

/// Full forward pass with cached activations.
NetworkForward network_forward(const NetworkParams& p, const EncodedSequence& input);

/// Forward pass without caches; keeps only per-layer states and outputs.
Tensor network_predict(const NetworkParams& p, const EncodedSequence& input);

/// Mean per-step cross-entropy of targets under per-step log-probabilities.
double sequence_loss(const Tensor& logp, const std::vector<size_t>& labels);

/// Exact gradients of (scale * summed cross-entropy) for every parameter,
/// accumulated into `grads`. scale < 0 selects the per-sequence mean (1/T).
void network_backward(const NetworkParams& p, const NetworkForward& fwd,
                      const std::vector<size_t>& labels, NetworkParams& grads,
                      double scale = -1.0);

/// Name + shape + storage of one parameter tensor; collect_params yields
/// every learnable tensor in a fixed, documented order.
struct ParamRef {
    std::string name;
    double* data;
    size_t rows, cols;

    size_t size() const { return rows * cols; }
};

std::vector<ParamRef> collect_params(NetworkParams& p);

} // namespace trackmode

#endif // TRACKMODE_RNN_HPP
