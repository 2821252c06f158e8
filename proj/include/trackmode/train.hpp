#ifndef TRACKMODE_TRAIN_HPP
#define TRACKMODE_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "trackmode/rnn.hpp"

namespace trackmode {

struct TrainConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    size_t chunk_length = 100; // BPTT truncation window
    size_t batch_size = 32;
    size_t max_epochs = 100;
    size_t patience = 5; // early-stopping window, in epochs
    double grad_clip = 0.0; // global L2 norm cap; 0 disables
    uint64_t seed = 1;

    void validate() const;
};

/// Adam first/second-moment accumulators, shaped like the parameters.
struct OptimizerState {
    NetworkParams m;
    NetworkParams v;
    size_t step = 0;
};

OptimizerState make_optimizer_state(const NetworkParams& params);

/// One bias-corrected Adam update over every parameter tensor.
void adam_step(NetworkParams& params, NetworkParams& grads, OptimizerState& state,
               const TrainConfig& config);

/// Scale gradients so their global L2 norm is at most max_norm (no-op when
/// already within, or when max_norm <= 0).
void clip_gradients(NetworkParams& grads, double max_norm);

/// One labeled training sequence (per-point class indices).
struct TrainSequence {
    EncodedSequence input;
    std::vector<size_t> labels;
};

/// A chunk is a [begin, end) window of one sequence.
struct ChunkRef {
    size_t sequence = 0;
    size_t begin = 0;
    size_t end = 0;
};

/// Split every sequence into consecutive chunk_length windows (last may be
/// short), shuffle deterministically for the given epoch, and group into
/// batches.
std::vector<std::vector<ChunkRef>> chunk_sequences(const std::vector<TrainSequence>& dataset,
                                                   size_t chunk_length, size_t batch_size,
                                                   uint64_t seed, size_t epoch);

/// Validation-driven early stopping: keeps the best value seen and counts
/// epochs without improvement.
class EarlyStopper {
public:
    explicit EarlyStopper(size_t patience) : patience_(patience) {}

    /// Returns true when this value improves on the best so far.
    bool observe(double value);
    bool should_stop() const { return patience_ > 0 && stale_ >= patience_; }
    size_t best_epoch() const { return best_epoch_; }
    double best_value() const { return best_value_; }

private:
    size_t patience_;
    size_t stale_ = 0;
    size_t observed_ = 0;
    size_t best_epoch_ = 0;
    double best_value_ = 0.0;
    bool has_best_ = false;
};

struct EpochLog {
    size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_point_accuracy = 0.0;
};

struct TrainResult {
    NetworkParams best_params;
    std::vector<EpochLog> log;
    size_t best_epoch = 0; // 1-based epoch of the returned snapshot
};

/// Mini-batch training with truncated BPTT, Adam updates and
/// validation-based early stopping. Returns the parameter snapshot with the
/// lowest validation loss plus the full learning curve. Throws
/// DivergenceError when the loss turns non-finite.
TrainResult train_network(const std::vector<TrainSequence>& train_set,
                          const std::vector<TrainSequence>& validation_set,
                          NetworkParams params, const TrainConfig& config,
                          const std::function<void(const EpochLog&)>& on_epoch = nullptr);

/// Mean per-point cross-entropy and point accuracy over whole sequences,
/// evaluated in windows of eval_window points (state resets per window).
std::pair<double, double> evaluate_loss_accuracy(const NetworkParams& params,
                                                 const std::vector<TrainSequence>& data,
                                                 size_t eval_window = 5000);

} // namespace trackmode

#endif // TRACKMODE_TRAIN_HPP
