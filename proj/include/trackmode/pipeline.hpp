#ifndef TRACKMODE_PIPELINE_HPP
#define TRACKMODE_PIPELINE_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trackmode/config.hpp"
#include "trackmode/discretize.hpp"
#include "trackmode/eval.hpp"
#include "trackmode/train.hpp"

namespace trackmode {

/// A trained artifact: resolved configuration, fitted discretizers, the
/// person split it was trained under, and the network weights.
struct Model {
    PipelineConfig config;
    std::vector<CutPoints> cuts; // one per feature; empty in raw-input mode
    DatasetSplit split;
    NetworkParams params;
};

/// Feature component f of [v_p, v_avg, v_sd].
double feature_value(const FeatureVector& fv, size_t f);

/// Fit per-feature cut points on the training-split rows: equal-width over
/// the observed min/max, or entropy-based with `bins` as the cap. Fuzzy
/// discretization shares the equal-width boundaries.
std::vector<CutPoints> fit_cutpoints(const std::vector<FeatureSequence>& features,
                                     const std::set<std::string>& train_persons,
                                     const PipelineConfig& config);

NetworkConfig network_config_from(const PipelineConfig& config,
                                  const std::vector<CutPoints>& cuts);

/// Features -> network input under the model's discretization (or raw).
EncodedSequence encode_sequence(const FeatureSequence& seq, const std::vector<CutPoints>& cuts,
                                const PipelineConfig& config);

/// Encoded sequences for the persons in `subset`, in person-id order.
std::vector<TrainSequence> encode_subset(const std::vector<FeatureSequence>& features,
                                         const std::set<std::string>& subset,
                                         const std::vector<CutPoints>& cuts,
                                         const PipelineConfig& config);

struct TrainedModel {
    Model model;
    std::vector<EpochLog> log;
    size_t best_epoch = 0;
};

/// Full training stage: stratified split, discretizer fit, network init,
/// training with early stopping.
TrainedModel train_pipeline(const std::vector<FeatureSequence>& features,
                            const PipelineConfig& config,
                            const std::function<void(const EpochLog&)>& on_epoch = nullptr);

/// Per-person predictions of a model over feature sequences.
struct SequencePrediction {
    std::string person_id;
    std::vector<size_t> predicted; // class indices
    double nll_sum = 0.0;          // -sum log p(target)
};

std::vector<SequencePrediction> predict_sequences(const Model& model,
                                                  const std::vector<FeatureSequence>& features,
                                                  const std::set<std::string>* filter = nullptr);

/// Metrics over the given persons. When `coords` provides the matching
/// trajectories, A_distance is computed with the model's segmentation;
/// otherwise it is reported unavailable.
Metrics compute_metrics(const Model& model, const std::vector<FeatureSequence>& features,
                        const std::vector<SequencePrediction>& predictions,
                        const std::vector<LabeledTrajectory>* coords = nullptr);

/// Point-per-point GeoJSON export of predictions, colored by predicted
/// mode; misclassified points are black and flagged.
void write_geojson(std::ostream& out, const Model& model,
                   const std::vector<LabeledTrajectory>& coords,
                   const std::vector<SequencePrediction>& predictions);

void write_learning_curve(std::ostream& out, const std::vector<EpochLog>& log,
                          const std::vector<std::string>& header_lines = {});

} // namespace trackmode

#endif // TRACKMODE_PIPELINE_HPP
