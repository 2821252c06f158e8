#ifndef TRACKMODE_CONFIG_HPP
#define TRACKMODE_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "trackmode/geo.hpp"
#include "trackmode/preprocess.hpp"
#include "trackmode/rnn.hpp"
#include "trackmode/train.hpp"

namespace trackmode {

enum class DiscretizationKind { width, entropy, fuzzy };

const char* discretization_kind_name(DiscretizationKind k);
bool parse_discretization_kind(const std::string& name, DiscretizationKind& out);

/// Every tunable of the pipeline, with defaults matching the per-module
/// choices. Loadable from a plain `key = value` text file; unknown keys are
/// rejected so typos fail loudly.
struct PipelineConfig {
    ClassSet::Kind class_set = ClassSet::four;

    // preprocess
    SegmentationStrategy segmentation{SegmentationKind::bearing, 30.0};
    HampelConfig hampel{3, 3.0, true};
    size_t feature_count = 3; // prefix of [v_p, v_avg, v_sd]

    // discretize + embed
    DiscretizationKind discretization = DiscretizationKind::width;
    size_t bins = 20;
    double fuzzy_overlap = 0.2;
    size_t embedding_dim = 50;

    // network
    size_t hidden = 50;
    size_t layers = 2;
    size_t pieces = 5;
    CellKind cell = CellKind::maxout;
    InputKind input = InputKind::embedded;
    uint64_t init_seed = 1;

    // training
    TrainConfig train;

    // split
    SplitSizes split_sizes{16, 1, 6};
    uint64_t split_seed = 42;
    size_t split_candidates = 10000;

    // evaluation
    size_t eval_window = 5000;

    // synthetic data
    size_t synth_persons = 20;
    size_t synth_points = 5000;
    double synth_interval_s = 2.0;
    double synth_dwell = 200.0;
    uint64_t synth_seed = 7;

    ClassSet classes() const { return ClassSet(class_set); }
    std::vector<std::string> feature_names() const;
    void validate() const; // throws ConfigError

    /// Flat key/value view of every field, in file order.
    std::vector<std::pair<std::string, std::string>> to_kv() const;
    /// Apply one key/value; throws ConfigError on unknown key or bad value.
    void apply(const std::string& key, const std::string& value);
};

/// Parse a `key = value` config file ('#' comments, blank lines allowed).
/// Returns the config and the verbatim file lines for provenance echoing.
PipelineConfig load_config_file(std::istream& in, std::vector<std::string>* verbatim = nullptr);

void write_config(std::ostream& out, const PipelineConfig& config);

} // namespace trackmode

#endif // TRACKMODE_CONFIG_HPP
