#ifndef TRACKMODE_PREPROCESS_HPP
#define TRACKMODE_PREPROCESS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "trackmode/ingest.hpp"

namespace trackmode {

/// Half-open index range [begin, end) into a trajectory.
struct IndexRange {
    size_t begin = 0;
    size_t end = 0;

    size_t size() const { return end - begin; }
};

enum class SegmentationKind { time, distance, bearing, window };

const char* segmentation_kind_name(SegmentationKind k);
bool parse_segmentation_kind(const std::string& name, SegmentationKind& out);

/// How to cut a trajectory into segments. The parameter unit depends on
/// kind: seconds (time), meters (distance), degrees (bearing) or point
/// count (window).
struct SegmentationStrategy {
    SegmentationKind kind = SegmentationKind::bearing;
    double parameter = 30.0;
};

/// Per-point continuous features.
struct FeatureVector {
    double v_p = 0.0;   // point speed, m/s
    double v_avg = 0.0; // mean speed of the enclosing segment
    double v_sd = 0.0;  // population SD of speed in the enclosing segment
};

struct HampelConfig {
    size_t window_half_width = 3;
    double n_mad = 3.0;
    bool enabled = true;
};

/// Sliding-window outlier replacement: values farther than
/// n_mad * 1.4826 * MAD from the window median become the window median.
/// Windows are centered and truncated at the series boundaries.
std::vector<double> hampel_filter(const std::vector<double>& series, size_t window_half_width,
                                  double n_mad);

/// Disjoint, covering, order-preserving segment ranges for one trajectory.
std::vector<IndexRange> segment(const LabeledTrajectory& traj,
                                const SegmentationStrategy& strategy);

/// Mean and population SD of the consecutive point speeds inside `range`.
/// Single-point ranges yield (0, 0).
std::pair<double, double> segment_stats(const LabeledTrajectory& traj, const IndexRange& range);

/// Mean/population-SD over speeds[range.begin .. range.end-2], i.e. the
/// per-point speed series restricted to legs inside the segment.
std::pair<double, double> segment_stats_from_speeds(const std::vector<double>& speeds,
                                                    const IndexRange& range);

/// Full per-point feature extraction: point speeds (the last point copies
/// its predecessor), Hampel filtering, then segment stats computed over the
/// filtered speeds and broadcast to every point of the segment.
std::vector<FeatureVector> featurize(const LabeledTrajectory& traj,
                                     const SegmentationStrategy& strategy,
                                     const HampelConfig& filter);

/// One row of the feature file: `person_id,t,v_p,v_avg,v_sd,mode`.
struct FeatureRecord {
    std::string person_id;
    double t = 0.0;
    FeatureVector features;
    Mode mode = Mode::walk;
};

void write_features(std::ostream& out, const std::vector<FeatureRecord>& records,
                    const std::vector<std::string>& header_lines = {});
std::vector<FeatureRecord> read_features(std::istream& in, const ClassSet& classes);

/// Feature rows for one person, in time order.
struct FeatureSequence {
    std::string person_id;
    std::vector<double> t;
    std::vector<FeatureVector> features;
    std::vector<Mode> labels;

    size_t size() const { return features.size(); }
};

std::vector<FeatureSequence> group_features_by_person(std::vector<FeatureRecord> records);

} // namespace trackmode

#endif // TRACKMODE_PREPROCESS_HPP
