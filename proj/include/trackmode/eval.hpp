#ifndef TRACKMODE_EVAL_HPP
#define TRACKMODE_EVAL_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trackmode/geo.hpp"
#include "trackmode/preprocess.hpp"
#include "trackmode/tensor.hpp"

namespace trackmode {

/// Row = target class, column = predicted class.
struct ConfusionMatrix {
    size_t n_classes = 0;
    std::vector<uint64_t> counts;

    explicit ConfusionMatrix(size_t n = 0) : n_classes(n), counts(n * n, 0) {}
    uint64_t& at(size_t target, size_t predicted) { return counts[target * n_classes + predicted]; }
    uint64_t at(size_t target, size_t predicted) const {
        return counts[target * n_classes + predicted];
    }
    void add(size_t target, size_t predicted) { ++at(target, predicted); }
    uint64_t total() const;
    uint64_t trace() const;
};

ConfusionMatrix confusion_from(const std::vector<size_t>& targets,
                               const std::vector<size_t>& predictions, size_t n_classes);

/// Fraction of points predicted correctly.
double point_accuracy(const std::vector<size_t>& targets, const std::vector<size_t>& predictions);

/// Accuracy where each point carries the haversine length of its forward
/// leg within its segment (the last point of a segment weighs zero).
/// Throws when the total weight is zero.
double distance_accuracy(const std::vector<GpsPoint>& points,
                         const std::vector<IndexRange>& segments,
                         const std::vector<size_t>& targets,
                         const std::vector<size_t>& predictions);

/// Mean negative log-probability of the target, in nats. Rows must be
/// normalized log-probabilities (sum of exp within 1e-6 of 1).
double cross_entropy(const std::vector<size_t>& targets, const Tensor& logp);

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct F1Report {
    std::vector<ClassScore> per_class;
    double average_f1 = 0.0; // unweighted mean over classes
};

/// Per-class precision/recall/F1 with zero-denominator convention 0.
F1Report f1_report(const ConfusionMatrix& confusion);

/// Everything the metrics report carries.
struct Metrics {
    ConfusionMatrix confusion;
    double a_point = 0.0;
    double a_distance = -1.0; // < 0 when coordinates were unavailable
    double e_h = 0.0;
    F1Report f1;
};

/// Render the report: confusion matrix with per-class recall, precision and
/// F1 rows, then the four summary measures.
void write_metrics_report(std::ostream& out, const Metrics& metrics, const ClassSet& classes,
                          const std::vector<std::string>& header_lines = {});

} // namespace trackmode

#endif // TRACKMODE_EVAL_HPP
