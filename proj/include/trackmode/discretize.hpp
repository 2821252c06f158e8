#ifndef TRACKMODE_DISCRETIZE_HPP
#define TRACKMODE_DISCRETIZE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace trackmode {

/// Interval boundaries over a feature domain [lower, upper]: n cuts define
/// n+1 half-open intervals [lower,c1) ... [cn,upper].
struct CutPoints {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> cuts; // strictly increasing, inside (lower, upper)

    size_t n_bins() const { return cuts.size() + 1; }
    void validate() const; // throws std::invalid_argument on violated invariants
};

struct FuzzyConfig {
    double overlap_fraction = 0.2; // in (0, 0.5)
};

/// Labeled scalar sample; y is a class index below n_classes.
struct LabeledSample {
    double x = 0.0;
    size_t y = 0;
};

struct EmpiricalConditional {
    std::vector<LabeledSample> samples;
    size_t n_classes = 0;
};

/// n_bins equal-width intervals over [lower, upper].
CutPoints fit_equal_width(double lower, double upper, size_t n_bins);

/// Recursive minimal-entropy partitioning: repeatedly apply the
/// information-gain-maximizing boundary (midpoint between adjacent distinct
/// values with differing class distributions) until the MDL acceptance
/// criterion rejects every remaining split or n_bins reaches max_bins.
/// Splits are applied best-gain-first; ties break toward the smaller cut.
CutPoints fit_rmep(const EmpiricalConditional& data, size_t max_bins);

/// Index of the interval containing x; values outside [lower, upper] clamp
/// to the end intervals.
size_t bin_index(double x, const CutPoints& cuts);

/// Trapezoidal soft assignment: weight 1 inside the central
/// (1 - 2*overlap_fraction) portion of an interval; inside the band around
/// a cut the weight ramps linearly, reaching 0.5/0.5 exactly at the cut.
/// Non-negative, sums to 1, at most two nonzero entries.
std::vector<double> fuzzy_memberships(double x, const CutPoints& cuts, const FuzzyConfig& config);

/// Constructive finite partition under which every class's empirical
/// conditional CDF increases by at most epsilon across each interval
/// (point masses excepted): scanning sorted x, a cut lands just before the
/// first sample at which any class's CDF exceeds its value at the previous
/// cut by more than epsilon.
CutPoints epsilon_partition(const EmpiricalConditional& data, double epsilon);

} // namespace trackmode

#endif // TRACKMODE_DISCRETIZE_HPP
