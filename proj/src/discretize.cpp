#include "trackmode/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace trackmode {

namespace {

struct DistinctValue {
    double x;
    std::vector<size_t> class_counts;
    size_t total = 0;
};

std::vector<DistinctValue> distinct_values(const EmpiricalConditional& data) {
    std::vector<LabeledSample> sorted = data.samples;
    std::sort(sorted.begin(), sorted.end(),
              [](const LabeledSample& a, const LabeledSample& b) { return a.x < b.x; });
    std::vector<DistinctValue> out;
    for (const auto& s : sorted) {
        if (s.y >= data.n_classes) throw std::invalid_argument("sample class out of range");
        if (out.empty() || out.back().x != s.x) {
            out.push_back({s.x, std::vector<size_t>(data.n_classes, 0), 0});
        }
        ++out.back().class_counts[s.y];
        ++out.back().total;
    }
    return out;
}

double entropy_bits(const std::vector<size_t>& counts, size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

size_t classes_present(const std::vector<size_t>& counts) {
    size_t k = 0;
    for (size_t c : counts) k += c > 0 ? 1 : 0;
    return k;
}

// One leaf interval [lo, hi) over the distinct-value array plus its best split.
struct Leaf {
    size_t lo, hi;
    bool has_split = false;
    size_t split_pos = 0; // cut between values[split_pos-1] and values[split_pos]
    double gain = 0.0;
    bool mdl_ok = false;
};

Leaf evaluate_leaf(const std::vector<DistinctValue>& values, size_t lo, size_t hi) {
    Leaf leaf{lo, hi};
    const size_t n_classes = values[lo].class_counts.size();
    std::vector<size_t> all(n_classes, 0);
    size_t total = 0;
    for (size_t i = lo; i < hi; ++i) {
        for (size_t c = 0; c < n_classes; ++c) all[c] += values[i].class_counts[c];
        total += values[i].total;
    }
    const double h_all = entropy_bits(all, total);

    std::vector<size_t> left(n_classes, 0);
    size_t left_total = 0;
    double best_gain = -1.0;
    size_t best_pos = 0;
    std::vector<size_t> best_left;
    size_t best_left_total = 0;
    for (size_t pos = lo + 1; pos < hi; ++pos) {
        for (size_t c = 0; c < n_classes; ++c) left[c] += values[pos - 1].class_counts[c];
        left_total += values[pos - 1].total;
        // Candidate boundaries sit only between adjacent distinct values with
        // differing class distributions.
        if (values[pos - 1].class_counts == values[pos].class_counts) continue;
        std::vector<size_t> right(n_classes);
        for (size_t c = 0; c < n_classes; ++c) right[c] = all[c] - left[c];
        const size_t right_total = total - left_total;
        const double h_left = entropy_bits(left, left_total);
        const double h_right = entropy_bits(right, right_total);
        const double gain = h_all -
                            (static_cast<double>(left_total) / total) * h_left -
                            (static_cast<double>(right_total) / total) * h_right;
        if (gain > best_gain + 1e-15) { // strict improvement; ties keep the smaller cut
            best_gain = gain;
            best_pos = pos;
            best_left = left;
            best_left_total = left_total;
        }
    }
    if (best_gain < 0.0) return leaf; // no candidate boundary

    leaf.has_split = true;
    leaf.split_pos = best_pos;
    leaf.gain = best_gain;

    // Fayyad-Irani MDL acceptance for the best split.
    std::vector<size_t> right(n_classes);
    for (size_t c = 0; c < n_classes; ++c) right[c] = all[c] - best_left[c];
    const size_t right_total = total - best_left_total;
    const double k = static_cast<double>(classes_present(all));
    const double k1 = static_cast<double>(classes_present(best_left));
    const double k2 = static_cast<double>(classes_present(right));
    const double h1 = entropy_bits(best_left, best_left_total);
    const double h2 = entropy_bits(right, right_total);
    const double delta =
        std::log2(std::pow(3.0, k) - 2.0) - (k * entropy_bits(all, total) - k1 * h1 - k2 * h2);
    const double n = static_cast<double>(total);
    leaf.mdl_ok = best_gain > (std::log2(n - 1.0) + delta) / n;
    return leaf;
}

} // namespace

void CutPoints::validate() const {
    if (!(lower <= upper)) throw std::invalid_argument("cut points: lower > upper");
    for (size_t i = 0; i < cuts.size(); ++i) {
        if (!(cuts[i] > lower && cuts[i] < upper))
            throw std::invalid_argument("cut points must lie strictly inside (lower, upper)");
        if (i > 0 && !(cuts[i] > cuts[i - 1]))
            throw std::invalid_argument("cut points must strictly increase");
    }
}

CutPoints fit_equal_width(double lower, double upper, size_t n_bins) {
    if (!(lower < upper)) throw std::invalid_argument("equal-width: degenerate range");
    if (n_bins < 1) throw std::invalid_argument("equal-width: need at least one bin");
    CutPoints cp;
    cp.lower = lower;
    cp.upper = upper;
    const double width = (upper - lower) / static_cast<double>(n_bins);
    for (size_t k = 1; k < n_bins; ++k) cp.cuts.push_back(lower + width * static_cast<double>(k));
    cp.validate();
    return cp;
}

CutPoints fit_rmep(const EmpiricalConditional& data, size_t max_bins) {
    if (data.samples.size() < 2) throw std::invalid_argument("rmep: need at least 2 samples");
    if (max_bins < 1) throw std::invalid_argument("rmep: max_bins >= 1");
    auto values = distinct_values(data);

    CutPoints cp;
    cp.lower = values.front().x;
    cp.upper = values.back().x;
    if (values.size() < 2) return cp; // one distinct value: zero cuts

    std::vector<Leaf> leaves{evaluate_leaf(values, 0, values.size())};
    size_t bins = 1;
    std::vector<size_t> cut_positions;
    while (bins < max_bins) {
        // Best acceptable split across all leaves; ties toward smaller cut value.
        size_t best = leaves.size();
        for (size_t i = 0; i < leaves.size(); ++i) {
            if (!leaves[i].has_split || !leaves[i].mdl_ok) continue;
            if (best == leaves.size() || leaves[i].gain > leaves[best].gain + 1e-15 ||
                (std::abs(leaves[i].gain - leaves[best].gain) <= 1e-15 &&
                 leaves[i].split_pos < leaves[best].split_pos))
                best = i;
        }
        if (best == leaves.size()) break;
        Leaf chosen = leaves[best];
        cut_positions.push_back(chosen.split_pos);
        leaves.erase(leaves.begin() + static_cast<long>(best));
        leaves.push_back(evaluate_leaf(values, chosen.lo, chosen.split_pos));
        leaves.push_back(evaluate_leaf(values, chosen.split_pos, chosen.hi));
        ++bins;
    }
    std::sort(cut_positions.begin(), cut_positions.end());
    for (size_t pos : cut_positions)
        cp.cuts.push_back(std::midpoint(values[pos - 1].x, values[pos].x));
    cp.validate();
    return cp;
}

size_t bin_index(double x, const CutPoints& cuts) {
    return static_cast<size_t>(std::upper_bound(cuts.cuts.begin(), cuts.cuts.end(), x) -
                               cuts.cuts.begin());
}

std::vector<double> fuzzy_memberships(double x, const CutPoints& cuts, const FuzzyConfig& config) {
    if (!(config.overlap_fraction > 0.0 && config.overlap_fraction < 0.5))
        throw std::invalid_argument("fuzzy: overlap_fraction must be in (0, 0.5)");
    const size_t n = cuts.cuts.size();
    std::vector<double> w(n + 1, 0.0);
    const size_t k = bin_index(x, cuts);
    const double a = k == 0 ? cuts.lower : cuts.cuts[k - 1];
    const double b = k == n ? cuts.upper : cuts.cuts[k];
    const double band = config.overlap_fraction * (b - a);
    if (band > 0.0 && k > 0 && x < a + band) {
        const double wk = 0.5 + 0.5 * std::clamp((x - a) / band, 0.0, 1.0);
        w[k] = wk;
        w[k - 1] = 1.0 - wk;
    } else if (band > 0.0 && k < n && x > b - band) {
        const double wk = 0.5 + 0.5 * std::clamp((b - x) / band, 0.0, 1.0);
        w[k] = wk;
        w[k + 1] = 1.0 - wk;
    } else {
        w[k] = 1.0;
    }
    return w;
}

CutPoints epsilon_partition(const EmpiricalConditional& data, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon_partition: epsilon must be > 0");
    if (data.samples.empty()) throw std::invalid_argument("epsilon_partition: empty data");
    auto values = distinct_values(data);

    CutPoints cp;
    cp.lower = values.front().x;
    cp.upper = values.back().x;
    if (values.size() < 2) return cp;

    std::vector<size_t> class_totals(data.n_classes, 0);
    for (const auto& v : values)
        for (size_t c = 0; c < data.n_classes; ++c) class_totals[c] += v.class_counts[c];

    // Exact integer cumulative counts; the epsilon comparison happens in
    // count space so repeated fraction accumulation cannot drift.
    std::vector<size_t> cum(data.n_classes, 0);
    std::vector<size_t> ref(data.n_classes, 0);
    std::vector<size_t> prev_cum(data.n_classes, 0);
    for (size_t i = 0; i < values.size(); ++i) {
        prev_cum = cum;
        for (size_t c = 0; c < data.n_classes; ++c) cum[c] += values[i].class_counts[c];
        if (i == 0) continue; // no cut can precede the first value
        bool exceeded = false;
        for (size_t c = 0; c < data.n_classes; ++c) {
            if (static_cast<double>(cum[c] - ref[c]) >
                epsilon * static_cast<double>(class_totals[c])) {
                exceeded = true;
                break;
            }
        }
        if (exceeded) {
            const double cut = std::midpoint(values[i - 1].x, values[i].x);
            // Adjacent representable values can yield a degenerate midpoint.
            if ((cp.cuts.empty() ? cut > cp.lower : cut > cp.cuts.back()) && cut < values[i].x)
                cp.cuts.push_back(cut);
            ref = prev_cum;
        }
    }
    cp.validate();
    return cp;
}

} // namespace trackmode
