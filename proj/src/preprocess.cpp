#include "trackmode/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "trackmode/error.hpp"
#include "trackmode/textio.hpp"

namespace trackmode {

namespace {

// Consistency constant relating MAD to the SD of a normal distribution.
constexpr double kMadScale = 1.4826;

double median_of(std::vector<double>& scratch) {
    const size_t n = scratch.size();
    std::sort(scratch.begin(), scratch.end());
    if (n % 2 == 1) return scratch[n / 2];
    return 0.5 * (scratch[n / 2 - 1] + scratch[n / 2]);
}

} // namespace

const char* segmentation_kind_name(SegmentationKind k) {
    switch (k) {
    case SegmentationKind::time: return "time";
    case SegmentationKind::distance: return "distance";
    case SegmentationKind::bearing: return "bearing";
    case SegmentationKind::window: return "window";
    }
    return "?";
}

bool parse_segmentation_kind(const std::string& name, SegmentationKind& out) {
    if (name == "time") out = SegmentationKind::time;
    else if (name == "distance") out = SegmentationKind::distance;
    else if (name == "bearing") out = SegmentationKind::bearing;
    else if (name == "window") out = SegmentationKind::window;
    else return false;
    return true;
}

std::vector<double> hampel_filter(const std::vector<double>& series, size_t window_half_width,
                                  double n_mad) {
    if (window_half_width < 1) throw std::invalid_argument("hampel: window_half_width >= 1");
    if (!(n_mad > 0.0)) throw std::invalid_argument("hampel: n_mad > 0");
    const size_t n = series.size();
    std::vector<double> out(series);
    std::vector<double> window, dev;
    for (size_t i = 0; i < n; ++i) {
        const size_t lo = i >= window_half_width ? i - window_half_width : 0;
        const size_t hi = std::min(n - 1, i + window_half_width);
        window.assign(series.begin() + lo, series.begin() + hi + 1);
        const double med = median_of(window);
        dev.resize(window.size());
        for (size_t j = 0; j < window.size(); ++j) dev[j] = std::abs(window[j] - med);
        const double mad = median_of(dev);
        if (std::abs(series[i] - med) > n_mad * kMadScale * mad) out[i] = med;
    }
    return out;
}

std::vector<IndexRange> segment(const LabeledTrajectory& traj,
                                const SegmentationStrategy& strategy) {
    if (!(strategy.parameter > 0.0))
        throw std::invalid_argument("segmentation parameter must be positive");
    const auto& pts = traj.trajectory.points;
    const size_t n = pts.size();
    std::vector<IndexRange> out;
    if (n == 0) return out;

    switch (strategy.kind) {
    case SegmentationKind::window: {
        const size_t w = std::max<size_t>(1, static_cast<size_t>(strategy.parameter));
        for (size_t s = 0; s < n; s += w) out.push_back({s, std::min(n, s + w)});
        break;
    }
    case SegmentationKind::time: {
        size_t s = 0;
        for (size_t i = 1; i < n; ++i) {
            if (pts[i].t - pts[s].t > strategy.parameter) {
                out.push_back({s, i});
                s = i;
            }
        }
        out.push_back({s, n});
        break;
    }
    case SegmentationKind::distance: {
        size_t s = 0;
        double acc = 0.0;
        for (size_t i = 1; i < n; ++i) {
            acc += haversine_distance(pts[i - 1], pts[i]);
            if (acc > strategy.parameter) {
                out.push_back({s, i});
                s = i;
                acc = 0.0;
            }
        }
        out.push_back({s, n});
        break;
    }
    case SegmentationKind::bearing: {
        // Leg j runs from pts[j] to pts[j+1]; a sharp turn at point j
        // (between leg j-1 and leg j) starts a new segment at j.
        size_t s = 0;
        bool have_prev = false;
        double prev_bearing = 0.0;
        for (size_t j = 0; j + 1 < n; ++j) {
            const GpsPoint& a = pts[j];
            const GpsPoint& b = pts[j + 1];
            if (a.lat == b.lat && a.lon == b.lon) continue; // stationary leg, no bearing
            double cur = bearing(a, b);
            if (have_prev && j > s &&
                std::abs(bearing_change(prev_bearing, cur)) > strategy.parameter) {
                out.push_back({s, j});
                s = j;
            }
            prev_bearing = cur;
            have_prev = true;
        }
        out.push_back({s, n});
        break;
    }
    }
    return out;
}

std::pair<double, double> segment_stats_from_speeds(const std::vector<double>& speeds,
                                                    const IndexRange& range) {
    if (range.end <= range.begin) throw std::invalid_argument("segment_stats: empty range");
    const size_t n_legs = range.size() - 1;
    if (n_legs == 0) return {0.0, 0.0};
    double mean = 0.0;
    for (size_t i = range.begin; i < range.end - 1; ++i) mean += speeds[i];
    mean /= static_cast<double>(n_legs);
    double var = 0.0;
    for (size_t i = range.begin; i < range.end - 1; ++i) {
        const double d = speeds[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n_legs); // population variance: total for 1-leg segments
    return {mean, std::sqrt(var)};
}

std::pair<double, double> segment_stats(const LabeledTrajectory& traj, const IndexRange& range) {
    const auto& pts = traj.trajectory.points;
    if (range.end > pts.size()) throw std::invalid_argument("segment_stats: range out of bounds");
    if (range.size() <= 1) return {0.0, 0.0};
    std::vector<double> speeds(pts.size(), 0.0);
    for (size_t i = range.begin; i < range.end - 1; ++i)
        speeds[i] = point_speed(pts[i], pts[i + 1]);
    return segment_stats_from_speeds(speeds, range);
}

std::vector<FeatureVector> featurize(const LabeledTrajectory& traj,
                                     const SegmentationStrategy& strategy,
                                     const HampelConfig& filter) {
    const auto& pts = traj.trajectory.points;
    const size_t n = pts.size();
    std::vector<FeatureVector> out(n);
    if (n == 0) return out;
    if (n == 1) return out; // single point: all-zero features

    std::vector<double> speeds(n, 0.0);
    for (size_t i = 0; i + 1 < n; ++i) speeds[i] = point_speed(pts[i], pts[i + 1]);
    speeds[n - 1] = speeds[n - 2]; // no forward neighbor: copy predecessor

    if (filter.enabled)
        speeds = hampel_filter(speeds, filter.window_half_width, filter.n_mad);

    for (size_t i = 0; i < n; ++i) out[i].v_p = speeds[i];

    for (const IndexRange& seg : segment(traj, strategy)) {
        auto [avg, sd] = segment_stats_from_speeds(speeds, seg);
        for (size_t i = seg.begin; i < seg.end; ++i) {
            out[i].v_avg = avg;
            out[i].v_sd = sd;
        }
    }
    return out;
}

void write_features(std::ostream& out, const std::vector<FeatureRecord>& records,
                    const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << "\n";
    for (const auto& r : records) {
        out << r.person_id << ',' << format_double(r.t) << ',' << format_double(r.features.v_p)
            << ',' << format_double(r.features.v_avg) << ',' << format_double(r.features.v_sd)
            << ',' << mode_name(r.mode) << "\n";
    }
}

std::vector<FeatureRecord> read_features(std::istream& in, const ClassSet& classes) {
    std::vector<FeatureRecord> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = strip_cr(line);
        if (body.empty() || body.front() == '#') continue;
        auto fields = split_fields(body, ',');
        if (fields.size() != 6) throw DataError("feature record must have 6 fields", line_no);
        FeatureRecord r;
        r.person_id = std::string(fields[0]);
        r.t = parse_double_or_throw(fields[1], "timestamp", line_no);
        r.features.v_p = parse_double_or_throw(fields[2], "v_p", line_no);
        r.features.v_avg = parse_double_or_throw(fields[3], "v_avg", line_no);
        r.features.v_sd = parse_double_or_throw(fields[4], "v_sd", line_no);
        if (!classes.parse(std::string(fields[5]), r.mode))
            throw DataError("mode '" + std::string(fields[5]) + "' is not in the active class set",
                            line_no);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<FeatureSequence> group_features_by_person(std::vector<FeatureRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const FeatureRecord& a, const FeatureRecord& b) {
                         if (a.person_id != b.person_id) return a.person_id < b.person_id;
                         return a.t < b.t;
                     });
    std::vector<FeatureSequence> out;
    for (auto& r : records) {
        if (out.empty() || out.back().person_id != r.person_id) {
            out.emplace_back();
            out.back().person_id = r.person_id;
        }
        auto& seq = out.back();
        seq.t.push_back(r.t);
        seq.features.push_back(r.features);
        seq.labels.push_back(r.mode);
    }
    return out;
}

} // namespace trackmode
