#include "trackmode/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "trackmode/error.hpp"
#include "trackmode/rng.hpp"
#include "trackmode/textio.hpp"

namespace trackmode {

namespace {

// Days from 1970-01-01 to year/month/day in the proleptic Gregorian calendar.
long long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool parse_fixed_int(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

// "YYYY-MM-DD" / "YYYY/MM/DD" with the given separator.
bool parse_date(std::string_view s, char sep, int& y, int& m, int& d) {
    return s.size() == 10 && s[4] == sep && s[7] == sep && parse_fixed_int(s, 0, 4, y) &&
           parse_fixed_int(s, 5, 2, m) && parse_fixed_int(s, 8, 2, d) && m >= 1 && m <= 12 &&
           d >= 1 && d <= 31;
}

// "HH:MM:SS"
bool parse_time(std::string_view s, int& h, int& mi, int& se) {
    return s.size() == 8 && s[2] == ':' && s[5] == ':' && parse_fixed_int(s, 0, 2, h) &&
           parse_fixed_int(s, 3, 2, mi) && parse_fixed_int(s, 6, 2, se) && h <= 23 && mi <= 59 &&
           se <= 60;
}

} // namespace

double civil_to_epoch(int year, int month, int day, int hour, int minute, double second) {
    return static_cast<double>(days_from_civil(year, month, day)) * 86400.0 + hour * 3600.0 +
           minute * 60.0 + second;
}

Trajectory parse_plt(std::istream& in, const std::string& person_id, PltStats* stats) {
    Trajectory traj;
    traj.person_id = person_id;
    std::string line;
    size_t line_no = 0;
    for (int i = 0; i < 6; ++i) {
        if (!std::getline(in, line))
            throw DataError("PLT file has fewer than 6 header lines", line_no);
        ++line_no;
    }
    PltStats local;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = strip_cr(line);
        if (body.empty()) continue;
        auto fields = split_fields(body, ',');
        if (fields.size() != 7) throw DataError("PLT record must have 7 fields", line_no);
        double lat = parse_double_or_throw(fields[0], "latitude", line_no);
        double lon = parse_double_or_throw(fields[1], "longitude", line_no);
        // fields[2] (always 0), [3] altitude, [4] serial day count: validated, unused.
        parse_double_or_throw(fields[2], "field 3", line_no);
        parse_double_or_throw(fields[3], "altitude", line_no);
        parse_double_or_throw(fields[4], "day number", line_no);
        int y, mo, d, h, mi, s;
        if (!parse_date(fields[5], '-', y, mo, d))
            throw DataError("invalid date '" + std::string(fields[5]) + "'", line_no);
        if (!parse_time(fields[6], h, mi, s))
            throw DataError("invalid time '" + std::string(fields[6]) + "'", line_no);
        double t = civil_to_epoch(y, mo, d, h, mi, s);
        GpsPoint p;
        try {
            p = GpsPoint(lat, lon, t);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), line_no);
        }
        ++local.records;
        if (!traj.points.empty() && p.t <= traj.points.back().t) {
            ++local.dropped_out_of_order;
            continue;
        }
        traj.points.push_back(p);
    }
    if (stats) *stats = local;
    return traj;
}

std::vector<LabelInterval> parse_labels(std::istream& in, const ClassSet& classes,
                                        LabelStats* stats) {
    std::vector<LabelInterval> out;
    LabelStats local;
    std::string line;
    size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = strip_cr(line);
        if (body.empty()) continue;
        if (!header_seen) {
            header_seen = true; // first non-empty line is the header
            continue;
        }
        auto fields = split_fields(body, '\t');
        if (fields.size() != 3) throw DataError("label row must have 3 tab-separated fields", line_no);
        auto parse_stamp = [&](std::string_view f) {
            auto parts = split_fields(f, ' ');
            int y, mo, d, h, mi, s;
            if (parts.size() != 2 || !parse_date(parts[0], '/', y, mo, d) ||
                !parse_time(parts[1], h, mi, s))
                throw DataError("invalid timestamp '" + std::string(f) + "'", line_no);
            return civil_to_epoch(y, mo, d, h, mi, s);
        };
        double start = parse_stamp(fields[0]);
        double end = parse_stamp(fields[1]);
        if (end <= start) throw DataError("label interval end not after start", line_no);
        ++local.rows;
        Mode mode;
        if (!classes.parse(std::string(fields[2]), mode)) {
            ++local.skipped_unknown_mode;
            continue;
        }
        out.push_back({start, end, mode});
    }
    if (stats) *stats = local;
    return out;
}

LabeledTrajectory attach_labels(const Trajectory& traj, std::vector<LabelInterval> intervals,
                                AttachStats* stats) {
    std::stable_sort(intervals.begin(), intervals.end(),
                     [](const LabelInterval& a, const LabelInterval& b) { return a.start < b.start; });
    // prefix_max_end[i] = max end over intervals[0..i]; bounds the backward
    // scan when resolving overlaps.
    std::vector<double> prefix_max_end(intervals.size());
    double running = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < intervals.size(); ++i) {
        running = std::max(running, intervals[i].end);
        prefix_max_end[i] = running;
    }

    LabeledTrajectory out;
    out.trajectory.person_id = traj.person_id;
    AttachStats local;
    for (const GpsPoint& p : traj.points) {
        // Last interval with start <= t.
        size_t hi = static_cast<size_t>(
            std::upper_bound(intervals.begin(), intervals.end(), p.t,
                             [](double t, const LabelInterval& iv) { return t < iv.start; }) -
            intervals.begin());
        bool found = false;
        Mode mode = Mode::walk;
        size_t hits = 0;
        for (size_t j = hi; j-- > 0;) {
            if (prefix_max_end[j] <= p.t) break; // nothing earlier can contain t
            if (p.t >= intervals[j].start && p.t < intervals[j].end) {
                ++hits;
                if (!found) { // first hit walking backward = latest start wins
                    mode = intervals[j].mode;
                    found = true;
                }
            }
        }
        if (hits > 1) ++local.overlap_hits;
        if (!found) {
            ++local.dropped_unlabeled;
            continue;
        }
        out.trajectory.points.push_back(p);
        out.labels.push_back(mode);
    }
    if (stats) *stats = local;
    return out;
}

double split_deviation(const DatasetSplit& split, const std::vector<PersonModeCounts>& persons) {
    if (persons.empty()) return 0.0;
    const size_t n_modes = persons.front().counts.size();
    std::vector<double> global(n_modes, 0.0);
    std::vector<std::vector<double>> subset(3, std::vector<double>(n_modes, 0.0));
    for (const auto& p : persons) {
        int s = split.train.count(p.person_id)        ? 0
                : split.validation.count(p.person_id) ? 1
                : split.test.count(p.person_id)       ? 2
                                                      : -1;
        for (size_t m = 0; m < n_modes; ++m) {
            global[m] += static_cast<double>(p.counts[m]);
            if (s >= 0) subset[static_cast<size_t>(s)][m] += static_cast<double>(p.counts[m]);
        }
    }
    double global_total = 0.0;
    for (double g : global) global_total += g;
    if (global_total == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& sub : subset) {
        double total = 0.0;
        for (double c : sub) total += c;
        for (size_t m = 0; m < n_modes; ++m) {
            double prop = total > 0.0 ? sub[m] / total : 0.0;
            worst = std::max(worst, std::abs(prop - global[m] / global_total));
        }
    }
    return worst;
}

std::vector<DatasetSplit> slobo_candidates(const std::vector<PersonModeCounts>& persons,
                                           const SplitSizes& sizes, uint64_t seed,
                                           size_t n_candidates) {
    if (sizes.n_train + sizes.n_validation + sizes.n_test != persons.size())
        throw std::invalid_argument("slobo: split sizes must sum to the person count");
    std::vector<std::string> ids;
    ids.reserve(persons.size());
    for (const auto& p : persons) ids.push_back(p.person_id);
    std::sort(ids.begin(), ids.end()); // input-order independence

    Rng rng(seed);
    std::vector<DatasetSplit> out;
    out.reserve(n_candidates);
    for (size_t c = 0; c < n_candidates; ++c) {
        std::vector<std::string> order = ids;
        rng.shuffle(order);
        DatasetSplit split;
        size_t i = 0;
        for (; i < sizes.n_train; ++i) split.train.insert(order[i]);
        for (; i < sizes.n_train + sizes.n_validation; ++i) split.validation.insert(order[i]);
        for (; i < order.size(); ++i) split.test.insert(order[i]);
        out.push_back(std::move(split));
    }
    return out;
}

DatasetSplit slobo_split(const std::vector<PersonModeCounts>& persons, const SplitSizes& sizes,
                         uint64_t seed, size_t n_candidates) {
    auto candidates = slobo_candidates(persons, sizes, seed, n_candidates);
    if (candidates.empty()) throw std::invalid_argument("slobo: need at least one candidate");
    size_t best = 0;
    double best_dev = split_deviation(candidates[0], persons);
    for (size_t i = 1; i < candidates.size(); ++i) {
        double dev = split_deviation(candidates[i], persons);
        if (dev < best_dev) {
            best_dev = dev;
            best = i;
        }
    }
    return candidates[best];
}

void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records,
                   const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << "\n";
    for (const auto& r : records) {
        out << r.person_id << ',' << format_double(r.lat) << ',' << format_double(r.lon) << ','
            << format_double(r.t) << ',' << mode_name(r.mode) << "\n";
    }
}

std::vector<DatasetRecord> read_dataset(std::istream& in, const ClassSet& classes) {
    std::vector<DatasetRecord> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = strip_cr(line);
        if (body.empty() || body.front() == '#') continue;
        auto fields = split_fields(body, ',');
        if (fields.size() != 5) throw DataError("dataset record must have 5 fields", line_no);
        DatasetRecord r;
        r.person_id = std::string(fields[0]);
        r.lat = parse_double_or_throw(fields[1], "latitude", line_no);
        r.lon = parse_double_or_throw(fields[2], "longitude", line_no);
        r.t = parse_double_or_throw(fields[3], "timestamp", line_no);
        if (!classes.parse(std::string(fields[4]), r.mode))
            throw DataError("mode '" + std::string(fields[4]) + "' is not in the active class set",
                            line_no);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<LabeledTrajectory> group_by_person(std::vector<DatasetRecord> records,
                                               size_t* dropped_non_increasing) {
    std::stable_sort(records.begin(), records.end(),
                     [](const DatasetRecord& a, const DatasetRecord& b) {
                         if (a.person_id != b.person_id) return a.person_id < b.person_id;
                         return a.t < b.t;
                     });
    std::vector<LabeledTrajectory> out;
    size_t dropped = 0;
    for (const auto& r : records) {
        if (out.empty() || out.back().trajectory.person_id != r.person_id) {
            out.emplace_back();
            out.back().trajectory.person_id = r.person_id;
        }
        auto& traj = out.back().trajectory;
        if (!traj.points.empty() && r.t <= traj.points.back().t) {
            ++dropped;
            continue;
        }
        traj.points.push_back(GpsPoint(r.lat, r.lon, r.t));
        out.back().labels.push_back(r.mode);
    }
    if (dropped_non_increasing) *dropped_non_increasing = dropped;
    return out;
}

std::vector<PersonModeCounts> count_person_modes(const std::vector<LabeledTrajectory>& data,
                                                 const ClassSet& classes) {
    std::vector<PersonModeCounts> out;
    for (const auto& lt : data) {
        PersonModeCounts pc;
        pc.person_id = lt.trajectory.person_id;
        pc.counts.assign(classes.size(), 0);
        for (Mode m : lt.labels) ++pc.counts[classes.index_of(m)];
        out.push_back(std::move(pc));
    }
    return out;
}

} // namespace trackmode
