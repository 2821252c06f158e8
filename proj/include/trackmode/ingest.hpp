#ifndef TRACKMODE_INGEST_HPP
#define TRACKMODE_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "trackmode/geo.hpp"

namespace trackmode {

/// One annotated time span from a labels file. [start, end) in epoch seconds.
struct LabelInterval {
    double start = 0.0;
    double end = 0.0;
    Mode mode = Mode::walk;
};

/// Trajectory with one mode label per point.
struct LabeledTrajectory {
    Trajectory trajectory;
    std::vector<Mode> labels;

    size_t size() const { return trajectory.points.size(); }
};

/// Person-level train/validation/test partition.
struct DatasetSplit {
    std::set<std::string> train;
    std::set<std::string> validation;
    std::set<std::string> test;

    bool contains(const std::string& id) const {
        return train.count(id) || validation.count(id) || test.count(id);
    }
};

struct PltStats {
    size_t records = 0;
    size_t dropped_out_of_order = 0;
};

struct LabelStats {
    size_t rows = 0;
    size_t skipped_unknown_mode = 0;
};

struct AttachStats {
    size_t dropped_unlabeled = 0;
    size_t overlap_hits = 0; // points claimed by more than one interval
};

/// Epoch seconds (UTC) from a calendar date + time of day. No timezone shifts.
double civil_to_epoch(int year, int month, int day, int hour, int minute, double second);

/// Parse one trajectory in the PLT layout: six header lines, then
/// `lat,lon,0,altitude_feet,days,YYYY-MM-DD,HH:MM:SS` records.
/// Malformed lines raise DataError with the 1-based line number.
/// Points whose timestamp does not strictly increase are dropped and counted.
Trajectory parse_plt(std::istream& in, const std::string& person_id, PltStats* stats = nullptr);

/// Parse a labels file: one header line, then tab-separated
/// `StartTime\tEndTime\tMode` rows with `YYYY/MM/DD HH:MM:SS` timestamps.
/// Rows whose mode is outside `classes` are skipped and counted.
std::vector<LabelInterval> parse_labels(std::istream& in, const ClassSet& classes,
                                        LabelStats* stats = nullptr);

/// Label each point by the interval containing its timestamp (start
/// inclusive, end exclusive; on overlap the interval with the later start
/// wins). Points outside every interval are dropped and counted.
LabeledTrajectory attach_labels(const Trajectory& traj,
                                std::vector<LabelInterval> intervals,
                                AttachStats* stats = nullptr);

/// Per-person point counts by mode, the stratification input.
struct PersonModeCounts {
    std::string person_id;
    std::vector<size_t> counts; // indexed by class index
};

struct SplitSizes {
    size_t n_train = 0;
    size_t n_validation = 0;
    size_t n_test = 0;
};

/// Maximum absolute deviation between each subset's mode proportions and
/// the global mode proportions. Lower is a better-stratified split.
double split_deviation(const DatasetSplit& split, const std::vector<PersonModeCounts>& persons);

/// The seeded candidate assignments examined by slobo_split, in order.
std::vector<DatasetSplit> slobo_candidates(const std::vector<PersonModeCounts>& persons,
                                           const SplitSizes& sizes, uint64_t seed,
                                           size_t n_candidates);

/// Stratified person-level split: the candidate (among n_candidates seeded
/// random assignments) minimizing split_deviation. Ties keep the earliest
/// candidate. Throws std::invalid_argument when sizes do not sum to the
/// person count.
DatasetSplit slobo_split(const std::vector<PersonModeCounts>& persons, const SplitSizes& sizes,
                         uint64_t seed, size_t n_candidates = 10000);

/// One point of the canonical dataset: `person_id,lat,lon,t,mode`.
struct DatasetRecord {
    std::string person_id;
    double lat = 0.0;
    double lon = 0.0;
    double t = 0.0;
    Mode mode = Mode::walk;
};

/// Canonical dataset text IO. Lines starting with '#' are header/provenance
/// and are skipped on read. Floating-point fields round-trip bit-exactly.
void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records,
                   const std::vector<std::string>& header_lines = {});
std::vector<DatasetRecord> read_dataset(std::istream& in, const ClassSet& classes);

/// Group records into per-person labeled trajectories, sorted by person id.
/// Within a person, records must arrive time-sorted; duplicates in t are
/// dropped and counted in `dropped_non_increasing` when provided.
std::vector<LabeledTrajectory> group_by_person(std::vector<DatasetRecord> records,
                                               size_t* dropped_non_increasing = nullptr);

/// Per-person per-class point counts for stratification.
std::vector<PersonModeCounts> count_person_modes(const std::vector<LabeledTrajectory>& data,
                                                 const ClassSet& classes);

} // namespace trackmode

#endif // TRACKMODE_INGEST_HPP
