#ifndef TRACKMODE_SYNTH_HPP
#define TRACKMODE_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "trackmode/ingest.hpp"

namespace trackmode {

/// Motion statistics of one transportation mode for the generator.
struct ModeProfile {
    Mode mode = Mode::walk;
    double speed_mean = 1.4;         // m/s
    double speed_sd = 0.4;           // m/s
    double heading_volatility = 20.0; // degrees per step
    double dwell_mean = 200.0;       // mean points per mode bout
};

struct SynthConfig {
    std::vector<ModeProfile> profiles;
    size_t n_persons = 20;
    size_t points_per_person = 5000;
    double sample_interval_s = 2.0;
    uint64_t seed = 7;
};

/// The stock four-mode setup: overlapping speed distributions so bus/car
/// and walk/bus confusions stay plausible.
std::vector<ModeProfile> default_profiles();

/// Random-walk trajectories alternating mode bouts (geometric lengths),
/// speeds from a zero-truncated normal, headings drifting per step,
/// positions integrated on the sphere. Deterministic per seed; persons are
/// independent streams.
std::vector<LabeledTrajectory> generate(const SynthConfig& config);

/// Same data flattened into canonical dataset records.
std::vector<DatasetRecord> generate_records(const SynthConfig& config);

} // namespace trackmode

#endif // TRACKMODE_SYNTH_HPP
