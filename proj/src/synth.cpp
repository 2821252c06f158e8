#include "trackmode/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "trackmode/rng.hpp"

namespace trackmode {

namespace {

constexpr double kPi = 3.141592653589793238462643;

// Geometric bout length with the given mean (>= 1 point).
size_t geometric_length(Rng& rng, double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    const double u = 1.0 - rng.next_unit(); // (0, 1]
    const double len = std::floor(std::log(u) / std::log(1.0 - p));
    return 1 + static_cast<size_t>(std::max(0.0, len));
}

} // namespace

std::vector<ModeProfile> default_profiles() {
    return {
        {Mode::walk, 1.4, 0.4, 25.0, 200.0},
        {Mode::bike, 4.5, 1.2, 12.0, 200.0},
        {Mode::bus, 8.0, 4.0, 6.0, 200.0},
        {Mode::car, 14.0, 6.0, 5.0, 200.0},
    };
}

std::vector<LabeledTrajectory> generate(const SynthConfig& config) {
    if (config.profiles.empty()) throw std::invalid_argument("synth: need at least one profile");
    if (config.points_per_person < 10)
        throw std::invalid_argument("synth: points_per_person >= 10");
    if (!(config.sample_interval_s > 0.0))
        throw std::invalid_argument("synth: sample interval must be positive");
    for (const auto& p : config.profiles) {
        if (!(p.speed_mean > 0.0)) throw std::invalid_argument("synth: speed_mean > 0");
        if (p.speed_sd < 0.0) throw std::invalid_argument("synth: speed_sd >= 0");
        if (!(p.dwell_mean >= 1.0)) throw std::invalid_argument("synth: dwell_mean >= 1");
    }

    std::vector<LabeledTrajectory> out;
    Rng base(config.seed);
    for (size_t person = 0; person < config.n_persons; ++person) {
        Rng rng = base.fork(person);
        LabeledTrajectory lt;
        char id[16];
        std::snprintf(id, sizeof(id), "synth_p%03zu", person);
        lt.trajectory.person_id = id;

        double lat = 39.5 + rng.next_uniform(0.0, 1.0);
        double lon = 116.0 + rng.next_uniform(0.0, 1.0);
        double heading = rng.next_uniform(0.0, 360.0);
        double t = 1.0e9 + 86400.0 * static_cast<double>(person);

        size_t profile_idx = static_cast<size_t>(rng.bounded(config.profiles.size()));
        size_t bout_left = geometric_length(rng, config.profiles[profile_idx].dwell_mean);

        for (size_t i = 0; i < config.points_per_person; ++i) {
            const ModeProfile& prof = config.profiles[profile_idx];
            lt.trajectory.points.push_back(GpsPoint(lat, lon, t));
            lt.labels.push_back(prof.mode);

            // Advance along the current heading; the drawn speed applies to
            // the leg leaving this point, so the label matches it exactly.
            const double speed = std::max(0.0, rng.next_normal(prof.speed_mean, prof.speed_sd));
            const double dist = speed * config.sample_interval_s;
            const double rad = heading * kPi / 180.0;
            lat += (dist * std::cos(rad) / kEarthRadiusM) * (180.0 / kPi);
            lon += (dist * std::sin(rad) / (kEarthRadiusM * std::cos(lat * kPi / 180.0))) *
                   (180.0 / kPi);
            lat = std::clamp(lat, -89.0, 89.0);
            if (lon > 180.0) lon -= 360.0;
            if (lon < -180.0) lon += 360.0;
            heading += rng.next_normal(0.0, prof.heading_volatility);
            heading = std::fmod(heading, 360.0);
            if (heading < 0.0) heading += 360.0;
            t += config.sample_interval_s;

            if (--bout_left == 0) {
                if (config.profiles.size() > 1) {
                    // Pick a different profile for the next bout.
                    size_t next = static_cast<size_t>(rng.bounded(config.profiles.size() - 1));
                    if (next >= profile_idx) ++next;
                    profile_idx = next;
                }
                bout_left = geometric_length(rng, config.profiles[profile_idx].dwell_mean);
            }
        }
        out.push_back(std::move(lt));
    }
    return out;
}

std::vector<DatasetRecord> generate_records(const SynthConfig& config) {
    std::vector<DatasetRecord> records;
    for (const auto& lt : generate(config)) {
        for (size_t i = 0; i < lt.size(); ++i) {
            const GpsPoint& p = lt.trajectory.points[i];
            records.push_back({lt.trajectory.person_id, p.lat, p.lon, p.t, lt.labels[i]});
        }
    }
    return records;
}

} // namespace trackmode
