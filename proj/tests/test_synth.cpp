#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "trackmode/preprocess.hpp"
#include "trackmode/synth.hpp"

using namespace trackmode;

TEST_SUITE_BEGIN("synth");

TEST_CASE("single profile: every label is that mode") {
    SynthConfig cfg;
    cfg.profiles = {{Mode::car, 10.0, 1.0, 5.0, 50.0}};
    cfg.n_persons = 2;
    cfg.points_per_person = 120;
    auto data = generate(cfg);
    REQUIRE(data.size() == 2);
    for (const auto& lt : data)
        for (Mode m : lt.labels) CHECK(m == Mode::car);
}

TEST_CASE("zero variance and volatility give a straight constant-speed line") {
    SynthConfig cfg;
    cfg.profiles = {{Mode::car, 12.0, 0.0, 0.0, 1e9}};
    cfg.n_persons = 1;
    cfg.points_per_person = 200;
    cfg.sample_interval_s = 2.0;
    auto data = generate(cfg);
    const auto& pts = data[0].trajectory.points;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double v = point_speed(pts[i], pts[i + 1]);
        CHECK(std::abs(v - 12.0) / 12.0 < 0.01); // integration tolerance 1%
    }
    // Straight: total displacement matches path length within tolerance.
    const double direct = haversine_distance(pts.front(), pts.back());
    double path = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) path += haversine_distance(pts[i], pts[i + 1]);
    CHECK(direct / path > 0.999);
}

TEST_CASE("default profiles: per-mode speed means within 10% at 10k points") {
    SynthConfig cfg;
    cfg.profiles = default_profiles();
    cfg.n_persons = 2;
    cfg.points_per_person = 5000;
    cfg.seed = 17;
    auto data = generate(cfg);
    std::map<Mode, std::pair<double, size_t>> sums;
    for (const auto& lt : data) {
        const auto& pts = lt.trajectory.points;
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            // Label i matches the leg leaving point i by construction.
            auto& [sum, count] = sums[lt.labels[i]];
            sum += point_speed(pts[i], pts[i + 1]);
            ++count;
        }
    }
    for (const auto& prof : cfg.profiles) {
        REQUIRE(sums.count(prof.mode));
        auto [sum, count] = sums[prof.mode];
        REQUIRE(count > 200);
        const double mean = sum / static_cast<double>(count);
        CHECK(std::abs(mean - prof.speed_mean) / prof.speed_mean < 0.10);
    }
}

TEST_CASE("timestamps strictly increase by the sampling interval") {
    SynthConfig cfg;
    cfg.profiles = default_profiles();
    cfg.n_persons = 1;
    cfg.points_per_person = 500;
    cfg.sample_interval_s = 3.0;
    auto data = generate(cfg);
    const auto& pts = data[0].trajectory.points;
    for (size_t i = 1; i < pts.size(); ++i)
        CHECK(pts[i].t - pts[i - 1].t == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("generation is deterministic per seed and persons are independent") {
    SynthConfig cfg;
    cfg.profiles = default_profiles();
    cfg.n_persons = 3;
    cfg.points_per_person = 300;
    cfg.seed = 5;
    auto a = generate(cfg);
    auto b = generate(cfg);
    REQUIRE(a.size() == b.size());
    for (size_t p = 0; p < a.size(); ++p) {
        REQUIRE(a[p].size() == b[p].size());
        for (size_t i = 0; i < a[p].size(); ++i) {
            CHECK(a[p].trajectory.points[i].lat == b[p].trajectory.points[i].lat);
            CHECK(a[p].labels[i] == b[p].labels[i]);
        }
    }
    // Different persons look different.
    CHECK(a[0].trajectory.points[10].lat != a[1].trajectory.points[10].lat);

    cfg.seed = 6;
    auto c = generate(cfg);
    bool all_same = true;
    for (size_t i = 0; i < c[0].size() && all_same; ++i)
        if (c[0].trajectory.points[i].lat != a[0].trajectory.points[i].lat) all_same = false;
    CHECK_FALSE(all_same);
}

TEST_CASE("mode bouts are contiguous runs recoverable from the labels") {
    SynthConfig cfg;
    cfg.profiles = default_profiles();
    for (auto& p : cfg.profiles) p.dwell_mean = 40.0;
    cfg.n_persons = 1;
    cfg.points_per_person = 2000;
    cfg.seed = 9;
    auto data = generate(cfg);
    const auto& labels = data[0].labels;
    size_t transitions = 0;
    for (size_t i = 1; i < labels.size(); ++i)
        if (labels[i] != labels[i - 1]) ++transitions;
    // Mean dwell 40 over 2000 points: dozens of bouts, not thousands.
    CHECK(transitions > 10);
    CHECK(transitions < 200);
}

TEST_CASE("generate_records flattens to canonical records") {
    SynthConfig cfg;
    cfg.profiles = default_profiles();
    cfg.n_persons = 2;
    cfg.points_per_person = 50;
    auto records = generate_records(cfg);
    CHECK(records.size() == 100);
    CHECK(records.front().person_id == "synth_p000");
    CHECK(records.back().person_id == "synth_p001");
}

TEST_CASE("invalid configs are rejected") {
    SynthConfig cfg;
    cfg.profiles = {};
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    cfg.profiles = {{Mode::walk, -1.0, 0.1, 1.0, 10.0}};
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    cfg.profiles = default_profiles();
    cfg.points_per_person = 5;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}

TEST_SUITE_END();
