#include <doctest.h>

#include <sstream>

#include "trackmode/error.hpp"
#include "trackmode/ingest.hpp"
#include "trackmode/rng.hpp"

using namespace trackmode;

namespace {

const char* kPltHeader =
    "Geolife trajectory\n"
    "WGS 84\n"
    "Altitude is in Feet\n"
    "Reserved 3\n"
    "0,2,255,My Track,0,0,2,8421376\n"
    "0\n";

std::string plt_with(const std::string& body) { return std::string(kPltHeader) + body; }

} // namespace

TEST_SUITE_BEGIN("ingest");

TEST_CASE("civil_to_epoch matches known instants") {
    CHECK(civil_to_epoch(1970, 1, 1, 0, 0, 0.0) == 0.0);
    CHECK(civil_to_epoch(2000, 3, 1, 0, 0, 0.0) == 951868800.0);
    CHECK(civil_to_epoch(2008, 10, 23, 12, 0, 0.0) == 1224763200.0);
    CHECK(civil_to_epoch(2008, 4, 2, 11, 24, 21.0) == 1207135461.0);
}

TEST_CASE("parse_plt maps a record line to a point") {
    std::istringstream in(
        plt_with("39.906631,116.385564,0,492,39744.5,2008-10-23,12:00:00\n"));
    Trajectory t = parse_plt(in, "p1");
    REQUIRE(t.size() == 1);
    CHECK(t.person_id == "p1");
    CHECK(t.points[0].lat == 39.906631);
    CHECK(t.points[0].lon == 116.385564);
    CHECK(t.points[0].t == 1224763200.0);
}

TEST_CASE("parse_plt: empty body yields an empty trajectory") {
    std::istringstream in(plt_with(""));
    CHECK(parse_plt(in, "p1").size() == 0);
}

TEST_CASE("parse_plt reports the offending line number") {
    std::istringstream in(plt_with(
        "39.9,116.3,0,492,39744.5,2008-10-23,12:00:00\n"
        "39.9,116.3,0,492,39744.5,2008-10-23,12:00:01\n"
        "bogus,116.3,0,492,39744.5,2008-10-23,12:00:02\n"));
    try {
        parse_plt(in, "p1");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 9);
        CHECK(std::string(e.what()).find("9") != std::string::npos);
    }
}

TEST_CASE("parse_plt requires six header lines") {
    std::istringstream in("only\nthree\nheaders\n");
    CHECK_THROWS_AS(parse_plt(in, "p1"), DataError);
}

TEST_CASE("parse_plt drops out-of-order points and counts them") {
    std::istringstream in(plt_with(
        "39.9,116.3,0,492,39744.5,2008-10-23,12:00:05\n"
        "39.9,116.3,0,492,39744.5,2008-10-23,12:00:03\n"
        "39.9,116.3,0,492,39744.5,2008-10-23,12:00:05\n"
        "39.9,116.3,0,492,39744.5,2008-10-23,12:00:06\n"));
    PltStats stats;
    Trajectory t = parse_plt(in, "p1", &stats);
    CHECK(t.size() == 2);
    CHECK(stats.records == 4);
    CHECK(stats.dropped_out_of_order == 2);
}

TEST_CASE("parse_labels maps rows and skips out-of-set modes") {
    std::istringstream in(
        "Start Time\tEnd Time\tTransportation Mode\n"
        "2008/04/02 11:24:21\t2008/04/02 11:50:45\tbus\n"
        "2008/04/02 12:00:00\t2008/04/02 12:30:00\tairplane\n"
        "2008/04/02 13:00:00\t2008/04/02 13:30:00\ttaxi\n");
    LabelStats stats;
    auto intervals = parse_labels(in, ClassSet(ClassSet::four), &stats);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0].mode == Mode::bus);
    CHECK(intervals[0].start == 1207135461.0);
    CHECK(intervals[0].end == 1207137045.0);
    CHECK(stats.rows == 3);
    CHECK(stats.skipped_unknown_mode == 2);
}

TEST_CASE("parse_labels keeps airplane under the seven-class set") {
    std::istringstream in(
        "Start Time\tEnd Time\tTransportation Mode\n"
        "2008/04/02 12:00:00\t2008/04/02 12:30:00\tairplane\n");
    auto intervals = parse_labels(in, ClassSet(ClassSet::seven));
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0].mode == Mode::airplane);
}

TEST_CASE("parse_labels rejects inverted intervals and bad stamps") {
    std::istringstream bad_order(
        "h\n2008/04/02 11:50:45\t2008/04/02 11:24:21\tbus\n");
    CHECK_THROWS_AS(parse_labels(bad_order, ClassSet(ClassSet::four)), DataError);
    std::istringstream bad_stamp("h\nnot-a-date\t2008/04/02 11:24:21\tbus\n");
    CHECK_THROWS_AS(parse_labels(bad_stamp, ClassSet(ClassSet::four)), DataError);
}

TEST_CASE("attach_labels: inclusion, drops and boundary rules") {
    Trajectory traj;
    traj.person_id = "p1";
    for (int i = 0; i < 10; ++i) traj.append(GpsPoint(40.0, 116.0, 100.0 + i));
    std::vector<LabelInterval> intervals{{102.0, 108.0, Mode::bus}};
    AttachStats stats;
    LabeledTrajectory lt = attach_labels(traj, intervals, &stats);
    CHECK(lt.size() == 6); // t = 102..107: start inclusive, end exclusive
    CHECK(stats.dropped_unlabeled == 4);
    for (Mode m : lt.labels) CHECK(m == Mode::bus);
    CHECK(lt.trajectory.points.front().t == 102.0);
    CHECK(lt.trajectory.points.back().t == 107.0);
}

TEST_CASE("attach_labels: later interval wins on overlap") {
    Trajectory traj;
    traj.person_id = "p";
    traj.append(GpsPoint(0, 0, 5.0));
    traj.append(GpsPoint(0, 0.001, 15.0));
    std::vector<LabelInterval> intervals{{0.0, 20.0, Mode::walk}, {10.0, 30.0, Mode::car}};
    AttachStats stats;
    LabeledTrajectory lt = attach_labels(traj, intervals, &stats);
    REQUIRE(lt.size() == 2);
    CHECK(lt.labels[0] == Mode::walk);
    CHECK(lt.labels[1] == Mode::car); // both intervals contain t=15, later start wins
    CHECK(stats.overlap_hits == 1);
}

TEST_CASE("attach_labels output labels always contain the point's timestamp") {
    Rng rng(21);
    for (int iter = 0; iter < 20; ++iter) {
        Trajectory traj;
        traj.person_id = "p";
        double t = 0.0;
        for (int i = 0; i < 50; ++i) {
            t += rng.next_uniform(0.5, 3.0);
            traj.append(GpsPoint(0.0, 0.0, t));
        }
        std::vector<LabelInterval> intervals;
        double s = rng.next_uniform(0.0, 20.0);
        for (int i = 0; i < 5; ++i) {
            double e = s + rng.next_uniform(1.0, 15.0);
            intervals.push_back(
                {s, e, i % 2 ? Mode::bus : Mode::walk});
            s = e + rng.next_uniform(0.0, 10.0);
        }
        LabeledTrajectory lt = attach_labels(traj, intervals);
        CHECK(lt.size() <= traj.size());
        for (size_t i = 0; i < lt.size(); ++i) {
            const double pt = lt.trajectory.points[i].t;
            bool inside = false;
            for (const auto& iv : intervals)
                if (pt >= iv.start && pt < iv.end && iv.mode == lt.labels[i]) inside = true;
            CHECK(inside);
        }
    }
}

namespace {

std::vector<PersonModeCounts> make_persons(Rng& rng, size_t n, size_t modes) {
    std::vector<PersonModeCounts> persons;
    for (size_t i = 0; i < n; ++i) {
        PersonModeCounts pc;
        pc.person_id = "p" + std::to_string(i);
        for (size_t m = 0; m < modes; ++m)
            pc.counts.push_back(100 + rng.bounded(900));
        persons.push_back(pc);
    }
    return persons;
}

} // namespace

TEST_CASE("slobo_split rejects size mismatches") {
    Rng rng(31);
    auto persons = make_persons(rng, 3, 4);
    CHECK_THROWS_AS(slobo_split(persons, {2, 1, 1}, 1), std::invalid_argument);
}

TEST_CASE("slobo_split is a deterministic partition") {
    Rng rng(32);
    auto persons = make_persons(rng, 9, 4);
    DatasetSplit a = slobo_split(persons, {6, 1, 2}, 77, 200);
    DatasetSplit b = slobo_split(persons, {6, 1, 2}, 77, 200);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    CHECK(a.test == b.test);
    CHECK(a.train.size() == 6);
    CHECK(a.validation.size() == 1);
    CHECK(a.test.size() == 2);
    size_t covered = 0;
    for (const auto& p : persons) {
        CHECK(a.contains(p.person_id));
        covered += a.train.count(p.person_id) + a.validation.count(p.person_id) +
                   a.test.count(p.person_id);
    }
    CHECK(covered == persons.size()); // pairwise disjoint and covering
}

TEST_CASE("slobo_split with identical persons still picks deterministically") {
    std::vector<PersonModeCounts> persons;
    for (int i = 0; i < 3; ++i)
        persons.push_back({"p" + std::to_string(i), {10, 10, 10, 10}});
    DatasetSplit a = slobo_split(persons, {1, 1, 1}, 5, 100);
    DatasetSplit b = slobo_split(persons, {1, 1, 1}, 5, 100);
    CHECK(a.train == b.train);
    CHECK(split_deviation(a, persons) == doctest::Approx(0.0));
}

TEST_CASE("slobo_split minimizes deviation over its sampled candidates") {
    Rng rng(33);
    auto persons = make_persons(rng, 23, 4);
    const SplitSizes sizes{16, 1, 6};
    DatasetSplit chosen = slobo_split(persons, sizes, 99, 500);
    const double chosen_dev = split_deviation(chosen, persons);
    // Independent rescoring of every candidate the function examined.
    auto candidates = slobo_candidates(persons, sizes, 99, 500);
    for (const auto& c : candidates) {
        // Straight-line deviation recount.
        std::vector<double> global(4, 0.0);
        double gtotal = 0.0;
        for (const auto& p : persons)
            for (size_t m = 0; m < 4; ++m) {
                global[m] += static_cast<double>(p.counts[m]);
                gtotal += static_cast<double>(p.counts[m]);
            }
        double dev = 0.0;
        const std::set<std::string>* subsets[3] = {&c.train, &c.validation, &c.test};
        for (const auto* subset : subsets) {
            std::vector<double> cnt(4, 0.0);
            double total = 0.0;
            for (const auto& p : persons) {
                if (!subset->count(p.person_id)) continue;
                for (size_t m = 0; m < 4; ++m) {
                    cnt[m] += static_cast<double>(p.counts[m]);
                    total += static_cast<double>(p.counts[m]);
                }
            }
            for (size_t m = 0; m < 4; ++m)
                dev = std::max(dev, std::abs(cnt[m] / total - global[m] / gtotal));
        }
        CHECK(chosen_dev <= dev + 1e-12);
    }
}

TEST_CASE("dataset records round-trip bit-exactly") {
    Rng rng(41);
    std::vector<DatasetRecord> records;
    for (int i = 0; i < 100; ++i) {
        records.push_back({"p" + std::to_string(i % 3), rng.next_uniform(-85.0, 85.0),
                           rng.next_uniform(-180.0, 180.0), 1e9 + i + rng.next_unit(),
                           i % 2 ? Mode::bus : Mode::walk});
    }
    std::ostringstream out;
    write_dataset(out, records, {"config echo line"});
    std::istringstream in(out.str());
    auto back = read_dataset(in, ClassSet(ClassSet::four));
    REQUIRE(back.size() == records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].person_id == records[i].person_id);
        CHECK(back[i].lat == records[i].lat);
        CHECK(back[i].lon == records[i].lon);
        CHECK(back[i].t == records[i].t);
        CHECK(back[i].mode == records[i].mode);
    }
}

TEST_CASE("read_dataset rejects unknown modes with a line number") {
    std::istringstream in("p1,0,0,1,hovercraft\n");
    CHECK_THROWS_AS(read_dataset(in, ClassSet(ClassSet::four)), DataError);
}

TEST_CASE("group_by_person sorts and groups records") {
    std::vector<DatasetRecord> records{
        {"b", 0, 0, 2.0, Mode::walk},
        {"a", 0, 0, 1.0, Mode::bus},
        {"b", 0, 0, 1.0, Mode::walk},
        {"a", 0, 0, 2.0, Mode::bus},
        {"a", 0, 0, 2.0, Mode::car}, // duplicate timestamp: dropped
    };
    size_t dropped = 0;
    auto grouped = group_by_person(records, &dropped);
    REQUIRE(grouped.size() == 2);
    CHECK(grouped[0].trajectory.person_id == "a");
    CHECK(grouped[0].size() == 2);
    CHECK(grouped[1].trajectory.person_id == "b");
    CHECK(grouped[1].size() == 2);
    CHECK(dropped == 1);
}

TEST_SUITE_END();
