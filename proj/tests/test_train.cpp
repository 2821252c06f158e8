#include <doctest.h>

#include <cmath>

#include "trackmode/error.hpp"
#include "trackmode/rng.hpp"
#include "trackmode/train.hpp"

using namespace trackmode;

namespace {

NetworkConfig tiny_config() {
    NetworkConfig cfg;
    cfg.n_features = 2;
    cfg.n_classes = 4;
    cfg.embedding_dim = 4;
    cfg.hidden = 3;
    cfg.pieces = 2;
    cfg.layers = 2;
    cfg.feature_bins = {5, 5};
    return cfg;
}

TrainSequence constant_sequence(Rng& rng, const NetworkConfig& cfg, size_t T, size_t label) {
    std::vector<std::vector<size_t>> idx(T);
    for (size_t t = 0; t < T; ++t)
        for (size_t f = 0; f < cfg.n_features; ++f) idx[t].push_back(rng.bounded(cfg.feature_bins[f]));
    TrainSequence seq;
    seq.input = EncodedSequence::from_indices(idx);
    seq.labels.assign(T, label);
    return seq;
}

void fill_grads(NetworkParams& grads, Rng& rng) {
    for (auto& ref : collect_params(grads))
        for (size_t i = 0; i < ref.size(); ++i) ref.data[i] = rng.next_normal(0.0, 1.0);
}

std::vector<double> snapshot(NetworkParams& p) {
    std::vector<double> out;
    for (auto& ref : collect_params(p))
        out.insert(out.end(), ref.data, ref.data + ref.size());
    return out;
}

} // namespace

TEST_SUITE_BEGIN("train");

TEST_CASE("adam: zero gradients leave parameters untouched") {
    NetworkParams p = init_network(tiny_config(), 21);
    NetworkParams grads = zero_like(p);
    OptimizerState state = make_optimizer_state(p);
    TrainConfig cfg;
    auto before = snapshot(p);
    for (int i = 0; i < 3; ++i) adam_step(p, grads, state, cfg);
    CHECK(snapshot(p) == before);
}

TEST_CASE("adam: first step moves by roughly -lr * sign(gradient)") {
    Rng rng(211);
    NetworkParams p = init_network(tiny_config(), 22);
    NetworkParams grads = zero_like(p);
    fill_grads(grads, rng);
    OptimizerState state = make_optimizer_state(p);
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.adam_epsilon = 1e-12;
    auto before = snapshot(p);
    auto gvals = snapshot(grads);
    adam_step(p, grads, state, cfg);
    auto after = snapshot(p);
    for (size_t i = 0; i < after.size(); ++i) {
        if (std::abs(gvals[i]) < 1e-6) continue;
        const double step = after[i] - before[i];
        CHECK(step == doctest::Approx(-cfg.learning_rate * (gvals[i] > 0 ? 1.0 : -1.0))
                          .epsilon(1e-6));
    }
}

TEST_CASE("adam matches an independently coded reference over 5 steps") {
    Rng rng(212);
    NetworkParams p = init_network(tiny_config(), 23);
    OptimizerState state = make_optimizer_state(p);
    TrainConfig cfg;
    cfg.learning_rate = 0.05;

    // Reference state over the flattened parameter vector.
    std::vector<double> theta = snapshot(p);
    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);

    for (int step = 1; step <= 5; ++step) {
        NetworkParams grads = zero_like(p);
        Rng grng(Rng::mix(212, static_cast<uint64_t>(step)));
        fill_grads(grads, grng);
        auto g = snapshot(grads);
        adam_step(p, grads, state, cfg);

        for (size_t i = 0; i < theta.size(); ++i) {
            m[i] = 0.9 * m[i] + 0.1 * g[i];
            v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
            const double mh = m[i] / (1.0 - std::pow(0.9, step));
            const double vh = v[i] / (1.0 - std::pow(0.999, step));
            theta[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_epsilon);
        }
    }
    auto got = snapshot(p);
    for (size_t i = 0; i < theta.size(); ++i) CHECK(std::abs(got[i] - theta[i]) <= 1e-10);
}

TEST_CASE("chunking: 250 points at chunk 100 give lengths 100,100,50") {
    Rng rng(213);
    NetworkConfig cfg = tiny_config();
    std::vector<TrainSequence> data{constant_sequence(rng, cfg, 250, 0)};
    auto batches = chunk_sequences(data, 100, 1000, 5, 0);
    REQUIRE(batches.size() == 1);
    std::vector<size_t> sizes;
    for (const auto& c : batches[0]) sizes.push_back(c.end - c.begin);
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<size_t>{50, 100, 100});
}

TEST_CASE("chunking: chunk_length beyond the max length gives one chunk per sequence") {
    Rng rng(214);
    NetworkConfig cfg = tiny_config();
    std::vector<TrainSequence> data{constant_sequence(rng, cfg, 40, 0),
                                    constant_sequence(rng, cfg, 25, 1)};
    auto batches = chunk_sequences(data, 1000, 64, 5, 0);
    size_t chunks = 0;
    for (const auto& b : batches) chunks += b.size();
    CHECK(chunks == 2);
}

TEST_CASE("chunking is deterministic per (seed, epoch) and varies across epochs") {
    Rng rng(215);
    NetworkConfig cfg = tiny_config();
    std::vector<TrainSequence> data{constant_sequence(rng, cfg, 500, 0),
                                    constant_sequence(rng, cfg, 300, 1)};
    auto a = chunk_sequences(data, 50, 4, 9, 3);
    auto b = chunk_sequences(data, 50, 4, 9, 3);
    REQUIRE(a.size() == b.size());
    bool identical = true;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j)
            if (a[i][j].sequence != b[i][j].sequence || a[i][j].begin != b[i][j].begin)
                identical = false;
    CHECK(identical);
    auto c = chunk_sequences(data, 50, 4, 9, 4);
    bool same_order = a.size() == c.size();
    if (same_order)
        for (size_t i = 0; i < a.size() && same_order; ++i)
            for (size_t j = 0; j < a[i].size() && same_order; ++j)
                if (a[i][j].begin != c[i][j].begin || a[i][j].sequence != c[i][j].sequence)
                    same_order = false;
    CHECK_FALSE(same_order);
}

TEST_CASE("chunking rejects an empty dataset") {
    CHECK_THROWS_AS(chunk_sequences({}, 10, 4, 1, 0), std::invalid_argument);
}

TEST_CASE("early stopper: improvement only in epochs 1-2 stops after patience 3") {
    EarlyStopper stopper(3);
    CHECK(stopper.observe(1.00)); // epoch 1 improves
    CHECK(stopper.observe(0.80)); // epoch 2 improves
    CHECK_FALSE(stopper.observe(0.90));
    CHECK_FALSE(stopper.should_stop());
    CHECK_FALSE(stopper.observe(0.85));
    CHECK_FALSE(stopper.should_stop());
    CHECK_FALSE(stopper.observe(0.95)); // epoch 5: third stale epoch
    CHECK(stopper.should_stop());
    CHECK(stopper.best_epoch() == 2);
    CHECK(stopper.best_value() == 0.80);
}

TEST_CASE("training a constant-class dataset drives the loss to near zero") {
    Rng rng(216);
    NetworkConfig cfg = tiny_config();
    NetworkParams params = init_network(cfg, 31);
    std::vector<TrainSequence> train{constant_sequence(rng, cfg, 2000, 2)};
    std::vector<TrainSequence> val{constant_sequence(rng, cfg, 200, 2)};
    TrainConfig tc;
    tc.learning_rate = 0.05;
    tc.chunk_length = 25;
    tc.batch_size = 2;
    tc.max_epochs = 5;
    tc.patience = 0; // run all epochs
    tc.seed = 3;
    TrainResult result = train_network(train, val, std::move(params), tc);
    REQUIRE(!result.log.empty());
    CHECK(result.log.back().val_loss <= 0.01);
    CHECK(result.log.back().val_point_accuracy == 1.0);
}

TEST_CASE("training is bit-reproducible for identical config and seeds") {
    Rng rng(217);
    NetworkConfig cfg = tiny_config();
    std::vector<TrainSequence> train{constant_sequence(rng, cfg, 300, 1),
                                     constant_sequence(rng, cfg, 300, 3)};
    std::vector<TrainSequence> val{constant_sequence(rng, cfg, 100, 1)};
    TrainConfig tc;
    tc.max_epochs = 3;
    tc.chunk_length = 40;
    tc.batch_size = 3;
    tc.seed = 11;
    TrainResult a = train_network(train, val, init_network(cfg, 5), tc);
    TrainResult b = train_network(train, val, init_network(cfg, 5), tc);
    CHECK(snapshot(a.best_params) == snapshot(b.best_params));
    REQUIRE(a.log.size() == b.log.size());
    for (size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].train_loss == b.log[i].train_loss);
        CHECK(a.log[i].val_loss == b.log[i].val_loss);
    }
}

TEST_CASE("the returned snapshot matches the best validation loss in the log") {
    Rng rng(218);
    NetworkConfig cfg = tiny_config();
    std::vector<TrainSequence> train{constant_sequence(rng, cfg, 400, 0),
                                     constant_sequence(rng, cfg, 400, 2)};
    std::vector<TrainSequence> val{constant_sequence(rng, cfg, 150, 0),
                                   constant_sequence(rng, cfg, 150, 2)};
    TrainConfig tc;
    tc.max_epochs = 4;
    tc.chunk_length = 50;
    tc.batch_size = 4;
    TrainResult result = train_network(train, val, init_network(cfg, 6), tc);
    double best = result.log.front().val_loss;
    for (const auto& e : result.log) best = std::min(best, e.val_loss);
    auto [loss, acc] = evaluate_loss_accuracy(result.best_params, val);
    CHECK(loss == best);
    CHECK(result.log.size() <= tc.max_epochs);
}

TEST_CASE("divergent training aborts with epoch and batch in the diagnostic") {
    Rng rng(219);
    NetworkConfig cfg = tiny_config();
    NetworkParams params = init_network(cfg, 7);
    // A destructive learning rate explodes the unbounded maxout candidates.
    std::vector<TrainSequence> train{constant_sequence(rng, cfg, 400, 0),
                                     constant_sequence(rng, cfg, 400, 1)};
    std::vector<TrainSequence> val{constant_sequence(rng, cfg, 50, 0)};
    TrainConfig tc;
    tc.learning_rate = 1e8;
    tc.max_epochs = 50;
    tc.chunk_length = 20;
    tc.batch_size = 1;
    bool diverged = false;
    try {
        train_network(train, val, std::move(params), tc);
    } catch (const DivergenceError& e) {
        diverged = true;
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
        CHECK(e.epoch() >= 1);
    }
    CHECK(diverged); // unbounded maxout candidates cannot survive 1e8 steps
}

TEST_CASE("gradient clipping caps the global norm") {
    NetworkParams grads = zero_like(init_network(tiny_config(), 8));
    Rng rng(220);
    fill_grads(grads, rng);
    clip_gradients(grads, 1.5);
    double sq = 0.0;
    for (auto& ref : collect_params(grads))
        for (size_t i = 0; i < ref.size(); ++i) sq += ref.data[i] * ref.data[i];
    CHECK(std::sqrt(sq) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_SUITE_END();
