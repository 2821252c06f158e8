#include <doctest.h>

#include <cmath>

#include "trackmode/embed.hpp"
#include "trackmode/rng.hpp"

using namespace trackmode;

namespace {

EmbeddingTable random_table(Rng& rng, const std::vector<size_t>& bins, size_t dim) {
    EmbeddingTable t;
    for (size_t b : bins) {
        Tensor m(b, dim);
        for (double& x : m.v) x = rng.next_normal(0.0, 1.0);
        t.per_feature.push_back(std::move(m));
    }
    return t;
}

std::vector<Vec> onehots_for(const std::vector<size_t>& indices,
                             const std::vector<size_t>& bins) {
    std::vector<Vec> out;
    for (size_t f = 0; f < indices.size(); ++f) {
        Vec v(bins[f], 0.0);
        v[indices[f]] = 1.0;
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace

TEST_SUITE_BEGIN("embed");

TEST_CASE("init: entries live in [0, 0.001] and are seed-deterministic") {
    auto a = init_embedding({20, 20, 20}, 50, 9);
    auto b = init_embedding({20, 20, 20}, 50, 9);
    auto c = init_embedding({20, 20, 20}, 50, 10);
    bool any_diff = false;
    for (size_t f = 0; f < 3; ++f) {
        CHECK(a.per_feature[f].v == b.per_feature[f].v);
        for (double x : a.per_feature[f].v) {
            CHECK(x >= 0.0);
            CHECK(x <= 0.001);
        }
        if (a.per_feature[f].v != c.per_feature[f].v) any_diff = true;
    }
    CHECK(any_diff);
    CHECK_THROWS_AS(init_embedding({5, 0}, 4, 1), std::invalid_argument);
}

TEST_CASE("matmul reproduces the two-feature worked example") {
    // W and U are 3x3; i = [0,1,0] picks row 2 of W, j = [0,0,1] row 3 of U.
    EmbeddingTable t;
    Tensor W(3, 3), U(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            W.at(r, c) = 10.0 * r + c;    // W21,W22,W23 -> 10,11,12
            U.at(r, c) = 100.0 * r + c;   // U31,U32,U33 -> 200,201,202
        }
    t.per_feature = {W, U};
    Vec e = embed_matmul({{0, 1, 0}, {0, 0, 1}}, t);
    REQUIRE(e.size() == 3);
    CHECK(e[0] == 10.0 + 200.0);
    CHECK(e[1] == 11.0 + 201.0);
    CHECK(e[2] == 12.0 + 202.0);

    // And the lookup route selects the same rows.
    Vec l = embed_lookup({1, 2}, t);
    CHECK(l == e);
}

TEST_CASE("matmul: all-zero indicators give the zero vector") {
    Rng rng(81);
    auto t = random_table(rng, {4, 6}, 5);
    Vec e = embed_matmul({Vec(4, 0.0), Vec(6, 0.0)}, t);
    for (double x : e) CHECK(x == 0.0);
}

TEST_CASE("matmul: fuzzy half/half indicators hit the row midpoint") {
    Rng rng(82);
    auto t = random_table(rng, {3}, 4);
    Vec e = embed_matmul({{0.5, 0.5, 0.0}}, t);
    for (size_t c = 0; c < 4; ++c)
        CHECK(e[c] ==
              doctest::Approx(0.5 * t.per_feature[0].at(0, c) + 0.5 * t.per_feature[0].at(1, c))
                  .epsilon(1e-15));
}

TEST_CASE("lookup and matmul agree exactly on random one-hot cases") {
    Rng rng(83);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<size_t> bins{1 + rng.bounded(8), 1 + rng.bounded(8), 1 + rng.bounded(8)};
        const size_t dim = 1 + rng.bounded(16);
        auto t = random_table(rng, bins, dim);
        std::vector<size_t> idx;
        for (size_t f = 0; f < bins.size(); ++f) idx.push_back(rng.bounded(bins[f]));
        CHECK(embed_lookup(idx, t) == embed_matmul(onehots_for(idx, bins), t));
    }
}

TEST_CASE("lookup: single feature returns the row verbatim") {
    Rng rng(84);
    auto t = random_table(rng, {7}, 9);
    Vec e = embed_lookup({4}, t);
    for (size_t c = 0; c < 9; ++c) CHECK(e[c] == t.per_feature[0].at(4, c));
}

TEST_CASE("lookup rejects out-of-range indices; matmul rejects bad shapes") {
    Rng rng(85);
    auto t = random_table(rng, {3, 3}, 2);
    CHECK_THROWS_AS(embed_lookup({3, 0}, t), std::invalid_argument);
    CHECK_THROWS_AS(embed_matmul({{1, 0}, {0, 0, 1}}, t), std::invalid_argument);
    CHECK_THROWS_AS(embed_matmul({{1, 0, 0}}, t), std::invalid_argument);
}

TEST_CASE("forward map is linear in the indicators") {
    Rng rng(86);
    auto t = random_table(rng, {5, 4}, 6);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<Vec> u{{Vec(5), Vec(4)}}, v{{Vec(5), Vec(4)}};
        for (auto* ind : {&u, &v})
            for (auto& f : *ind)
                for (double& x : f) x = rng.next_normal(0.0, 1.0);
        const double a = rng.next_normal(0.0, 2.0);
        const double b = rng.next_normal(0.0, 2.0);
        std::vector<Vec> mix{Vec(5), Vec(4)};
        for (size_t f = 0; f < 2; ++f)
            for (size_t r = 0; r < mix[f].size(); ++r) mix[f][r] = a * u[f][r] + b * v[f][r];
        Vec lhs = embed_matmul(mix, t);
        Vec eu = embed_matmul(u, t);
        Vec ev = embed_matmul(v, t);
        for (size_t c = 0; c < 6; ++c)
            CHECK(lhs[c] == doctest::Approx(a * eu[c] + b * ev[c]).epsilon(1e-12));
    }
}

TEST_CASE("backward: one-hot routes the upstream gradient to one row") {
    Rng rng(87);
    auto t = random_table(rng, {5, 3}, 4);
    Vec g{1.0, -2.0, 3.0, 0.5};
    auto grads = embed_backward(g, onehots_for({2, 0}, {5, 3}), t);
    size_t nonzero_rows = 0;
    for (size_t f = 0; f < 2; ++f)
        for (size_t r = 0; r < grads.per_feature[f].rows; ++r) {
            bool any = false;
            for (size_t c = 0; c < 4; ++c)
                if (grads.per_feature[f].at(r, c) != 0.0) any = true;
            if (any) ++nonzero_rows;
        }
    CHECK(nonzero_rows == 2); // one selected row per feature
    for (size_t c = 0; c < 4; ++c) {
        CHECK(grads.per_feature[0].at(2, c) == g[c]);
        CHECK(grads.per_feature[1].at(0, c) == g[c]);
    }
}

TEST_CASE("backward: zero upstream gradient zeroes the table gradient") {
    Rng rng(88);
    auto t = random_table(rng, {4}, 3);
    auto grads = embed_backward(Vec(3, 0.0), onehots_for({1}, {4}), t);
    for (double x : grads.per_feature[0].v) CHECK(x == 0.0);
}

TEST_CASE("backward matches central finite differences of the matmul") {
    Rng rng(89);
    const std::vector<size_t> bins{4, 3};
    const size_t dim = 5;
    auto t = random_table(rng, bins, dim);
    std::vector<Vec> ind{Vec(4), Vec(3)};
    for (auto& f : ind)
        for (double& x : f) x = rng.next_unit();
    Vec probe(dim);
    for (double& x : probe) x = rng.next_normal(0.0, 1.0);

    auto grads = embed_backward(probe, ind, t);
    const double h = 1e-6;
    for (size_t f = 0; f < bins.size(); ++f) {
        for (size_t r = 0; r < bins[f]; ++r) {
            for (size_t c = 0; c < dim; ++c) {
                auto loss = [&](double delta) {
                    EmbeddingTable tt = t;
                    tt.per_feature[f].at(r, c) += delta;
                    Vec e = embed_matmul(ind, tt);
                    double s = 0.0;
                    for (size_t k = 0; k < dim; ++k) s += probe[k] * e[k];
                    return s;
                };
                const double fd = (loss(h) - loss(-h)) / (2.0 * h);
                const double an = grads.per_feature[f].at(r, c);
                CHECK(std::abs(fd - an) <= 1e-6 * std::max({std::abs(fd), std::abs(an), 1.0}));
            }
        }
    }
}

TEST_SUITE_END();
