// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>

#include "bc.hpp"
#include "rng.hpp"

using namespace earverify;

TEST_SUITE_BEGIN("bc");

namespace {

std::vector<std::vector<double>> random_rows(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
    for (auto& row : rows) {
        for (auto& v : row) v = rng.normal();
    }
    return rows;
}

} // namespace

TEST_CASE("bc_combine") {
    SUBCASE("midpoint") {
        CHECK(bc_combine({1, 0}, {0, 1}, 0.5) == std::vector<double>{0.5, 0.5});
    }
    SUBCASE("convexity fixed point") {
        const std::vector<double> v{3.0, -1.0, 7.5};
        for (double r : {0.3, 0.5, 0.9}) {
            const auto out = bc_combine(v, v, r);
            for (std::size_t i = 0; i < v.size(); ++i) {
                CHECK(out[i] == doctest::Approx(v[i]).epsilon(1e-15));
            }
        }
    }
    SUBCASE("hand-computed mix") {
        const auto out = bc_combine({2, 4}, {-2, 0}, 0.4);
        CHECK(out[0] == doctest::Approx(-0.4).epsilon(1e-12));
        CHECK(out[1] == doctest::Approx(1.6).epsilon(1e-12));
    }
    SUBCASE("ratio domain") {
        CHECK_THROWS_AS(bc_combine({1}, {2}, 0.0), Error);
        CHECK_THROWS_AS(bc_combine({1}, {2}, 1.0), Error);
        CHECK_THROWS_AS(bc_combine({1}, {2}, 1.5), Error);
        CHECK_THROWS_AS(bc_combine({1}, {2}, -0.2), Error);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(bc_combine({1, 2}, {1}, 0.5), Error);
    }
}

TEST_CASE("cosine_similarity") {
    CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({1, 1}, {3, 3}) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1, 0}, {-1, 0}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(cosine_similarity({0, 0}, {1, 1}), Error);
}

TEST_CASE("generate_bc_features picks the highest-cosine pair first") {
    const std::vector<std::vector<double>> auth{{1.0, 0.0}};
    const std::vector<std::vector<double>> imp{{1.0, 0.01}, {0.0, 1.0}};
    const auto out = generate_bc_features(auth, imp, {0.5, 1});
    REQUIRE(out.size() == 1);
    // combined with (1, 0.01), the near-parallel impostor
    CHECK(out[0][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out[0][1] == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("n_bc = 0 yields an empty list") {
    Rng rng(31);
    const auto auth = random_rows(rng, 3, 8);
    const auto imp = random_rows(rng, 5, 8);
    CHECK(generate_bc_features(auth, imp, {0.4, 0}).empty());
}

TEST_CASE("n_bc beyond the pair capacity is rejected") {
    Rng rng(32);
    const auto auth = random_rows(rng, 2, 4);
    const auto imp = random_rows(rng, 3, 4);
    CHECK_THROWS_AS(generate_bc_features(auth, imp, {0.4, 7}), Error);
    CHECK(generate_bc_features(auth, imp, {0.4, 6}).size() == 6);
}

TEST_CASE("every output lies on the segment between its parents") {
    Rng rng(33);
    const auto auth = random_rows(rng, 4, 16);
    const auto imp = random_rows(rng, 6, 16);
    const BcConfig cfg{0.3, 24};
    const auto out = generate_bc_features(auth, imp, cfg);
    REQUIRE(out.size() == 24);
    for (const auto& bc : out) {
        // find the parent pair this row came from
        bool matched = false;
        for (const auto& a : auth) {
            for (const auto& b : imp) {
                const auto mix = bc_combine(a, b, cfg.r);
                bool equal = true;
                for (std::size_t i = 0; i < mix.size(); ++i) {
                    if (std::fabs(mix[i] - bc[i]) > 1e-12) {
                        equal = false;
                        break;
                    }
                }
                if (!equal) continue;
                matched = true;
                double d1 = 0.0, d2 = 0.0;
                for (std::size_t i = 0; i < mix.size(); ++i) {
                    REQUIRE(bc[i] >= std::min(a[i], b[i]) - 1e-12);
                    REQUIRE(bc[i] <= std::max(a[i], b[i]) + 1e-12);
                    d1 += (bc[i] - a[i]) * (bc[i] - a[i]);
                    d2 += (bc[i] - b[i]) * (bc[i] - b[i]);
                }
                d1 = std::sqrt(d1);
                d2 = std::sqrt(d2);
                // |bc - x1| / (|bc - x1| + |bc - x2|) = 1 - r
                CHECK(d1 / (d1 + d2) == doctest::Approx(1.0 - cfg.r).epsilon(1e-9));
            }
        }
        CHECK(matched);
    }
}

TEST_CASE("output is invariant under permutation of the input lists") {
    Rng rng(34);
    auto auth = random_rows(rng, 5, 12);
    auto imp = random_rows(rng, 7, 12);
    const BcConfig cfg{0.25, 20};
    const auto want = generate_bc_features(auth, imp, cfg);

    Rng shuffler(35);
    for (int trial = 0; trial < 5; ++trial) {
        shuffler.shuffle(auth);
        shuffler.shuffle(imp);
        CHECK(generate_bc_features(auth, imp, cfg) == want);
    }
}

TEST_CASE("pair selection is scale invariant") {
    Rng rng(36);
    auto auth = random_rows(rng, 4, 10);
    auto imp = random_rows(rng, 5, 10);
    const BcConfig cfg{0.5, 8};
    const auto before = generate_bc_features(auth, imp, cfg);

    // scaling a parent must not change which pairs are selected
    auto scaled_imp = imp;
    for (auto& v : scaled_imp[2]) v *= 42.0;
    const auto after = generate_bc_features(auth, scaled_imp, cfg);
    REQUIRE(after.size() == before.size());
    int changed = 0;
    for (std::size_t k = 0; k < before.size(); ++k) {
        if (before[k] != after[k]) ++changed;
    }
    // only rows built from the scaled parent may differ in value
    for (std::size_t k = 0; k < after.size(); ++k) {
        bool from_scaled = false;
        for (const auto& a : auth) {
            const auto mix = bc_combine(a, scaled_imp[2], cfg.r);
            if (mix == after[k]) from_scaled = true;
        }
        if (before[k] != after[k]) CHECK(from_scaled);
    }
    (void)changed;
}

TEST_CASE("build_training_set counts and labels") {
    SUBCASE("paper-scale counts") {
        Rng rng(37);
        const auto auth = random_rows(rng, 6, 4);
        const auto imp = random_rows(rng, 1500, 4);
        const auto ds = build_training_set(auth, imp, {0.4, 9000});
        CHECK(ds.size() == 10506);
        std::size_t n_auth = 0, n_bc = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] == Label::Authorized) ++n_auth;
            if (ds.origins[i] == Origin::BcGenerated) {
                ++n_bc;
                CHECK(ds.labels[i] == Label::Unauthorized);
            }
        }
        CHECK(n_auth == 6);
        CHECK(n_bc == 9000);
    }
    SUBCASE("baseline counts") {
        Rng rng(38);
        const auto auth = random_rows(rng, 6, 4);
        const auto imp = random_rows(rng, 1500, 4);
        const auto ds = build_training_set(auth, imp, {0.4, 0});
        CHECK(ds.size() == 1506);
    }
    SUBCASE("minimal set") {
        Rng rng(39);
        const auto auth = random_rows(rng, 1, 4);
        const auto imp = random_rows(rng, 1, 4);
        const auto ds = build_training_set(auth, imp, {0.7, 1});
        REQUIRE(ds.size() == 3);
        int unauthorized = 0;
        for (Label l : ds.labels) {
            if (l == Label::Unauthorized) ++unauthorized;
        }
        CHECK(unauthorized == 2);
    }
}

TEST_SUITE_END();
