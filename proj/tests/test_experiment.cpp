// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "experiment.hpp"
#include "rng.hpp"

using namespace earverify;

TEST_SUITE_BEGIN("experiment");

namespace {

// Fabricated dataset: per-subject Gaussian clusters, no DSP involved. Cheap
// enough for protocol-level tests at any subject count.
StoredDataset fabricated_dataset(std::size_t n_subjects, std::size_t n_measurements,
                                 std::uint64_t seed, double spread = 0.05) {
    StoredDataset ds;
    ds.digest = "fabricated";
    for (std::size_t s = 0; s < n_subjects; ++s) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "S%03zu", s + 1);
        ds.subject_ids.push_back(buf);
        Rng center_rng(derive_seed(seed, std::string("center/") + buf));
        std::vector<double> center(kFeatureDim);
        for (auto& v : center) v = center_rng.normal();
        std::vector<std::vector<double>> rows;
        Rng noise_rng(derive_seed(seed, std::string("noise/") + buf));
        for (std::size_t m = 0; m < n_measurements; ++m) {
            std::vector<double> row(kFeatureDim);
            for (std::size_t d = 0; d < kFeatureDim; ++d) {
                row[d] = center[d] + spread * noise_rng.normal();
            }
            rows.push_back(std::move(row));
        }
        ds.features.push_back(std::move(rows));
    }
    return ds;
}

ProtocolConfig small_protocol(std::size_t n_measurements) {
    ProtocolConfig cfg;
    cfg.n_auth_train = 2;
    cfg.n_auth_test = static_cast<int>(n_measurements) - 2;
    cfg.threads = 1;
    return cfg;
}

} // namespace

TEST_CASE("split_subject") {
    ProtocolConfig cfg;
    SUBCASE("first_k takes the first six") {
        const auto split = split_subject(30, cfg, "S001");
        REQUIRE(split.train_idx.size() == 6);
        REQUIRE(split.test_idx.size() == 24);
        for (std::size_t i = 0; i < 6; ++i) CHECK(split.train_idx[i] == i);
        for (std::size_t i = 0; i < 24; ++i) CHECK(split.test_idx[i] == i + 6);
    }
    SUBCASE("seeded_shuffle is deterministic per subject and seed") {
        cfg.split_policy = SplitPolicy::SeededShuffle;
        const auto a = split_subject(30, cfg, "S001");
        const auto b = split_subject(30, cfg, "S001");
        CHECK(a.train_idx == b.train_idx);
        CHECK(a.test_idx == b.test_idx);
    }
    SUBCASE("different subjects draw independent permutations") {
        cfg.split_policy = SplitPolicy::SeededShuffle;
        std::set<std::vector<std::size_t>> seen;
        for (int s = 0; s < 52; ++s) {
            const auto split = split_subject(30, cfg, "S" + std::to_string(s));
            // split covers every index exactly once
            std::set<std::size_t> all(split.train_idx.begin(), split.train_idx.end());
            all.insert(split.test_idx.begin(), split.test_idx.end());
            REQUIRE(all.size() == 30);
            seen.insert(split.train_idx);
        }
        CHECK(seen.size() >= 50); // collisions astronomically unlikely
    }
    SUBCASE("wrong measurement count rejected") {
        CHECK_THROWS_AS(split_subject(29, cfg, "S001"), Error);
    }
}

TEST_CASE("scaled_n_bc") {
    CHECK(scaled_n_bc(9000, 9000) == 9000);   // paper scale, unscaled
    CHECK(scaled_n_bc(4500, 9000) == 4500);
    CHECK(scaled_n_bc(4500, 1800) == 900);    // 12-subject analogue
    CHECK(scaled_n_bc(9, 1800) == 2);
    CHECK(scaled_n_bc(9000, 1800) == 1800);
    CHECK(scaled_n_bc(4500, 18000) == 4500);  // larger datasets stay unscaled
}

TEST_CASE("run_pair counts and preconditions") {
    const auto ds = fabricated_dataset(4, 10, 21);
    const auto cfg = small_protocol(10);
    std::vector<SubjectSplit> splits;
    for (std::size_t s = 0; s < ds.n_subjects(); ++s) {
        splits.push_back(split_subject(10, cfg, ds.subject_ids[s]));
    }
    const PairResult res = run_pair(ds, 0, 2, splits, std::nullopt, cfg);
    CHECK(res.genuine_scores.size() == 8);
    CHECK(res.impostor_scores.size() == 10);
    for (double v : res.genuine_scores) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
    CHECK_THROWS_AS(run_pair(ds, 1, 1, splits, std::nullopt, cfg), Error);
}

TEST_CASE("training-set size for a pair follows the protocol arithmetic") {
    // 6 auth + (n-2)*30 impostors, plus generated rows
    const auto ds = fabricated_dataset(52, 30, 22);
    ProtocolConfig cfg;
    std::vector<SubjectSplit> splits;
    for (std::size_t s = 0; s < ds.n_subjects(); ++s) {
        splits.push_back(split_subject(30, cfg, ds.subject_ids[s]));
    }
    // assemble exactly what run_pair trains on
    std::vector<std::vector<double>> auth_train;
    for (std::size_t i : splits[0].train_idx) auth_train.push_back(ds.features[0][i]);
    std::vector<std::vector<double>> imp_train;
    for (std::size_t s = 1; s < ds.n_subjects(); ++s) {
        if (s == 1) continue; // held-out impostor
        for (const auto& row : ds.features[s]) imp_train.push_back(row);
    }
    CHECK(auth_train.size() + imp_train.size() == 1506);
    const auto with_bc = build_training_set(auth_train, imp_train, {0.4, 9000});
    CHECK(with_bc.size() == 10506);
}

TEST_CASE("run_protocol pools scores over all ordered pairs") {
    const auto ds = fabricated_dataset(3, 6, 23);
    auto cfg = small_protocol(6);
    const ConditionResult res = run_protocol(ds, std::nullopt, cfg);
    // 3 subjects -> 6 ordered pairs; 6*4 genuine, 6*6 impostor scores pooled
    CHECK(res.is_baseline);
    CHECK(res.report.auc >= 0.0);
    // protocol needs at least 3 subjects
    const auto tiny = fabricated_dataset(2, 6, 23);
    CHECK_THROWS_AS(run_protocol(tiny, std::nullopt, cfg), Error);
}

TEST_CASE("n_bc = 0 condition reproduces the baseline exactly") {
    const auto ds = fabricated_dataset(4, 8, 24, 0.4);
    ProtocolConfig cfg;
    cfg.n_auth_train = 2;
    cfg.n_auth_test = 6;
    cfg.threads = 1;
    const ConditionResult base = run_protocol(ds, std::nullopt, cfg);
    const ConditionResult cond = run_protocol(ds, BcConfig{0.3, 0}, cfg);
    CHECK(cond.report.auc == base.report.auc);
    CHECK(cond.report.eer_pct == base.report.eer_pct);
    CHECK(cond.report.frr_at_far_pct == base.report.frr_at_far_pct);
}

TEST_CASE("grid_search structure, star flags, and count conservation") {
    const auto ds = fabricated_dataset(5, 8, 25, 0.8);
    ProtocolConfig cfg;
    cfg.n_auth_train = 2;
    cfg.n_auth_test = 6;
    cfg.threads = 2;
    cfg.store_curves = true;
    const RunReport rep = grid_search(ds, {0.2, 0.5}, {4, 4500}, cfg);

    CHECK(rep.n_pairs == 20);
    REQUIRE(rep.conditions.size() == 4);
    CHECK(rep.baseline.is_baseline);

    // count conservation through the pooled curves: pairs*6 genuine,
    // pairs*8 impostor scores -> at most that many distinct thresholds
    REQUIRE(rep.baseline.has_curve);
    CHECK(rep.baseline.curve.points.size() <= 20 * 6 + 20 * 8 + 1);

    const std::int64_t capacity = 2 * 3 * 8;
    for (const auto& c : rep.conditions) {
        CHECK(c.n_bc == scaled_n_bc(c.n_bc_requested, capacity));
        const bool all_five =
            c.report.auc > rep.baseline.report.auc &&
            c.report.eer_pct < rep.baseline.report.eer_pct &&
            c.report.frr_at_far_pct.at(0.01) < rep.baseline.report.frr_at_far_pct.at(0.01) &&
            c.report.frr_at_far_pct.at(0.1) < rep.baseline.report.frr_at_far_pct.at(0.1) &&
            c.report.frr_at_far_pct.at(1.0) < rep.baseline.report.frr_at_far_pct.at(1.0);
        CHECK(c.star == all_five);
    }
}

TEST_CASE("parallel and sequential grids are bit-identical") {
    const auto ds = fabricated_dataset(4, 6, 26, 0.6);
    ProtocolConfig cfg;
    cfg.n_auth_train = 2;
    cfg.n_auth_test = 4;
    cfg.store_curves = true;

    cfg.threads = 1;
    const RunReport a = grid_search(ds, {0.3}, {9, 450}, cfg);
    cfg.threads = 4;
    const RunReport b = grid_search(ds, {0.3}, {9, 450}, cfg);
    CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("infeasible conditions are skipped with a warning") {
    const auto ds = fabricated_dataset(3, 4, 27);
    ProtocolConfig cfg;
    cfg.n_auth_train = 2;
    cfg.n_auth_test = 2;
    cfg.threads = 1;
    // capacity = 2 * (1 subject * 4 rows) = 8; request beyond the paper cap
    const RunReport rep = grid_search(ds, {0.5}, {90000}, cfg);
    CHECK(rep.conditions.empty());
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].find("skipped") != std::string::npos);
    CHECK(!rep.baseline.report.frr_at_far_pct.empty());
}

TEST_CASE("report JSON round trip") {
    const auto ds = fabricated_dataset(3, 5, 28, 0.7);
    ProtocolConfig cfg;
    cfg.n_auth_train = 2;
    cfg.n_auth_test = 3;
    cfg.threads = 1;
    cfg.store_curves = true;
    const RunReport rep = grid_search(ds, {0.4}, {9}, cfg);

    const auto path = std::filesystem::temp_directory_path() / "evtest_report.json";
    write_report(rep, path.string());
    const RunReport loaded = load_report(path.string());
    CHECK(report_to_json(loaded) == report_to_json(rep));
    std::filesystem::remove(path);
}

TEST_CASE("dataset file round trip preserves bytes and digest") {
    auto ds = fabricated_dataset(3, 4, 29);
    const auto dir = std::filesystem::temp_directory_path() / "evtest_ds";
    std::filesystem::remove_all(dir);
    write_dataset(ds, dir.string());
    const StoredDataset loaded = load_dataset((dir / "manifest.json").string());
    REQUIRE(loaded.n_subjects() == 3);
    CHECK(loaded.total_rows() == 12);
    for (std::size_t s = 0; s < 3; ++s) {
        REQUIRE(loaded.subject_ids[s] == ds.subject_ids[s]);
        for (std::size_t m = 0; m < 4; ++m) {
            REQUIRE(loaded.features[s][m] == ds.features[s][m]); // full precision
        }
    }
    // digest matches the manifest and the bytes on disk
    std::ifstream csv(dir / "features.csv", std::ios::binary);
    std::stringstream buf;
    buf << csv.rdbuf();
    CHECK(loaded.digest == to_hex16(fnv1a64(buf.str().data(), buf.str().size())));
    std::filesystem::remove_all(dir);
}

TEST_CASE("tampered dataset digest is rejected") {
    auto ds = fabricated_dataset(3, 4, 30);
    const auto dir = std::filesystem::temp_directory_path() / "evtest_ds_bad";
    std::filesystem::remove_all(dir);
    write_dataset(ds, dir.string());
    {
        std::ofstream csv(dir / "features.csv", std::ios::app | std::ios::binary);
        csv << "tampered\n";
    }
    CHECK_THROWS_AS(load_dataset((dir / "manifest.json").string()), Error);
    std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
