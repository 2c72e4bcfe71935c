// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_EXPERIMENT_HPP
#define EARVERIFY_CORE_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bc.hpp"
#include "dataset.hpp"
#include "metrics.hpp"
#include "platt.hpp"

namespace earverify {

enum class SplitPolicy { FirstK, SeededShuffle };

struct ProtocolConfig {
    int n_auth_train = 6;
    int n_auth_test = 24;
    SplitPolicy split_policy = SplitPolicy::FirstK;
    std::uint64_t rng_seed = 1;
    int threads = 0;
    double svm_c = 1.0;
    double svm_tol = 1e-3;
    std::size_t cache_mb = 64;
    int platt_folds = 5;
    bool store_curves = false;
};

struct SubjectSplit {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
};

// Deterministic per-subject train/test split. first_k takes measurements in
// file order; seeded_shuffle permutes with a stream derived from
// rng_seed and the subject id.
SubjectSplit split_subject(std::size_t n_measurements, const ProtocolConfig& cfg,
                           const std::string& subject_id);

// Scores from one (authorized, held-out impostor) combination.
struct PairResult {
    std::size_t auth_subject = 0;
    std::size_t imp_subject = 0;
    std::vector<double> genuine_scores;
    std::vector<double> impostor_scores;
};

// Trains one verifier (authorized train rows + every remaining subject's
// full data as unauthorized + optional generated rows) and scores the
// authorized test rows and the held-out impostor's rows.
PairResult run_pair(const StoredDataset& ds, std::size_t auth_subject,
                    std::size_t imp_subject,
                    const std::vector<SubjectSplit>& splits,
                    const std::optional<BcConfig>& bc, const ProtocolConfig& cfg);

struct ConditionResult {
    bool is_baseline = false;
    double r = 0.0;
    std::int64_t n_bc_requested = 0;
    std::int64_t n_bc = 0; // effective, after dataset-size scaling
    EvalReport report;
    bool star = false;
    bool has_curve = false;
    RocCurve curve;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::string dataset_digest;
    std::size_t n_subjects = 0;
    std::size_t n_pairs = 0;
    std::string split_policy = "first_k";
    std::vector<double> r_grid;
    std::vector<std::int64_t> nbc_grid;
    ConditionResult baseline;
    std::vector<ConditionResult> conditions;
    std::vector<std::string> warnings;
};

// Number of generated rows actually used for a requested grid value: the
// paper-scale grid is shrunk proportionally when the dataset offers fewer
// than 9,000 (authorized x impostor) training pairs.
std::int64_t scaled_n_bc(std::int64_t requested, std::int64_t capacity);

// Pools genuine/impostor scores over every ordered subject pair and reduces
// them to one report. bc == nullopt runs the baseline.
ConditionResult run_protocol(const StoredDataset& ds,
                             const std::optional<BcConfig>& bc,
                             const ProtocolConfig& cfg);

// Baseline plus one condition per (r, n_bc) grid cell, with star flags set
// where a condition beats the baseline on all five indexes.
RunReport grid_search(const StoredDataset& ds, const std::vector<double>& r_grid,
                      const std::vector<std::int64_t>& nbc_grid,
                      const ProtocolConfig& cfg);

std::string report_to_json(const RunReport& report);
void write_report(const RunReport& report, const std::string& path);
RunReport load_report(const std::string& path);

inline const std::vector<double>& paper_r_grid() {
    static const std::vector<double> g = {0.01, 0.05, 0.1, 0.2, 0.3,
                                          0.4,  0.5,  0.6, 0.7, 0.8, 0.9};
    return g;
}
inline const std::vector<std::int64_t>& paper_nbc_grid() {
    static const std::vector<std::int64_t> g = {9, 45, 90, 450, 900, 4500, 9000};
    return g;
}

} // namespace earverify

#endif
