// SPDX-License-Identifier: Apache-2.0
#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "common.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace earverify {

using nlohmann::json;

SubjectSplit split_subject(std::size_t n_measurements, const ProtocolConfig& cfg,
                           const std::string& subject_id) {
    const std::size_t want =
        static_cast<std::size_t>(cfg.n_auth_train) + static_cast<std::size_t>(cfg.n_auth_test);
    require(cfg.n_auth_train > 0 && cfg.n_auth_test > 0, ErrorKind::InvalidArgument,
            "split_subject: split sizes must be positive");
    require(n_measurements == want, ErrorKind::InvalidArgument,
            "split_subject: subject has " + std::to_string(n_measurements) +
                " measurements, expected " + std::to_string(want));

    std::vector<std::size_t> order(n_measurements);
    std::iota(order.begin(), order.end(), 0);
    if (cfg.split_policy == SplitPolicy::SeededShuffle) {
        Rng rng(derive_seed(cfg.rng_seed, "split/" + subject_id));
        rng.shuffle(order);
    }
    SubjectSplit split;
    split.train_idx.assign(order.begin(), order.begin() + cfg.n_auth_train);
    split.test_idx.assign(order.begin() + cfg.n_auth_train, order.end());
    return split;
}

std::int64_t scaled_n_bc(std::int64_t requested, std::int64_t capacity) {
    constexpr std::int64_t kPaperCapacity = 9000; // 6 x 1500 ordered pairs
    if (capacity >= kPaperCapacity) return requested;
    return std::llround(static_cast<double>(requested) *
                        static_cast<double>(capacity) /
                        static_cast<double>(kPaperCapacity));
}

namespace {

struct PairScores {
    std::vector<double> genuine;
    std::vector<double> impostor;
};

// Work shared by all conditions of one (auth, impostor) combination.
struct PairContext {
    std::vector<std::vector<double>> auth_train;
    std::vector<std::vector<double>> imp_train;
    std::vector<std::vector<double>> auth_test;
    std::vector<std::vector<double>> imp_test;
};

PairContext make_pair_context(const StoredDataset& ds, std::size_t auth_subject,
                              std::size_t imp_subject,
                              const std::vector<SubjectSplit>& splits) {
    PairContext ctx;
    const auto& auth_rows = ds.features[auth_subject];
    const auto& split = splits[auth_subject];
    for (std::size_t i : split.train_idx) ctx.auth_train.push_back(auth_rows[i]);
    for (std::size_t i : split.test_idx) ctx.auth_test.push_back(auth_rows[i]);
    for (std::size_t s = 0; s < ds.n_subjects(); ++s) {
        if (s == auth_subject || s == imp_subject) continue;
        for (const auto& row : ds.features[s]) ctx.imp_train.push_back(row);
    }
    ctx.imp_test = ds.features[imp_subject];
    return ctx;
}

PairScores score_condition(const PairContext& ctx, const std::optional<BcConfig>& bc,
                           const ProtocolConfig& cfg) {
    // baseline == a condition with no generated rows
    const BcConfig cond = bc.value_or(BcConfig{0.5, 0});
    LabeledDataset train = build_training_set(ctx.auth_train, ctx.imp_train, cond);

    KernelParams params;
    params.c = cfg.svm_c;
    params.gamma = default_gamma(train);

    TrainOptions opts;
    opts.tol = cfg.svm_tol;
    opts.cache_mb = cfg.cache_mb;

    const CalibratedSvm svm =
        train_calibrated_svm(train, params, opts, cfg.platt_folds);

    PairScores out;
    out.genuine.reserve(ctx.auth_test.size());
    for (const auto& row : ctx.auth_test) {
        out.genuine.push_back(posterior(svm.model, svm.platt, row));
    }
    out.impostor.reserve(ctx.imp_test.size());
    for (const auto& row : ctx.imp_test) {
        out.impostor.push_back(posterior(svm.model, svm.platt, row));
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            if (a != i) pairs.emplace_back(a, i);
        }
    }
    return pairs;
}

std::vector<SubjectSplit> make_splits(const StoredDataset& ds, const ProtocolConfig& cfg) {
    std::vector<SubjectSplit> splits;
    splits.reserve(ds.n_subjects());
    for (std::size_t s = 0; s < ds.n_subjects(); ++s) {
        splits.push_back(
            split_subject(ds.features[s].size(), cfg, ds.subject_ids[s]));
    }
    return splits;
}

void validate_protocol(const StoredDataset& ds) {
    require(ds.n_subjects() >= 3, ErrorKind::InvalidArgument,
            "protocol: need at least 3 subjects");
}

bool beats_baseline(const EvalReport& cond, const EvalReport& base) {
    if (!(cond.auc > base.auc)) return false;
    if (!(cond.eer_pct < base.eer_pct)) return false;
    for (double far : report_far_targets()) {
        if (!(cond.frr_at_far_pct.at(far) < base.frr_at_far_pct.at(far))) return false;
    }
    return true;
}

} // namespace

PairResult run_pair(const StoredDataset& ds, std::size_t auth_subject,
                    std::size_t imp_subject,
                    const std::vector<SubjectSplit>& splits,
                    const std::optional<BcConfig>& bc, const ProtocolConfig& cfg) {
    validate_protocol(ds);
    require(auth_subject != imp_subject, ErrorKind::InvalidArgument,
            "run_pair: authorized and impostor subject must differ");
    require(auth_subject < ds.n_subjects() && imp_subject < ds.n_subjects(),
            ErrorKind::InvalidArgument, "run_pair: subject index out of range");

    const PairContext ctx = make_pair_context(ds, auth_subject, imp_subject, splits);
    const PairScores scores = score_condition(ctx, bc, cfg);

    PairResult result;
    result.auth_subject = auth_subject;
    result.imp_subject = imp_subject;
    result.genuine_scores = scores.genuine;
    result.impostor_scores = scores.impostor;
    return result;
}

// Runs every ordered pair once per condition. Pairs are independent work
// units; scores land in slots indexed by (pair, condition), so pooled output
// is identical for any thread count.
static std::vector<ConditionResult> run_conditions(
    const StoredDataset& ds, const std::vector<std::optional<BcConfig>>& conditions,
    const ProtocolConfig& cfg) {
    validate_protocol(ds);
    const auto splits = make_splits(ds, cfg);
    const auto pairs = ordered_pairs(ds.n_subjects());

    std::vector<std::vector<PairScores>> scores(
        pairs.size(), std::vector<PairScores>(conditions.size()));
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t p) {
        const PairContext ctx =
            make_pair_context(ds, pairs[p].first, pairs[p].second, splits);
        for (std::size_t c = 0; c < conditions.size(); ++c) {
            scores[p][c] = score_condition(ctx, conditions[c], cfg);
        }
    });

    std::vector<ConditionResult> results(conditions.size());
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        ScoreSet pooled;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            pooled.genuine.insert(pooled.genuine.end(), scores[p][c].genuine.begin(),
                                  scores[p][c].genuine.end());
            pooled.impostor.insert(pooled.impostor.end(),
                                   scores[p][c].impostor.begin(),
                                   scores[p][c].impostor.end());
        }
        ConditionResult& r = results[c];
        r.report = evaluate_scores(pooled);
        if (conditions[c]) {
            r.r = conditions[c]->r;
            r.n_bc = conditions[c]->n_bc;
        } else {
            r.is_baseline = true;
        }
        if (cfg.store_curves) {
            r.curve = roc_points(pooled);
            r.has_curve = true;
        }
    }
    return results;
}

ConditionResult run_protocol(const StoredDataset& ds,
                             const std::optional<BcConfig>& bc,
                             const ProtocolConfig& cfg) {
    return run_conditions(ds, {bc}, cfg)[0];
}

RunReport grid_search(const StoredDataset& ds, const std::vector<double>& r_grid,
                      const std::vector<std::int64_t>& nbc_grid,
                      const ProtocolConfig& cfg) {
    validate_protocol(ds);
    require(!r_grid.empty() && !nbc_grid.empty(), ErrorKind::InvalidArgument,
            "grid_search: empty grid");

    RunReport report;
    report.seed = cfg.rng_seed;
    report.dataset_digest = ds.digest;
    report.n_subjects = ds.n_subjects();
    report.n_pairs = ds.n_subjects() * (ds.n_subjects() - 1);
    report.split_policy =
        cfg.split_policy == SplitPolicy::FirstK ? "first_k" : "seeded_shuffle";
    report.r_grid = r_grid;
    report.nbc_grid = nbc_grid;

    // pair capacity fixes the N_BC scaling; uniform across pairs by protocol
    const std::int64_t capacity =
        static_cast<std::int64_t>(cfg.n_auth_train) *
        static_cast<std::int64_t>((ds.n_subjects() - 2) * ds.features[0].size());

    std::vector<std::optional<BcConfig>> conditions;
    std::vector<std::pair<double, std::int64_t>> requested; // parallel to conditions[1..]
    conditions.emplace_back(std::nullopt);                  // baseline first
    for (double r : r_grid) {
        require(r > 0.0 && r < 1.0, ErrorKind::InvalidArgument,
                "grid_search: r must be strictly inside (0, 1)");
        for (std::int64_t nbc : nbc_grid) {
            require(nbc >= 0, ErrorKind::InvalidArgument,
                    "grid_search: n_bc must be >= 0");
            const std::int64_t effective = scaled_n_bc(nbc, capacity);
            if (effective > capacity) {
                report.warnings.push_back(
                    "condition r=" + std::to_string(r) + " n_bc=" + std::to_string(nbc) +
                    " skipped: needs " + std::to_string(effective) +
                    " pairs, dataset offers " + std::to_string(capacity));
                continue;
            }
            conditions.emplace_back(BcConfig{r, effective});
            requested.emplace_back(r, nbc);
        }
    }

    auto results = run_conditions(ds, conditions, cfg);
    report.baseline = std::move(results[0]);
    for (std::size_t c = 1; c < results.size(); ++c) {
        ConditionResult& cond = results[c];
        cond.n_bc_requested = requested[c - 1].second;
        cond.star = beats_baseline(cond.report, report.baseline.report);
        report.conditions.push_back(std::move(cond));
    }
    return report;
}

// ---------------------------------------------------------------------------
// report (de)serialization
// ---------------------------------------------------------------------------

namespace {

std::string far_key(double far_pct) {
    if (far_pct == 0.01) return "0.01";
    if (far_pct == 0.1) return "0.1";
    if (far_pct == 1.0) return "1";
    return std::to_string(far_pct);
}

json condition_to_json(const ConditionResult& c) {
    json block;
    if (!c.is_baseline) {
        block["r"] = c.r;
        block["n_bc"] = c.n_bc;
        block["n_bc_requested"] = c.n_bc_requested;
        block["star"] = c.star;
    }
    block["auc"] = c.report.auc;
    block["eer_pct"] = c.report.eer_pct;
    block["eer_threshold"] = c.report.eer_thr;
    json frr;
    for (const auto& [far, v] : c.report.frr_at_far_pct) frr[far_key(far)] = v;
    block["frr_at_far_pct"] = frr;
    if (c.has_curve) {
        json det;
        std::vector<double> thr, far, frr_v, tar;
        for (const auto& p : c.curve.points) {
            thr.push_back(p.threshold);
            far.push_back(p.far);
            frr_v.push_back(p.frr);
            tar.push_back(p.tar);
        }
        det["threshold"] = thr;
        det["far"] = far;
        det["frr"] = frr_v;
        det["tar"] = tar;
        block["det"] = det;
    }
    return block;
}

ConditionResult condition_from_json(const json& block, bool is_baseline) {
    ConditionResult c;
    c.is_baseline = is_baseline;
    if (!is_baseline) {
        c.r = block.at("r").get<double>();
        c.n_bc = block.at("n_bc").get<std::int64_t>();
        c.n_bc_requested = block.value("n_bc_requested", c.n_bc);
        c.star = block.value("star", false);
    }
    c.report.auc = block.at("auc").get<double>();
    c.report.eer_pct = block.at("eer_pct").get<double>();
    c.report.eer_thr = block.value("eer_threshold", 0.0);
    for (double far : report_far_targets()) {
        c.report.frr_at_far_pct[far] =
            block.at("frr_at_far_pct").at(far_key(far)).get<double>();
    }
    if (block.contains("det")) {
        const auto& det = block.at("det");
        const auto& thr = det.at("threshold");
        const auto& far = det.at("far");
        const auto& frr = det.at("frr");
        const auto& tar = det.at("tar");
        for (std::size_t i = 0; i < thr.size(); ++i) {
            c.curve.points.push_back({thr[i].get<double>(), far[i].get<double>(),
                                      frr[i].get<double>(), tar[i].get<double>()});
        }
        c.has_curve = true;
    }
    return c;
}

} // namespace

std::string report_to_json(const RunReport& report) {
    json root;
    root["format"] = "earverify-report";
    root["version"] = 1;
    json meta;
    meta["seed"] = report.seed;
    meta["dataset_digest"] = report.dataset_digest;
    meta["n_subjects"] = report.n_subjects;
    meta["n_pairs"] = report.n_pairs;
    meta["split_policy"] = report.split_policy;
    meta["r_grid"] = report.r_grid;
    meta["nbc_grid"] = report.nbc_grid;
    root["meta"] = meta;
    root["baseline"] = condition_to_json(report.baseline);
    json conds = json::array();
    for (const auto& c : report.conditions) conds.push_back(condition_to_json(c));
    root["conditions"] = conds;
    root["warnings"] = report.warnings;
    return root.dump(2) + "\n";
}

void write_report(const RunReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), ErrorKind::Io, "write_report: cannot open " + path);
    f << report_to_json(report);
    require(f.good(), ErrorKind::Io, "write_report: write failed for " + path);
}

RunReport load_report(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), ErrorKind::Io, "load_report: cannot open " + path);
    json root;
    try {
        f >> root;
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("load_report: bad JSON: ") + e.what());
    }
    require(root.value("format", "") == "earverify-report", ErrorKind::Format,
            "load_report: not an earverify report");

    RunReport report;
    try {
        const auto& meta = root.at("meta");
        report.seed = meta.at("seed").get<std::uint64_t>();
        report.dataset_digest = meta.value("dataset_digest", "");
        report.n_subjects = meta.value("n_subjects", std::size_t{0});
        report.n_pairs = meta.value("n_pairs", std::size_t{0});
        report.split_policy = meta.value("split_policy", "first_k");
        report.r_grid = meta.value("r_grid", std::vector<double>{});
        report.nbc_grid = meta.value("nbc_grid", std::vector<std::int64_t>{});
        report.baseline = condition_from_json(root.at("baseline"), true);
        for (const auto& block : root.at("conditions")) {
            report.conditions.push_back(condition_from_json(block, false));
        }
        report.warnings = root.value("warnings", std::vector<std::string>{});
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("load_report: missing field: ") + e.what());
    }
    return report;
}

} // namespace earverify
