// SPDX-License-Identifier: Apache-2.0
//
// earverify command line: dataset synthesis, single verification runs, grid
// search, and report inspection. Talks to the pipeline exclusively through
// the C API in earverify.h.
#include <earverify.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

namespace fs = std::filesystem;

constexpr int kExitError = 1;
constexpr int kExitMissingFile = 2;

int exit_code_for(ev_status status) {
    return status == EV_ERR_IO ? kExitMissingFile : kExitError;
}

int fail_with(ev_status status, const char* what) {
    std::fprintf(stderr, "earverify: %s: %s\n", what, ev_last_error());
    return exit_code_for(status);
}

int env_threads() {
    const char* env = std::getenv("EARVERIFY_THREADS");
    if (env == nullptr) return 0;
    const int v = std::atoi(env);
    return v > 0 ? v : 0;
}

struct DatasetHandle {
    ev_dataset* ds = nullptr;
    ~DatasetHandle() { ev_dataset_close(ds); }
};

struct ReportHandle {
    ev_report* report = nullptr;
    ~ReportHandle() { ev_report_free(report); }
};

void print_condition_row(const ev_condition_metrics& m) {
    if (m.is_baseline) {
        std::printf("%8s %8s ", "baseline", "-");
    } else {
        std::printf("%8.2f %8lld ", m.r, static_cast<long long>(m.n_bc));
    }
    std::printf("%8.4f %8.2f %12.2f %12.2f %12.2f %5s\n", m.auc, m.eer_pct,
                m.frr_at_far_001_pct, m.frr_at_far_01_pct, m.frr_at_far_1_pct,
                m.is_baseline ? "" : (m.star ? "*" : ""));
}

void print_table_header() {
    std::printf("%8s %8s %8s %8s %12s %12s %12s %5s\n", "r", "n_bc", "auc",
                "eer_pct", "frr@0.01%", "frr@0.1%", "frr@1%", "star");
}

int write_grid_csv(const ev_report* report, const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        std::fprintf(stderr, "earverify: cannot open %s\n", path.c_str());
        return kExitError;
    }
    std::fprintf(f, "r,n_bc,auc,eer_pct,frr_at_far_0.01,frr_at_far_0.1,"
                    "frr_at_far_1,star\n");
    ev_condition_metrics m;
    if (ev_report_condition(report, -1, &m) == EV_OK) {
        std::fprintf(f, "baseline,,%.17g,%.17g,%.17g,%.17g,%.17g,\n", m.auc,
                     m.eer_pct, m.frr_at_far_001_pct, m.frr_at_far_01_pct,
                     m.frr_at_far_1_pct);
    }
    const int n = ev_report_condition_count(report);
    for (int i = 0; i < n; ++i) {
        if (ev_report_condition(report, i, &m) != EV_OK) continue;
        std::fprintf(f, "%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", m.r,
                     static_cast<long long>(m.n_bc), m.auc, m.eer_pct,
                     m.frr_at_far_001_pct, m.frr_at_far_01_pct, m.frr_at_far_1_pct,
                     m.star ? "*" : "");
    }
    std::fclose(f);
    return 0;
}

void print_warnings(const ev_report* report) {
    const int n = ev_report_warning_count(report);
    for (int i = 0; i < n; ++i) {
        std::fprintf(stderr, "warning: %s\n", ev_report_warning(report, i));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ear-canal acoustic verification pipeline"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    ev_synth_params sp;
    ev_synth_params_init(&sp);
    std::string synth_out;
    synth->add_option("--subjects", sp.n_subjects, "number of subjects (>= 3)");
    synth->add_option("--measurements", sp.n_measurements, "measurements per subject");
    synth->add_option("--shots", sp.shots_per_measurement, "shots averaged per measurement");
    synth->add_option("--mls-order", sp.mls_order, "excitation order (length 2^k - 1)");
    synth->add_option("--snr-db", sp.snr_db, "per-shot recording SNR in dB");
    synth->add_option("--jitter", sp.jitter, "intra-subject jitter fraction [0, 0.1]");
    synth->add_option("--seed", sp.seed, "rng seed");
    synth->add_option("--threads", sp.threads, "worker threads (0 = auto)");
    synth->add_option("--out", synth_out, "output directory")->required();

    // ---- shared run/grid options ----
    ev_protocol_params pp;
    ev_protocol_params_init(&pp);
    std::string data_path, out_path;
    std::string split_policy = "first_k";

    auto add_protocol_options = [&](CLI::App* cmd) {
        cmd->add_option("--data", data_path, "dataset manifest.json")->required();
        cmd->add_option("--out", out_path, "output report JSON")->required();
        cmd->add_option("--seed", pp.seed, "rng seed");
        cmd->add_option("--threads", pp.threads, "worker threads (0 = auto)");
        cmd->add_option("--train", pp.n_auth_train, "authorized training samples");
        cmd->add_option("--test", pp.n_auth_test, "authorized test samples");
        cmd->add_option("--split-policy", split_policy, "first_k | seeded_shuffle")
            ->check(CLI::IsMember({"first_k", "seeded_shuffle"}));
        cmd->add_option("--svm-c", pp.svm_c, "SVM regularization C");
        cmd->add_option("--cache-mb", pp.cache_mb, "kernel cache budget (MB)");
    };

    // ---- run ----
    auto* run = app.add_subcommand("run", "baseline run, optionally one BC condition");
    double run_r = -1.0;
    std::int64_t run_nbc = -1;
    add_protocol_options(run);
    run->add_option("--r", run_r, "BC mixing ratio, inside (0, 1)");
    run->add_option("--nbc", run_nbc, "BC row count (paper-grid scale)");

    // ---- grid ----
    auto* grid = app.add_subcommand("grid", "grid search over (r, n_bc)");
    std::vector<double> r_grid;
    std::vector<std::int64_t> nbc_grid;
    bool grid_curves = false;
    add_protocol_options(grid);
    grid->add_option("--r-grid", r_grid, "r values (default: paper grid)")->delimiter(',');
    grid->add_option("--nbc-grid", nbc_grid, "N_BC values (default: paper grid)")->delimiter(',');
    grid->add_flag("--curves", grid_curves, "embed DET curves in the report");

    // ---- report ----
    auto* rep = app.add_subcommand("report", "inspect a report file");
    std::string rep_in, rep_format = "table", rep_outdir = ".";
    rep->add_option("--in", rep_in, "report JSON")->required();
    rep->add_option("--format", rep_format, "table | det")
        ->check(CLI::IsMember({"table", "det"}));
    rep->add_option("--out-dir", rep_outdir, "where DET CSVs go");

    CLI11_PARSE(app, argc, argv);

    if (env_threads() > 0) {
        sp.threads = env_threads();
        pp.threads = env_threads();
    }
    pp.split_policy = split_policy == "seeded_shuffle" ? 1 : 0;

    if (synth->parsed()) {
        const ev_status st = ev_synth_dataset(&sp, synth_out.c_str());
        if (st != EV_OK) return fail_with(st, "synth");

        DatasetHandle ds;
        const std::string manifest = (fs::path(synth_out) / "manifest.json").string();
        if (ev_dataset_open(manifest.c_str(), &ds.ds) != EV_OK) {
            return fail_with(EV_ERR_IO, "synth: reopen");
        }
        char digest[32] = {0};
        ev_dataset_digest(ds.ds, digest, sizeof(digest));
        std::printf("dataset: %s\n", synth_out.c_str());
        std::printf("subjects: %d\n", ev_dataset_subject_count(ds.ds));
        std::printf("rows: %lld\n",
                    static_cast<long long>(ev_dataset_row_count(ds.ds)));
        std::printf("digest: %s\n", digest);
        return 0;
    }

    if (run->parsed() || grid->parsed()) {
        DatasetHandle ds;
        ev_status st = ev_dataset_open(data_path.c_str(), &ds.ds);
        if (st != EV_OK) return fail_with(st, "open dataset");

        ReportHandle report;
        if (run->parsed()) {
            const bool has_r = run->count("--r") > 0;
            const bool has_nbc = run->count("--nbc") > 0;
            if (has_r != has_nbc) {
                std::fprintf(stderr, "earverify: --r and --nbc go together\n");
                return kExitError;
            }
            pp.store_curves = 1; // single-condition reports always carry curves
            st = ev_run_single(ds.ds, &pp, has_r ? 1 : 0, run_r, run_nbc,
                               &report.report);
            if (st != EV_OK) return fail_with(st, "run");
        } else {
            pp.store_curves = grid_curves ? 1 : 0;
            st = ev_run_grid(ds.ds, &pp, r_grid.empty() ? nullptr : r_grid.data(),
                             r_grid.size(), nbc_grid.empty() ? nullptr : nbc_grid.data(),
                             nbc_grid.size(), &report.report);
            if (st != EV_OK) return fail_with(st, "grid");
        }
        print_warnings(report.report);

        st = ev_report_save_json(report.report, out_path.c_str());
        if (st != EV_OK) return fail_with(st, "write report");

        if (run->parsed()) {
            // DET CSVs next to the report
            const fs::path stem = fs::path(out_path).parent_path() /
                                  fs::path(out_path).stem();
            const std::string base_csv = stem.string() + "_det_baseline.csv";
            st = ev_report_write_det_csv(report.report, -1, base_csv.c_str());
            if (st != EV_OK) return fail_with(st, "write det csv");
            if (ev_report_condition_count(report.report) > 0) {
                const std::string cond_csv = stem.string() + "_det_condition.csv";
                st = ev_report_write_det_csv(report.report, 0, cond_csv.c_str());
                if (st != EV_OK) return fail_with(st, "write det csv");
            }
        } else {
            const fs::path stem = fs::path(out_path).parent_path() /
                                  fs::path(out_path).stem();
            const int rc = write_grid_csv(report.report, stem.string() + "_table.csv");
            if (rc != 0) return rc;
        }

        print_table_header();
        ev_condition_metrics m;
        if (ev_report_condition(report.report, -1, &m) == EV_OK) print_condition_row(m);
        for (int i = 0; i < ev_report_condition_count(report.report); ++i) {
            if (ev_report_condition(report.report, i, &m) == EV_OK) print_condition_row(m);
        }
        return 0;
    }

    if (rep->parsed()) {
        ReportHandle report;
        const ev_status st = ev_report_load_json(rep_in.c_str(), &report.report);
        if (st != EV_OK) return fail_with(st, "load report");

        if (rep_format == "table") {
            ev_condition_metrics m;
            std::vector<ev_condition_metrics> rows;
            for (int i = 0; i < ev_report_condition_count(report.report); ++i) {
                if (ev_report_condition(report.report, i, &m) == EV_OK) {
                    rows.push_back(m);
                }
            }
            std::sort(rows.begin(), rows.end(),
                      [](const ev_condition_metrics& a, const ev_condition_metrics& b) {
                          return a.eer_pct < b.eer_pct;
                      });
            print_table_header();
            if (ev_report_condition(report.report, -1, &m) == EV_OK) {
                print_condition_row(m);
            }
            for (const auto& row : rows) print_condition_row(row);
            return 0;
        }

        // det: one CSV per block that carries a curve
        int written = 0;
        ev_condition_metrics m;
        if (ev_report_condition(report.report, -1, &m) == EV_OK && m.has_curve) {
            const std::string path =
                (fs::path(rep_outdir) / "det_baseline.csv").string();
            if (ev_report_write_det_csv(report.report, -1, path.c_str()) == EV_OK) {
                std::printf("%s\n", path.c_str());
                ++written;
            }
        }
        for (int i = 0; i < ev_report_condition_count(report.report); ++i) {
            if (ev_report_condition(report.report, i, &m) != EV_OK || !m.has_curve) {
                continue;
            }
            char name[64];
            std::snprintf(name, sizeof(name), "det_r%g_nbc%lld.csv", m.r,
                          static_cast<long long>(m.n_bc));
            const std::string path = (fs::path(rep_outdir) / name).string();
            if (ev_report_write_det_csv(report.report, i, path.c_str()) == EV_OK) {
                std::printf("%s\n", path.c_str());
                ++written;
            }
        }
        if (written == 0) {
            std::fprintf(stderr,
                         "earverify: report carries no DET curves; rerun the "
                         "experiment with --curves\n");
            return kExitError;
        }
        return 0;
    }

    return kExitError;
}
