// SPDX-License-Identifier: Apache-2.0
//
// extern "C" face of the shared library. Owns the exception -> status-code
// translation and the opaque handle types; no pipeline logic lives here.
#include "earverify.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "../core/common.hpp"
#include "../core/dataset.hpp"
#include "../core/experiment.hpp"
#include "../core/synth.hpp"

namespace {

thread_local std::string g_last_error;

ev_status status_from(const earverify::Error& e) {
    using earverify::ErrorKind;
    switch (e.kind()) {
        case ErrorKind::InvalidArgument: return EV_ERR_INVALID_ARG;
        case ErrorKind::Io: return EV_ERR_IO;
        case ErrorKind::Format: return EV_ERR_FORMAT;
        case ErrorKind::Numeric: return EV_ERR_NUMERIC;
        case ErrorKind::Infeasible: return EV_ERR_INFEASIBLE;
    }
    return EV_ERR_INTERNAL;
}

template <typename Fn>
ev_status guarded(Fn&& fn) {
    try {
        fn();
        return EV_OK;
    } catch (const earverify::Error& e) {
        g_last_error = e.what();
        return status_from(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EV_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return EV_ERR_INTERNAL;
    }
}

ev_status copy_string(const std::string& s, char* buf, size_t buf_len) {
    if (buf == nullptr || buf_len == 0) {
        g_last_error = "output buffer is null or empty";
        return EV_ERR_INVALID_ARG;
    }
    if (s.size() + 1 > buf_len) {
        g_last_error = "output buffer too small (need " +
                       std::to_string(s.size() + 1) + " bytes)";
        return EV_ERR_INVALID_ARG;
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return EV_OK;
}

} // namespace

struct ev_dataset {
    earverify::StoredDataset data;
};

struct ev_report {
    earverify::RunReport data;
};

extern "C" {

const char* ev_version(void) { return "1.0.0"; }

const char* ev_last_error(void) { return g_last_error.c_str(); }

void ev_synth_params_init(ev_synth_params* params) {
    if (params == nullptr) return;
    params->n_subjects = 12;
    params->n_measurements = 30;
    params->shots_per_measurement = 5;
    params->mls_order = 14;
    params->snr_db = 40.0;
    params->jitter = 0.02;
    params->seed = 1;
    params->threads = 0;
}

ev_status ev_synth_dataset(const ev_synth_params* params, const char* out_dir) {
    return guarded([&]() {
        earverify::require(params != nullptr && out_dir != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_synth_dataset: null argument");
        earverify::SynthConfig cfg;
        cfg.n_subjects = params->n_subjects;
        cfg.n_measurements = params->n_measurements;
        cfg.shots_per_measurement = params->shots_per_measurement;
        cfg.mls_order = params->mls_order;
        cfg.snr_db = params->snr_db;
        cfg.jitter = params->jitter;
        cfg.rng_seed = params->seed;
        cfg.threads = params->threads;

        const earverify::SynthDataset synth = earverify::build_dataset(cfg);
        earverify::StoredDataset stored;
        stored.subject_ids = synth.subject_ids;
        stored.sample_rate = cfg.sample_rate;
        stored.features.resize(synth.features.size());
        for (std::size_t s = 0; s < synth.features.size(); ++s) {
            for (const auto& f : synth.features[s]) {
                stored.features[s].push_back(f.values);
            }
        }
        earverify::write_dataset(stored, out_dir);
    });
}

ev_status ev_dataset_open(const char* manifest_path, ev_dataset** out) {
    return guarded([&]() {
        earverify::require(manifest_path != nullptr && out != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_dataset_open: null argument");
        auto handle = std::make_unique<ev_dataset>();
        handle->data = earverify::load_dataset(manifest_path);
        *out = handle.release();
    });
}

void ev_dataset_close(ev_dataset* ds) { delete ds; }

int ev_dataset_subject_count(const ev_dataset* ds) {
    return ds == nullptr ? 0 : static_cast<int>(ds->data.n_subjects());
}

int64_t ev_dataset_row_count(const ev_dataset* ds) {
    return ds == nullptr ? 0 : static_cast<int64_t>(ds->data.total_rows());
}

ev_status ev_dataset_digest(const ev_dataset* ds, char* buf, size_t buf_len) {
    if (ds == nullptr) {
        g_last_error = "ev_dataset_digest: null dataset";
        return EV_ERR_INVALID_ARG;
    }
    return copy_string(ds->data.digest, buf, buf_len);
}

void ev_protocol_params_init(ev_protocol_params* params) {
    if (params == nullptr) return;
    params->n_auth_train = 6;
    params->n_auth_test = 24;
    params->split_policy = 0;
    params->seed = 1;
    params->threads = 0;
    params->svm_c = 1.0;
    params->svm_tol = 1e-3;
    params->cache_mb = 64;
    params->platt_folds = 5;
    params->store_curves = 0;
}

namespace {

earverify::ProtocolConfig to_protocol_config(const ev_protocol_params* p) {
    earverify::require(p != nullptr, earverify::ErrorKind::InvalidArgument,
                       "protocol params are null");
    earverify::ProtocolConfig cfg;
    cfg.n_auth_train = p->n_auth_train;
    cfg.n_auth_test = p->n_auth_test;
    cfg.split_policy = p->split_policy == 1 ? earverify::SplitPolicy::SeededShuffle
                                            : earverify::SplitPolicy::FirstK;
    cfg.rng_seed = p->seed;
    cfg.threads = p->threads;
    cfg.svm_c = p->svm_c;
    cfg.svm_tol = p->svm_tol;
    cfg.cache_mb = p->cache_mb > 0 ? static_cast<std::size_t>(p->cache_mb) : 64;
    cfg.platt_folds = p->platt_folds;
    cfg.store_curves = p->store_curves != 0;
    return cfg;
}

} // namespace

ev_status ev_run_single(const ev_dataset* ds, const ev_protocol_params* params,
                        int with_bc, double r, int64_t n_bc, ev_report** out) {
    return guarded([&]() {
        earverify::require(ds != nullptr && out != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_run_single: null argument");
        const earverify::ProtocolConfig cfg = to_protocol_config(params);
        std::vector<double> r_grid;
        std::vector<std::int64_t> nbc_grid;
        if (with_bc != 0) {
            r_grid = {r};
            nbc_grid = {n_bc};
        }
        auto handle = std::make_unique<ev_report>();
        if (with_bc != 0) {
            handle->data = earverify::grid_search(ds->data, r_grid, nbc_grid, cfg);
        } else {
            handle->data.seed = cfg.rng_seed;
            handle->data.dataset_digest = ds->data.digest;
            handle->data.n_subjects = ds->data.n_subjects();
            handle->data.n_pairs = ds->data.n_subjects() * (ds->data.n_subjects() - 1);
            handle->data.split_policy =
                cfg.split_policy == earverify::SplitPolicy::FirstK ? "first_k"
                                                                   : "seeded_shuffle";
            handle->data.baseline =
                earverify::run_protocol(ds->data, std::nullopt, cfg);
        }
        *out = handle.release();
    });
}

ev_status ev_run_grid(const ev_dataset* ds, const ev_protocol_params* params,
                      const double* r_grid, size_t n_r, const int64_t* nbc_grid,
                      size_t n_nbc, ev_report** out) {
    return guarded([&]() {
        earverify::require(ds != nullptr && out != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_run_grid: null argument");
        const earverify::ProtocolConfig cfg = to_protocol_config(params);
        std::vector<double> rg;
        std::vector<std::int64_t> ng;
        if (r_grid != nullptr && n_r > 0) {
            rg.assign(r_grid, r_grid + n_r);
        } else {
            rg = earverify::paper_r_grid();
        }
        if (nbc_grid != nullptr && n_nbc > 0) {
            ng.assign(nbc_grid, nbc_grid + n_nbc);
        } else {
            ng = earverify::paper_nbc_grid();
        }
        auto handle = std::make_unique<ev_report>();
        handle->data = earverify::grid_search(ds->data, rg, ng, cfg);
        *out = handle.release();
    });
}

void ev_report_free(ev_report* report) { delete report; }

ev_status ev_report_save_json(const ev_report* report, const char* path) {
    return guarded([&]() {
        earverify::require(report != nullptr && path != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_report_save_json: null argument");
        earverify::write_report(report->data, path);
    });
}

ev_status ev_report_load_json(const char* path, ev_report** out) {
    return guarded([&]() {
        earverify::require(path != nullptr && out != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_report_load_json: null argument");
        earverify::require(std::filesystem::exists(path), earverify::ErrorKind::Io,
                           std::string("ev_report_load_json: no such file: ") + path);
        auto handle = std::make_unique<ev_report>();
        handle->data = earverify::load_report(path);
        *out = handle.release();
    });
}

int ev_report_condition_count(const ev_report* report) {
    return report == nullptr ? 0 : static_cast<int>(report->data.conditions.size());
}

namespace {

const earverify::ConditionResult* condition_at(const ev_report* report, int index) {
    if (report == nullptr) return nullptr;
    if (index == -1) return &report->data.baseline;
    if (index < 0 || index >= static_cast<int>(report->data.conditions.size())) {
        return nullptr;
    }
    return &report->data.conditions[static_cast<std::size_t>(index)];
}

} // namespace

ev_status ev_report_condition(const ev_report* report, int index,
                              ev_condition_metrics* out) {
    const auto* c = condition_at(report, index);
    if (c == nullptr || out == nullptr) {
        g_last_error = "ev_report_condition: bad handle or index";
        return EV_ERR_INVALID_ARG;
    }
    out->is_baseline = c->is_baseline ? 1 : 0;
    out->r = c->r;
    out->n_bc = c->n_bc;
    out->n_bc_requested = c->n_bc_requested;
    out->auc = c->report.auc;
    out->eer_pct = c->report.eer_pct;
    out->eer_threshold = c->report.eer_thr;
    out->frr_at_far_001_pct = c->report.frr_at_far_pct.at(0.01);
    out->frr_at_far_01_pct = c->report.frr_at_far_pct.at(0.1);
    out->frr_at_far_1_pct = c->report.frr_at_far_pct.at(1.0);
    out->star = c->star ? 1 : 0;
    out->has_curve = c->has_curve ? 1 : 0;
    return EV_OK;
}

ev_status ev_report_write_det_csv(const ev_report* report, int index,
                                  const char* path) {
    return guarded([&]() {
        const auto* c = condition_at(report, index);
        earverify::require(c != nullptr && path != nullptr,
                           earverify::ErrorKind::InvalidArgument,
                           "ev_report_write_det_csv: bad handle or index");
        earverify::require(c->has_curve, earverify::ErrorKind::InvalidArgument,
                           "ev_report_write_det_csv: report block carries no DET "
                           "curve (rerun with store_curves)");
        earverify::write_det_csv(c->curve, path);
    });
}

int ev_report_warning_count(const ev_report* report) {
    return report == nullptr ? 0 : static_cast<int>(report->data.warnings.size());
}

const char* ev_report_warning(const ev_report* report, int index) {
    if (report == nullptr || index < 0 ||
        index >= static_cast<int>(report->data.warnings.size())) {
        return nullptr;
    }
    return report->data.warnings[static_cast<std::size_t>(index)].c_str();
}

uint64_t ev_report_seed(const ev_report* report) {
    return report == nullptr ? 0 : report->data.seed;
}

ev_status ev_report_dataset_digest(const ev_report* report, char* buf, size_t buf_len) {
    if (report == nullptr) {
        g_last_error = "ev_report_dataset_digest: null report";
        return EV_ERR_INVALID_ARG;
    }
    return copy_string(report->data.dataset_digest, buf, buf_len);
}

} // extern "C"
