/* SPDX-License-Identifier: Apache-2.0
 *
 * earverify — ear-canal acoustic verification pipeline.
 *
 * C interface of the shared library. All heavy lifting (MLS measurement
 * simulation, feature extraction, between-class augmentation, SVM training,
 * grid evaluation) lives behind these calls. Handles are opaque; every
 * fallible call returns an ev_status, with a thread-local message available
 * through ev_last_error().
 */
#ifndef EARVERIFY_H
#define EARVERIFY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ev_status {
    EV_OK = 0,
    EV_ERR_INVALID_ARG = 1,
    EV_ERR_IO = 2,
    EV_ERR_FORMAT = 3,
    EV_ERR_NUMERIC = 4,
    EV_ERR_INFEASIBLE = 5,
    EV_ERR_INTERNAL = 6
} ev_status;

const char* ev_version(void);

/* Message for the most recent failing call on this thread. */
const char* ev_last_error(void);

/* ------------------------------------------------------------------ */
/* synthetic dataset generation                                        */
/* ------------------------------------------------------------------ */

typedef struct ev_synth_params {
    int n_subjects;            /* >= 3 */
    int n_measurements;        /* per subject, default 30 */
    int shots_per_measurement; /* default 5 */
    int mls_order;             /* excitation length 2^order - 1, default 14 */
    double snr_db;             /* per-shot recording SNR */
    double jitter;             /* intra-subject perturbation, [0, 0.1] */
    uint64_t seed;
    int threads;               /* 0 = hardware concurrency */
} ev_synth_params;

void ev_synth_params_init(ev_synth_params* params);

/* Writes manifest.json + features.csv into out_dir. */
ev_status ev_synth_dataset(const ev_synth_params* params, const char* out_dir);

/* ------------------------------------------------------------------ */
/* datasets                                                            */
/* ------------------------------------------------------------------ */

typedef struct ev_dataset ev_dataset;

ev_status ev_dataset_open(const char* manifest_path, ev_dataset** out);
void ev_dataset_close(ev_dataset* ds);
int ev_dataset_subject_count(const ev_dataset* ds);
int64_t ev_dataset_row_count(const ev_dataset* ds);
/* digest of the features CSV; buf receives a NUL-terminated hex string */
ev_status ev_dataset_digest(const ev_dataset* ds, char* buf, size_t buf_len);

/* ------------------------------------------------------------------ */
/* verification runs                                                   */
/* ------------------------------------------------------------------ */

typedef struct ev_protocol_params {
    int n_auth_train;   /* default 6 */
    int n_auth_test;    /* default 24 */
    int split_policy;   /* 0 = first_k, 1 = seeded_shuffle */
    uint64_t seed;
    int threads;        /* 0 = hardware concurrency */
    double svm_c;       /* default 1.0 */
    double svm_tol;     /* default 1e-3 */
    int cache_mb;       /* kernel cache budget per training, default 64 */
    int platt_folds;    /* default 5 */
    int store_curves;   /* nonzero: embed DET curves in the report */
} ev_protocol_params;

void ev_protocol_params_init(ev_protocol_params* params);

typedef struct ev_report ev_report;

/* Baseline run; when with_bc is nonzero, also runs the (r, n_bc) condition.
 * n_bc follows the paper grid scale and is shrunk to the dataset size. */
ev_status ev_run_single(const ev_dataset* ds, const ev_protocol_params* params,
                        int with_bc, double r, int64_t n_bc, ev_report** out);

ev_status ev_run_grid(const ev_dataset* ds, const ev_protocol_params* params,
                      const double* r_grid, size_t n_r, const int64_t* nbc_grid,
                      size_t n_nbc, ev_report** out);

void ev_report_free(ev_report* report);

ev_status ev_report_save_json(const ev_report* report, const char* path);
ev_status ev_report_load_json(const char* path, ev_report** out);

typedef struct ev_condition_metrics {
    int is_baseline;
    double r;
    int64_t n_bc;           /* rows actually generated */
    int64_t n_bc_requested; /* grid value before dataset scaling */
    double auc;
    double eer_pct;
    double eer_threshold;
    double frr_at_far_001_pct; /* FRR at FAR = 0.01% */
    double frr_at_far_01_pct;  /* FRR at FAR = 0.1%  */
    double frr_at_far_1_pct;   /* FRR at FAR = 1%    */
    int star; /* beats baseline on all five indexes */
    int has_curve;
} ev_condition_metrics;

int ev_report_condition_count(const ev_report* report);
/* index -1 = baseline, 0..count-1 = grid conditions */
ev_status ev_report_condition(const ev_report* report, int index,
                              ev_condition_metrics* out);
/* DET curve of one block as CSV (threshold,far,frr,tar) */
ev_status ev_report_write_det_csv(const ev_report* report, int index,
                                  const char* path);

int ev_report_warning_count(const ev_report* report);
const char* ev_report_warning(const ev_report* report, int index);

uint64_t ev_report_seed(const ev_report* report);
/* digest recorded at run time; buf receives a NUL-terminated hex string */
ev_status ev_report_dataset_digest(const ev_report* report, char* buf, size_t buf_len);

#ifdef __cplusplus
}
#endif

#endif /* EARVERIFY_H */
