// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_SVM_HPP
#define EARVERIFY_CORE_SVM_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "dataset.hpp"

namespace earverify {

struct KernelParams {
    double gamma = 1.0; // RBF width
    double c = 1.0;     // box constraint

    void validate() const;
};

struct TrainOptions {
    double tol = 1e-3;           // KKT violation stop threshold
    std::size_t cache_mb = 64;   // kernel row cache budget
    std::uint64_t max_iter = 0;  // 0 = spec default of 1e5 * n
};

// Soft-margin RBF SVM in dual form.
struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coefs; // alpha_i * y_i per support vector
    double bias = 0.0;
    KernelParams kernel;
    std::uint64_t iterations = 0;
};

// scikit-style default: 1 / (dim * pooled variance of all feature entries),
// falling back to 1/dim when the variance vanishes.
double default_gamma(const LabeledDataset& train);

// Caches RBF kernel rows against a fixed point set, LRU-evicted to a byte
// budget. Rows are indexed by position in the full point set, so training
// runs on subsets (calibration folds) can share one cache.
class KernelCache {
public:
    KernelCache(const Matrix& points, double gamma, std::size_t cache_mb);
    ~KernelCache();
    KernelCache(const KernelCache&) = delete;
    KernelCache& operator=(const KernelCache&) = delete;

    const double* row(std::size_t i);
    double gamma() const;
    const Matrix& points() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// SMO with maximal-violating-pair working-set selection. Deterministic:
// ties in the selection resolve to the lowest index.
SvmModel train_svm(const LabeledDataset& train, const KernelParams& params,
                   const TrainOptions& opts = {});

// Variant that trains on a subset of the cached point set; `subset` holds row
// indices into cache.points(), `labels` is parallel to `subset`.
SvmModel train_svm_subset(KernelCache& cache, const std::vector<std::size_t>& subset,
                          const std::vector<Label>& labels, const KernelParams& params,
                          const TrainOptions& opts = {});

double decision_value(const SvmModel& model, const std::vector<double>& x);
double decision_value(const SvmModel& model, const double* x, std::size_t dim);

double rbf_kernel(const double* a, const double* b, std::size_t dim, double gamma);

} // namespace earverify

#endif
