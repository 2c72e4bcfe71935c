// SPDX-License-Identifier: Apache-2.0
#include "svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "common.hpp"

namespace earverify {

void KernelParams::validate() const {
    require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::InvalidArgument,
            "svm: gamma must be positive");
    require(c > 0.0 && std::isfinite(c), ErrorKind::InvalidArgument,
            "svm: C must be positive");
}

double default_gamma(const LabeledDataset& train) {
    require(train.size() >= 2, ErrorKind::InvalidArgument,
            "default_gamma: need at least two rows");
    const Matrix& x = train.features;
    const std::size_t n = x.rows() * x.cols();
    double mean = 0.0;
    for (double v : x.data()) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x.data()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double d = static_cast<double>(x.cols());
    if (var <= 0.0) return 1.0 / d;
    return 1.0 / (d * var);
}

double rbf_kernel(const double* a, const double* b, std::size_t dim, double gamma) {
    double dist = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        dist += d * d;
    }
    return std::exp(-gamma * dist);
}

// ---------------------------------------------------------------------------
// kernel cache
// ---------------------------------------------------------------------------

struct KernelCache::Impl {
    const Matrix& points;
    double gamma;
    std::size_t max_rows;
    std::vector<double> sq_norm;
    std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> rows;
    std::list<std::size_t> lru; // front = most recent

    Impl(const Matrix& pts, double g, std::size_t cache_mb) : points(pts), gamma(g) {
        const std::size_t bytes_per_row = pts.rows() * sizeof(double);
        max_rows = std::max<std::size_t>(2, cache_mb * 1024 * 1024 /
                                                std::max<std::size_t>(1, bytes_per_row));
        sq_norm.resize(pts.rows());
        for (std::size_t i = 0; i < pts.rows(); ++i) {
            double s = 0.0;
            const double* r = pts.row(i);
            for (std::size_t k = 0; k < pts.cols(); ++k) s += r[k] * r[k];
            sq_norm[i] = s;
        }
    }

    const double* fetch(std::size_t i) {
        auto it = rows.find(i);
        if (it != rows.end()) {
            lru.splice(lru.begin(), lru, it->second.second);
            return it->second.first.data();
        }
        if (rows.size() >= max_rows) {
            const std::size_t victim = lru.back();
            lru.pop_back();
            rows.erase(victim);
        }
        std::vector<double> row(points.rows());
        const double* xi = points.row(i);
        const double ni = sq_norm[i];
        for (std::size_t j = 0; j < points.rows(); ++j) {
            const double* xj = points.row(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < points.cols(); ++k) dot += xi[k] * xj[k];
            row[j] = std::exp(-gamma * (ni + sq_norm[j] - 2.0 * dot));
        }
        lru.push_front(i);
        auto [pos, inserted] = rows.emplace(i, std::make_pair(std::move(row), lru.begin()));
        (void)inserted;
        return pos->second.first.data();
    }
};

KernelCache::KernelCache(const Matrix& points, double gamma, std::size_t cache_mb)
    : impl_(std::make_unique<Impl>(points, gamma, cache_mb)) {}
KernelCache::~KernelCache() = default;
const double* KernelCache::row(std::size_t i) { return impl_->fetch(i); }
double KernelCache::gamma() const { return impl_->gamma; }
const Matrix& KernelCache::points() const { return impl_->points; }

// ---------------------------------------------------------------------------
// SMO
// ---------------------------------------------------------------------------

namespace {

constexpr double kTau = 1e-12;

struct Problem {
    KernelCache& cache;
    const std::vector<std::size_t>& subset; // global row ids
    std::vector<double> y;                  // +-1 per local index
};

SvmModel solve_smo(Problem& prob, const KernelParams& params, const TrainOptions& opts) {
    params.validate();
    require(opts.tol > 0.0, ErrorKind::InvalidArgument, "svm: tol must be positive");
    const std::size_t n = prob.subset.size();
    require(n >= 2, ErrorKind::InvalidArgument, "svm: need at least two rows");

    bool has_pos = false, has_neg = false;
    for (double v : prob.y) (v > 0 ? has_pos : has_neg) = true;
    require(has_pos && has_neg, ErrorKind::InvalidArgument,
            "svm: training data contains a single class");

    const double c = params.c;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // gradient of 1/2 a'Qa - e'a at a=0

    const std::uint64_t max_iter =
        opts.max_iter > 0 ? opts.max_iter
                          : 100000ULL * static_cast<std::uint64_t>(n);

    // local kernel row view over the subset
    std::vector<double> qi(n), qj(n);
    auto load_row = [&](std::size_t local, std::vector<double>& dst) {
        const double* full = prob.cache.row(prob.subset[local]);
        for (std::size_t t = 0; t < n; ++t) dst[t] = full[prob.subset[t]];
    };

    std::uint64_t iter = 0;
    for (;; ++iter) {
        // maximal violating pair
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double yt = prob.y[t];
            const double v = -yt * grad[t];
            const bool in_up = (yt > 0 && alpha[t] < c) || (yt < 0 && alpha[t] > 0);
            const bool in_low = (yt > 0 && alpha[t] > 0) || (yt < 0 && alpha[t] < c);
            if (in_up && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i >= n || j >= n || gmax - gmin < opts.tol) break;
        if (iter >= max_iter) {
            fail(ErrorKind::Numeric,
                 "svm: SMO did not converge within " + std::to_string(max_iter) +
                     " iterations (KKT gap " + std::to_string(gmax - gmin) + ")");
        }

        load_row(i, qi);
        load_row(j, qj);
        const double yi = prob.y[i], yj = prob.y[j];
        const double old_ai = alpha[i], old_aj = alpha[j];

        if (yi != yj) {
            double quad = qi[i] + qj[j] + 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = -diff;
                }
            }
            if (diff > 0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            }
        } else {
            double quad = qi[i] + qj[j] - 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = sum;
                }
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = sum;
                }
            }
        }

        const double di = yi * (alpha[i] - old_ai);
        const double dj = yj * (alpha[j] - old_aj);
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += prob.y[t] * (qi[t] * di + qj[t] * dj);
        }
    }

    // bias from the free support vectors, midpoint of the KKT band otherwise
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double yt = prob.y[t];
        const double v = -yt * grad[t]; // candidate bias from this point
        if (alpha[t] > 0 && alpha[t] < c) {
            free_sum += v;
            ++free_count;
        } else {
            const bool in_up = (yt > 0 && alpha[t] < c) || (yt < 0 && alpha[t] > 0);
            if (in_up) {
                lb = std::max(lb, v);
            } else {
                ub = std::min(ub, v);
            }
        }
    }
    const double bias = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                       : 0.5 * (ub + lb);

    SvmModel model;
    model.kernel = params;
    model.bias = bias;
    model.iterations = iter;
    const Matrix& pts = prob.cache.points();
    model.support_vectors = Matrix(0, pts.cols());
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            const double* r = pts.row(prob.subset[t]);
            model.support_vectors.push_row(std::vector<double>(r, r + pts.cols()));
            model.dual_coefs.push_back(alpha[t] * prob.y[t]);
        }
    }
    return model;
}

} // namespace

SvmModel train_svm_subset(KernelCache& cache, const std::vector<std::size_t>& subset,
                          const std::vector<Label>& labels, const KernelParams& params,
                          const TrainOptions& opts) {
    require(subset.size() == labels.size(), ErrorKind::InvalidArgument,
            "train_svm_subset: subset/label size mismatch");
    Problem prob{cache, subset, {}};
    prob.y.resize(subset.size());
    for (std::size_t t = 0; t < subset.size(); ++t) {
        prob.y[t] = labels[t] == Label::Authorized ? 1.0 : -1.0;
    }
    return solve_smo(prob, params, opts);
}

SvmModel train_svm(const LabeledDataset& train, const KernelParams& params,
                   const TrainOptions& opts) {
    train.validate_for_training();
    KernelCache cache(train.features, params.gamma, opts.cache_mb);
    std::vector<std::size_t> subset(train.size());
    for (std::size_t t = 0; t < subset.size(); ++t) subset[t] = t;
    return train_svm_subset(cache, subset, train.labels, params, opts);
}

double decision_value(const SvmModel& model, const double* x, std::size_t dim) {
    require(dim == model.support_vectors.cols(), ErrorKind::InvalidArgument,
            "decision_value: dimension mismatch");
    double acc = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.rows(); ++s) {
        acc += model.dual_coefs[s] *
               rbf_kernel(model.support_vectors.row(s), x, dim, model.kernel.gamma);
    }
    return acc;
}

double decision_value(const SvmModel& model, const std::vector<double>& x) {
    return decision_value(model, x.data(), x.size());
}

} // namespace earverify
