// SPDX-License-Identifier: Apache-2.0
#include "platt.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace earverify {

namespace {

double sigmoid_nll(const std::vector<double>& f, const std::vector<double>& t,
                   double a, double b) {
    double val = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double z = a * f[i] + b;
        if (z >= 0) {
            val += t[i] * z + std::log1p(std::exp(-z));
        } else {
            val += (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
    }
    return val;
}

} // namespace

PlattParams fit_platt(const std::vector<double>& decision_values,
                      const std::vector<Label>& labels) {
    require(decision_values.size() == labels.size(), ErrorKind::InvalidArgument,
            "fit_platt: value/label size mismatch");
    require(!labels.empty(), ErrorKind::InvalidArgument, "fit_platt: empty input");

    double n_pos = 0.0, n_neg = 0.0;
    for (Label l : labels) (l == Label::Authorized ? n_pos : n_neg) += 1.0;
    require(n_pos > 0 && n_neg > 0, ErrorKind::InvalidArgument,
            "fit_platt: both labels required");

    const double hi_target = (n_pos + 1.0) / (n_pos + 2.0);
    const double lo_target = 1.0 / (n_neg + 2.0);
    std::vector<double> t(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        t[i] = labels[i] == Label::Authorized ? hi_target : lo_target;
    }

    const auto [fmin, fmax] =
        std::minmax_element(decision_values.begin(), decision_values.end());
    if (*fmax - *fmin < 1e-12) {
        // constant decision values carry no information: slope 0, offset
        // reproducing the smoothed prior
        const double mean_t = (n_pos * hi_target + n_neg * lo_target) / (n_pos + n_neg);
        return {0.0, std::log((1.0 - mean_t) / mean_t)};
    }

    constexpr double kSigma = 1e-12;
    constexpr double kGradEps = 1e-10;
    constexpr double kMinStep = 1e-10;
    constexpr int kMaxIter = 100;

    double a = 0.0;
    double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
    double fval = sigmoid_nll(decision_values, t, a, b);

    for (int it = 0; it < kMaxIter; ++it) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < decision_values.size(); ++i) {
            const double z = a * decision_values[i] + b;
            double p, q;
            if (z >= 0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += decision_values[i] * decision_values[i] * d2;
            h22 += d2;
            h21 += decision_values[i] * d2;
            const double d1 = t[i] - p;
            g1 += decision_values[i] * d1;
            g2 += d1;
        }
        if (std::sqrt(g1 * g1 + g2 * g2) < kGradEps) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= kMinStep) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = sigmoid_nll(decision_values, t, na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step *= 0.5;
        }
        if (step < kMinStep) break; // line search exhausted
    }
    return {a, b};
}

double posterior(const PlattParams& platt, double decision) {
    const double z = platt.a * decision + platt.b;
    if (z >= 0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

double posterior(const SvmModel& model, const PlattParams& platt,
                 const std::vector<double>& x) {
    return posterior(platt, decision_value(model, x));
}

CalibratedSvm train_calibrated_svm(const LabeledDataset& train,
                                   const KernelParams& params,
                                   const TrainOptions& opts, int folds) {
    train.validate_for_training();

    std::size_t n_pos = 0, n_neg = 0;
    for (Label l : train.labels) (l == Label::Authorized ? n_pos : n_neg) += 1;
    const int k = std::min<int>({folds, static_cast<int>(n_pos), static_cast<int>(n_neg)});

    KernelCache cache(train.features, params.gamma, opts.cache_mb);
    std::vector<std::size_t> all(train.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    CalibratedSvm out;
    out.model = train_svm_subset(cache, all, train.labels, params, opts);

    std::vector<double> cal_values;
    std::vector<Label> cal_labels;
    cal_values.reserve(train.size());
    cal_labels.reserve(train.size());

    if (k < 2) {
        // too few of one class to cross-fit; calibrate in-sample
        for (std::size_t i = 0; i < train.size(); ++i) {
            cal_values.push_back(
                decision_value(out.model, train.features.row(i), train.features.cols()));
            cal_labels.push_back(train.labels[i]);
        }
    } else {
        // stratified fold assignment, round-robin per class in row order
        std::vector<int> fold_of(train.size());
        int pos_seen = 0, neg_seen = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (train.labels[i] == Label::Authorized) {
                fold_of[i] = pos_seen++ % k;
            } else {
                fold_of[i] = neg_seen++ % k;
            }
        }
        for (int f = 0; f < k; ++f) {
            std::vector<std::size_t> fit_rows;
            std::vector<Label> fit_labels;
            for (std::size_t i = 0; i < train.size(); ++i) {
                if (fold_of[i] != f) {
                    fit_rows.push_back(i);
                    fit_labels.push_back(train.labels[i]);
                }
            }
            const SvmModel fold_model =
                train_svm_subset(cache, fit_rows, fit_labels, params, opts);
            for (std::size_t i = 0; i < train.size(); ++i) {
                if (fold_of[i] == f) {
                    cal_values.push_back(decision_value(
                        fold_model, train.features.row(i), train.features.cols()));
                    cal_labels.push_back(train.labels[i]);
                }
            }
        }
    }

    out.platt = fit_platt(cal_values, cal_labels);
    return out;
}

} // namespace earverify
