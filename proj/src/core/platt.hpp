// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_PLATT_HPP
#define EARVERIFY_CORE_PLATT_HPP

#include <vector>

#include "svm.hpp"

namespace earverify {

// Sigmoid map from decision value to authorized-class posterior:
// P(authorized | f) = 1 / (1 + exp(a*f + b)).
struct PlattParams {
    double a = 0.0;
    double b = 0.0;
};

// Regularized maximum-likelihood sigmoid fit (Newton with backtracking) on
// smoothed targets t+ = (N+ + 1)/(N+ + 2), t- = 1/(N- + 2). Degenerate
// constant decision values collapse to slope 0 with the prior as offset.
PlattParams fit_platt(const std::vector<double>& decision_values,
                      const std::vector<Label>& labels);

double posterior(const PlattParams& platt, double decision);
double posterior(const SvmModel& model, const PlattParams& platt,
                 const std::vector<double>& x);

// SVM plus calibration, fitted the way the reference implementation family
// does: sigmoid trained on decision values from a stratified k-fold
// cross-fit (k = min(5, N+, N-), in-sample when k < 2), final model trained
// on everything.
struct CalibratedSvm {
    SvmModel model;
    PlattParams platt;
};

CalibratedSvm train_calibrated_svm(const LabeledDataset& train,
                                   const KernelParams& params,
                                   const TrainOptions& opts = {},
                                   int folds = 5);

} // namespace earverify

#endif
