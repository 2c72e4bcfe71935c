// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_BC_HPP
#define EARVERIFY_CORE_BC_HPP

#include <cstdint>
#include <vector>

#include "dataset.hpp"

namespace earverify {

struct BcConfig {
    double r = 0.3;           // mixing ratio, strictly inside (0, 1)
    std::int64_t n_bc = 0;    // number of generated rows

    void validate() const;
};

// r*x1 + (1-r)*x2, elementwise.
std::vector<double> bc_combine(const std::vector<double>& x1,
                               const std::vector<double>& x2, double r);

double cosine_similarity(const std::vector<double>& x1,
                         const std::vector<double>& x2);

// Ranks all ordered (authorized, impostor) pairs by cosine similarity,
// descending, and emits the combination of the top n_bc pairs. The two input
// lists are canonicalized (lexicographic feature order) before ranking, so
// the output does not depend on caller ordering; ties on equal cosine break
// by (authorized index, impostor index) in that canonical order.
std::vector<std::vector<double>> generate_bc_features(
    const std::vector<std::vector<double>>& auth_train,
    const std::vector<std::vector<double>>& imp_train, const BcConfig& cfg);

// auth rows (authorized) + impostor rows (unauthorized) + generated rows
// (unauthorized). Row count = |auth| + |imp| + n_bc.
LabeledDataset build_training_set(const std::vector<std::vector<double>>& auth_train,
                                  const std::vector<std::vector<double>>& imp_train,
                                  const BcConfig& cfg);

} // namespace earverify

#endif
