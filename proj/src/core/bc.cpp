// SPDX-License-Identifier: Apache-2.0
#include "bc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace earverify {

void BcConfig::validate() const {
    require(r > 0.0 && r < 1.0, ErrorKind::InvalidArgument,
            "bc: ratio r must be strictly inside (0, 1)");
    require(n_bc >= 0, ErrorKind::InvalidArgument, "bc: n_bc must be >= 0");
}

std::vector<double> bc_combine(const std::vector<double>& x1,
                               const std::vector<double>& x2, double r) {
    require(r > 0.0 && r < 1.0, ErrorKind::InvalidArgument,
            "bc_combine: ratio r must be strictly inside (0, 1)");
    require(x1.size() == x2.size(), ErrorKind::InvalidArgument,
            "bc_combine: length mismatch");
    std::vector<double> out(x1.size());
    for (std::size_t i = 0; i < x1.size(); ++i) {
        out[i] = r * x1[i] + (1.0 - r) * x2[i];
    }
    return out;
}

double cosine_similarity(const std::vector<double>& x1,
                         const std::vector<double>& x2) {
    require(x1.size() == x2.size(), ErrorKind::InvalidArgument,
            "cosine_similarity: length mismatch");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        dot += x1[i] * x2[i];
        n1 += x1[i] * x1[i];
        n2 += x2[i] * x2[i];
    }
    require(n1 > 0.0 && n2 > 0.0, ErrorKind::InvalidArgument,
            "cosine_similarity: zero-norm input");
    return dot / (std::sqrt(n1) * std::sqrt(n2));
}

namespace {

// stable content order, independent of how the caller arranged the list
std::vector<std::size_t> canonical_order(const std::vector<std::vector<double>>& rows) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return rows[a] < rows[b];
    });
    return idx;
}

} // namespace

std::vector<std::vector<double>> generate_bc_features(
    const std::vector<std::vector<double>>& auth_train,
    const std::vector<std::vector<double>>& imp_train, const BcConfig& cfg) {
    cfg.validate();
    const std::int64_t capacity =
        static_cast<std::int64_t>(auth_train.size()) *
        static_cast<std::int64_t>(imp_train.size());
    require(cfg.n_bc <= capacity, ErrorKind::Infeasible,
            "generate_bc_features: n_bc=" + std::to_string(cfg.n_bc) +
                " exceeds |auth|*|imp|=" + std::to_string(capacity));
    if (cfg.n_bc == 0) return {};

    const auto auth_order = canonical_order(auth_train);
    const auto imp_order = canonical_order(imp_train);

    struct Pair {
        double cos;
        std::uint32_t ai, ii; // indices into the canonical orders
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(capacity));
    for (std::uint32_t a = 0; a < auth_order.size(); ++a) {
        const auto& xa = auth_train[auth_order[a]];
        for (std::uint32_t i = 0; i < imp_order.size(); ++i) {
            pairs.push_back({cosine_similarity(xa, imp_train[imp_order[i]]), a, i});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) {
        if (p.cos != q.cos) return p.cos > q.cos;
        if (p.ai != q.ai) return p.ai < q.ai;
        return p.ii < q.ii;
    });

    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(cfg.n_bc));
    for (std::int64_t k = 0; k < cfg.n_bc; ++k) {
        const Pair& p = pairs[static_cast<std::size_t>(k)];
        out.push_back(bc_combine(auth_train[auth_order[p.ai]],
                                 imp_train[imp_order[p.ii]], cfg.r));
    }
    return out;
}

LabeledDataset build_training_set(const std::vector<std::vector<double>>& auth_train,
                                  const std::vector<std::vector<double>>& imp_train,
                                  const BcConfig& cfg) {
    LabeledDataset ds;
    for (const auto& row : auth_train) ds.add(row, Label::Authorized, Origin::Measured);
    for (const auto& row : imp_train) ds.add(row, Label::Unauthorized, Origin::Measured);
    for (auto& row : generate_bc_features(auth_train, imp_train, cfg)) {
        ds.add(row, Label::Unauthorized, Origin::BcGenerated);
    }
    return ds;
}

} // namespace earverify
