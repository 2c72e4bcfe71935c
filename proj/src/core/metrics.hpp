// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_METRICS_HPP
#define EARVERIFY_CORE_METRICS_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace earverify {

// Pooled verification scores: posteriors of authorized-class membership for
// genuine (authorized test) and impostor attempts.
struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
};

struct RocPoint {
    double threshold;
    double far;
    double frr;
    double tar;
};

// Threshold sweep over the distinct scores, ascending. The first point is
// the accept-everything sentinel (far 1, frr 0), the last rejects everything
// (far 0, frr 1).
struct RocCurve {
    std::vector<RocPoint> points;
};

RocCurve roc_points(const ScoreSet& scores);

// Equal error rate in percent: linear interpolation where far - frr crosses
// zero along the curve.
double eer_percent(const RocCurve& curve);
// Threshold at the interpolated crossing.
double eer_threshold(const RocCurve& curve);

// Area under TAR-vs-FAR (trapezoid). Equals the Mann-Whitney statistic with
// tie correction.
double auc(const RocCurve& curve);

// FRR (percent) at the given FAR, linearly interpolated between the adjacent
// curve points bracketing the target.
double frr_at_far_percent(const RocCurve& curve, double target_far);

struct EvalReport {
    double auc = 0.0;
    double eer_pct = 0.0;
    double eer_thr = 0.0;
    // keyed by FAR in percent: 0.01, 0.1, 1
    std::map<double, double> frr_at_far_pct;
};

EvalReport evaluate_scores(const ScoreSet& scores);

// CSV emission for external plotting: threshold,far,frr,tar rows at full
// precision.
void write_det_csv(const RocCurve& curve, std::ostream& out);
void write_det_csv(const RocCurve& curve, const std::string& path);

inline const std::vector<double>& report_far_targets() {
    static const std::vector<double> t = {0.01, 0.1, 1.0}; // percent
    return t;
}

} // namespace earverify

#endif
