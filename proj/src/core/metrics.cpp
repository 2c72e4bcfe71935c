// SPDX-License-Identifier: Apache-2.0
#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "common.hpp"

namespace earverify {

RocCurve roc_points(const ScoreSet& scores) {
    require(!scores.genuine.empty() && !scores.impostor.empty(),
            ErrorKind::InvalidArgument, "roc_points: empty score list");
    for (double v : scores.genuine) {
        require(std::isfinite(v), ErrorKind::InvalidArgument,
                "roc_points: non-finite genuine score");
    }
    for (double v : scores.impostor) {
        require(std::isfinite(v), ErrorKind::InvalidArgument,
                "roc_points: non-finite impostor score");
    }

    std::vector<double> gen = scores.genuine;
    std::vector<double> imp = scores.impostor;
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<double> thresholds;
    thresholds.reserve(gen.size() + imp.size() + 1);
    thresholds.insert(thresholds.end(), gen.begin(), gen.end());
    thresholds.insert(thresholds.end(), imp.begin(), imp.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());

    const double n_gen = static_cast<double>(gen.size());
    const double n_imp = static_cast<double>(imp.size());

    RocCurve curve;
    curve.points.reserve(thresholds.size() + 1);
    for (double thr : thresholds) {
        // accept iff score >= thr
        const auto gen_rejected = std::lower_bound(gen.begin(), gen.end(), thr) - gen.begin();
        const auto imp_accepted = imp.end() - std::lower_bound(imp.begin(), imp.end(), thr);
        const double frr = static_cast<double>(gen_rejected) / n_gen;
        const double far = static_cast<double>(imp_accepted) / n_imp;
        curve.points.push_back({thr, far, frr, 1.0 - frr});
    }
    // reject-everything sentinel just above the largest score
    curve.points.push_back({thresholds.back() + 1.0, 0.0, 1.0, 0.0});
    return curve;
}

namespace {

void check_curve(const RocCurve& curve) {
    require(curve.points.size() >= 2, ErrorKind::InvalidArgument,
            "metrics: curve needs at least two points");
}

} // namespace

double eer_percent(const RocCurve& curve) {
    check_curve(curve);
    const auto& p = curve.points;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i].far - p[i].frr;
        if (diff == 0.0) return 100.0 * p[i].far;
        if (diff < 0.0) {
            require(i > 0, ErrorKind::Numeric, "eer: curve starts below crossing");
            const double d1 = p[i - 1].far - p[i - 1].frr;
            const double t = d1 / (d1 - diff);
            const double eer = p[i - 1].far + t * (p[i].far - p[i - 1].far);
            return 100.0 * eer;
        }
    }
    fail(ErrorKind::Numeric, "eer: no crossing found");
}

double eer_threshold(const RocCurve& curve) {
    check_curve(curve);
    const auto& p = curve.points;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i].far - p[i].frr;
        if (diff == 0.0) return p[i].threshold;
        if (diff < 0.0) {
            require(i > 0, ErrorKind::Numeric, "eer: curve starts below crossing");
            const double d1 = p[i - 1].far - p[i - 1].frr;
            const double t = d1 / (d1 - diff);
            return p[i - 1].threshold + t * (p[i].threshold - p[i - 1].threshold);
        }
    }
    fail(ErrorKind::Numeric, "eer: no crossing found");
}

double auc(const RocCurve& curve) {
    check_curve(curve);
    // trapezoid along the sweep polyline; in descending-threshold order both
    // far and tar are non-decreasing, which keeps tie runs paired correctly
    const auto& p = curve.points;
    double area = 0.0;
    for (std::size_t i = p.size() - 1; i > 0; --i) {
        area += (p[i - 1].far - p[i].far) * 0.5 * (p[i - 1].tar + p[i].tar);
    }
    return area;
}

double frr_at_far_percent(const RocCurve& curve, double target_far) {
    check_curve(curve);
    require(target_far > 0.0 && target_far < 1.0, ErrorKind::InvalidArgument,
            "frr_at_far: target must be inside (0, 1)");
    const auto& p = curve.points;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].far <= target_far) {
            if (p[i].far == target_far) return 100.0 * p[i].frr;
            require(i > 0, ErrorKind::Numeric, "frr_at_far: curve starts below target");
            const double span = p[i - 1].far - p[i].far;
            const double t = (p[i - 1].far - target_far) / span;
            return 100.0 * (p[i - 1].frr + t * (p[i].frr - p[i - 1].frr));
        }
    }
    fail(ErrorKind::Numeric, "frr_at_far: target not bracketed");
}

EvalReport evaluate_scores(const ScoreSet& scores) {
    const RocCurve curve = roc_points(scores);
    EvalReport report;
    report.auc = auc(curve);
    report.eer_pct = eer_percent(curve);
    report.eer_thr = eer_threshold(curve);
    for (double far_pct : report_far_targets()) {
        report.frr_at_far_pct[far_pct] = frr_at_far_percent(curve, far_pct / 100.0);
    }
    return report;
}

void write_det_csv(const RocCurve& curve, std::ostream& out) {
    out << "threshold,far,frr,tar\n";
    char buf[160];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", p.threshold,
                      p.far, p.frr, p.tar);
        out << buf;
    }
}

void write_det_csv(const RocCurve& curve, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), ErrorKind::Io, "write_det_csv: cannot open " + path);
    write_det_csv(curve, f);
    require(f.good(), ErrorKind::Io, "write_det_csv: write failed for " + path);
}

} // namespace earverify
