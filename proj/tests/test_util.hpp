// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_TESTS_TEST_UTIL_HPP
#define EARVERIFY_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "rng.hpp"
#include "synth.hpp"

namespace evtest {

inline double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    const std::size_t n = std::max(got.size(), want.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double g = i < got.size() ? got[i] : 0.0;
        const double w = i < want.size() ? want[i] : 0.0;
        num += (g - w) * (g - w);
        den += w * w;
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// O(n^2) reference DFT, independent of the library FFT.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * M_PI * static_cast<double>(k) *
                               static_cast<double>(m) / static_cast<double>(n);
            acc += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// Random impulse-response-like signal: a renderer draw with broad parameter
// ranges, Q capped so the response decays inside the buffer.
inline std::vector<double> random_ir(earverify::Rng& rng, std::size_t length,
                                     double fs_hz = 48000.0) {
    earverify::EarModel model;
    const int n_res = 2 + static_cast<int>(rng.uniform_int(3));
    std::vector<double> centers;
    while (static_cast<int>(centers.size()) < n_res) {
        const double f = std::exp(rng.uniform(std::log(500.0), std::log(18000.0)));
        bool ok = true;
        for (double g : centers) {
            if (std::fabs(g - f) < 200.0) ok = false;
        }
        if (ok) centers.push_back(f);
    }
    for (double f : centers) {
        const double q_max =
            std::min(30.0, 0.7 * M_PI * f * static_cast<double>(length) / (13.8 * fs_hz));
        earverify::Resonance r;
        r.center_hz = f;
        r.q_factor = rng.uniform(2.0, std::max(2.5, q_max));
        r.gain_db = rng.uniform(1.0, 12.0);
        model.resonances.push_back(r);
    }
    model.base_delay = static_cast<int>(rng.uniform_int(33));
    return earverify::render_ir(model, length, fs_hz);
}

} // namespace evtest

#endif
