// SPDX-License-Identifier: Apache-2.0
#include "preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "fft.hpp"

namespace earverify {

namespace {
// Bins this far below the spectral peak are clamped before the log so a
// degenerate spectrum cannot inject -inf into the cepstrum.
constexpr double kSpectralFloorRatio = 1e-10;
constexpr std::size_t kFirTaps = 255;
} // namespace

ImpulseResponse minimum_phase(const ImpulseResponse& h) {
    const std::size_t len = h.samples.size();
    require(len > 0, ErrorKind::InvalidArgument, "minimum_phase: empty input");

    const std::size_t nfft = next_pow2(4 * len);
    std::vector<cplx> spec = fft_real(h.samples, nfft);

    double max_mag = 0.0;
    std::vector<double> log_mag(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        log_mag[i] = std::abs(spec[i]);
        max_mag = std::max(max_mag, log_mag[i]);
    }
    require(max_mag > 0.0, ErrorKind::InvalidArgument,
            "minimum_phase: all-zero input");
    const double floor = kSpectralFloorRatio * max_mag;
    for (auto& m : log_mag) m = std::log(std::max(m, floor));

    // real cepstrum of the magnitude spectrum
    std::vector<cplx> cep(nfft);
    for (std::size_t i = 0; i < nfft; ++i) cep[i] = cplx(log_mag[i], 0.0);
    fft_inplace(cep, true);

    // fold the anti-causal half onto the causal half; DC and Nyquist stay
    std::vector<cplx> folded(nfft, cplx(0.0, 0.0));
    folded[0] = cep[0].real();
    folded[nfft / 2] = cep[nfft / 2].real();
    for (std::size_t i = 1; i < nfft / 2; ++i) folded[i] = 2.0 * cep[i].real();

    fft_inplace(folded, false);
    for (auto& v : folded) v = std::exp(v);
    fft_inplace(folded, true);

    ImpulseResponse out;
    out.sample_rate = h.sample_rate;
    out.samples.resize(nfft);
    for (std::size_t i = 0; i < nfft; ++i) out.samples[i] = folded[i].real();
    return out;
}

std::vector<double> normalize_power(const std::vector<double>& x) {
    double energy = 0.0;
    for (double v : x) energy += v * v;
    require(energy > 0.0, ErrorKind::InvalidArgument,
            "normalize_power: all-zero input");
    const double inv = 1.0 / std::sqrt(energy);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * inv;
    return out;
}

std::vector<double> clip_head(const std::vector<double>& x, std::size_t n) {
    require(x.size() >= n, ErrorKind::InvalidArgument,
            "clip_head: input shorter than requested head");
    return std::vector<double>(x.begin(), x.begin() + static_cast<long>(n));
}

std::vector<double> design_bandpass_fir(double lo_hz, double hi_hz, double fs_hz) {
    require(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < fs_hz / 2.0,
            ErrorKind::InvalidArgument, "bandpass: need 0 < lo < hi < fs/2");

    const std::size_t n = kFirTaps;
    const long mid = static_cast<long>(n) / 2;
    auto lowpass = [&](double cutoff_hz) {
        const double fc = cutoff_hz / fs_hz;
        std::vector<double> taps(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const long m = static_cast<long>(i) - mid;
            double v = (m == 0) ? 2.0 * fc
                                : std::sin(2.0 * M_PI * fc * m) / (M_PI * m);
            v *= 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                        static_cast<double>(n - 1));
            taps[i] = v;
            sum += v;
        }
        for (auto& v : taps) v /= sum; // unity DC gain
        return taps;
    };

    std::vector<double> hi = lowpass(hi_hz);
    std::vector<double> lo = lowpass(lo_hz);
    for (std::size_t i = 0; i < n; ++i) hi[i] -= lo[i];
    return hi;
}

std::vector<double> bandpass(const std::vector<double>& x, double lo_hz,
                             double hi_hz, double fs_hz) {
    const std::vector<double> taps = design_bandpass_fir(lo_hz, hi_hz, fs_hz);
    const long mid = static_cast<long>(taps.size()) / 2;
    std::vector<double> out(x.size(), 0.0);
    const long len = static_cast<long>(x.size());
    for (long i = 0; i < len; ++i) {
        double acc = 0.0;
        for (long k = 0; k < static_cast<long>(taps.size()); ++k) {
            const long j = i + mid - k; // group delay folded out
            if (j >= 0 && j < len) acc += taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

FeatureVector extract_feature(const ImpulseResponse& h,
                              const std::string& subject_id,
                              int measurement_id) {
    require(h.samples.size() >= kFeatureDim, ErrorKind::InvalidArgument,
            "extract_feature: impulse response shorter than 256 samples");
    ImpulseResponse mp = minimum_phase(h);
    std::vector<double> v = normalize_power(mp.samples);
    v = clip_head(v, kFeatureDim);
    v = bandpass(v, kBandLowHz, kBandHighHz, h.sample_rate);

    FeatureVector f;
    f.values = std::move(v);
    f.subject_id = subject_id;
    f.measurement_id = measurement_id;
    return f;
}

} // namespace earverify
