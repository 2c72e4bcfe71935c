// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_PREPROCESS_HPP
#define EARVERIFY_CORE_PREPROCESS_HPP

#include <string>
#include <vector>

#include "mls.hpp"

namespace earverify {

inline constexpr std::size_t kFeatureDim = 256;
inline constexpr double kDefaultSampleRate = 48000.0;
inline constexpr double kBandLowHz = 100.0;
inline constexpr double kBandHighHz = 22000.0;

// 256-sample authentication feature.
struct FeatureVector {
    std::vector<double> values;
    std::string subject_id;
    int measurement_id = 0;
};

// Minimum-phase reconstruction via the real cepstrum: same magnitude
// spectrum, energy folded toward the head of the signal. The result lives on
// the padded FFT grid (next power of two >= 4*len), so the magnitude
// spectrum is preserved bin-exact instead of being perturbed by truncation.
ImpulseResponse minimum_phase(const ImpulseResponse& h);

// x / sqrt(sum x^2); rejects all-zero input.
std::vector<double> normalize_power(const std::vector<double>& x);

std::vector<double> clip_head(const std::vector<double>& x, std::size_t n);

// Linear-phase windowed-sinc bandpass (Hamming, 255 taps), applied with the
// 127-sample group delay compensated so output aligns with input. Built as a
// difference of two unity-DC lowpass kernels, which nulls DC exactly.
std::vector<double> design_bandpass_fir(double lo_hz, double hi_hz, double fs_hz);
std::vector<double> bandpass(const std::vector<double>& x, double lo_hz,
                             double hi_hz, double fs_hz);

// Full preprocessing chain: minimum phase -> unit energy -> 256-sample head
// clip -> 100 Hz..22 kHz bandpass.
FeatureVector extract_feature(const ImpulseResponse& h,
                              const std::string& subject_id = "",
                              int measurement_id = 0);

} // namespace earverify

#endif
