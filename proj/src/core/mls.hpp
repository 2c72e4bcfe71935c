// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_MLS_HPP
#define EARVERIFY_CORE_MLS_HPP

#include <cstdint>
#include <vector>

namespace earverify {

// Maximal-length sequence used as the measurement excitation.
// samples holds +1/-1 (bit 1 -> +1), length 2^order - 1. tag_in/tag_out are
// the index permutations consumed by the fast Hadamard deconvolution:
// tag_in[m] is the LFSR register state at step m and tag_out[n] is the dual
// mask such that bit((m+n) mod L) = <tag_out[n], state[m]> over GF(2).
struct MlsSequence {
    int order = 0;
    std::vector<int> taps;
    std::vector<std::int8_t> samples;
    std::vector<std::uint32_t> tag_in;
    std::vector<std::uint32_t> tag_out;

    std::size_t length() const { return samples.size(); }
};

// One recorded shot of the reflected excitation.
struct RecordedResponse {
    std::vector<double> samples;
    int shot_index = 1; // 1-based
};

struct ImpulseResponse {
    std::vector<double> samples;
    double sample_rate = 48000.0;
};

// Vetted primitive-polynomial tap sets for order 2..20.
const std::vector<int>& standard_taps(int order);

// Runs a Fibonacci LFSR from the all-ones register. Rejects tap sets whose
// period falls short of 2^order - 1.
MlsSequence generate_mls(int order, const std::vector<int>& taps);
MlsSequence generate_mls(int order);

std::vector<double> average_shots(const std::vector<RecordedResponse>& shots);

// Reference deconvolution: h[n] = (1/(L+1)) * sum_m avg[m] * mls[(m+n) mod L],
// evaluated as a direct O(L^2) sum.
ImpulseResponse deconvolve_direct(const std::vector<double>& avg,
                                  const MlsSequence& mls,
                                  double sample_rate = 48000.0);

// Same result through the permuted Walsh-Hadamard transform, O(L log L).
ImpulseResponse deconvolve_fht(const std::vector<double>& avg,
                               const MlsSequence& mls,
                               double sample_rate = 48000.0);

// Circular convolution of an impulse response with the excitation, length L.
// This is the steady-state forward model for the simulated measurements.
std::vector<double> circular_convolve_mls(const std::vector<double>& ir,
                                          const MlsSequence& mls);

} // namespace earverify

#endif
