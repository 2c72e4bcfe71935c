// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_FFT_HPP
#define EARVERIFY_CORE_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace earverify {

using cplx = std::complex<double>;

// In-place iterative radix-2 FFT. Size must be a power of two.
// inverse=true applies the 1/n scale.
void fft_inplace(std::vector<cplx>& x, bool inverse);

std::vector<cplx> fft_real(const std::vector<double>& x, std::size_t nfft);

// Unnormalized Walsh-Hadamard transform in natural (Sylvester) order:
// y[u] = sum_v (-1)^popcount(u & v) x[v]. Size must be a power of two.
void fwht_inplace(std::vector<double>& x);

std::size_t next_pow2(std::size_t n);

// Linear convolution via zero-padded FFT.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b);

} // namespace earverify

#endif
