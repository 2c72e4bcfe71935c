// SPDX-License-Identifier: Apache-2.0
#include "fft.hpp"

#include <cmath>

#include "common.hpp"

namespace earverify {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    require(n > 0 && (n & (n - 1)) == 0, ErrorKind::InvalidArgument,
            "fft: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = x[i + k];
                const cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

std::vector<cplx> fft_real(const std::vector<double>& x, std::size_t nfft) {
    require(nfft >= x.size(), ErrorKind::InvalidArgument,
            "fft_real: nfft smaller than input");
    std::vector<cplx> buf(nfft, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = cplx(x[i], 0.0);
    fft_inplace(buf, false);
    return buf;
}

void fwht_inplace(std::vector<double>& x) {
    const std::size_t n = x.size();
    require(n > 0 && (n & (n - 1)) == 0, ErrorKind::InvalidArgument,
            "fwht: size must be a power of two");
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const double a = x[j];
                const double b = x[j + len];
                x[j] = a + b;
                x[j + len] = a - b;
            }
        }
    }
}

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t nfft = next_pow2(out_len);
    std::vector<cplx> fa(nfft, cplx(0, 0)), fb(nfft, cplx(0, 0));
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < nfft; ++i) fa[i] *= fb[i];
    fft_inplace(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

} // namespace earverify
