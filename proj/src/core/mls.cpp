// SPDX-License-Identifier: Apache-2.0
#include "mls.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "common.hpp"
#include "fft.hpp"

namespace earverify {

const std::vector<int>& standard_taps(int order) {
    // Fibonacci-form feedback taps, one maximal set per order.
    static const std::array<std::vector<int>, 21> table = {{
        {}, {},                 // orders 0,1 unused
        {2, 1},
        {3, 2},
        {4, 3},
        {5, 3},
        {6, 5},
        {7, 6},
        {8, 6, 5, 4},
        {9, 5},
        {10, 7},
        {11, 9},
        {12, 11, 10, 4},
        {13, 12, 11, 8},
        {14, 13, 12, 2},
        {15, 14},
        {16, 15, 13, 4},
        {17, 14},
        {18, 11},
        {19, 18, 17, 14},
        {20, 17},
    }};
    require(order >= 2 && order <= 20, ErrorKind::InvalidArgument,
            "standard_taps: order must be in [2, 20]");
    return table[static_cast<std::size_t>(order)];
}

namespace {

// Dual-mask table for the output permutation: tag_out[n] is the GF(2)
// functional lambda_n with bit((m-n) mod L) = <lambda_n, state[m]>.
// Built by locating the steps whose register state is a unit vector.
void build_tags(MlsSequence& seq) {
    const int k = seq.order;
    const std::size_t L = seq.length();
    std::vector<int> bit(L);
    for (std::size_t i = 0; i < L; ++i) bit[i] = seq.samples[i] > 0 ? 1 : 0;

    seq.tag_in.assign(L, 0);
    for (std::size_t m = 0; m < L; ++m) {
        std::uint32_t v = 0;
        for (int j = 0; j < k; ++j) {
            const std::size_t idx = (m + L - static_cast<std::size_t>(j)) % L;
            v |= static_cast<std::uint32_t>(bit[idx]) << (k - 1 - j);
        }
        seq.tag_in[m] = v;
    }

    std::vector<std::size_t> unit_step(static_cast<std::size_t>(k), 0);
    for (std::size_t m = 0; m < L; ++m) {
        const std::uint32_t v = seq.tag_in[m];
        if ((v & (v - 1)) == 0) { // power of two: state is a unit vector
            for (int j = 0; j < k; ++j) {
                if (v == (1u << j)) unit_step[static_cast<std::size_t>(j)] = m;
            }
        }
    }

    seq.tag_out.assign(L, 0);
    for (std::size_t n = 0; n < L; ++n) {
        std::uint32_t v = 0;
        for (int j = 0; j < k; ++j) {
            const std::size_t idx = (unit_step[static_cast<std::size_t>(j)] + L - n) % L;
            v |= static_cast<std::uint32_t>(bit[idx]) << j;
        }
        seq.tag_out[n] = v;
    }
}

} // namespace

MlsSequence generate_mls(int order, const std::vector<int>& taps) {
    require(order >= 2 && order <= 20, ErrorKind::InvalidArgument,
            "generate_mls: order must be in [2, 20]");
    require(!taps.empty(), ErrorKind::InvalidArgument, "generate_mls: empty tap set");
    std::vector<int> sorted = taps;
    std::sort(sorted.begin(), sorted.end(), std::greater<int>());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            ErrorKind::InvalidArgument, "generate_mls: duplicate taps");
    require(sorted.front() == order && sorted.back() >= 1,
            ErrorKind::InvalidArgument,
            "generate_mls: taps must lie in [1, order] and include the order");

    const std::size_t L = (std::size_t{1} << order) - 1;
    std::uint32_t mask = 0;
    for (int t : sorted) mask |= 1u << (t - 1);

    // Fibonacci LFSR, register bits s0..s(k-1), all-ones start.
    // Output is the last stage; feedback is the parity of the tapped stages.
    const std::uint32_t init = static_cast<std::uint32_t>(L);
    std::uint32_t state = init;
    MlsSequence seq;
    seq.order = order;
    seq.taps = sorted;
    seq.samples.resize(L);
    for (std::size_t n = 0; n < L; ++n) {
        seq.samples[n] = (state >> (order - 1)) & 1u ? 1 : -1;
        const std::uint32_t fb =
            static_cast<std::uint32_t>(__builtin_popcount(state & mask) & 1);
        state = ((state << 1) | fb) & static_cast<std::uint32_t>(L);
        if (state == init && n + 1 != L) {
            fail(ErrorKind::InvalidArgument,
                 "generate_mls: taps are not primitive (period " +
                     std::to_string(n + 1) + " < " + std::to_string(L) + ")");
        }
    }
    require(state == init, ErrorKind::InvalidArgument,
            "generate_mls: taps are not primitive (register did not recur)");

    build_tags(seq);
    return seq;
}

MlsSequence generate_mls(int order) { return generate_mls(order, standard_taps(order)); }

std::vector<double> average_shots(const std::vector<RecordedResponse>& shots) {
    require(!shots.empty(), ErrorKind::InvalidArgument, "average_shots: no shots");
    const std::size_t n = shots.front().samples.size();
    for (const auto& s : shots) {
        require(s.samples.size() == n, ErrorKind::InvalidArgument,
                "average_shots: mismatched shot lengths");
    }
    std::vector<double> avg(n, 0.0);
    for (const auto& s : shots) {
        for (std::size_t i = 0; i < n; ++i) avg[i] += s.samples[i];
    }
    const double inv = 1.0 / static_cast<double>(shots.size());
    for (auto& v : avg) v *= inv;
    return avg;
}

ImpulseResponse deconvolve_direct(const std::vector<double>& avg,
                                  const MlsSequence& mls, double sample_rate) {
    const std::size_t L = mls.length();
    require(avg.size() == L, ErrorKind::InvalidArgument,
            "deconvolve_direct: length mismatch");
    ImpulseResponse out;
    out.sample_rate = sample_rate;
    out.samples.assign(L, 0.0);
    double dc = 0.0;
    for (double v : avg) dc += v;
    const double scale = 1.0 / static_cast<double>(L + 1);
    for (std::size_t n = 0; n < L; ++n) {
        // cross-correlation at lag n, on top of the DC term that makes the
        // estimator exact for a circular MLS measurement
        double acc = dc;
        for (std::size_t m = 0; m < n; ++m) acc += avg[m] * mls.samples[m + L - n];
        for (std::size_t m = n; m < L; ++m) acc += avg[m] * mls.samples[m - n];
        out.samples[n] = acc * scale;
    }
    return out;
}

ImpulseResponse deconvolve_fht(const std::vector<double>& avg,
                               const MlsSequence& mls, double sample_rate) {
    const std::size_t L = mls.length();
    require(avg.size() == L, ErrorKind::InvalidArgument,
            "deconvolve_fht: length mismatch");

    // Scatter into Hadamard order; the zero-state slot carries -sum(avg),
    // which folds the DC term of the exact estimator into the transform.
    std::vector<double> buf(L + 1, 0.0);
    double dc = 0.0;
    for (double v : avg) dc += v;
    buf[0] = -dc;
    for (std::size_t m = 0; m < L; ++m) buf[mls.tag_in[m]] = avg[m];
    fwht_inplace(buf);

    ImpulseResponse out;
    out.sample_rate = sample_rate;
    out.samples.resize(L);
    const double scale = -1.0 / static_cast<double>(L + 1);
    for (std::size_t n = 0; n < L; ++n) out.samples[n] = buf[mls.tag_out[n]] * scale;
    return out;
}

std::vector<double> circular_convolve_mls(const std::vector<double>& ir,
                                          const MlsSequence& mls) {
    const std::size_t L = mls.length();
    require(!ir.empty(), ErrorKind::InvalidArgument, "circular_convolve_mls: empty ir");
    std::vector<double> excitation(L);
    for (std::size_t i = 0; i < L; ++i) excitation[i] = mls.samples[i];
    std::vector<double> lin = convolve(ir, excitation);
    std::vector<double> out(L, 0.0);
    for (std::size_t i = 0; i < lin.size(); ++i) out[i % L] += lin[i];
    return out;
}

} // namespace earverify
