#pragma once

// Test-only reference implementations, kept deliberately independent of the
// library code paths they check: scalar long-double recomputations for the
// DSP kernels and a plain Wagner-Fischer distance for the eval metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace oracle {

// Per-sample dynamic range compression, computed in long double:
//   d  = 20*log10(|s|/32768)
//   d' = tau + (d - tau)/r        for d > tau
//   s' = floor(10^(d'/20) * sign(s) * 32767)
inline int16_t drc_sample(int16_t s, long double tau = -10.0L, long double r = 2.0L) {
    if (s == 0) return 0;
    const long double d = 20.0L * std::log10(std::fabs((long double)s) / 32768.0L);
    if (d <= tau) return s;
    const long double dp = tau + (d - tau) / r;
    const long double sigma = s > 0 ? 1.0L : -1.0L;
    return (int16_t)std::floor(std::pow(10.0L, dp / 20.0L) * sigma * 32767.0L);
}

// Linear-interpolation upsampling traced in long double.
inline std::vector<int16_t> upsample(std::span<const int16_t> x, int r, int16_t p0) {
    std::vector<int16_t> y;
    y.reserve(x.size() * (size_t)r);
    long double p = p0;
    for (int16_t cur : x) {
        const long double delta = ((long double)cur - p) / (long double)r;
        for (int j = 0; j < r; ++j) {
            long double v = p + (long double)j * delta;
            v = std::clamp(v, -32768.0L, 32767.0L);
            y.push_back((int16_t)std::floor(v));
        }
        p = cur;
    }
    return y;
}

// Keep the first of every group of r samples.
inline std::vector<int16_t> downsample(std::span<const int16_t> x, int r) {
    std::vector<int16_t> y;
    const size_t n = x.size() / (size_t)r;
    y.reserve(n);
    for (size_t i = 0; i < x.size() && y.size() < n; i += (size_t)r) {
        y.push_back(x[i]);
    }
    return y;
}

// Plain full-matrix Levenshtein distance with unit costs. Distance only; the
// library's aligned S/D/I counts must sum to this value.
template <typename Token>
size_t edit_distance(const std::vector<Token>& a, const std::vector<Token>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<size_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace oracle
