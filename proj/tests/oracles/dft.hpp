#pragma once
// Direct O(N^2) DFT of one Hann-windowed frame, written without FFTW.
// Power is normalized by the squared window sum, so a full-scale sine of
// amplitude A peaks near 20*log10(A/2) dB.

#include <cmath>
#include <vector>

namespace oracle {

inline std::vector<double> dft_power_db(const std::vector<double>& x, size_t start, size_t n, double floor_db = -120) {
    const double pi = std::acos(-1.0);
    std::vector<double> w(n);
    double wsum = 0;
    for (size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2 * pi * (double(i) + 0.5) / double(n));  // periodic, half-sample offset
        wsum += w[i];
    }
    std::vector<double> out(n / 2 + 1);
    for (size_t k = 0; k < out.size(); ++k) {
        long double re = 0, im = 0;
        for (size_t i = 0; i < n; ++i) {
            long double ang = -2.0L * pi * (long double)(k * i % n) / n;
            re += x[start + i] * w[i] * std::cos(ang);
            im += x[start + i] * w[i] * std::sin(ang);
        }
        double p = double((re * re + im * im) / (wsum * wsum));
        out[k] = p > 0 ? std::max(floor_db, 10 * std::log10(p)) : floor_db;
    }
    return out;
}

inline size_t argmax(const std::vector<double>& v) {
    size_t b = 0;
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[b]) b = i;
    return b;
}

}  // namespace oracle
