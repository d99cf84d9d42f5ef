#pragma once

// Special functions used by the bounds and the ADI shift construction:
// modified Bessel functions of the first kind (integer order) and the
// complete elliptic integral / Jacobi dn parameterised by the complementary
// modulus, which stays accurate when the modulus is within 1e-20 of one.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttz {

inline constexpr double kBesselMaxArgument = 700.0;
inline constexpr std::size_t kBesselMaxOrder = 1'000'000;

namespace special_detail {

inline void check_bessel_args(std::size_t order, double x) {
    if (order > kBesselMaxOrder) throw std::domain_error("bessel_i: order " + std::to_string(order) + " too large");
    if (!(x >= 0.0)) throw std::domain_error("bessel_i: argument must be nonnegative");
    if (x > kBesselMaxArgument) throw std::overflow_error("bessel_i: argument " + std::to_string(x) + " overflows");
}

// Ascending series; used only for x < 1 where it converges in a handful of terms.
inline double series(std::size_t n, double x) {
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const double half = 0.5 * x;
    double term = std::exp(static_cast<double>(n) * std::log(half) - std::lgamma(static_cast<double>(n) + 1.0));
    double sum = term;
    for (int m = 1; m < 200 && term > 1e-18 * sum; ++m) {
        term *= half * half / (static_cast<double>(m) * (static_cast<double>(m + n)));
        sum += term;
    }
    return sum;
}

}  // namespace special_detail

/// e^{-x} I_k(x) for k = 0..max_order, by Miller's downward recurrence
/// normalised with e^x = I_0(x) + 2 Σ_{k≥1} I_k(x).
inline std::vector<double> bessel_i_scaled_sequence(std::size_t max_order, double x) {
    special_detail::check_bessel_args(max_order, x);
    std::vector<double> out(max_order + 1, 0.0);
    if (x < 1.0) {
        const double scale = std::exp(-x);
        for (std::size_t k = 0; k <= max_order; ++k) {
            out[k] = special_detail::series(k, x) * scale;
            if (out[k] == 0.0) break;
        }
        return out;
    }
    const auto start = static_cast<std::size_t>(
        static_cast<double>(max_order) + 40.0 + std::ceil(std::sqrt(100.0 * (x + 1.0))));
    double next = 0.0;  // I_{k+1}
    double cur = 1e-300;  // I_k, arbitrary seed
    double norm = 0.0;
    for (std::size_t k = start; k > 0; --k) {
        // I_{k-1} = (2k/x) I_k + I_{k+1}
        const double prev = (2.0 * static_cast<double>(k) / x) * cur + next;
        next = cur;
        cur = prev;
        if (k <= max_order) out[k] = next;
        norm += 2.0 * next;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for (std::size_t j = k; j <= max_order; ++j) out[j] *= 1e-250;
        }
    }
    out[0] = cur;
    norm += cur;
    for (auto& v : out) v /= norm;
    return out;
}

/// e^{-x} I_order(x)
inline double bessel_i_scaled(std::size_t order, double x) {
    return bessel_i_scaled_sequence(order, x)[order];
}

/// Modified Bessel function of the first kind, I_order(x), x ≥ 0.
inline double bessel_i(std::size_t order, double x) {
    special_detail::check_bessel_args(order, x);
    if (x < 1.0) return special_detail::series(order, x);
    return bessel_i_scaled(order, x) * std::exp(x);
}

// ---------------------------------------------------------------------------
// Elliptic functions

struct AgmTable {
    std::vector<double> a, c;
};

inline AgmTable agm_table(double kprime) {
    if (!(kprime > 0.0 && kprime <= 1.0)) throw std::domain_error("agm_table: complementary modulus must be in (0, 1]");
    AgmTable t;
    double a = 1.0, b = kprime;
    double c = std::sqrt((1.0 - kprime) * (1.0 + kprime));
    t.a.push_back(a);
    t.c.push_back(c);
    for (int i = 0; i < 64 && std::abs(c) > 1e-17 * a; ++i) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        t.a.push_back(a);
        t.c.push_back(c);
    }
    return t;
}

/// K(k) with k = sqrt(1 - k'^2), computed from k' directly.
inline double elliptic_k_from_complement(double kprime) {
    const auto t = agm_table(kprime);
    return std::numbers::pi / (2.0 * t.a.back());
}

namespace special_detail {

inline double dn_agm(double u, const AgmTable& t) {
    const std::size_t n = t.a.size() - 1;
    double phi = std::ldexp(t.a[n] * u, static_cast<int>(n));
    double phi_next = phi;
    for (std::size_t i = n; i > 0; --i) {
        phi_next = phi;
        phi = 0.5 * (phi + std::asin(t.c[i] / t.a[i] * std::sin(phi)));
    }
    return std::cos(phi) / std::cos(phi_next - phi);
}

}  // namespace special_detail

/// Jacobi dn(u | k) for 0 ≤ u ≤ K(k), parameterised by k'. Uses
/// dn(K - u) = k'/dn(u) on the upper half so small values keep full relative accuracy.
inline double jacobi_dn_from_complement(double u, double kprime) {
    const auto t = agm_table(kprime);
    const double big_k = std::numbers::pi / (2.0 * t.a.back());
    if (u <= 0.5 * big_k) return special_detail::dn_agm(u, t);
    return kprime / special_detail::dn_agm(big_k - u, t);
}

}  // namespace ttz
