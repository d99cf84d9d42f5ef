#pragma once

// Closed-form compressibility bounds: Zolotarev numbers for intervals and
// disks, spectral separation checks, TT / multilinear storage bounds,
// polynomial-sampling bounds and the Gaussian-bump bound.

#include "ttz/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttz {

inline constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Disk {
    double center = 0.0;
    double radius = 0.0;
};

/// Enclosure of an operator spectrum: either a real interval [a, b] or a
/// disk |z - z0| <= eta with 0 < eta < z0.
class SpectralSet {
public:
    enum class Kind { interval, disk };

    static SpectralSet interval(double a, double b) {
        if (!(a <= b)) throw std::invalid_argument("SpectralSet::interval: need a <= b");
        SpectralSet s;
        s.kind_ = Kind::interval;
        s.p_ = a;
        s.q_ = b;
        return s;
    }

    static SpectralSet disk(double z0, double eta) {
        if (!(eta > 0.0 && eta < z0)) throw std::invalid_argument("SpectralSet::disk: need 0 < eta < z0");
        SpectralSet s;
        s.kind_ = Kind::disk;
        s.p_ = z0;
        s.q_ = eta;
        return s;
    }

    Kind kind() const { return kind_; }
    bool is_interval() const { return kind_ == Kind::interval; }
    double a() const { return p_; }
    double b() const { return q_; }
    double z0() const { return p_; }
    double eta() const { return q_; }

private:
    Kind kind_ = Kind::interval;
    double p_ = 0.0, q_ = 0.0;
};

/// Raised when a pair of spectral enclosures is not separated. `split` is the
/// 1-based split (TT) or mode (multilinear) index that failed.
class SeparationError : public std::invalid_argument {
public:
    SeparationError(const std::string& what, std::size_t split) : std::invalid_argument(what), split_(split) {}
    std::size_t split() const { return split_; }

private:
    std::size_t split_;
};

enum class BoundFormat { tensor_train, multilinear };

struct BoundReport {
    BoundFormat format = BoundFormat::tensor_train;
    std::vector<std::size_t> k_values;
    std::vector<double> rho_or_gamma;
    std::vector<std::size_t> rank_bound;  // TT: s_0..s_d; ML: t_1..t_d
    std::size_t storage_bound = 0;
    double epsilon = 0.0;
};

// ---------------------------------------------------------------------------
// Zolotarev numbers

inline double zolotarev_interval_bound(double gamma, std::size_t k) {
    if (!(16.0 * gamma > 1.0)) throw std::domain_error("zolotarev_interval_bound: need 16*gamma > 1");
    if (k == 0) return 1.0;
    return std::min(1.0, 4.0 * std::exp(-kPi2 * static_cast<double>(k) / std::log(16.0 * gamma)));
}

/// γ_j for E_j = j·[a,b] and F_j = -(d-j)·[a,b].
inline double gamma_interval(double a, double b, std::size_t j, std::size_t d) {
    if (!(a > 0.0)) throw std::domain_error("gamma_interval: need a > 0");
    if (!(a <= b)) throw std::domain_error("gamma_interval: need a <= b");
    if (j < 1 || j >= d) throw std::domain_error("gamma_interval: need 1 <= j <= d-1");
    const double dd = static_cast<double>(d), jj = static_cast<double>(j);
    return (dd * a + jj * (b - a)) * (dd * b - jj * (b - a)) / (a * b * dd * dd);
}

/// Cross-ratio parameter for disjoint real intervals e and f with f left of e.
inline double gamma_separated(const Interval& e, const Interval& f) {
    if (!(f.hi < e.lo)) throw std::domain_error("gamma_separated: intervals overlap");
    return (e.lo - f.lo) * (e.hi - f.hi) / ((e.hi - f.lo) * (e.lo - f.hi));
}

inline std::size_t k_for_epsilon_interval(double gamma, double eps_over_sqrt_d) {
    if (!(eps_over_sqrt_d > 0.0 && eps_over_sqrt_d < 1.0))
        throw std::domain_error("k_for_epsilon_interval: need 0 < eps < 1");
    if (!(16.0 * gamma > 1.0)) throw std::domain_error("k_for_epsilon_interval: need 16*gamma > 1");
    const double raw = std::log(16.0 * gamma) * std::log(4.0 / eps_over_sqrt_d) / kPi2;
    auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(raw)));
    // Guard against the ceiling landing one short after rounding.
    while (zolotarev_interval_bound(gamma, k) > eps_over_sqrt_d) ++k;
    return k;
}

/// ρ for two disjoint disks with centre distance `dist` and radii r1, r2;
/// Z_k of the pair equals ρ^{-k}.
inline double disk_pair_rho(double dist, double r1, double r2) {
    const double a = dist * dist - r1 * r1 - r2 * r2;
    const double xi = a * a - 4.0 * r1 * r1 * r2 * r2;
    if (!(dist > r1 + r2) || xi < 0.0) throw std::domain_error("disk_pair_rho: disks are not separated");
    return (a + std::sqrt(xi)) / (2.0 * r1 * r2);
}

/// ρ_j for E_j = disk(j z0, j η), F_j = disk(-(d-j) z0, (d-j) η).
inline double rho_disk(double z0, double eta, std::size_t j, std::size_t d) {
    if (!(eta > 0.0 && eta < z0)) throw std::domain_error("rho_disk: need 0 < eta < z0");
    if (j < 1 || j >= d) throw std::domain_error("rho_disk: need 1 <= j <= d-1");
    const double dd = static_cast<double>(d), jj = static_cast<double>(j), rest = dd - jj;
    return disk_pair_rho(dd * z0, jj * eta, rest * eta);
}

inline double zolotarev_disk_bound(double z0, double eta, std::size_t j, std::size_t d, std::size_t k) {
    if (k == 0) return 1.0;
    return std::pow(rho_disk(z0, eta, j, d), -static_cast<double>(k));
}

inline std::size_t k_for_epsilon_rho(double rho, double eps_over_sqrt_d) {
    if (!(eps_over_sqrt_d > 0.0 && eps_over_sqrt_d < 1.0)) throw std::domain_error("k_for_epsilon_rho: need 0 < eps < 1");
    if (!(rho > 1.0)) throw std::domain_error("k_for_epsilon_rho: need rho > 1");
    auto k = static_cast<std::size_t>(std::ceil(std::log(1.0 / eps_over_sqrt_d) / std::log(rho)));
    return std::max<std::size_t>(k, 1);
}

inline std::size_t k_for_epsilon_disk(double z0, double eta, std::size_t j, std::size_t d, double eps) {
    return k_for_epsilon_rho(rho_disk(z0, eta, j, d), eps / std::sqrt(static_cast<double>(d)));
}

// ---------------------------------------------------------------------------
// Separation

/// A certified pair of disjoint enclosures (E to the right of F for intervals).
struct SeparatedPair {
    SpectralSet::Kind kind = SpectralSet::Kind::interval;
    Interval e_interval{}, f_interval{};
    Disk e_disk{}, f_disk{};

    /// γ (intervals) or ρ (disks).
    double conditioning() const {
        if (kind == SpectralSet::Kind::interval) return gamma_separated(e_interval, f_interval);
        const double dist = std::abs(e_disk.center - f_disk.center);
        return disk_pair_rho(dist, e_disk.radius, f_disk.radius);
    }

    std::size_t k_for(double eps_over_sqrt_d) const {
        if (kind == SpectralSet::Kind::interval) return k_for_epsilon_interval(conditioning(), eps_over_sqrt_d);
        return k_for_epsilon_rho(conditioning(), eps_over_sqrt_d);
    }
};

namespace bounds_detail {

inline void check_uniform_kind(const std::vector<SpectralSet>& sets) {
    if (sets.size() < 2) throw std::invalid_argument("separation: need at least two spectral sets");
    for (const auto& s : sets)
        if (s.kind() != sets.front().kind())
            throw std::invalid_argument("separation: mixed interval and disk spectra are not supported");
}

inline SeparatedPair make_pair(const std::vector<SpectralSet>& sets, const std::vector<bool>& in_e, std::size_t index,
                               const char* label) {
    SeparatedPair p;
    p.kind = sets.front().kind();
    double ea = 0, eb = 0, fa = 0, fb = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        (in_e[i] ? ea : fa) += sets[i].a();
        (in_e[i] ? eb : fb) += sets[i].b();
    }
    if (p.kind == SpectralSet::Kind::interval) {
        p.e_interval = {ea, eb};
        p.f_interval = {-fb, -fa};
        if (!(p.f_interval.hi < p.e_interval.lo))
            throw SeparationError(std::string(label) + ": spectra overlap at index " + std::to_string(index), index);
    } else {
        // Minkowski sums of disks are disks with summed centres and radii.
        p.e_disk = {ea, eb};
        p.f_disk = {-fa, fb};
        const double dist = p.e_disk.center - p.f_disk.center;
        if (!(dist > p.e_disk.radius + p.f_disk.radius))
            throw SeparationError(std::string(label) + ": disks intersect at index " + std::to_string(index), index);
    }
    return p;
}

}  // namespace bounds_detail

/// Split j (1-based, j = 1..d-1): E_j = Λ_1+…+Λ_j, F_j = -(Λ_{j+1}+…+Λ_d).
inline std::vector<SeparatedPair> check_minkowski_sum_separated(const std::vector<SpectralSet>& sets) {
    bounds_detail::check_uniform_kind(sets);
    const std::size_t d = sets.size();
    std::vector<SeparatedPair> out;
    for (std::size_t j = 1; j < d; ++j) {
        std::vector<bool> in_e(d, false);
        for (std::size_t i = 0; i < j; ++i) in_e[i] = true;
        out.push_back(bounds_detail::make_pair(sets, in_e, j, "Minkowski sum separation"));
    }
    return out;
}

/// Mode j (1-based): E_j = Λ_j, F_j = -Σ_{i≠j} Λ_i.
inline std::vector<SeparatedPair> check_minkowski_singly_separated(const std::vector<SpectralSet>& sets) {
    bounds_detail::check_uniform_kind(sets);
    const std::size_t d = sets.size();
    std::vector<SeparatedPair> out;
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<bool> in_e(d, false);
        in_e[j] = true;
        out.push_back(bounds_detail::make_pair(sets, in_e, j + 1, "Minkowski single separation"));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Storage bounds

inline std::size_t tt_storage_from_ranks(const std::vector<std::size_t>& s, const std::vector<std::size_t>& extents) {
    if (s.size() != extents.size() + 1) throw std::invalid_argument("tt_storage_from_ranks: rank vector length must be d+1");
    std::size_t total = 0;
    for (std::size_t j = 0; j < extents.size(); ++j) total += s[j] * s[j + 1] * extents[j];
    return total;
}

inline std::size_t ml_storage_from_ranks(const std::vector<std::size_t>& t, const std::vector<std::size_t>& extents) {
    if (t.size() != extents.size()) throw std::invalid_argument("ml_storage_from_ranks: rank vector length must be d");
    std::size_t total = 1;
    for (auto r : t) total *= r;
    for (std::size_t j = 0; j < extents.size(); ++j) total += extents[j] * t[j];
    return total;
}

inline void check_bound_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("storage bound: need 0 < eps < 1");
}

/// TT storage bound with s_j = k_j ν_j, where Z_{k_j}(E_j, F_j) ≤ ε/√d.
inline BoundReport tt_storage_bound(const std::vector<SpectralSet>& sets, const std::vector<std::size_t>& nu,
                                    const std::vector<std::size_t>& extents, double eps) {
    check_bound_eps(eps);
    const std::size_t d = sets.size();
    if (extents.size() != d) throw std::invalid_argument("tt_storage_bound: need one extent per spectral set");
    if (nu.size() != d - 1) throw std::invalid_argument("tt_storage_bound: need d-1 unfolding ranks");
    for (auto v : nu)
        if (v == 0) throw std::invalid_argument("tt_storage_bound: unfolding ranks must be >= 1");
    const auto pairs = check_minkowski_sum_separated(sets);
    const double tol = eps / std::sqrt(static_cast<double>(d));
    BoundReport r;
    r.format = BoundFormat::tensor_train;
    r.epsilon = eps;
    r.rank_bound.assign(d + 1, 1);
    for (std::size_t j = 0; j + 1 < d; ++j) {
        r.rho_or_gamma.push_back(pairs[j].conditioning());
        r.k_values.push_back(pairs[j].k_for(tol));
        r.rank_bound[j + 1] = r.k_values.back() * nu[j];
    }
    r.storage_bound = tt_storage_from_ranks(r.rank_bound, extents);
    return r;
}

/// Multilinear storage bound Σ n_j k_j μ_j + ∏ k_j μ_j.
inline BoundReport ml_storage_bound(const std::vector<SpectralSet>& sets, const std::vector<std::size_t>& mu,
                                    const std::vector<std::size_t>& extents, double eps) {
    check_bound_eps(eps);
    const std::size_t d = sets.size();
    if (extents.size() != d || mu.size() != d) throw std::invalid_argument("ml_storage_bound: need d extents and d ranks");
    for (auto v : mu)
        if (v == 0) throw std::invalid_argument("ml_storage_bound: multilinear ranks must be >= 1");
    const auto pairs = check_minkowski_singly_separated(sets);
    const double tol = eps / std::sqrt(static_cast<double>(d));
    BoundReport r;
    r.format = BoundFormat::multilinear;
    r.epsilon = eps;
    for (std::size_t j = 0; j < d; ++j) {
        r.rho_or_gamma.push_back(pairs[j].conditioning());
        r.k_values.push_back(pairs[j].k_for(tol));
        r.rank_bound.push_back(r.k_values.back() * mu[j]);
    }
    r.storage_bound = ml_storage_from_ranks(r.rank_bound, extents);
    return r;
}

// ---------------------------------------------------------------------------
// Closed forms for the three model problems (d = 3, ν = 1). These evaluate the
// specialised expressions directly and do not go through the separation code.

inline std::size_t closed_form_s1(double sixteen_gamma, double eps) {
    check_bound_eps(eps);
    return static_cast<std::size_t>(
        std::ceil(std::log(sixteen_gamma) * std::log(4.0 * std::sqrt(3.0) / eps) / kPi2));
}

inline std::size_t hilbert_s1_bound(std::size_t n, double eps) {
    const double m = static_cast<double>(n);
    return closed_form_s1(16.0 * m * (2.0 * m - 1.0) / (3.0 * m - 2.0), eps);
}

inline std::size_t fd_poisson_s1_bound(std::size_t n, double eps) {
    const double m2 = static_cast<double>(n) * static_cast<double>(n);
    return closed_form_s1(16.0 * (m2 + 2.0) * (2.0 * m2 + 1.0) / (9.0 * m2), eps);
}

inline std::size_t spectral_poisson_s1_bound(std::size_t n, double eps) {
    const double m4 = std::pow(static_cast<double>(n), 4);
    return closed_form_s1(16.0 * (30.0 * m4 + 2.0) * (60.0 * m4 + 1.0) / (270.0 * m4), eps);
}

/// n(s1² + 2 s1): TT storage for three equal extents with ranks (1, s1, s1, 1).
inline std::size_t cubic_tt_storage(std::size_t n, std::size_t s1) { return n * (s1 * s1 + 2 * s1); }

// ---------------------------------------------------------------------------
// Polynomial sampling and CP bounds

/// min_j (∏_i r_i) / r_j: CP rank available from factor ranks r_1..r_d.
inline std::size_t kruskal_cp_rank_bound(const std::vector<std::size_t>& ranks) {
    if (ranks.empty()) throw std::invalid_argument("kruskal_cp_rank_bound: empty rank list");
    std::size_t best = 0;
    for (std::size_t j = 0; j < ranks.size(); ++j) {
        std::size_t prod = 1;
        for (std::size_t i = 0; i < ranks.size(); ++i)
            if (i != j) prod *= ranks[i];
        best = j == 0 ? prod : std::min(best, prod);
    }
    return best;
}

struct PolyBounds {
    std::vector<std::size_t> tt_ranks;  // t_0..t_d
    std::size_t tt_storage = 0;
    std::size_t ml_storage = 0;
    std::size_t cp_rank = 0;
    std::size_t cp_storage = 0;
};

/// Bounds for samples of a polynomial of degree at most N_j - 1 in variable j.
inline PolyBounds poly_sampling_bounds(const std::vector<std::size_t>& degrees, const std::vector<std::size_t>& extents) {
    const std::size_t d = degrees.size();
    if (d == 0 || extents.size() != d) throw std::invalid_argument("poly_sampling_bounds: need matching nonempty degree and extent lists");
    for (std::size_t j = 0; j < d; ++j)
        if (degrees[j] == 0 || extents[j] == 0) throw std::invalid_argument("poly_sampling_bounds: degrees and extents must be >= 1");
    PolyBounds out;
    out.tt_ranks.assign(d + 1, 1);
    for (std::size_t k = 1; k < d; ++k) {
        std::size_t left = 1, right = 1;
        for (std::size_t j = 0; j < k; ++j) left *= degrees[j];
        for (std::size_t j = k; j < d; ++j) right *= degrees[j];
        out.tt_ranks[k] = std::min(left, right);
    }
    out.tt_storage = tt_storage_from_ranks(out.tt_ranks, extents);
    out.ml_storage = ml_storage_from_ranks(degrees, extents);
    out.cp_rank = kruskal_cp_rank_bound(degrees);
    const std::size_t nsum = std::accumulate(extents.begin(), extents.end(), std::size_t{0});
    out.cp_storage = out.cp_rank + out.cp_rank * nsum;
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian bumps

struct GaussianBumpBound {
    std::size_t ell = 0;
    std::size_t s1_bound = 1;
    double lhs = 0.0;  // left-hand side of the test at the returned ell
};

inline constexpr std::size_t kGaussianEllCap = 1'000'000;

/// Smallest ℓ with 6 M n^{3/2} e^{-γ/4} I_{⌊ℓ/2⌋+1}(γ/4) ≤ ε; s_1 ≤ ℓ + 1.
/// ε is compared against the left-hand side as written, without normalising by ‖X‖_F.
inline GaussianBumpBound gaussian_bump_bound(std::size_t m_bumps, std::size_t n, double gamma, double eps) {
    if (!(gamma > 0.0)) throw std::domain_error("gaussian_bump_bound: need gamma > 0");
    if (m_bumps == 0 || n == 0) throw std::domain_error("gaussian_bump_bound: need M, n >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("gaussian_bump_bound: need 0 < eps < 1");
    const double x = 0.25 * gamma;
    const double prefactor = 6.0 * static_cast<double>(m_bumps) * std::pow(static_cast<double>(n), 1.5);
    const std::size_t max_order = kGaussianEllCap / 2 + 1;
    std::size_t span = 64;
    while (true) {
        const std::size_t top = std::min(span, max_order);
        const auto seq = bessel_i_scaled_sequence(top, x);
        for (std::size_t order = 1; order <= top; ++order) {
            const double lhs = prefactor * seq[order];
            if (lhs <= eps) {
                GaussianBumpBound g;
                g.ell = 2 * (order - 1);
                g.s1_bound = g.ell + 1;
                g.lhs = lhs;
                return g;
            }
        }
        if (top == max_order) break;
        span *= 4;
    }
    GaussianBumpBound g;
    g.ell = kGaussianEllCap;
    g.s1_bound = kGaussianEllCap + 1;
    g.lhs = prefactor * bessel_i_scaled(max_order, x);
    return g;
}

}  // namespace ttz
