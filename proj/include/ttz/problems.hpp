#pragma once

// Test tensors and model equations: function samplers, Gaussian bumps, the
// Hilbert tensor and its displacement equation, finite-difference and
// ultraspherical spectral discretisations of the 3D Poisson equation, and
// random SPD Sylvester problems.

#include "ttz/bounds.hpp"
#include "ttz/formats.hpp"
#include "ttz/linalg.hpp"
#include "ttz/sylvester.hpp"
#include "ttz/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace ttz {

// ---------------------------------------------------------------------------
// Grids and sampling

struct GridSpec {
    enum class Kind { equispaced, chebyshev };
    Kind kind = Kind::equispaced;
    std::vector<double> lo, hi;
    std::vector<std::size_t> counts;

    static GridSpec cube(Kind kind, std::size_t d, std::size_t n, double a = -1.0, double b = 1.0) {
        return {kind, std::vector<double>(d, a), std::vector<double>(d, b), std::vector<std::size_t>(d, n)};
    }

    [[nodiscard]] std::size_t order() const { return counts.size(); }

    /// Nodes of dimension k (0-based), endpoints included.
    [[nodiscard]] std::vector<double> nodes(std::size_t k) const {
        const std::size_t n = counts.at(k);
        if (n < 2) throw std::invalid_argument("GridSpec: need at least two nodes per dimension");
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = kind == Kind::equispaced
                                 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1)
                                 : std::cos(static_cast<double>(i) * std::numbers::pi / static_cast<double>(n - 1));
            x[i] = lo[k] + 0.5 * (t + 1.0) * (hi[k] - lo[k]);
        }
        if (kind == Kind::equispaced && n % 2 == 1) x[n / 2] = 0.5 * (lo[k] + hi[k]);
        return x;
    }

    void validate() const {
        if (counts.empty() || lo.size() != counts.size() || hi.size() != counts.size())
            throw std::invalid_argument("GridSpec: lo, hi and counts must have one entry per dimension");
    }
};

/// X_{i_1..i_d} = f(x^(1)_{i_1}, ..., x^(d)_{i_d}); f takes const std::vector<double>&.
template <typename F>
auto sample_function(F&& f, const GridSpec& grid) {
    using R = std::decay_t<std::invoke_result_t<F&, const std::vector<double>&>>;
    grid.validate();
    const std::size_t d = grid.order();
    std::vector<std::vector<double>> nodes;
    for (std::size_t k = 0; k < d; ++k) nodes.push_back(grid.nodes(k));
    DenseTensor<R> out(Extents(grid.counts.begin(), grid.counts.end()));
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> pt(d);
    std::size_t lin = 0;
    do {
        for (std::size_t k = 0; k < d; ++k) pt[k] = nodes[k][idx[k]];
        const R v = f(pt);
        if (!std::isfinite(std::abs(v)))
            throw std::domain_error("sample_function: non-finite value at linear index " + std::to_string(lin));
        out[lin++] = v;
    } while (out.advance(idx));
    return out;
}

/// e^{iMπxyz} on an equispaced n³ grid over [−1, 1]³.
inline DenseTensor<std::complex<double>> fourier_like(double m, std::size_t n) {
    if (n < 2) throw std::invalid_argument("fourier_like: need n >= 2");
    const auto grid = GridSpec::cube(GridSpec::Kind::equispaced, 3, n);
    const double c = m * std::numbers::pi;
    return sample_function(
        [c](const std::vector<double>& p) { return std::polar(1.0, c * p[0] * p[1] * p[2]); }, grid);
}

/// Uniform double in [0, 1) from the top 53 bits, independent of the standard library's distributions.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<std::array<double, 3>> random_centers(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::array<double, 3>> c(m);
    for (auto& p : c)
        for (auto& v : p) v = 2.0 * unit_uniform(rng) - 1.0;
    return c;
}

/// Σ_j exp(−γ‖x − c_j‖²) on an equispaced n³ grid over [−1, 1]³, built from the
/// separable factors of each bump.
inline DenseTensor<double> gaussian_bumps(const std::vector<std::array<double, 3>>& centers, double gamma,
                                          std::size_t n) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gaussian_bumps: need gamma > 0");
    if (centers.empty()) throw std::invalid_argument("gaussian_bumps: need at least one centre");
    const auto nodes = GridSpec::cube(GridSpec::Kind::equispaced, 3, n).nodes(0);
    const auto m = static_cast<Eigen::Index>(centers.size());
    std::vector<MatrixXd> factors(3, MatrixXd(static_cast<Eigen::Index>(n), m));
    for (Eigen::Index j = 0; j < m; ++j)
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                const double t = nodes[i] - centers[static_cast<std::size_t>(j)][k];
                factors[k](static_cast<Eigen::Index>(i), j) = std::exp(-gamma * t * t);
            }
    return reconstruct(CPTensor<double>(VectorXd::Ones(m), std::move(factors)));
}

inline DenseTensor<double> gaussian_bumps(std::size_t m, double gamma, std::size_t n, std::uint64_t seed) {
    return gaussian_bumps(random_centers(m, seed), gamma, n);
}

/// Samples of Σ c_{abc} x^a y^b z^c (a < N_1, b < N_2, c < N_3, random c in [−1, 1])
/// on an equispaced n³ grid.
inline DenseTensor<double> random_polynomial_tensor(const std::array<std::size_t, 3>& degrees, std::size_t n,
                                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DenseTensor<double> coeffs(Extents{degrees[0], degrees[1], degrees[2]});
    for (auto& v : coeffs.data()) v = 2.0 * unit_uniform(rng) - 1.0;
    const auto nodes = GridSpec::cube(GridSpec::Kind::equispaced, 3, n).nodes(0);
    std::vector<MatrixXd> vander;
    for (std::size_t k = 0; k < 3; ++k) {
        MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(degrees[k]));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < degrees[k]; ++p)
                v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = std::pow(nodes[i], static_cast<double>(p));
        vander.push_back(std::move(v));
    }
    return reconstruct(TuckerTensor<double>(std::move(coeffs), std::move(vander)));
}

// ---------------------------------------------------------------------------
// Hilbert

/// H_ijk = 1/(i + j + k − 2), 1-based indices.
inline DenseTensor<double> hilbert_tensor(std::size_t n) {
    if (n == 0) throw std::invalid_argument("hilbert_tensor: need n >= 1");
    DenseTensor<double> h(Extents{n, n, n});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) h(i, j, k) = 1.0 / static_cast<double>(i + j + k + 1);
    return h;
}

inline TuckerTensor<double> ones_rank_one(const Extents& ext, double value = 1.0) {
    DenseTensor<double> core(Extents(ext.size(), 1));
    core[0] = value;
    std::vector<MatrixXd> f;
    for (auto n : ext) f.push_back(MatrixXd::Ones(static_cast<Eigen::Index>(n), 1));
    return TuckerTensor<double>(std::move(core), std::move(f));
}

/// H ×_1 D + H ×_2 D + H ×_3 D = all-ones, D = diag(i − 2/3).
inline SylvesterProblem3D hilbert_displacement(std::size_t n) {
    if (n == 0) throw std::invalid_argument("hilbert_displacement: need n >= 1");
    VectorXd diag(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) diag(static_cast<Eigen::Index>(i)) = static_cast<double>(i + 1) - 2.0 / 3.0;
    SylvesterProblem3D p;
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k < 3; ++k) {
        p.a[k] = Operator::diagonal(diag);
        p.spectra[k] = SpectralSet::interval(1.0 / 3.0, (3.0 * dn - 2.0) / 3.0);
    }
    p.rhs = ones_rank_one({n, n, n});
    return p;
}

// ---------------------------------------------------------------------------
// Finite-difference Poisson

/// (1/h²) tridiag(−1, 2, −1) of size n − 1, h = 2/n.
inline BandedMatrix fd_laplacian_1d(std::size_t n) {
    if (n < 3) throw std::invalid_argument("fd_poisson: need n >= 3");
    const std::size_t m = n - 1;
    const double h = 2.0 / static_cast<double>(n);
    const double s = 1.0 / (h * h);
    BandedMatrix k(m, 1, 1);
    for (std::size_t i = 0; i < m; ++i) {
        k.set(i, i, 2.0 * s);
        if (i + 1 < m) {
            k.set(i, i + 1, -s);
            k.set(i + 1, i, -s);
        }
    }
    return k;
}

/// Interior grid x_i = i h − 1, i = 1..n−1.
inline std::vector<double> fd_nodes(std::size_t n) {
    std::vector<double> x(n - 1);
    const double h = 2.0 / static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) x[i - 1] = static_cast<double>(i) * h - 1.0;
    return x;
}

namespace problems_detail {

inline SylvesterProblem3D fd_skeleton(std::size_t n) {
    SylvesterProblem3D p;
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t k = 0; k < 3; ++k) {
        p.a[k] = Operator::banded(fd_laplacian_1d(n));
        p.spectra[k] = SpectralSet::interval(1.0, n2);
    }
    return p;
}

}  // namespace problems_detail

/// −Δu = c on [−1, 1]³ with zero Dirichlet data; extents n − 1.
inline SylvesterProblem3D fd_poisson(std::size_t n, double c = 1.0) {
    auto p = problems_detail::fd_skeleton(n);
    p.rhs = ones_rank_one({n - 1, n - 1, n - 1}, c);
    return p;
}

/// −Δu = f; the sampled rhs is compressed to Tucker form at 1e−14 relative accuracy.
inline SylvesterProblem3D fd_poisson(std::size_t n, const std::function<double(double, double, double)>& f) {
    auto p = problems_detail::fd_skeleton(n);
    const auto x = fd_nodes(n);
    DenseTensor<double> rhs(Extents{n - 1, n - 1, n - 1});
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = 0; j + 1 < n; ++j)
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double v = f(x[i], x[j], x[k]);
                if (!std::isfinite(v)) throw std::domain_error("fd_poisson: non-finite right-hand side");
                rhs(i, j, k) = v;
            }
    if (frobenius_norm(rhs) == 0.0) {
        p.rhs = ones_rank_one({n - 1, n - 1, n - 1}, 0.0);
        return p;
    }
    p.rhs = hosvd(rhs, 1e-14);
    return p;
}

// ---------------------------------------------------------------------------
// Ultraspherical spectral Poisson
//
// u = (1−x²)(1−y²)(1−z²) Σ X_pqr C̃_p(x) C̃_q(y) C̃_r(z), p, q, r = 0..n, with C̃_p
// the C^(3/2) polynomials normalised in the weight (1 − x²). Since
// −d²/dx² [(1−x²) C̃_p] = (p+1)(p+2) C̃_p and multiplication by (1−x²) is
// M = I − J² (J the Jacobi matrix of the basis), −Δu = f becomes
//     X ×_1 S² ×_2 M ×_3 M + (two permutations) = F,    S = diag(√((p+1)(p+2))).
// With B = S⁻¹ M S⁻¹ (symmetric pentadiagonal) and W = X ×_all S this is
//     W ×_1 B⁻¹ + W ×_2 B⁻¹ + W ×_3 B⁻¹ = F ×_all (S M⁻¹).

/// Squared norm of C^(3/2)_p in the weight (1 − x²).
inline double ultraspherical_norm2(std::size_t p) {
    const double q = static_cast<double>(p);
    return 2.0 * (q + 1.0) * (q + 2.0) / (2.0 * q + 3.0);
}

/// C̃_0(x), ..., C̃_{count−1}(x).
inline std::vector<double> ultraspherical_values(std::size_t count, double x) {
    std::vector<double> c(count, 0.0);
    if (count == 0) return c;
    c[0] = 1.0;
    if (count > 1) c[1] = 3.0 * x;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        const double q = static_cast<double>(k);
        c[k + 1] = ((2.0 * q + 3.0) * x * c[k] - (q + 2.0) * c[k - 1]) / (q + 1.0);
    }
    for (std::size_t k = 0; k < count; ++k) c[k] /= std::sqrt(ultraspherical_norm2(k));
    return c;
}

struct SpectralPoissonOperators {
    std::size_t n = 0;    // highest degree; matrices are (n+1) × (n+1)
    VectorXd d;           // D = diag(d) = −S²
    BandedMatrix m;       // multiplication by (1 − x²), symmetric pentadiagonal
    BandedMatrix a;       // A = D⁻¹ M
    BandedMatrix b;       // B = S⁻¹ M S⁻¹ = −S A S⁻¹, symmetric pentadiagonal
    VectorXd s;           // diagonal of S
    double lambda_min = 0.0, lambda_max = 0.0;  // extreme eigenvalues of B
};

inline SpectralPoissonOperators spectral_poisson_operators(std::size_t n) {
    if (n < 4) throw std::invalid_argument("spectral_poisson: need n >= 4");
    SpectralPoissonOperators ops;
    ops.n = n;
    const std::size_t size = n + 1, big = size + 2;
    MatrixXd j = MatrixXd::Zero(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(big));
    for (std::size_t k = 0; k + 1 < big; ++k) {
        const double q = static_cast<double>(k);
        const double b = (q + 1.0) / (2.0 * q + 3.0) * std::sqrt(ultraspherical_norm2(k + 1) / ultraspherical_norm2(k));
        j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k + 1)) = b;
        j(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) = b;
    }
    const MatrixXd full = MatrixXd::Identity(j.rows(), j.cols()) - j * j;
    const auto sz = static_cast<Eigen::Index>(size);
    MatrixXd mm = full.topLeftCorner(sz, sz);
    // Entries off the ±2 diagonals are exact zeros; clear rounding noise on the main diagonal band.
    for (Eigen::Index c = 0; c < sz; ++c)
        for (Eigen::Index r = 0; r < sz; ++r)
            if (std::abs(r - c) == 1 || std::abs(r - c) > 2) mm(r, c) = 0.0;
    ops.m = BandedMatrix::from_dense(mm, 2, 2);
    ops.s.resize(sz);
    ops.d.resize(sz);
    for (Eigen::Index p = 0; p < sz; ++p) {
        const double w = static_cast<double>((p + 1) * (p + 2));
        ops.s(p) = std::sqrt(w);
        ops.d(p) = -w;
    }
    MatrixXd a = ops.d.cwiseInverse().asDiagonal() * mm;
    ops.a = BandedMatrix::from_dense(a, 2, 2);
    MatrixXd b = ops.s.cwiseInverse().asDiagonal() * mm * ops.s.cwiseInverse().asDiagonal();
    b = 0.5 * (b + b.transpose());
    ops.b = BandedMatrix::from_dense(b, 2, 2);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(b, Eigen::EigenvaluesOnly);
    ops.lambda_min = es.eigenvalues()(0);
    ops.lambda_max = es.eigenvalues()(sz - 1);
    // Λ(A) = −Λ(B) must lie in [−1, −1/(30 n⁴)].
    const double floor = 1.0 / (30.0 * std::pow(static_cast<double>(n), 4));
    if (!(ops.lambda_min >= floor && ops.lambda_max <= 1.0))
        throw std::runtime_error("spectral_poisson: spectrum enclosure failed (lambda in [" +
                                 std::to_string(ops.lambda_min) + ", " + std::to_string(ops.lambda_max) + "])");
    return ops;
}

struct SpectralPoisson {
    SylvesterProblem3D problem;  // unknown W = X ×_all S, operators B⁻¹ with Λ ⊂ [1, 30 n⁴]
    SpectralPoissonOperators ops;

    /// Coefficient tensor X of u from a solution W.
    [[nodiscard]] DenseTensor<double> coefficients(const DenseTensor<double>& w) const {
        const MatrixXd sinv = ops.s.cwiseInverse().asDiagonal();
        DenseTensor<double> x = w;
        for (std::size_t k = 1; k <= 3; ++k) x = kmode_product(x, sinv, k);
        return x;
    }

    /// Same scaling applied to the cores of a TT solution; ranks are unchanged.
    [[nodiscard]] TTTensor<double> coefficients(const TTTensor<double>& w) const {
        const MatrixXd sinv = ops.s.cwiseInverse().asDiagonal();
        std::vector<DenseTensor<double>> cores;
        for (const auto& c : w.cores()) cores.push_back(kmode_product(c, sinv, 2));
        return TTTensor<double>(std::move(cores));
    }
};

/// u(x, y, z) from its coefficient tensor X.
inline double spectral_poisson_eval(const DenseTensor<double>& x, double px, double py, double pz) {
    const std::size_t n1 = x.extent(0), n2 = x.extent(1), n3 = x.extent(2);
    const auto cx = ultraspherical_values(n1, px), cy = ultraspherical_values(n2, py), cz = ultraspherical_values(n3, pz);
    double sum = 0.0;
    for (std::size_t k = 0; k < n3; ++k) {
        double sj = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            double si = 0.0;
            for (std::size_t i = 0; i < n1; ++i) si += x(i, j, k) * cx[i];
            sj += si * cy[j];
        }
        sum += sj * cz[k];
    }
    return (1.0 - px * px) * (1.0 - py * py) * (1.0 - pz * pz) * sum;
}

/// −Δu = f with f given by its coefficient tensor in the C̃ basis (Tucker form).
inline SpectralPoisson spectral_poisson(std::size_t n, const TuckerTensor<double>& f_coeffs) {
    SpectralPoisson out;
    out.ops = spectral_poisson_operators(n);
    for (std::size_t k = 0; k < 3; ++k)
        if (f_coeffs.factor(k).rows() != static_cast<Eigen::Index>(n + 1))
            throw std::invalid_argument("spectral_poisson: coefficient factors need n + 1 rows");
    const double upper = 30.0 * std::pow(static_cast<double>(n), 4);
    std::vector<MatrixXd> g;
    for (std::size_t k = 0; k < 3; ++k) {
        out.problem.a[k] = Operator::inverse_of_banded(out.ops.b);
        out.problem.spectra[k] = SpectralSet::interval(1.0, upper);
        g.push_back(out.ops.s.asDiagonal() * out.ops.m.solve(f_coeffs.factor(k)));
    }
    out.problem.rhs = TuckerTensor<double>(f_coeffs.core(), std::move(g));
    return out;
}

/// f = 1: only the degree-0 coefficient is nonzero, 1 = √h_0 C̃_0 in each variable.
inline SpectralPoisson spectral_poisson(std::size_t n) {
    if (n < 4) throw std::invalid_argument("spectral_poisson: need n >= 4");
    DenseTensor<double> core(Extents{1, 1, 1});
    core[0] = std::pow(ultraspherical_norm2(0), 1.5);
    std::vector<MatrixXd> f;
    for (std::size_t k = 0; k < 3; ++k) f.push_back(VectorXd::Unit(static_cast<Eigen::Index>(n + 1), 0));
    return spectral_poisson(n, TuckerTensor<double>(std::move(core), std::move(f)));
}

// ---------------------------------------------------------------------------
// Random SPD problems

struct RandomProblemOptions {
    std::size_t n = 8;
    std::size_t rhs_rank = 2;  // Tucker core size of F per mode
};

/// A_k = Q_k Λ_k Q_kᵀ with Λ_k drawn in a random interval [a_k, b_k] ⊂ [0.5, 2000]
/// (endpoints attained), Q_k Haar-like orthogonal; F a random Tucker tensor.
inline SylvesterProblem3D random_spd_problem(const RandomProblemOptions& opt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto n = static_cast<Eigen::Index>(opt.n);
    SylvesterProblem3D p;
    for (std::size_t k = 0; k < 3; ++k) {
        const double a = 0.5 + 1.5 * unit_uniform(rng);
        const double b = a * std::pow(10.0, 3.0 * unit_uniform(rng));
        VectorXd lam(n);
        for (Eigen::Index i = 0; i < n; ++i) lam(i) = a + (b - a) * unit_uniform(rng);
        lam(0) = a;
        if (n > 1) lam(n - 1) = b;
        MatrixXd g(n, n);
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r) g(r, c) = normal(rng);
        Eigen::HouseholderQR<MatrixXd> qr(g);
        const MatrixXd q = qr.householderQ();
        MatrixXd ak = q * lam.asDiagonal() * q.transpose();
        ak = 0.5 * (ak + ak.transpose());
        p.a[k] = Operator::dense(ak);
        p.spectra[k] = SpectralSet::interval(a, b);
    }
    const std::size_t r = std::max<std::size_t>(1, std::min(opt.rhs_rank, opt.n));
    DenseTensor<double> core(Extents{r, r, r});
    for (auto& v : core.data()) v = normal(rng);
    std::vector<MatrixXd> f;
    for (std::size_t k = 0; k < 3; ++k) {
        MatrixXd m(n, static_cast<Eigen::Index>(r));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index i = 0; i < n; ++i) m(i, c) = normal(rng);
        f.push_back(std::move(m));
    }
    p.rhs = TuckerTensor<double>(std::move(core), std::move(f));
    return p;
}

}  // namespace ttz
