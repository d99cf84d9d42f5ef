#pragma once

// Third-order tensor Sylvester equations
//
//     X ×_1 A1 + X ×_2 A2 + X ×_3 A3 = F,
//
// with every Λ(A_k) in a positive interval. Solvers: fADI into tensor-train
// format, fADI + projected core solve into Tucker format, and two dense
// oracles (sparse Kronecker LU, eigendecomposition).

#include "ttz/adi.hpp"
#include "ttz/bounds.hpp"
#include "ttz/formats.hpp"
#include "ttz/linalg.hpp"
#include "ttz/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ttz {

/// Right-hand side kept in Tucker form F = G ×_1 P1 ×_2 P2 ×_3 P3 (the P_k need
/// not be orthonormal), so the unfolding factors W_k Z_kᵀ never require F densely.
struct SylvesterProblem3D {
    std::array<Operator, 3> a;
    TuckerTensor<double> rhs;
    std::array<SpectralSet, 3> spectra;

    [[nodiscard]] Extents extents() const { return {a[0].size(), a[1].size(), a[2].size()}; }

    void validate() const {
        if (rhs.order() != 3) throw std::invalid_argument("SylvesterProblem3D: rhs must be third-order");
        const Extents ext = rhs.extents();
        for (std::size_t k = 0; k < 3; ++k)
            if (ext[k] != a[k].size())
                throw std::invalid_argument("SylvesterProblem3D: operator " + std::to_string(k + 1) +
                                            " does not match the rhs extent");
    }

    [[nodiscard]] DenseTensor<double> rhs_dense(std::size_t cap = kDefaultElementCap) const {
        return reconstruct(rhs, cap);
    }

    [[nodiscard]] std::vector<SpectralSet> spectra_list() const { return {spectra[0], spectra[1], spectra[2]}; }
};

/// F_k = W Zᵀ for a matrix flattening of the rhs.
struct RhsFactors {
    MatrixXd w;
    MatrixXd z;
};

namespace sylvester_detail {

// M = L Rᵀ with L = U Σ, R = V, keeping singular values above 1e-14 σ_max.
inline RhsFactors exact_low_rank(const MatrixXd& m) {
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > 1e-14 * s(0)) ++r;
    return {svd.matrixU().leftCols(r) * s.head(r).asDiagonal(), svd.matrixV().leftCols(r)};
}

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// (P2 ⊗ Q) applied to each column of L, where a column is vec of a (cols(Q) × cols(P2)) matrix.
inline MatrixXd kron_apply(const MatrixXd& p2, const MatrixXd& q, const MatrixXd& l) {
    MatrixXd out(q.rows() * p2.rows(), l.cols());
    for (Eigen::Index c = 0; c < l.cols(); ++c) {
        Eigen::Map<const MatrixXd> lc(l.col(c).data(), q.cols(), p2.cols());
        MatrixXd r = q * lc * p2.transpose();
        out.col(c) = Eigen::Map<const VectorXd>(r.data(), r.size());
    }
    return out;
}

inline Interval as_interval(const SpectralSet& s) {
    if (!s.is_interval())
        throw std::invalid_argument("Sylvester solvers support interval spectra only; disk enclosures are bound-only");
    return {s.a(), s.b()};
}

}  // namespace sylvester_detail

/// F_1 = W1 Z1ᵀ (split 1) or F_2 = W2 Z2ᵀ (split 2), with W, Z of exact rank ν_k.
inline RhsFactors unfolding_factors(const SylvesterProblem3D& p, std::size_t split) {
    using namespace sylvester_detail;
    const auto& g = p.rhs.core();
    const auto& f = p.rhs.factors();
    if (split == 1) {
        auto lr = exact_low_rank(unfold(g, 1).matrix);
        return {f[0] * lr.w, kron(f[2], f[1]) * lr.z};
    }
    if (split == 2) {
        auto lr = exact_low_rank(unfold(g, 2).matrix);
        return {kron(f[1], f[0]) * lr.w, f[2] * lr.z};
    }
    throw std::out_of_range("unfolding_factors: split must be 1 or 2");
}

/// Column factor of F_(j) = P_j G_(j) (…)ᵀ: returns W with F_(j) = W Zᵀ for some Z.
inline MatrixXd matricization_column_factor(const SylvesterProblem3D& p, std::size_t j) {
    const auto lr = sylvester_detail::exact_low_rank(matricize(p.rhs.core(), j).matrix);
    return p.rhs.factor(j - 1) * lr.w;
}

/// x ×_k A for an Operator, mode 1-based.
inline DenseTensor<double> apply_mode(const Operator& a, const DenseTensor<double>& x, std::size_t k) {
    detail::check_mode(k, x.order(), "apply_mode");
    const auto [left, nk, right] = detail::mode_split(x.extents(), k);
    if (a.size() != nk) throw std::invalid_argument("apply_mode: operator size does not match mode extent");
    DenseTensor<double> out(x.extents());
    if (left == 1) {
        out.as_matrix(nk, right) = a.apply(x.as_matrix(nk, right));
        return out;
    }
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const MatrixXd> src(x.data().data() + r * left * nk, static_cast<Eigen::Index>(left),
                                       static_cast<Eigen::Index>(nk));
        Eigen::Map<MatrixXd> dst(out.data().data() + r * left * nk, static_cast<Eigen::Index>(left),
                                 static_cast<Eigen::Index>(nk));
        dst = a.apply(src.transpose()).transpose();
    }
    return out;
}

/// Σ_k x ×_k A_k
inline DenseTensor<double> sylvester_apply(const SylvesterProblem3D& p, const DenseTensor<double>& x) {
    DenseTensor<double> y = apply_mode(p.a[0], x, 1);
    y += apply_mode(p.a[1], x, 2);
    y += apply_mode(p.a[2], x, 3);
    return y;
}

/// ‖Σ_k x ×_k A_k − F‖_F
inline double residual_3d(const SylvesterProblem3D& p, const DenseTensor<double>& x) {
    p.validate();
    if (x.extents() != p.extents()) throw std::invalid_argument("residual_3d: solution extents do not match");
    DenseTensor<double> r = sylvester_apply(p, x);
    r -= p.rhs_dense();
    return frobenius_norm(r);
}

inline double residual_3d(const SylvesterProblem3D& p, const TTTensor<double>& x,
                          std::size_t cap = kDefaultElementCap) {
    return residual_3d(p, reconstruct(x, cap));
}

inline double residual_3d(const SylvesterProblem3D& p, const TuckerTensor<double>& x,
                          std::size_t cap = kDefaultElementCap) {
    return residual_3d(p, reconstruct(x, cap));
}

// ---------------------------------------------------------------------------
// Dense oracles

inline constexpr std::size_t kDirectSolveCap = std::size_t{1} << 17;

namespace sylvester_detail {

inline void add_dense_entries(std::vector<Eigen::Triplet<double>>& trip, const MatrixXd& m, std::size_t row_idx,
                              int row, const std::function<int(std::size_t)>& col) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (const double v = m(static_cast<Eigen::Index>(row_idx), c); v != 0.0)
            trip.emplace_back(row, col(static_cast<std::size_t>(c)), v);
}

}  // namespace sylvester_detail

/// Assembles I⊗I⊗A1 + I⊗A2⊗I + A3⊗I⊗I (column-major vec) as a sparse matrix
/// and solves it with sparse LU. When every A_k = B_k⁻¹ with B_k banded, the
/// equation is first multiplied through by B3⊗B2⊗B1 so the system stays sparse.
inline DenseTensor<double> direct_kron_solve_3d(const SylvesterProblem3D& p) {
    p.validate();
    const Extents ext = p.extents();
    const std::size_t total = element_count(ext);
    if (total > kDirectSolveCap)
        throw CapacityError("direct_kron_solve_3d: " + std::to_string(total) + " unknowns exceeds the cap of " +
                            std::to_string(kDirectSolveCap));
    const std::size_t n1 = ext[0], n2 = ext[1], n3 = ext[2];
    auto lin = [&](std::size_t i, std::size_t j, std::size_t k) { return static_cast<int>(i + n1 * (j + n2 * k)); };
    const bool inverse_form = p.a[0].inverse_band() && p.a[1].inverse_band() && p.a[2].inverse_band();

    std::array<MatrixXd, 3> m;
    for (std::size_t k = 0; k < 3; ++k) m[k] = inverse_form ? p.a[k].inverse_band()->dense() : p.a[k].dense();
    DenseTensor<double> f = p.rhs_dense();

    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < n3; ++k)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t i = 0; i < n1; ++i) {
                const int row = lin(i, j, k);
                if (!inverse_form) {
                    sylvester_detail::add_dense_entries(trip, m[0], i, row, [&](std::size_t c) { return lin(c, j, k); });
                    sylvester_detail::add_dense_entries(trip, m[1], j, row, [&](std::size_t c) { return lin(i, c, k); });
                    sylvester_detail::add_dense_entries(trip, m[2], k, row, [&](std::size_t c) { return lin(i, j, c); });
                    continue;
                }
                // X ×_2 B2 ×_3 B3 + X ×_1 B1 ×_3 B3 + X ×_1 B1 ×_2 B2 = F ×_1 B1 ×_2 B2 ×_3 B3
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j),
                           kk = static_cast<Eigen::Index>(k);
                for (std::size_t c3 = 0; c3 < n3; ++c3) {
                    const double b3 = m[2](kk, static_cast<Eigen::Index>(c3));
                    if (b3 == 0.0) continue;
                    for (std::size_t c2 = 0; c2 < n2; ++c2)
                        if (const double b2 = m[1](jj, static_cast<Eigen::Index>(c2)); b2 != 0.0)
                            trip.emplace_back(row, lin(i, c2, c3), b2 * b3);
                    for (std::size_t c1 = 0; c1 < n1; ++c1)
                        if (const double b1 = m[0](ii, static_cast<Eigen::Index>(c1)); b1 != 0.0)
                            trip.emplace_back(row, lin(c1, j, c3), b1 * b3);
                }
                for (std::size_t c2 = 0; c2 < n2; ++c2) {
                    const double b2 = m[1](jj, static_cast<Eigen::Index>(c2));
                    if (b2 == 0.0) continue;
                    for (std::size_t c1 = 0; c1 < n1; ++c1)
                        if (const double b1 = m[0](ii, static_cast<Eigen::Index>(c1)); b1 != 0.0)
                            trip.emplace_back(row, lin(c1, c2, k), b1 * b2);
                }
            }
    if (inverse_form)
        for (std::size_t k = 0; k < 3; ++k) f = kmode_product(f, m[k], k + 1);

    Eigen::SparseMatrix<double> big(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    big.setFromTriplets(trip.begin(), trip.end());
    big.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(big);
    if (lu.info() != Eigen::Success) throw std::runtime_error("direct_kron_solve_3d: factorization failed");
    const Eigen::Map<const VectorXd> rhs(f.data().data(), static_cast<Eigen::Index>(total));
    const VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("direct_kron_solve_3d: solve failed");
    return DenseTensor<double>(ext, std::vector<double>(x.data(), x.data() + x.size()));
}

/// Eigen-decomposition A = V Λ V⁻¹ of one operator (complex in general).
struct Eigenpairs {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXcd inverse;
};

inline Eigenpairs eigenpairs(const MatrixXd& a) {
    Eigenpairs e;
    if ((a - a.transpose()).norm() <= 1e-14 * a.norm()) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()));
        e.values = es.eigenvalues().cast<std::complex<double>>();
        e.vectors = es.eigenvectors().cast<std::complex<double>>();
        e.inverse = e.vectors.adjoint();
        return e;
    }
    Eigen::EigenSolver<MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenpairs: eigensolver failed");
    e.values = es.eigenvalues();
    e.vectors = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(e.vectors);
    if (!(lu.rcond() > 1e-12)) throw std::runtime_error("eigenpairs: operator is not (numerically) diagonalizable");
    e.inverse = lu.inverse();
    return e;
}

inline Eigen::VectorXcd operator_eigenvalues(const Operator& a) { return eigenpairs(a.dense()).values; }

class SingularProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace sylvester_detail {

inline DenseTensor<double> eigen_solve_dense(const std::array<MatrixXd, 3>& a, const DenseTensor<double>& f) {
    using C = std::complex<double>;
    std::array<Eigenpairs, 3> e{eigenpairs(a[0]), eigenpairs(a[1]), eigenpairs(a[2])};
    DenseTensor<C> g(f.extents());
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i];
    for (std::size_t k = 0; k < 3; ++k) g = kmode_product(g, e[k].inverse, k + 1);
    double scale = 0.0;
    for (const auto& ek : e) scale += ek.values.cwiseAbs().maxCoeff();
    const Extents& ext = f.extents();
    for (std::size_t r = 0; r < ext[2]; ++r)
        for (std::size_t q = 0; q < ext[1]; ++q)
            for (std::size_t pp = 0; pp < ext[0]; ++pp) {
                const C sum = e[0].values(static_cast<Eigen::Index>(pp)) + e[1].values(static_cast<Eigen::Index>(q)) +
                              e[2].values(static_cast<Eigen::Index>(r));
                if (std::abs(sum) < 1e-14 * scale)
                    throw SingularProblemError("eigen_solve_3d: eigenvalue sum vanishes at (" + std::to_string(pp + 1) +
                                               "," + std::to_string(q + 1) + "," + std::to_string(r + 1) + ")");
                g(pp, q, r) /= sum;
            }
    for (std::size_t k = 0; k < 3; ++k) g = kmode_product(g, e[k].vectors, k + 1);
    DenseTensor<double> x(ext);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = g[i].real();
    return x;
}

}  // namespace sylvester_detail

/// Diagonalize each A_k, divide by λ_p + λ_q + λ_r, transform back.
inline DenseTensor<double> eigen_solve_3d(const SylvesterProblem3D& p) {
    p.validate();
    return sylvester_detail::eigen_solve_dense({p.a[0].dense(), p.a[1].dense(), p.a[2].dense()}, p.rhs_dense());
}

// ---------------------------------------------------------------------------
// Compressed solvers

struct SolveStats {
    std::vector<std::size_t> adi_steps;       // per fADI stage (TT: 2, Tucker: 3)
    std::vector<double> predicted_factors;    // Zolotarev bound at those step counts
    std::vector<std::size_t> ranks;           // TT: s_0..s_3; Tucker: t_1..t_3
};

namespace sylvester_detail {

inline std::size_t steps_for(const Interval& e, const Interval& f, double eps) {
    if (e.lo == e.hi && f.lo == f.hi) return 1;
    return std::max<std::size_t>(1, k_for_epsilon_interval(gamma_separated(e, f), eps / std::sqrt(3.0)));
}

inline bool rhs_is_zero(const SylvesterProblem3D& p) {
    for (double v : p.rhs.core().data())
        if (v != 0.0) return false;
    return true;
}

inline TTTensor<double> zero_tt(const Extents& ext) {
    std::vector<DenseTensor<double>> cores;
    for (auto n : ext) cores.emplace_back(Extents{1, n, 1});
    return TTTensor<double>(std::move(cores));
}

}  // namespace sylvester_detail

/// fADI-based solver producing a rank-(1, s1, s2, 1) tensor train.
///   1. fADI (column side only) on A1 X_1 + X_1 (I⊗A2 + A3⊗I)ᵀ = W1 Z1ᵀ.
///   2. Pivoted QR of the fADI factor → U1 (s1 columns).
///   3. fADI on (I⊗Â1 + A2⊗I) C + C A3ᵀ = (I⊗U1ᵀ) W2 Z2ᵀ, Â1 = U1ᵀ A1 U1.
///   4. QR of both factors and an SVD of the small middle → U2 Σ T2ᵀ.
/// Cores: U1, U2 reshaped to (s1, n2, s2), Σ T2ᵀ.
inline TTTensor<double> tt_sylvester_solve_3d(const SylvesterProblem3D& p, double eps, SolveStats* stats = nullptr) {
    using namespace sylvester_detail;
    check_tolerance(eps, "tt_sylvester_solve_3d");
    p.validate();
    const auto pairs = check_minkowski_sum_separated(p.spectra_list());
    const Extents ext = p.extents();
    const std::size_t n1 = ext[0], n2 = ext[1], n3 = ext[2];
    if (rhs_is_zero(p)) {
        if (stats) *stats = {{0, 0}, {0.0, 0.0}, {1, 1, 1, 1}};
        return zero_tt(ext);
    }
    const double trunc = eps / std::sqrt(3.0);

    // Step 1
    const Interval e1 = pairs[0].e_interval, f1 = pairs[0].f_interval;
    const std::size_t k1 = steps_for(e1, f1, eps);
    const auto sched1 = adi_shifts_interval(e1, f1, k1);
    const MatrixXd w1 = matricization_column_factor(p, 1);
    const Operator& a1 = p.a[0];
    const auto fac1 = fadi_factors([&](double s, const MatrixXd& r) { return a1.shifted_solve(-s, r); },
                                   [](double, const MatrixXd& r) { return r; }, w1, MatrixXd(), sched1, false);

    // Step 2
    const MatrixXd u1 = orthonormal_basis(fac1.z, trunc);
    const auto s1 = static_cast<std::size_t>(u1.cols());
    if (s1 == 0) return zero_tt(ext);

    // Step 3
    const MatrixXd a1_hat = u1.transpose() * a1.apply(u1);
    const auto g2 = exact_low_rank(unfold(p.rhs.core(), 2).matrix);
    MatrixXd m2 = kron_apply(p.rhs.factor(1), u1.transpose() * p.rhs.factor(0), g2.w);
    const MatrixXd z2 = p.rhs.factor(2) * g2.z;
    Interval e2{p.spectra[0].a() + p.spectra[1].a(), p.spectra[0].b() + p.spectra[1].b()};
    const Interval f2 = pairs[1].f_interval;
    const std::size_t k2 = steps_for(e2, f2, eps);
    const auto sched2 = adi_shifts_interval(e2, f2, k2);
    const KronShiftedSolver kron_solver(a1_hat, p.a[1]);
    const Operator& a3 = p.a[2];
    // With a symmetric Â1 the whole stage runs in its eigenbasis: the fADI
    // recurrence is linear and the step-4 QR is invariant under the rotation,
    // so only the final U2 is rotated back.
    const bool rotated = kron_solver.diagonalized();
    auto rotate = [&](const MatrixXd& x, bool back) {
        MatrixXd out(x.rows(), x.cols());
        const MatrixXd& q = kron_solver.eigenvectors();
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            Eigen::Map<const MatrixXd> xc(x.col(c).data(), static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(n2));
            Eigen::Map<MatrixXd> oc(out.col(c).data(), static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(n2));
            oc.noalias() = back ? (q * xc).eval() : (q.transpose() * xc).eval();
        }
        return out;
    };
    if (rotated) m2 = rotate(m2, false);
    auto solve_a = [&](double s, const MatrixXd& r) -> MatrixXd {
        if (rotated) return kron_solver.solve_in_eigenbasis(-s, r);
        MatrixXd out(r.rows(), r.cols());
        for (Eigen::Index c = 0; c < r.cols(); ++c) {
            Eigen::Map<const MatrixXd> rc(r.col(c).data(), static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(n2));
            const MatrixXd y = kron_solver.solve(-s, rc);
            out.col(c) = Eigen::Map<const VectorXd>(y.data(), y.size());
        }
        return out;
    };
    // Bᵀ = −A3, so (Bᵀ − σI)⁻¹ = −(A3 + σI)⁻¹.
    auto solve_bt = [&](double s, const MatrixXd& r) -> MatrixXd { return -a3.shifted_solve(s, r); };
    const auto fac2 = fadi_factors(solve_a, solve_bt, m2, z2, sched2, true);

    // Step 4
    Eigen::HouseholderQR<MatrixXd> qz(fac2.z), qy(fac2.y);
    const Eigen::Index cz = std::min(fac2.z.rows(), fac2.z.cols());
    const Eigen::Index cy = std::min(fac2.y.rows(), fac2.y.cols());
    const MatrixXd rz = qz.matrixQR().topRows(cz).triangularView<Eigen::Upper>();
    const MatrixXd ry = qy.matrixQR().topRows(cy).triangularView<Eigen::Upper>();
    const MatrixXd middle = rz * fac2.d.asDiagonal() * ry.transpose();
    Eigen::BDCSVD<MatrixXd> svd(middle, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sigma = svd.singularValues();
    const std::size_t s2 = std::max<std::size_t>(1, frobenius_tail_rank(sigma, trunc * sigma.norm()));
    const auto s2i = static_cast<Eigen::Index>(s2);
    // Q applied to the s2 kept directions only; the thin Q is never formed.
    MatrixXd u2 = MatrixXd::Zero(fac2.z.rows(), s2i);
    u2.topRows(cz) = svd.matrixU().leftCols(s2i);
    u2.applyOnTheLeft(qz.householderQ());
    if (rotated) u2 = rotate(u2, true);
    MatrixXd t2 = MatrixXd::Zero(fac2.y.rows(), s2i);
    t2.topRows(cy) = svd.matrixV().leftCols(s2i);
    t2.applyOnTheLeft(qy.householderQ());
    const MatrixXd last = sigma.head(s2i).asDiagonal() * t2.transpose();

    std::vector<DenseTensor<double>> cores;
    cores.emplace_back(Extents{1, n1, s1}, std::vector<double>(u1.data(), u1.data() + u1.size()));
    cores.emplace_back(Extents{s1, n2, s2}, std::vector<double>(u2.data(), u2.data() + u2.size()));
    cores.emplace_back(Extents{s2, n3, 1}, std::vector<double>(last.data(), last.data() + last.size()));
    if (stats) *stats = {{k1, k2}, {sched1.predicted_factor, sched2.predicted_factor}, {1, s1, s2, 1}};
    return TTTensor<double>(std::move(cores));
}

/// Per-mode fADI column spaces U_j, then the projected core equation
/// G ×_k Â_k summed = F ×_k U_kᵀ solved by diagonalising the small Â_k.
inline TuckerTensor<double> tucker_sylvester_solve_3d(const SylvesterProblem3D& p, double eps,
                                                      SolveStats* stats = nullptr) {
    using namespace sylvester_detail;
    check_tolerance(eps, "tucker_sylvester_solve_3d");
    p.validate();
    const auto pairs = check_minkowski_singly_separated(p.spectra_list());
    const Extents ext = p.extents();
    SolveStats st;
    if (rhs_is_zero(p)) {
        std::vector<MatrixXd> factors;
        for (auto n : ext) factors.push_back(VectorXd::Unit(static_cast<Eigen::Index>(n), 0));
        if (stats) *stats = {{0, 0, 0}, {0.0, 0.0, 0.0}, {1, 1, 1}};
        return TuckerTensor<double>(DenseTensor<double>(Extents{1, 1, 1}), std::move(factors));
    }
    const double trunc = eps / std::sqrt(3.0);
    std::vector<MatrixXd> u(3);
    std::array<MatrixXd, 3> a_hat;
    for (std::size_t j = 0; j < 3; ++j) {
        const Interval e = pairs[j].e_interval, f = pairs[j].f_interval;
        const std::size_t k = steps_for(e, f, eps);
        const auto sched = adi_shifts_interval(e, f, k);
        const Operator& aj = p.a[j];
        const auto fac = fadi_factors([&](double s, const MatrixXd& r) { return aj.shifted_solve(-s, r); },
                                      [](double, const MatrixXd& r) { return r; },
                                      matricization_column_factor(p, j + 1), MatrixXd(), sched, false);
        u[j] = orthonormal_basis(fac.z, trunc);
        if (u[j].cols() == 0) u[j] = VectorXd::Unit(static_cast<Eigen::Index>(ext[j]), 0);
        a_hat[j] = u[j].transpose() * aj.apply(u[j]);
        st.adi_steps.push_back(k);
        st.predicted_factors.push_back(sched.predicted_factor);
        st.ranks.push_back(static_cast<std::size_t>(u[j].cols()));
    }
    DenseTensor<double> g = p.rhs.core();
    for (std::size_t j = 0; j < 3; ++j) g = kmode_product(g, MatrixXd(u[j].transpose() * p.rhs.factor(j)), j + 1);
    DenseTensor<double> core;
    try {
        core = eigen_solve_dense(a_hat, g);
    } catch (const SingularProblemError&) {
        throw;
    } catch (const std::runtime_error&) {
        // Projected matrix not diagonalizable: solve the small core system directly.
        SylvesterProblem3D small;
        for (std::size_t j = 0; j < 3; ++j) small.a[j] = Operator::dense(a_hat[j]);
        std::vector<MatrixXd> id;
        for (std::size_t j = 0; j < 3; ++j) id.push_back(MatrixXd::Identity(a_hat[j].rows(), a_hat[j].rows()));
        small.rhs = TuckerTensor<double>(g, std::move(id));
        core = direct_kron_solve_3d(small);
    }
    if (stats) *stats = st;
    return TuckerTensor<double>(std::move(core), std::move(u));
}

}  // namespace ttz
