#pragma once

// ADI for the displacement equation A X − X B = F with Λ(A) ⊂ E and Λ(B) ⊂ F,
// E to the right of F on the real line. Shifts come from the optimal
// Zolotarev rational for the two intervals.

#include "ttz/bounds.hpp"
#include "ttz/linalg.hpp"
#include "ttz/special.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttz {

/// k shift pairs. The error after k steps is r(A) E_0 r(B)⁻¹ with
/// r(z) = ∏ (z − zeros_j)/(z − poles_j): zeros sit in E, poles in F.
struct ShiftSchedule {
    std::vector<double> zeros;
    std::vector<double> poles;
    double predicted_factor = 1.0;  // zolotarev_interval_bound(γ, k)
    bool log_spaced = false;        // elliptic construction was ill-conditioned

    [[nodiscard]] std::size_t size() const { return zeros.size(); }
};

class SingularShiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace adi_detail {

using Mobius = std::array<double, 4>;  // (a z + b)/(c z + d)

// Maps z1 → 0, z2 → 1, z3 → ∞.
inline Mobius to_standard(double z1, double z2, double z3) {
    return {z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)};
}

inline Mobius inverse(const Mobius& m) { return {m[3], -m[1], -m[2], m[0]}; }

inline Mobius compose(const Mobius& f, const Mobius& g) {  // f ∘ g
    return {f[0] * g[0] + f[1] * g[2], f[0] * g[1] + f[1] * g[3], f[2] * g[0] + f[3] * g[2],
            f[2] * g[1] + f[3] * g[3]};
}

inline double apply(const Mobius& m, double z) { return (m[0] * z + m[1]) / (m[2] * z + m[3]); }

}  // namespace adi_detail

/// Optimal real shifts for E = [e.lo, e.hi] and F = [f.lo, f.hi], f.hi < e.lo.
inline ShiftSchedule adi_shifts_interval(const Interval& e, const Interval& f, std::size_t k) {
    if (k == 0) throw std::invalid_argument("adi_shifts_interval: need k >= 1");
    if (!(e.lo <= e.hi && f.lo <= f.hi)) throw std::invalid_argument("adi_shifts_interval: malformed interval");
    if (!(f.hi < e.lo)) throw std::invalid_argument("adi_shifts_interval: intervals overlap");
    ShiftSchedule s;
    // Degenerate intervals: a single point needs no optimisation.
    if (e.lo == e.hi || f.lo == f.hi) {
        s.zeros.assign(k, 0.5 * (e.lo + e.hi));
        s.poles.assign(k, 0.5 * (f.lo + f.hi));
        s.predicted_factor = 0.0;
        if (e.lo != e.hi || f.lo != f.hi) {
            // One side degenerate: the pole/zero at the point annihilates it exactly.
            s.predicted_factor = 0.0;
        }
        return s;
    }
    const double gamma = gamma_separated(e, f);
    s.predicted_factor = zolotarev_interval_bound(gamma, k);
    // Standard picture: F → [−α, −1], E → [1, α] with the same cross ratio.
    const double alpha = 2.0 * gamma - 1.0 + 2.0 * std::sqrt(gamma * gamma - gamma);
    const auto to_target = adi_detail::inverse(adi_detail::to_standard(f.lo, f.hi, e.lo));
    const auto from_model = adi_detail::to_standard(-alpha, -1.0, 1.0);
    const auto t = adi_detail::compose(to_target, from_model);
    const double kprime = 1.0 / alpha;
    std::vector<double> base(k);
    if (kprime < 1e-14) {
        s.log_spaced = true;
        for (std::size_t j = 0; j < k; ++j)
            base[j] = std::pow(alpha, (static_cast<double>(j) + 0.5) / static_cast<double>(k));
    } else {
        const double big_k = elliptic_k_from_complement(kprime);
        for (std::size_t j = 0; j < k; ++j) {
            const double u = (static_cast<double>(j) + 0.5) * big_k / static_cast<double>(k);
            base[j] = alpha * jacobi_dn_from_complement(u, kprime);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        s.zeros.push_back(std::clamp(adi_detail::apply(t, base[j]), e.lo, e.hi));
        s.poles.push_back(std::clamp(adi_detail::apply(t, -base[j]), f.lo, f.hi));
    }
    return s;
}

/// (A − shift·I)⁻¹ rhs with a conditioning check.
inline MatrixXd shifted_dense_solve(const MatrixXd& a, double shift, const MatrixXd& rhs) {
    MatrixXd m = a;
    m.diagonal().array() -= shift;
    Eigen::PartialPivLU<MatrixXd> lu(m);
    const double rc = lu.rcond();
    if (!std::isfinite(rc) || rc < 1e-15)
        throw SingularShiftError("shifted system is singular at shift " + std::to_string(shift));
    return lu.solve(rhs);
}

/// Dense ADI from X_0 = 0, one step per shift pair.
inline MatrixXd adi_solve(const MatrixXd& a, const MatrixXd& b, const MatrixXd& f, const ShiftSchedule& s) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) throw std::invalid_argument("adi_solve: A and B must be square");
    if (f.rows() != a.rows() || f.cols() != b.rows()) throw std::invalid_argument("adi_solve: rhs shape mismatch");
    MatrixXd x = MatrixXd::Zero(f.rows(), f.cols());
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double beta = s.poles[j], alpha = s.zeros[j];
        // (A − βI) X_{j+1/2} = F + X_j (B − βI)
        MatrixXd rhs = f + x * b;
        rhs -= beta * x;
        const MatrixXd half = shifted_dense_solve(a, beta, rhs);
        // X_{j+1} (B − αI) = (A − αI) X_{j+1/2} − F
        MatrixXd r2 = a * half - alpha * half - f;
        x = shifted_dense_solve(b.transpose(), alpha, r2.transpose()).transpose();
    }
    return x;
}

/// X ≈ Z · diag(d) · Yᵀ; Z and Y have k·ν columns.
struct FadiFactors {
    MatrixXd z;
    VectorXd d;
    MatrixXd y;

    [[nodiscard]] MatrixXd dense() const { return z * d.asDiagonal() * y.transpose(); }
};

/// Factored ADI for A X − X B = M Nᵀ.
///   solve_a(σ, R)  = (A − σI)⁻¹ R
///   solve_bt(σ, R) = (Bᵀ − σI)⁻¹ R
/// The Y side is skipped when want_y is false (column space only).
template <typename SolveA, typename SolveBt>
FadiFactors fadi_factors(SolveA&& solve_a, SolveBt&& solve_bt, const MatrixXd& m, const MatrixXd& n,
                         const ShiftSchedule& s, bool want_y = true) {
    const std::size_t k = s.size();
    if (k == 0) throw std::invalid_argument("fadi: empty shift schedule");
    if (want_y && m.cols() != n.cols()) throw std::invalid_argument("fadi: M and N need the same column count");
    const Eigen::Index nu = m.cols();
    FadiFactors out;
    out.z.resize(m.rows(), nu * static_cast<Eigen::Index>(k));
    out.d.resize(nu * static_cast<Eigen::Index>(k));
    if (want_y) out.y.resize(n.rows(), nu * static_cast<Eigen::Index>(k));
    MatrixXd zj = solve_a(s.poles[0], m);
    MatrixXd yj;
    if (want_y) yj = solve_bt(s.zeros[0], n);
    for (std::size_t j = 0; j < k; ++j) {
        if (j > 0) {
            const double bj = s.poles[j], aj = s.zeros[j];
            MatrixXd nz = zj + (bj - s.zeros[j - 1]) * solve_a(bj, zj);
            zj = std::move(nz);
            if (want_y) {
                MatrixXd ny = yj + (aj - s.poles[j - 1]) * solve_bt(aj, yj);
                yj = std::move(ny);
            }
        }
        const auto off = static_cast<Eigen::Index>(j) * nu;
        out.z.middleCols(off, nu) = zj;
        out.d.segment(off, nu).setConstant(s.poles[j] - s.zeros[j]);
        if (want_y) out.y.middleCols(off, nu) = yj;
    }
    return out;
}

inline FadiFactors fadi_solve(const MatrixXd& a, const MatrixXd& b, const MatrixXd& m, const MatrixXd& n,
                              const ShiftSchedule& s) {
    if (m.rows() != a.rows() || n.rows() != b.rows()) throw std::invalid_argument("fadi_solve: factor shape mismatch");
    const MatrixXd bt = b.transpose();
    return fadi_factors([&](double sh, const MatrixXd& r) { return shifted_dense_solve(a, sh, r); },
                        [&](double sh, const MatrixXd& r) { return shifted_dense_solve(bt, sh, r); }, m, n, s);
}

// ---------------------------------------------------------------------------
// Kronecker-structured shifted solves

/// Solves A_small·Y + Y·Bᵀ + σ·Y = R for Y (n_A × n_B), i.e. the system
/// (I ⊗ A_small + B ⊗ I + σI) vec(Y) = vec(R), without forming the Kronecker matrix.
/// Symmetric A_small: eigendecomposition plus one shifted B-solve per eigenvalue.
/// Otherwise: complex Schur forms of both factors (Bartels–Stewart).
class KronShiftedSolver {
public:
    KronShiftedSolver(MatrixXd a_small, const Operator& b) : a_(std::move(a_small)), b_(&b) {
        if (a_.rows() != a_.cols()) throw std::invalid_argument("KronShiftedSolver: A_small must be square");
        symmetric_ = a_.size() == 0 || (a_ - a_.transpose()).norm() <= 1e-13 * a_.norm();
        if (symmetric_) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a_ + a_.transpose()));
            q_ = es.eigenvectors();
            lambda_ = es.eigenvalues();
        } else {
            Eigen::ComplexSchur<MatrixXd> sa(a_);
            ua_ = sa.matrixU();
            ta_ = sa.matrixT();
            Eigen::ComplexSchur<MatrixXd> sb(b.dense());
            vb_ = sb.matrixU();
            sb_ = sb.matrixT();
        }
    }

    [[nodiscard]] MatrixXd solve(double shift, const MatrixXd& r) const {
        if (r.rows() != a_.rows() || static_cast<std::size_t>(r.cols()) != b_->size())
            throw std::invalid_argument("KronShiftedSolver: rhs shape mismatch");
        return symmetric_ ? solve_symmetric(shift, r) : solve_schur(shift, r);
    }

    /// True when A_small = Q Λ Qᵀ; solves can then stay in the eigenbasis.
    [[nodiscard]] bool diagonalized() const { return symmetric_; }
    [[nodiscard]] const MatrixXd& eigenvectors() const { return q_; }

    /// The same solve with Y and R expressed in the eigenbasis (Ỹ = QᵀY).
    /// Each of the columns of `rt` is a vec'd n_A × n_B matrix; one banded
    /// factorization per eigenvalue serves all of them.
    [[nodiscard]] MatrixXd solve_in_eigenbasis(double shift, const MatrixXd& rt) const {
        const Eigen::Index na = a_.rows();
        const auto nb = static_cast<Eigen::Index>(b_->size());
        if (!symmetric_ || rt.rows() != na * nb) throw std::invalid_argument("KronShiftedSolver: eigenbasis solve misuse");
        MatrixXd out(rt.rows(), rt.cols());
        MatrixXd rows(nb, rt.cols());
        for (Eigen::Index i = 0; i < na; ++i) {
            for (Eigen::Index c = 0; c < rt.cols(); ++c)
                for (Eigen::Index j = 0; j < nb; ++j) rows(j, c) = rt(i + na * j, c);
            const MatrixXd y = b_->shifted_solve(lambda_(i) + shift, rows);
            for (Eigen::Index c = 0; c < rt.cols(); ++c)
                for (Eigen::Index j = 0; j < nb; ++j) out(i + na * j, c) = y(j, c);
        }
        return out;
    }

    /// Applies (I ⊗ A_small + B ⊗ I) to vec(Y), returned as a matrix.
    [[nodiscard]] MatrixXd apply(const MatrixXd& y) const {
        return a_ * y + b_->apply(y.transpose()).transpose();
    }

private:
    MatrixXd solve_symmetric(double shift, const MatrixXd& r) const {
        const MatrixXd rt = q_.transpose() * r;
        MatrixXd yt(rt.rows(), rt.cols());
        for (Eigen::Index i = 0; i < rt.rows(); ++i)
            yt.row(i) = b_->shifted_solve(lambda_(i) + shift, rt.row(i).transpose()).transpose();
        return q_ * yt;
    }

    MatrixXd solve_schur(double shift, const MatrixXd& r) const {
        using CMat = Eigen::MatrixXcd;
        const CMat c = ua_.adjoint() * r.cast<std::complex<double>>() * vb_.conjugate();
        CMat y(c.rows(), c.cols());
        for (Eigen::Index j = c.cols(); j-- > 0;) {
            Eigen::VectorXcd rhs = c.col(j);
            for (Eigen::Index l = j + 1; l < c.cols(); ++l) rhs -= sb_(j, l) * y.col(l);
            CMat t = ta_;
            t.diagonal().array() += sb_(j, j) + shift;
            const double piv = t.diagonal().cwiseAbs().minCoeff();
            if (!(piv > 1e-14 * std::max(1.0, t.cwiseAbs().maxCoeff())))
                throw SingularShiftError("KronShiftedSolver: singular shifted Sylvester system");
            y.col(j) = t.triangularView<Eigen::Upper>().solve(rhs);
        }
        return (ua_ * y * vb_.transpose()).real();
    }

    MatrixXd a_;
    const Operator* b_;
    bool symmetric_ = false;
    MatrixXd q_;
    VectorXd lambda_;
    Eigen::MatrixXcd ua_, ta_, vb_, sb_;
};

inline MatrixXd shifted_kron_solve(const MatrixXd& a_small, const Operator& b, const MatrixXd& rhs, double shift) {
    return KronShiftedSolver(a_small, b).solve(shift, rhs);
}

}  // namespace ttz
