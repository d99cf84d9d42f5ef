#pragma once

// Matrix helpers shared by the formats and solvers: SVD-based numerical rank,
// a banded matrix with an O(n) shifted solve, and Operator, the coefficient
// matrix type of the Sylvester solvers (dense, banded, or inverse-of-banded).

#include "ttz/tensor.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ttz {

/// Singular values below this fraction of σ_max are treated as exact zeros.
inline constexpr double kSingularFloor = 1e-15;

/// Smallest r with (Σ_{j>r} σ_j²)^{1/2} ≤ delta, for σ sorted descending.
inline std::size_t frobenius_tail_rank(const VectorXd& sigma, double delta) {
    if (delta < 0) throw std::invalid_argument("frobenius_tail_rank: delta must be nonnegative");
    const auto n = static_cast<std::size_t>(sigma.size());
    if (n == 0) return 0;
    const double floor = kSingularFloor * sigma(0);
    double tail2 = 0.0;
    std::size_t r = n;
    while (r > 0) {
        const double s = sigma(static_cast<Eigen::Index>(r - 1));
        const double s_eff = s <= floor ? 0.0 : s;
        if (tail2 + s_eff * s_eff > delta * delta) break;
        tail2 += s_eff * s_eff;
        --r;
    }
    return r;
}

template <typename Derived>
VectorXd singular_values(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    if (m.size() == 0) return VectorXd();
    Eigen::BDCSVD<Matrix<Scalar>> svd(m.derived());
    return svd.singularValues();
}

/// Frobenius-norm numerical rank with an absolute tolerance.
template <typename Derived>
std::size_t numerical_rank(const Eigen::MatrixBase<Derived>& m, double delta) {
    return frobenius_tail_rank(singular_values(m), delta);
}

template <typename Scalar>
std::size_t numerical_rank(const UnfoldingMatrix<Scalar>& m, double delta) {
    return numerical_rank(m.matrix, delta);
}

/// Exact-arithmetic rank estimate: count of σ_j above rel_tol·σ_max.
template <typename Derived>
std::size_t matrix_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol) {
    const VectorXd s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

/// Thin orthonormal basis of the column space, dropping directions whose
/// pivoted-QR diagonal falls below rel_tol times the leading diagonal entry.
inline MatrixXd orthonormal_basis(const MatrixXd& z, double rel_tol) {
    if (z.cols() == 0) return MatrixXd(z.rows(), 0);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(z);
    const MatrixXd& r = qr.matrixR();
    const Eigen::Index kmax = std::min(z.rows(), z.cols());
    const double lead = std::abs(r(0, 0));
    Eigen::Index keep = 0;
    if (lead > 0)
        while (keep < kmax && std::abs(r(keep, keep)) > rel_tol * lead) ++keep;
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(z.rows(), keep);
    return q;
}

// ---------------------------------------------------------------------------
// Banded matrices

/// Square real banded matrix in LAPACK-style band storage:
/// band(ku + i - j, j) = A(i, j) for max(0, j-ku) ≤ i ≤ min(n-1, j+kl).
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), band_(MatrixXd::Zero(static_cast<Eigen::Index>(kl + ku + 1),
                                                         static_cast<Eigen::Index>(n))) {}

    /// Copy the band of a dense matrix; entries outside the band must be zero.
    static BandedMatrix from_dense(const MatrixXd& a, std::size_t kl, std::size_t ku) {
        if (a.rows() != a.cols()) throw std::invalid_argument("BandedMatrix: matrix must be square");
        const auto n = static_cast<std::size_t>(a.rows());
        BandedMatrix b(n, kl, ku);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (b.in_band(i, j))
                    b.set(i, j, v);
                else if (v != 0.0)
                    throw std::invalid_argument("BandedMatrix: nonzero entry outside the band");
            }
        return b;
    }

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t lower() const { return kl_; }
    [[nodiscard]] std::size_t upper() const { return ku_; }

    [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const {
        return i + ku_ >= j && j + kl_ >= i;
    }
    [[nodiscard]] double get(std::size_t i, std::size_t j) const {
        return in_band(i, j) ? band_(static_cast<Eigen::Index>(ku_ + i - j), static_cast<Eigen::Index>(j)) : 0.0;
    }
    void set(std::size_t i, std::size_t j, double v) {
        if (!in_band(i, j)) throw std::out_of_range("BandedMatrix::set outside band");
        band_(static_cast<Eigen::Index>(ku_ + i - j), static_cast<Eigen::Index>(j)) = v;
    }

    [[nodiscard]] MatrixXd dense() const {
        MatrixXd a = MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = (j > ku_ ? j - ku_ : 0); i < std::min(n_, j + kl_ + 1); ++i)
                a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = get(i, j);
        return a;
    }

    [[nodiscard]] MatrixXd multiply(const MatrixXd& x) const {
        if (static_cast<std::size_t>(x.rows()) != n_) throw std::invalid_argument("BandedMatrix::multiply: size");
        MatrixXd y = MatrixXd::Zero(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            for (std::size_t j = 0; j < n_; ++j) {
                const double xj = x(static_cast<Eigen::Index>(j), c);
                for (std::size_t i = (j > ku_ ? j - ku_ : 0); i < std::min(n_, j + kl_ + 1); ++i)
                    y(static_cast<Eigen::Index>(i), c) +=
                        band_(static_cast<Eigen::Index>(ku_ + i - j), static_cast<Eigen::Index>(j)) * xj;
            }
        return y;
    }

    [[nodiscard]] BandedMatrix shifted(double s) const {
        BandedMatrix b = *this;
        for (std::size_t i = 0; i < n_; ++i) b.set(i, i, get(i, i) + s);
        return b;
    }

    /// (scale·A + diag_add·I)
    [[nodiscard]] BandedMatrix affine(double scale, double diag_add) const {
        BandedMatrix b = *this;
        b.band_ *= scale;
        for (std::size_t i = 0; i < n_; ++i) b.set(i, i, b.get(i, i) + diag_add);
        return b;
    }

    [[nodiscard]] bool is_symmetric() const {
        if (kl_ != ku_) return false;
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = j + 1; i < std::min(n_, j + kl_ + 1); ++i)
                if (get(i, j) != get(j, i)) return false;
        return true;
    }

    /// Solve A X = B. Gaussian elimination inside the band without pivoting;
    /// falls back to dense partial-pivot LU when a pivot is tiny.
    [[nodiscard]] MatrixXd solve(const MatrixXd& rhs) const {
        if (static_cast<std::size_t>(rhs.rows()) != n_) throw std::invalid_argument("BandedMatrix::solve: size");
        MatrixXd lu = band_;
        MatrixXd x = rhs;
        const std::size_t ld = kl_ + ku_ + 1;
        double* b = lu.data();
        // Entry (i, j) of the matrix lives at b[ku + i - j + j*ld].
        auto at = [&](std::size_t i, std::size_t j) -> double& { return b[ku_ + i + j * (ld - 1)]; };
        const double scale = band_.cwiseAbs().maxCoeff();
        if (scale == 0.0) throw std::runtime_error("BandedMatrix::solve: zero matrix");
        const auto nrhs = static_cast<std::size_t>(x.cols());
        double* xp = x.data();
        for (std::size_t k = 0; k < n_; ++k) {
            const double piv = at(k, k);
            if (std::abs(piv) < 1e-13 * scale) return dense_solve(rhs);
            const std::size_t iend = std::min(n_, k + kl_ + 1);
            const std::size_t jend = std::min(n_, k + ku_ + 1);
            for (std::size_t i = k + 1; i < iend; ++i) {
                const double l = at(i, k) / piv;
                at(i, k) = l;
                for (std::size_t j = k + 1; j < jend; ++j) at(i, j) -= l * at(k, j);
                for (std::size_t c = 0; c < nrhs; ++c) xp[i + c * n_] -= l * xp[k + c * n_];
            }
        }
        for (std::size_t c = 0; c < nrhs; ++c) {
            double* col = xp + c * n_;
            for (std::size_t kk = n_; kk-- > 0;) {
                const std::size_t jend = std::min(n_, kk + ku_ + 1);
                double v = col[kk];
                for (std::size_t j = kk + 1; j < jend; ++j) v -= at(kk, j) * col[j];
                col[kk] = v / at(kk, kk);
            }
        }
        return x;
    }

private:
    [[nodiscard]] MatrixXd dense_solve(const MatrixXd& rhs) const {
        Eigen::PartialPivLU<MatrixXd> lu(dense());
        return lu.solve(rhs);
    }

    std::size_t n_ = 0, kl_ = 0, ku_ = 0;
    MatrixXd band_;
};

// ---------------------------------------------------------------------------
// Operators

struct DenseOp {
    MatrixXd a;
};
struct BandedOp {
    BandedMatrix a;
};
/// The operator B⁻¹ for a banded B; applied and shift-solved through B only.
struct InverseBandedOp {
    BandedMatrix b;
};

class Operator {
public:
    Operator() = default;
    Operator(DenseOp op) : rep_(std::move(op)) {
        const MatrixXd& a = std::get<DenseOp>(rep_).a;
        symmetric_ = (a - a.transpose()).norm() <= 1e-14 * a.norm();
    }
    Operator(BandedOp op) : rep_(std::move(op)) { symmetric_ = std::get<BandedOp>(rep_).a.is_symmetric(); }
    Operator(InverseBandedOp op) : rep_(std::move(op)) { symmetric_ = std::get<InverseBandedOp>(rep_).b.is_symmetric(); }

    static Operator dense(MatrixXd a) {
        if (a.rows() != a.cols()) throw std::invalid_argument("Operator: matrix must be square");
        Operator op(DenseOp{std::move(a)});
        return op;
    }
    static Operator banded(BandedMatrix a) { return Operator(BandedOp{std::move(a)}); }
    static Operator inverse_of_banded(BandedMatrix b) { return Operator(InverseBandedOp{std::move(b)}); }
    static Operator diagonal(const VectorXd& d) {
        BandedMatrix b(static_cast<std::size_t>(d.size()), 0, 0);
        for (Eigen::Index i = 0; i < d.size(); ++i) b.set(static_cast<std::size_t>(i), static_cast<std::size_t>(i), d(i));
        return banded(std::move(b));
    }

    [[nodiscard]] std::size_t size() const {
        return std::visit(
            [](const auto& op) -> std::size_t {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, DenseOp>)
                    return static_cast<std::size_t>(op.a.rows());
                else if constexpr (std::is_same_v<T, BandedOp>)
                    return op.a.size();
                else
                    return op.b.size();
            },
            rep_);
    }

    [[nodiscard]] bool is_symmetric() const { return symmetric_; }
    /// B when the operator is B⁻¹ for a banded B, otherwise null.
    [[nodiscard]] const BandedMatrix* inverse_band() const {
        const auto* op = std::get_if<InverseBandedOp>(&rep_);
        return op ? &op->b : nullptr;
    }
    [[nodiscard]] bool is_structured() const { return !std::holds_alternative<DenseOp>(rep_); }

    /// A·X
    [[nodiscard]] MatrixXd apply(const MatrixXd& x) const {
        return std::visit(
            [&](const auto& op) -> MatrixXd {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, DenseOp>)
                    return op.a * x;
                else if constexpr (std::is_same_v<T, BandedOp>)
                    return op.a.multiply(x);
                else
                    return op.b.solve(x);
            },
            rep_);
    }

    /// (A + shift·I)⁻¹ X
    [[nodiscard]] MatrixXd shifted_solve(double shift, const MatrixXd& x) const {
        return std::visit(
            [&](const auto& op) -> MatrixXd {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, DenseOp>) {
                    MatrixXd m = op.a;
                    m.diagonal().array() += shift;
                    Eigen::PartialPivLU<MatrixXd> lu(m);
                    if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-15)
                        throw std::runtime_error("Operator::shifted_solve: singular shifted system (shift " +
                                                 std::to_string(shift) + ")");
                    return lu.solve(x);
                } else if constexpr (std::is_same_v<T, BandedOp>) {
                    return op.a.shifted(shift).solve(x);
                } else {
                    // (B⁻¹ + sI) y = x  ⇔  (I + sB) y = B x
                    return op.b.affine(shift, 1.0).solve(op.b.multiply(x));
                }
            },
            rep_);
    }

    [[nodiscard]] MatrixXd dense() const {
        return std::visit(
            [](const auto& op) -> MatrixXd {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, DenseOp>)
                    return op.a;
                else if constexpr (std::is_same_v<T, BandedOp>)
                    return op.a.dense();
                else
                    return op.b.solve(MatrixXd::Identity(static_cast<Eigen::Index>(op.b.size()),
                                                         static_cast<Eigen::Index>(op.b.size())));
            },
            rep_);
    }

private:
    std::variant<DenseOp, BandedOp, InverseBandedOp> rep_;
    bool symmetric_ = false;
};

}  // namespace ttz
