#pragma once

// Compressed tensor formats (tensor-train, orthogonal Tucker, CP) and the two
// SVD-based compressors, TT-SVD and HOSVD.
//
// Both compressors use the same per-split tolerance δ = ε‖X‖_F/√d, so the
// first TT rank and the first multilinear rank are computed at the same δ.

#include "ttz/linalg.hpp"
#include "ttz/tensor.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttz {

/// Largest element count any reconstruct() will materialize by default.
inline constexpr std::size_t kDefaultElementCap = std::size_t{1} << 27;

class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

inline void check_capacity(const Extents& ext, std::size_t cap) {
    long double total = 1;
    for (auto n : ext) total *= static_cast<long double>(n);
    if (total > static_cast<long double>(cap))
        throw CapacityError("reconstruct: " + std::to_string(static_cast<double>(total)) +
                            " elements exceeds the cap of " + std::to_string(cap));
}

inline void check_tolerance(double eps, const char* what) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument(std::string(what) + ": relative tolerance must lie in (0, 1), got " +
                                    std::to_string(eps));
}

// ---------------------------------------------------------------------------
// Tensor-train

/// X(i_1..i_d) = G_1(i_1) G_2(i_2) ... G_d(i_d). Core k is stored as a
/// column-major (s_{k-1}, n_k, s_k) tensor, so core(a, i, b) = G_k(i)(a, b).
template <typename Scalar>
class TTTensor {
public:
    TTTensor() = default;
    explicit TTTensor(std::vector<DenseTensor<Scalar>> cores) : cores_(std::move(cores)) { validate(); }

    [[nodiscard]] std::size_t order() const { return cores_.size(); }
    [[nodiscard]] const std::vector<DenseTensor<Scalar>>& cores() const { return cores_; }
    [[nodiscard]] const DenseTensor<Scalar>& core(std::size_t k) const { return cores_.at(k); }

    /// Replaces core k (0-based); the shape must stay compatible with its neighbours.
    void set_core(std::size_t k, DenseTensor<Scalar> c) {
        cores_.at(k) = std::move(c);
        validate();
    }

    [[nodiscard]] std::vector<std::size_t> rank_vector() const {
        std::vector<std::size_t> s{1};
        for (const auto& c : cores_) s.push_back(c.extent(2));
        return s;
    }

    [[nodiscard]] Extents extents() const {
        Extents e;
        for (const auto& c : cores_) e.push_back(c.extent(1));
        return e;
    }

    /// Σ_k s_{k-1} s_k n_k
    [[nodiscard]] std::size_t storage_count() const {
        std::size_t p = 0;
        for (const auto& c : cores_) p += c.size();
        return p;
    }

private:
    void validate() const {
        if (cores_.empty()) throw std::invalid_argument("TTTensor: needs at least one core");
        for (const auto& c : cores_)
            if (c.order() != 3) throw std::invalid_argument("TTTensor: cores must be third-order");
        if (cores_.front().extent(0) != 1 || cores_.back().extent(2) != 1)
            throw std::invalid_argument("TTTensor: boundary ranks s_0 and s_d must be 1");
        for (std::size_t k = 0; k + 1 < cores_.size(); ++k)
            if (cores_[k].extent(2) != cores_[k + 1].extent(0))
                throw std::invalid_argument("TTTensor: rank mismatch between cores " + std::to_string(k + 1) +
                                            " and " + std::to_string(k + 2));
    }

    std::vector<DenseTensor<Scalar>> cores_;
};

template <typename Scalar>
DenseTensor<Scalar> reconstruct(const TTTensor<Scalar>& t, std::size_t cap = kDefaultElementCap) {
    const Extents ext = t.extents();
    check_capacity(ext, cap);
    // left holds the partial product as an (n_1···n_k) × s_k matrix.
    Matrix<Scalar> left = t.core(0).as_matrix(t.core(0).extent(1), t.core(0).extent(2));
    for (std::size_t k = 1; k < t.order(); ++k) {
        const auto& c = t.core(k);
        const std::size_t r0 = c.extent(0), nk = c.extent(1), r1 = c.extent(2);
        Matrix<Scalar> prod = left * c.as_matrix(r0, nk * r1);
        const Eigen::Index rows = left.rows();
        left = Eigen::Map<Matrix<Scalar>>(prod.data(), rows * static_cast<Eigen::Index>(nk),
                                          static_cast<Eigen::Index>(r1));
    }
    return DenseTensor<Scalar>(ext, std::vector<Scalar>(left.data(), left.data() + left.size()));
}

/// Sequential TT-SVD with the Frobenius-tail truncation at δ = ε‖X‖_F/√d per split.
/// Guarantees ‖X − TT‖_F ≤ ε‖X‖_F.
template <typename Scalar>
TTTensor<Scalar> tt_svd(const DenseTensor<Scalar>& x, double eps) {
    check_tolerance(eps, "tt_svd");
    const std::size_t d = x.order();
    const Extents& ext = x.extents();
    const double delta = eps * frobenius_norm(x) / std::sqrt(static_cast<double>(d));

    std::vector<DenseTensor<Scalar>> cores;
    Matrix<Scalar> rest = x.as_matrix(1, x.size());  // s_{k-1} × (n_k ··· n_d)
    std::size_t r_prev = 1;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        const std::size_t rows = r_prev * ext[k];
        const std::size_t cols = static_cast<std::size_t>(rest.size()) / rows;
        Eigen::Map<const Matrix<Scalar>> c(rest.data(), static_cast<Eigen::Index>(rows),
                                           static_cast<Eigen::Index>(cols));
        Eigen::BDCSVD<Matrix<Scalar>> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& sigma = svd.singularValues();
        const std::size_t r = std::max<std::size_t>(1, frobenius_tail_rank(sigma, delta));
        const auto ri = static_cast<Eigen::Index>(r);
        Matrix<Scalar> u = svd.matrixU().leftCols(ri);
        cores.emplace_back(Extents{r_prev, ext[k], r}, std::vector<Scalar>(u.data(), u.data() + u.size()));
        rest = sigma.head(ri).template cast<Scalar>().asDiagonal() * svd.matrixV().leftCols(ri).adjoint();
        r_prev = r;
    }
    cores.emplace_back(Extents{r_prev, ext[d - 1], 1}, std::vector<Scalar>(rest.data(), rest.data() + rest.size()));
    return TTTensor<Scalar>(std::move(cores));
}

// ---------------------------------------------------------------------------
// Orthogonal Tucker

/// X = ⟦G; A^(1), ..., A^(d)⟧ with orthonormal-column factors A^(k) (n_k × t_k).
template <typename Scalar>
class TuckerTensor {
public:
    TuckerTensor() = default;
    TuckerTensor(DenseTensor<Scalar> core, std::vector<Matrix<Scalar>> factors)
        : core_(std::move(core)), factors_(std::move(factors)) {
        if (factors_.size() != core_.order())
            throw std::invalid_argument("TuckerTensor: need one factor per core mode");
        for (std::size_t k = 0; k < factors_.size(); ++k)
            if (static_cast<std::size_t>(factors_[k].cols()) != core_.extent(k))
                throw std::invalid_argument("TuckerTensor: factor " + std::to_string(k + 1) +
                                            " column count does not match the core");
    }

    [[nodiscard]] std::size_t order() const { return factors_.size(); }
    [[nodiscard]] const DenseTensor<Scalar>& core() const { return core_; }
    [[nodiscard]] const std::vector<Matrix<Scalar>>& factors() const { return factors_; }
    [[nodiscard]] const Matrix<Scalar>& factor(std::size_t k) const { return factors_.at(k); }

    [[nodiscard]] std::vector<std::size_t> rank_vector() const { return core_.extents(); }
    [[nodiscard]] Extents extents() const {
        Extents e;
        for (const auto& f : factors_) e.push_back(static_cast<std::size_t>(f.rows()));
        return e;
    }

    /// Σ n_k t_k + ∏ t_k
    [[nodiscard]] std::size_t storage_count() const {
        std::size_t p = core_.size();
        for (const auto& f : factors_) p += static_cast<std::size_t>(f.size());
        return p;
    }

    /// max_k ‖A^(k)* A^(k) − I‖_max
    [[nodiscard]] double orthonormality_defect() const {
        double worst = 0.0;
        for (const auto& f : factors_) {
            const Matrix<Scalar> g = f.adjoint() * f - Matrix<Scalar>::Identity(f.cols(), f.cols());
            if (g.size() > 0) worst = std::max(worst, g.cwiseAbs().maxCoeff());
        }
        return worst;
    }

private:
    DenseTensor<Scalar> core_;
    std::vector<Matrix<Scalar>> factors_;
};

template <typename Scalar>
DenseTensor<Scalar> reconstruct(const TuckerTensor<Scalar>& t, std::size_t cap = kDefaultElementCap) {
    check_capacity(t.extents(), cap);
    DenseTensor<Scalar> out = t.core();
    for (std::size_t k = 0; k < t.order(); ++k) out = kmode_product(out, t.factor(k), k + 1);
    return out;
}

/// HOSVD: factors are the leading left singular vectors of each matricization,
/// t_j = rank_δ(X_(j)) with δ = ε‖X‖_F/√d. Guarantees ‖X − Tucker‖_F ≤ ε‖X‖_F.
template <typename Scalar>
TuckerTensor<Scalar> hosvd(const DenseTensor<Scalar>& x, double eps) {
    check_tolerance(eps, "hosvd");
    const std::size_t d = x.order();
    const double delta = eps * frobenius_norm(x) / std::sqrt(static_cast<double>(d));
    std::vector<Matrix<Scalar>> factors;
    DenseTensor<Scalar> core = x;
    for (std::size_t j = 1; j <= d; ++j) {
        const auto m = matricize(x, j);
        Eigen::BDCSVD<Matrix<Scalar>> svd(m.matrix, Eigen::ComputeThinU);
        const std::size_t t = std::max<std::size_t>(1, frobenius_tail_rank(svd.singularValues(), delta));
        factors.push_back(svd.matrixU().leftCols(static_cast<Eigen::Index>(t)));
        core = kmode_product(core, factors.back().adjoint(), j);
    }
    return TuckerTensor<Scalar>(std::move(core), std::move(factors));
}

// ---------------------------------------------------------------------------
// CP

/// X = Σ_r w_r a^(1)_r ∘ ... ∘ a^(d)_r. Construction and accounting only.
template <typename Scalar>
class CPTensor {
public:
    CPTensor() = default;
    CPTensor(Vector<Scalar> weights, std::vector<Matrix<Scalar>> factors)
        : weights_(std::move(weights)), factors_(std::move(factors)) {
        if (factors_.empty()) throw std::invalid_argument("CPTensor: needs at least one factor");
        for (const auto& f : factors_)
            if (f.cols() != weights_.size())
                throw std::invalid_argument("CPTensor: every factor needs one column per weight");
    }

    [[nodiscard]] std::size_t order() const { return factors_.size(); }
    [[nodiscard]] std::size_t rank() const { return static_cast<std::size_t>(weights_.size()); }
    [[nodiscard]] const Vector<Scalar>& weights() const { return weights_; }
    [[nodiscard]] const std::vector<Matrix<Scalar>>& factors() const { return factors_; }
    [[nodiscard]] Extents extents() const {
        Extents e;
        for (const auto& f : factors_) e.push_back(static_cast<std::size_t>(f.rows()));
        return e;
    }

    /// r + r Σ n_k
    [[nodiscard]] std::size_t storage_count() const {
        std::size_t p = rank();
        for (const auto& f : factors_) p += rank() * static_cast<std::size_t>(f.rows());
        return p;
    }

private:
    Vector<Scalar> weights_;
    std::vector<Matrix<Scalar>> factors_;
};

template <typename Scalar>
DenseTensor<Scalar> reconstruct(const CPTensor<Scalar>& t, std::size_t cap = kDefaultElementCap) {
    const Extents ext = t.extents();
    check_capacity(ext, cap);
    // X_1 = A^(1) diag(w) (A^(d) ⊙ ... ⊙ A^(2))ᵀ, built one Khatri-Rao factor at a time.
    const auto r = static_cast<Eigen::Index>(t.rank());
    Matrix<Scalar> kr = Matrix<Scalar>::Ones(1, r);
    for (std::size_t k = 1; k < t.order(); ++k) {
        const Matrix<Scalar>& a = t.factors()[k];
        Matrix<Scalar> next(kr.rows() * a.rows(), r);
        for (Eigen::Index c = 0; c < r; ++c)
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                next.col(c).segment(i * kr.rows(), kr.rows()) = a(i, c) * kr.col(c);
        kr = std::move(next);
    }
    Matrix<Scalar> x1 = t.factors()[0] * t.weights().asDiagonal() * kr.transpose();
    return DenseTensor<Scalar>(ext, std::vector<Scalar>(x1.data(), x1.data() + x1.size()));
}

template <typename T>
std::size_t storage_count(const T& t) {
    return t.storage_count();
}

}  // namespace ttz
