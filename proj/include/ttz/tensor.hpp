#pragma once

// Dense d-way tensors and the index primitives everything else is built on.
//
// Storage is column-major over the multi-index: i_1 varies fastest. Every
// reshape in the library (unfoldings, TT cores, vec of matrices) uses this
// single bijection, so reinterpretations never move data.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace ttz {

using Extents = std::vector<std::size_t>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

enum class ScalarKind : std::uint32_t { real = 0, complex = 1 };

template <typename Scalar>
constexpr ScalarKind scalar_kind_of() {
    return is_complex_v<Scalar> ? ScalarKind::complex : ScalarKind::real;
}

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

inline std::size_t element_count(const Extents& ext) {
    return std::accumulate(ext.begin(), ext.end(), std::size_t{1}, std::multiplies<>());
}

template <typename Scalar>
class DenseTensor {
public:
    using scalar_type = Scalar;

    DenseTensor() = default;

    explicit DenseTensor(Extents extents)
        : extents_(std::move(extents)) {
        validate_extents(extents_);
        data_.assign(element_count(extents_), Scalar(0));
    }

    DenseTensor(Extents extents, std::vector<Scalar> data)
        : extents_(std::move(extents)), data_(std::move(data)) {
        validate_extents(extents_);
        if (data_.size() != element_count(extents_))
            throw std::invalid_argument("DenseTensor: data length " + std::to_string(data_.size()) +
                                        " does not match extents product " +
                                        std::to_string(element_count(extents_)));
    }

    static DenseTensor constant(Extents extents, Scalar value) {
        DenseTensor t(std::move(extents));
        std::fill(t.data_.begin(), t.data_.end(), value);
        return t;
    }

    /// u_1 ∘ u_2 ∘ ... ∘ u_d
    static DenseTensor outer(const std::vector<Vector<Scalar>>& vectors) {
        Extents ext;
        for (const auto& v : vectors) ext.push_back(static_cast<std::size_t>(v.size()));
        DenseTensor t(ext);
        std::vector<std::size_t> idx(ext.size(), 0);
        for (std::size_t lin = 0; lin < t.size(); ++lin) {
            Scalar prod(1);
            for (std::size_t k = 0; k < ext.size(); ++k) prod *= vectors[k](static_cast<Eigen::Index>(idx[k]));
            t.data_[lin] = prod;
            t.advance(idx);
        }
        return t;
    }

    [[nodiscard]] std::size_t order() const { return extents_.size(); }
    [[nodiscard]] const Extents& extents() const { return extents_; }
    [[nodiscard]] std::size_t extent(std::size_t k) const { return extents_.at(k); }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] static constexpr ScalarKind scalar_kind() { return scalar_kind_of<Scalar>(); }

    [[nodiscard]] const std::vector<Scalar>& data() const { return data_; }
    [[nodiscard]] std::vector<Scalar>& data() { return data_; }

    Scalar& operator[](std::size_t lin) { return data_[lin]; }
    const Scalar& operator[](std::size_t lin) const { return data_[lin]; }

    [[nodiscard]] std::size_t linear_index(const std::vector<std::size_t>& idx) const {
        std::size_t lin = 0;
        std::size_t stride = 1;
        for (std::size_t k = 0; k < extents_.size(); ++k) {
            lin += idx[k] * stride;
            stride *= extents_[k];
        }
        return lin;
    }

    Scalar& operator()(const std::vector<std::size_t>& idx) { return data_[linear_index(idx)]; }
    const Scalar& operator()(const std::vector<std::size_t>& idx) const { return data_[linear_index(idx)]; }

    Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[i + extents_[0] * (j + extents_[1] * k)];
    }
    const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[i + extents_[0] * (j + extents_[1] * k)];
    }

    /// Column-major odometer step; returns false after wrapping past the last index.
    bool advance(std::vector<std::size_t>& idx) const {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (++idx[k] < extents_[k]) return true;
            idx[k] = 0;
        }
        return false;
    }

    DenseTensor& operator+=(const DenseTensor& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }
    DenseTensor& operator-=(const DenseTensor& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        return *this;
    }
    DenseTensor& operator*=(Scalar s) {
        for (auto& v : data_) v *= s;
        return *this;
    }
    friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
    friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
    friend DenseTensor operator*(DenseTensor a, Scalar s) { return a *= s; }

    bool operator==(const DenseTensor&) const = default;

    /// View of the data as an rows × cols column-major matrix.
    [[nodiscard]] Eigen::Map<const Matrix<Scalar>> as_matrix(std::size_t rows, std::size_t cols) const {
        if (rows * cols != data_.size()) throw std::invalid_argument("as_matrix: shape mismatch");
        return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
    }
    [[nodiscard]] Eigen::Map<Matrix<Scalar>> as_matrix(std::size_t rows, std::size_t cols) {
        if (rows * cols != data_.size()) throw std::invalid_argument("as_matrix: shape mismatch");
        return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
    }

private:
    static void validate_extents(const Extents& ext) {
        if (ext.empty()) throw std::invalid_argument("DenseTensor: order must be at least 1");
        for (auto n : ext)
            if (n == 0) throw std::invalid_argument("DenseTensor: every extent must be positive");
    }
    void require_same_shape(const DenseTensor& other) const {
        if (extents_ != other.extents_) throw std::invalid_argument("DenseTensor: extents differ");
    }

    Extents extents_;
    std::vector<Scalar> data_;
};

/// Which flattening produced an UnfoldingMatrix.
struct FlatteningSource {
    enum class Kind { unfolding, matricization } kind = Kind::unfolding;
    std::size_t index = 1;  // split k for unfoldings, mode n for matricizations (1-based)
};

template <typename Scalar>
struct UnfoldingMatrix {
    Matrix<Scalar> matrix;
    FlatteningSource source;

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(matrix.rows()); }
    [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(matrix.cols()); }
};

namespace detail {

inline void check_mode(std::size_t k, std::size_t d, const char* what) {
    if (k < 1 || k > d)
        throw std::out_of_range(std::string(what) + ": mode " + std::to_string(k) + " outside [1, " +
                                std::to_string(d) + "]");
}

// Sizes (left, n_k, right) for a 1-based mode k.
inline std::array<std::size_t, 3> mode_split(const Extents& ext, std::size_t k) {
    std::size_t left = 1, right = 1;
    for (std::size_t s = 0; s + 1 < k; ++s) left *= ext[s];
    for (std::size_t s = k; s < ext.size(); ++s) right *= ext[s];
    return {left, ext[k - 1], right};
}

}  // namespace detail

/// (x ×_k A): every mode-k fiber of x is multiplied by A. A may be
/// rectangular (m × n_k); the result has extent m in mode k. Mode is 1-based.
template <typename Scalar, typename Derived>
DenseTensor<Scalar> kmode_product(const DenseTensor<Scalar>& x, const Eigen::MatrixBase<Derived>& a,
                                  std::size_t k) {
    detail::check_mode(k, x.order(), "kmode_product");
    const auto [left, nk, right] = detail::mode_split(x.extents(), k);
    if (static_cast<std::size_t>(a.cols()) != nk)
        throw std::invalid_argument("kmode_product: matrix has " + std::to_string(a.cols()) +
                                    " columns but mode " + std::to_string(k) + " has extent " +
                                    std::to_string(nk));
    const auto m = static_cast<std::size_t>(a.rows());
    Extents out_ext = x.extents();
    out_ext[k - 1] = m;
    DenseTensor<Scalar> out(out_ext);
    const Matrix<Scalar> am = a.template cast<Scalar>();

    if (left == 1) {
        // Mode-k fibers are contiguous columns of an n_k × right matrix.
        out.as_matrix(m, right).noalias() = am * x.as_matrix(nk, right);
        return out;
    }
    const Matrix<Scalar> at = am.transpose();
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const Matrix<Scalar>> src(x.data().data() + r * left * nk, static_cast<Eigen::Index>(left),
                                             static_cast<Eigen::Index>(nk));
        Eigen::Map<Matrix<Scalar>> dst(out.data().data() + r * left * m, static_cast<Eigen::Index>(left),
                                       static_cast<Eigen::Index>(m));
        dst.noalias() = src * at;
    }
    return out;
}

/// k-th unfolding: rows ∏_{s≤k} n_s, cols ∏_{s>k} n_s. A pure reinterpretation.
template <typename Scalar>
UnfoldingMatrix<Scalar> unfold(const DenseTensor<Scalar>& x, std::size_t k) {
    const std::size_t d = x.order();
    if (d < 2 || k < 1 || k > d - 1)
        throw std::out_of_range("unfold: split " + std::to_string(k) + " invalid for order " + std::to_string(d));
    std::size_t rows = 1;
    for (std::size_t s = 0; s < k; ++s) rows *= x.extent(s);
    return {Matrix<Scalar>(x.as_matrix(rows, x.size() / rows)), {FlatteningSource::Kind::unfolding, k}};
}

/// Inverse of unfold: reinterpret a matrix as a tensor with the given extents.
template <typename Derived>
auto fold(const Eigen::MatrixBase<Derived>& m, Extents extents) {
    using Scalar = typename Derived::Scalar;
    const Matrix<Scalar> dense = m;
    return DenseTensor<Scalar>(std::move(extents), std::vector<Scalar>(dense.data(), dense.data() + dense.size()));
}

/// Y^j: modes reordered as (j, j+1, ..., d, 1, ..., j-1).
template <typename Scalar>
DenseTensor<Scalar> cyclic_permute(const DenseTensor<Scalar>& x, std::size_t j) {
    const std::size_t d = x.order();
    detail::check_mode(j, d, "cyclic_permute");
    if (j == 1) return x;
    // Modes 1..j-1 become the slow block: Y = transpose of the (left × right) reshape.
    std::size_t left = 1;
    for (std::size_t s = 0; s + 1 < j; ++s) left *= x.extent(s);
    const std::size_t right = x.size() / left;
    Extents ext;
    for (std::size_t s = j - 1; s < d; ++s) ext.push_back(x.extent(s));
    for (std::size_t s = 0; s + 1 < j; ++s) ext.push_back(x.extent(s));
    DenseTensor<Scalar> y(ext);
    y.as_matrix(right, left) = x.as_matrix(left, right).transpose();
    return y;
}

/// Mode-n matricization with the cyclic column order: equals unfold(cyclic_permute(x, n), 1).
template <typename Scalar>
UnfoldingMatrix<Scalar> matricize(const DenseTensor<Scalar>& x, std::size_t n) {
    detail::check_mode(n, x.order(), "matricize");
    const DenseTensor<Scalar> y = cyclic_permute(x, n);
    const std::size_t rows = x.extent(n - 1);
    return {Matrix<Scalar>(y.as_matrix(rows, y.size() / rows)), {FlatteningSource::Kind::matricization, n}};
}

template <typename Scalar>
double frobenius_norm(const DenseTensor<Scalar>& x) {
    double s = 0.0;
    for (const auto& v : x.data()) s += std::norm(v);
    return std::sqrt(s);
}

template <typename Scalar>
double relative_error(const DenseTensor<Scalar>& approx, const DenseTensor<Scalar>& exact) {
    const double nrm = frobenius_norm(exact);
    const double diff = frobenius_norm(approx - exact);
    return nrm == 0.0 ? diff : diff / nrm;
}

}  // namespace ttz
