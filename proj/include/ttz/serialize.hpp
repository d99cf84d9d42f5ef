#pragma once

// Binary container for TT and Tucker tensors.
//
// Layout (all integers little-endian):
//   char[4]   magic "TTZ1"
//   u32       format       0 = tensor-train, 1 = Tucker
//   u32       scalar kind  0 = real, 1 = complex
//   u32       d
//   u64[d]    extents n_1..n_d
//   u64[...]  rank vector: s_0..s_d for TT (d+1 entries), t_1..t_d for Tucker (d entries)
//   payload   IEEE-754 binary64 little-endian, (re, im) pairs for complex.
//             TT: cores 1..d, each column-major (s_{k-1}, n_k, s_k).
//             Tucker: core column-major (t_1..t_d), then factors 1..d column-major n_k × t_k.

#include "ttz/formats.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <variant>

namespace ttz {

enum class FormatTag : std::uint32_t { tensor_train = 0, tucker = 1 };

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace io_detail {

template <typename U>
void put_le(std::ostream& os, U v) {
    static_assert(std::is_unsigned_v<U>);
    std::array<char, sizeof(U)> b{};
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b.data(), b.size());
}

template <typename U>
U get_le(std::istream& is) {
    std::array<unsigned char, sizeof(U)> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw FormatError("TTZ1: truncated stream");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
    return v;
}

inline void put_double(std::ostream& os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }
inline double get_double(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

template <typename Scalar>
void put_scalars(std::ostream& os, const Scalar* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if constexpr (is_complex_v<Scalar>) {
            put_double(os, p[i].real());
            put_double(os, p[i].imag());
        } else {
            put_double(os, p[i]);
        }
    }
}

template <typename Scalar>
void get_scalars(std::istream& is, Scalar* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if constexpr (is_complex_v<Scalar>) {
            const double re = get_double(is);
            const double im = get_double(is);
            p[i] = Scalar(re, im);
        } else {
            p[i] = get_double(is);
        }
    }
}

template <typename Scalar>
void write_header(std::ostream& os, FormatTag tag, const Extents& ext, const std::vector<std::size_t>& ranks) {
    os.write("TTZ1", 4);
    put_le(os, static_cast<std::uint32_t>(tag));
    put_le(os, static_cast<std::uint32_t>(scalar_kind_of<Scalar>()));
    put_le(os, static_cast<std::uint32_t>(ext.size()));
    for (auto n : ext) put_le(os, static_cast<std::uint64_t>(n));
    for (auto r : ranks) put_le(os, static_cast<std::uint64_t>(r));
}

struct Header {
    FormatTag tag;
    ScalarKind kind;
    Extents extents;
    std::vector<std::size_t> ranks;
};

inline Header read_header(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || std::memcmp(magic.data(), "TTZ1", 4) != 0)
        throw FormatError("TTZ1: bad magic");
    Header h{};
    const auto tag = get_le<std::uint32_t>(is);
    const auto kind = get_le<std::uint32_t>(is);
    if (tag > 1) throw FormatError("TTZ1: unknown format tag " + std::to_string(tag));
    if (kind > 1) throw FormatError("TTZ1: unknown scalar kind " + std::to_string(kind));
    h.tag = static_cast<FormatTag>(tag);
    h.kind = static_cast<ScalarKind>(kind);
    const auto d = get_le<std::uint32_t>(is);
    if (d == 0 || d > 64) throw FormatError("TTZ1: implausible order " + std::to_string(d));
    for (std::uint32_t k = 0; k < d; ++k) h.extents.push_back(get_le<std::uint64_t>(is));
    const std::size_t nranks = h.tag == FormatTag::tensor_train ? d + 1 : d;
    for (std::size_t k = 0; k < nranks; ++k) h.ranks.push_back(get_le<std::uint64_t>(is));
    return h;
}

}  // namespace io_detail

template <typename Scalar>
void write_ttz(std::ostream& os, const TTTensor<Scalar>& t) {
    io_detail::write_header<Scalar>(os, FormatTag::tensor_train, t.extents(), t.rank_vector());
    for (const auto& c : t.cores()) io_detail::put_scalars(os, c.data().data(), c.size());
}

template <typename Scalar>
void write_ttz(std::ostream& os, const TuckerTensor<Scalar>& t) {
    io_detail::write_header<Scalar>(os, FormatTag::tucker, t.extents(), t.rank_vector());
    io_detail::put_scalars(os, t.core().data().data(), t.core().size());
    for (const auto& f : t.factors()) io_detail::put_scalars(os, f.data(), static_cast<std::size_t>(f.size()));
}

template <typename Scalar>
using AnyCompressed = std::variant<TTTensor<Scalar>, TuckerTensor<Scalar>>;

/// Reads a container whose scalar kind must match Scalar.
template <typename Scalar>
AnyCompressed<Scalar> read_ttz(std::istream& is) {
    const auto h = io_detail::read_header(is);
    if (h.kind != scalar_kind_of<Scalar>()) throw FormatError("TTZ1: scalar kind does not match the requested type");
    const std::size_t d = h.extents.size();
    if (h.tag == FormatTag::tensor_train) {
        std::vector<DenseTensor<Scalar>> cores;
        for (std::size_t k = 0; k < d; ++k) {
            DenseTensor<Scalar> c(Extents{h.ranks[k], h.extents[k], h.ranks[k + 1]});
            io_detail::get_scalars(is, c.data().data(), c.size());
            cores.push_back(std::move(c));
        }
        return TTTensor<Scalar>(std::move(cores));
    }
    DenseTensor<Scalar> core(h.ranks);
    io_detail::get_scalars(is, core.data().data(), core.size());
    std::vector<Matrix<Scalar>> factors;
    for (std::size_t k = 0; k < d; ++k) {
        Matrix<Scalar> f(static_cast<Eigen::Index>(h.extents[k]), static_cast<Eigen::Index>(h.ranks[k]));
        io_detail::get_scalars(is, f.data(), static_cast<std::size_t>(f.size()));
        factors.push_back(std::move(f));
    }
    return TuckerTensor<Scalar>(std::move(core), std::move(factors));
}

}  // namespace ttz
