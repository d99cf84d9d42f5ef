#include "ttz/tensor.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ttz;

namespace {

DenseTensor<double> iota_tensor(Extents ext) {
    DenseTensor<double> t(std::move(ext));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i + 1);
    return t;
}

DenseTensor<double> random_tensor(Extents ext, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseTensor<double> t(std::move(ext));
    for (auto& v : t.data()) v = u(rng);
    return t;
}

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
    return m;
}

}  // namespace

TEST(DenseTensor, RejectsBadShapes) {
    EXPECT_THROW(DenseTensor<double>(Extents{}), std::invalid_argument);
    EXPECT_THROW(DenseTensor<double>(Extents{2, 0}), std::invalid_argument);
    EXPECT_THROW(DenseTensor<double>(Extents{2, 2}, std::vector<double>(3)), std::invalid_argument);
    EXPECT_NO_THROW(DenseTensor<double>(Extents{5}));
}

TEST(DenseTensor, ColumnMajorIndexing) {
    const auto t = iota_tensor({2, 3, 4});
    EXPECT_EQ(t(1, 0, 0), 2.0);
    EXPECT_EQ(t(0, 1, 0), 3.0);
    EXPECT_EQ(t(0, 0, 1), 7.0);
    EXPECT_EQ(t({1, 2, 3}), 24.0);
}

TEST(KmodeProduct, IdentityLeavesTensorUnchanged) {
    const auto x = random_tensor({3, 4, 5}, 1);
    for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(kmode_product(x, MatrixXd::Identity(x.extent(k - 1), x.extent(k - 1)), k), x);
}

TEST(KmodeProduct, RankOneMultilinearity) {
    const VectorXd u = VectorXd::LinSpaced(3, 1, 3), v = VectorXd::LinSpaced(4, -1, 2), w = VectorXd::LinSpaced(2, 0.5, 1);
    const MatrixXd a = random_matrix(5, 3, 2);
    const auto lhs = kmode_product(DenseTensor<double>::outer({u, v, w}), a, 1);
    const auto rhs = DenseTensor<double>::outer({VectorXd(a * u), v, w});
    EXPECT_LT(relative_error(lhs, rhs), 1e-15);
}

TEST(KmodeProduct, SwapMatchesBruteForceLoop) {
    const auto x = iota_tensor({2, 2, 2});
    MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const auto y = kmode_product(x, a, 1);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                double s = 0.0;
                for (std::size_t c = 0; c < 2; ++c) s += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) * x(c, j, k);
                EXPECT_EQ(y(i, j, k), s);
            }
    EXPECT_EQ(y(0, 0, 0), 2.0);
    EXPECT_EQ(y(1, 0, 0), 1.0);
}

TEST(KmodeProduct, EveryModeMatchesBruteForce) {
    const auto x = random_tensor({3, 4, 5}, 3);
    for (std::size_t k = 1; k <= 3; ++k) {
        const MatrixXd a = random_matrix(2, static_cast<Eigen::Index>(x.extent(k - 1)), 10 + k);
        const auto y = kmode_product(x, a, k);
        EXPECT_EQ(y.extent(k - 1), 2u);
        std::vector<std::size_t> idx(3, 0);
        do {
            double s = 0.0;
            auto src = idx;
            for (std::size_t c = 0; c < x.extent(k - 1); ++c) {
                src[k - 1] = c;
                s += a(static_cast<Eigen::Index>(idx[k - 1]), static_cast<Eigen::Index>(c)) * x(src);
            }
            EXPECT_NEAR(y(idx), s, 1e-14);
        } while (y.advance(idx));
    }
}

TEST(KmodeProduct, DimensionMismatchThrows) {
    const auto x = random_tensor({3, 4, 5}, 4);
    EXPECT_THROW(kmode_product(x, MatrixXd::Identity(3, 3), 2), std::invalid_argument);
    EXPECT_THROW(kmode_product(x, MatrixXd::Identity(3, 3), 0), std::out_of_range);
    EXPECT_THROW(kmode_product(x, MatrixXd::Identity(3, 3), 4), std::out_of_range);
}

TEST(KmodeProduct, SameModeComposes) {
    const auto x = random_tensor({4, 4, 4}, 5);
    for (std::size_t k = 1; k <= 3; ++k) {
        const MatrixXd a = random_matrix(4, 4, 20 + k), b = random_matrix(4, 4, 30 + k);
        const auto lhs = kmode_product(kmode_product(x, a, k), b, k);
        const auto rhs = kmode_product(x, MatrixXd(b * a), k);
        EXPECT_LT(relative_error(lhs, rhs), 1e-12);
    }
}

TEST(KmodeProduct, DistinctModesCommute) {
    const auto x = random_tensor({4, 4, 4}, 6);
    const MatrixXd a = random_matrix(4, 4, 7), b = random_matrix(4, 4, 8);
    for (std::size_t j = 1; j <= 3; ++j)
        for (std::size_t k = 1; k <= 3; ++k) {
            if (j == k) continue;
            const auto lhs = kmode_product(kmode_product(x, a, j), b, k);
            const auto rhs = kmode_product(kmode_product(x, b, k), a, j);
            EXPECT_LT(relative_error(lhs, rhs), 1e-12);
        }
}

TEST(Unfold, TwoByTwoByTwoLayout) {
    const auto u = unfold(iota_tensor({2, 2, 2}), 1);
    ASSERT_EQ(u.rows(), 2u);
    ASSERT_EQ(u.cols(), 4u);
    for (Eigen::Index c = 0; c < 4; ++c) {
        EXPECT_EQ(u.matrix(0, c), 2.0 * c + 1.0);
        EXPECT_EQ(u.matrix(1, c), 2.0 * c + 2.0);
    }
    EXPECT_EQ(u.source.kind, FlatteningSource::Kind::unfolding);
    EXPECT_EQ(u.source.index, 1u);
}

TEST(Unfold, MatrixIsItsOwnUnfolding) {
    const auto x = random_tensor({3, 5}, 9);
    const auto u = unfold(x, 1);
    for (Eigen::Index j = 0; j < 5; ++j)
        for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(u.matrix(i, j), x(std::vector<std::size_t>{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}));
}

TEST(Unfold, RankOneTensorHasRankOneUnfoldings) {
    const auto x = DenseTensor<double>::outer({VectorXd::LinSpaced(3, 1, 2), VectorXd::LinSpaced(4, -2, 3), VectorXd::LinSpaced(5, 1, 9)});
    for (std::size_t k = 1; k <= 2; ++k) {
        Eigen::JacobiSVD<MatrixXd> svd(unfold(x, k).matrix);
        const VectorXd s = svd.singularValues();
        EXPECT_LT(s(1), 1e-13 * s(0));
    }
}

TEST(Unfold, RangeChecks) {
    const auto x = random_tensor({2, 3, 4}, 10);
    EXPECT_THROW(unfold(x, 0), std::out_of_range);
    EXPECT_THROW(unfold(x, 3), std::out_of_range);
    EXPECT_THROW(unfold(random_tensor({4}, 11), 1), std::out_of_range);
}

TEST(Unfold, FoldRoundTripIsExact) {
    const auto x = random_tensor({2, 3, 4, 5}, 12);
    for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(fold(unfold(x, k).matrix, x.extents()), x);
}

TEST(Matricize, ModeOneIsBitIdenticalToUnfoldOne) {
    const auto x = random_tensor({3, 4, 5}, 13);
    EXPECT_EQ(matricize(x, 1).matrix, unfold(x, 1).matrix);
}

TEST(Matricize, EqualsUnfoldOfCyclicPermute) {
    const auto x = random_tensor({3, 4, 5, 2}, 14);
    for (std::size_t j = 1; j <= 4; ++j) EXPECT_EQ(matricize(x, j).matrix, unfold(cyclic_permute(x, j), 1).matrix);
}

TEST(Matricize, ColumnsAreTheModeFibers) {
    const auto x = iota_tensor({2, 2, 2});
    const auto m = matricize(x, 2);
    ASSERT_EQ(m.rows(), 2u);
    ASSERT_EQ(m.cols(), 4u);
    std::vector<std::pair<double, double>> fibers, cols;
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 2; ++i) fibers.emplace_back(x(i, 0, k), x(i, 1, k));
    for (Eigen::Index c = 0; c < 4; ++c) cols.emplace_back(m.matrix(0, c), m.matrix(1, c));
    std::sort(fibers.begin(), fibers.end());
    std::sort(cols.begin(), cols.end());
    EXPECT_EQ(fibers, cols);
}

TEST(Matricize, CyclicColumnOrder) {
    // Column index of X_(2) for (i1, i3) is i3 + n3·i1 under the cyclic order (2, 3, 1).
    const auto x = iota_tensor({2, 3, 4});
    const auto m = matricize(x, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k)
                EXPECT_EQ(m.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k + 4 * i)), x(i, j, k));
}

TEST(Matricize, RankOneAtModeTwo) {
    const auto x = DenseTensor<double>::outer({VectorXd::LinSpaced(3, 1, 2), VectorXd::LinSpaced(4, -2, 3), VectorXd::LinSpaced(5, 1, 9)});
    Eigen::JacobiSVD<MatrixXd> svd(matricize(x, 2).matrix);
    EXPECT_LT(svd.singularValues()(1), 1e-13 * svd.singularValues()(0));
}

TEST(CyclicPermute, ModeOneIsIdentity) {
    const auto x = random_tensor({2, 3, 4}, 15);
    EXPECT_EQ(cyclic_permute(x, 1), x);
}

TEST(CyclicPermute, ModeTwoElementwise) {
    const auto x = random_tensor({2, 3, 4}, 16);
    const auto y = cyclic_permute(x, 2);
    ASSERT_EQ(y.extents(), (Extents{3, 4, 2}));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(y(j, k, i), x(i, j, k));
    EXPECT_EQ(unfold(y, 1).matrix, matricize(x, 2).matrix);
}

TEST(CyclicPermute, DApplicationsComposeToIdentity) {
    const auto x = random_tensor({2, 3, 4}, 17);
    auto y = x;
    for (int r = 0; r < 3; ++r) y = cyclic_permute(y, 2);
    EXPECT_EQ(y, x);
}

TEST(FrobeniusNorm, KnownValues) {
    EXPECT_DOUBLE_EQ(frobenius_norm(DenseTensor<double>::constant({2, 3, 4}, 1.0)), std::sqrt(24.0));
    const auto z = DenseTensor<std::complex<double>>::constant({2, 2, 2}, {0.0, 1.0});
    EXPECT_DOUBLE_EQ(frobenius_norm(z), std::sqrt(8.0));
}

TEST(FrobeniusNorm, InvariantUnderFlattenings) {
    const auto x = random_tensor({3, 4, 5}, 18);
    const double n = frobenius_norm(x);
    for (std::size_t k = 1; k <= 2; ++k) EXPECT_NEAR(unfold(x, k).matrix.norm(), n, 1e-14 * n);
    for (std::size_t k = 1; k <= 3; ++k) {
        EXPECT_NEAR(matricize(x, k).matrix.norm(), n, 1e-14 * n);
        EXPECT_NEAR(frobenius_norm(cyclic_permute(x, k)), n, 1e-14 * n);
    }
}
