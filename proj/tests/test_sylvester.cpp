#include "ttz/problems.hpp"
#include "ttz/sylvester.hpp"

#include <gtest/gtest.h>

using namespace ttz;

TEST(DirectSolve, MatchesEigenOracle) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto p = random_spd_problem({.n = 7, .rhs_rank = 2}, seed);
        const auto x = direct_kron_solve_3d(p);
        const auto y = eigen_solve_3d(p);
        EXPECT_LT(relative_error(x, y), 1e-11);
        EXPECT_LE(residual_3d(p, x), 1e-11 * frobenius_norm(p.rhs_dense()));
    }
}

TEST(DirectSolve, InverseBandedForm) {
    const auto sp = spectral_poisson(8);
    const auto x = direct_kron_solve_3d(sp.problem);
    const auto y = eigen_solve_3d(sp.problem);
    EXPECT_LT(relative_error(x, y), 1e-10);
}

TEST(DirectSolve, CapacityGuard) {
    const auto p = fd_poisson(60);
    EXPECT_THROW(direct_kron_solve_3d(p), CapacityError);
}

TEST(EigenSolve, IdentityOperators) {
    SylvesterProblem3D p;
    for (std::size_t k = 0; k < 3; ++k) {
        p.a[k] = Operator::dense(MatrixXd::Identity(4, 4));
        p.spectra[k] = SpectralSet::interval(1.0, 1.0);
    }
    DenseTensor<double> core(Extents{1, 1, 1});
    core[0] = 3.0;
    p.rhs = TuckerTensor<double>(core, {VectorXd::LinSpaced(4, 1, 4), VectorXd::Ones(4), VectorXd::LinSpaced(4, -1, 1)});
    const auto x = eigen_solve_3d(p);
    const auto f = p.rhs_dense();
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], f[i] / 3.0, 1e-14);
}

TEST(EigenSolve, SingularSumIsReported) {
    SylvesterProblem3D p;
    p.a[0] = Operator::dense(MatrixXd::Identity(2, 2));
    p.a[1] = Operator::dense(MatrixXd::Identity(2, 2));
    p.a[2] = Operator::dense(-2.0 * MatrixXd::Identity(2, 2));
    for (auto& s : p.spectra) s = SpectralSet::interval(1.0, 1.0);
    p.rhs = ones_rank_one({2, 2, 2});
    EXPECT_THROW(eigen_solve_3d(p), SingularProblemError);
}

TEST(Residual, OracleAndZero) {
    const auto p = random_spd_problem({.n = 6, .rhs_rank = 2}, 42);
    const double fnorm = frobenius_norm(p.rhs_dense());
    EXPECT_LE(residual_3d(p, eigen_solve_3d(p)), 1e-11 * fnorm);
    EXPECT_NEAR(residual_3d(p, DenseTensor<double>(p.extents())), fnorm, 1e-14 * fnorm);
    EXPECT_THROW(residual_3d(p, DenseTensor<double>(Extents{5, 6, 6})), std::invalid_argument);
}

TEST(TTSolver, OracleEquivalenceRandom) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto p = random_spd_problem({.n = 4 + seed % 9, .rhs_rank = 1 + seed % 3}, seed);
        const auto ref = direct_kron_solve_3d(p);
        for (double eps : {1e-4, 1e-8}) {
            const auto tt = tt_sylvester_solve_3d(p, eps);
            EXPECT_LE(relative_error(reconstruct(tt), ref), 10 * eps) << "seed " << seed << " eps " << eps;
            const auto tk = tucker_sylvester_solve_3d(p, eps);
            EXPECT_LE(relative_error(reconstruct(tk), ref), 10 * eps) << "seed " << seed << " eps " << eps;
            EXPECT_LT(tk.orthonormality_defect(), 1e-12);
        }
    }
}

TEST(TTSolver, HilbertDisplacement) {
    const auto p = hilbert_displacement(20);
    SolveStats st;
    const auto tt = tt_sylvester_solve_3d(p, 1e-10, &st);
    const auto h = hilbert_tensor(20);
    EXPECT_LE(relative_error(reconstruct(tt), h), 1e-9);
    ASSERT_EQ(st.ranks.size(), 4u);
    EXPECT_LE(st.ranks[1], hilbert_s1_bound(20, 1e-10));
    EXPECT_EQ(tt.rank_vector(), st.ranks);
}

TEST(TTSolver, FdPoisson) {
    const auto p = fd_poisson(16);
    const auto ref = eigen_solve_3d(p);
    const auto tt = tt_sylvester_solve_3d(p, 1e-8);
    EXPECT_LE(relative_error(reconstruct(tt), ref), 1e-7);
    EXPECT_LE(tt.rank_vector()[1], fd_poisson_s1_bound(16, 1e-8));
}

TEST(TTSolver, SpectralPoisson) {
    const auto sp = spectral_poisson(12);
    const auto ref = eigen_solve_3d(sp.problem);
    const auto tt = tt_sylvester_solve_3d(sp.problem, 1e-10);
    EXPECT_LE(relative_error(reconstruct(tt), ref), 1e-9);
}

TEST(TTSolver, ZeroRhs) {
    auto p = fd_poisson(8, 0.0);
    const auto tt = tt_sylvester_solve_3d(p, 1e-6);
    EXPECT_EQ(frobenius_norm(reconstruct(tt)), 0.0);
    const auto tk = tucker_sylvester_solve_3d(p, 1e-6);
    EXPECT_EQ(frobenius_norm(reconstruct(tk)), 0.0);
}

TEST(TTSolver, RankCertificate) {
    for (std::uint64_t seed = 11; seed <= 16; ++seed) {
        const auto p = random_spd_problem({.n = 10, .rhs_rank = 2}, seed);
        for (double eps : {1e-3, 1e-6, 1e-9}) {
            const auto tt = tt_sylvester_solve_3d(p, eps);
            const auto nu1 = static_cast<std::size_t>(sylvester_detail::exact_low_rank(unfold(p.rhs_dense(), 1).matrix).w.cols());
            const auto nu2 = static_cast<std::size_t>(sylvester_detail::exact_low_rank(unfold(p.rhs_dense(), 2).matrix).w.cols());
            const auto bound = tt_storage_bound(p.spectra_list(), {nu1, nu2}, p.extents(), eps);
            const auto s = tt.rank_vector();
            EXPECT_LE(s[1], bound.rank_bound[1]) << seed;
            EXPECT_LE(s[2], bound.rank_bound[2]) << seed;
            EXPECT_LE(tt.storage_count(), bound.storage_bound);
        }
    }
}

TEST(TTSolver, RejectsOverlappingSpectra) {
    auto p = random_spd_problem({.n = 5, .rhs_rank = 1}, 3);
    p.spectra[1] = SpectralSet::interval(-100.0, 5.0);
    EXPECT_THROW(tt_sylvester_solve_3d(p, 1e-6), SeparationError);
    EXPECT_THROW(tt_sylvester_solve_3d(random_spd_problem({}, 1), 0.0), std::invalid_argument);
}

TEST(TTSolver, DiskSpectraAreRejected) {
    auto p = random_spd_problem({.n = 5, .rhs_rank = 1}, 4);
    for (auto& s : p.spectra) s = SpectralSet::disk(2.0, 1.0);
    EXPECT_THROW(tt_sylvester_solve_3d(p, 1e-6), std::invalid_argument);
}
