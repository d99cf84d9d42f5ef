#include "ttz/bounds.hpp"
#include "ttz/problems.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include <random>

using namespace ttz;

// ---------------------------------------------------------------------------
// Bessel I

TEST(BesselI, MatchesBoostAcrossOrdersAndArguments) {
    for (double x : {0.1, 0.5, 0.99, 1.0, 2.5, 10.0, 25.0, 60.0, 150.0}) {
        for (std::size_t k : {0u, 1u, 2u, 5u, 10u, 30u, 80u}) {
            const double ref = boost::math::cyl_bessel_i(static_cast<double>(k), x);
            if (ref < 1e-290) continue;
            EXPECT_NEAR(bessel_i(k, x), ref, 1e-13 * ref) << "k=" << k << " x=" << x;
        }
    }
}

TEST(BesselI, FrozenHighPrecisionValues) {
    EXPECT_NEAR(bessel_i(0, 1.0), 1.2660658777520083356, 1e-15);
    const double i5[] = {27.239871823604446895,  24.335642142450527199,   17.505614966624236015,
                         10.331150169151138387,  5.1082347636428699502,   2.1579745473225464669,
                         0.7922856689977770164,  0.25648894172788162754,  0.074116632159708459297,
                         0.019315718816814557788, 0.0045800444191760512612, 0.00099554114011035274294};
    for (std::size_t k = 0; k < 12; ++k) EXPECT_NEAR(bessel_i(k, 5.0), i5[k], 1e-14 * i5[k]) << "k=" << k;
    EXPECT_NEAR(bessel_i(50, 30.0), 0.00014590106916468946536, 1e-13 * 0.00014590106916468946536);
    EXPECT_NEAR(bessel_i(3, 0.5), 0.0026451119689902858564, 1e-14 * 0.0026451119689902858564);
    EXPECT_NEAR(bessel_i_scaled(1, 700.0), 0.015070519444716846949, 1e-13 * 0.015070519444716846949);
}

TEST(BesselI, RecurrenceIdentity) {
    for (double x : {0.7, 3.0, 40.0, 300.0}) {
        const auto seq = bessel_i_scaled_sequence(40, x);
        for (std::size_t k = 1; k < 39; ++k) {
            const double lhs = seq[k - 1] - seq[k + 1];
            const double rhs = 2.0 * static_cast<double>(k) / x * seq[k];
            if (seq[k] < 1e-250) continue;
            EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(std::abs(lhs), seq[k - 1])) << "k=" << k << " x=" << x;
        }
    }
}

TEST(BesselI, DomainErrors) {
    EXPECT_THROW(bessel_i(1, -1.0), std::domain_error);
    EXPECT_THROW(bessel_i(1, 701.0), std::overflow_error);
    EXPECT_THROW(bessel_i(kBesselMaxOrder + 1, 1.0), std::domain_error);
    EXPECT_EQ(bessel_i(0, 0.0), 1.0);
    EXPECT_EQ(bessel_i(3, 0.0), 0.0);
}

// ---------------------------------------------------------------------------
// Zolotarev numbers

TEST(Zolotarev, FrozenValue) {
    EXPECT_NEAR(zolotarev_interval_bound(1.0, 1), 0.11378859635054596, 1e-16);
    EXPECT_EQ(zolotarev_interval_bound(1.0, 0), 1.0);
    EXPECT_EQ(zolotarev_interval_bound(1e300, 1), 1.0);
}

TEST(Zolotarev, DecreasesInKAndIncreasesInGamma) {
    for (double g : {1.0, 10.0, 1e4, 1e10}) {
        for (std::size_t k = 1; k < 40; ++k) EXPECT_LE(zolotarev_interval_bound(g, k + 1), zolotarev_interval_bound(g, k));
        EXPECT_LE(zolotarev_interval_bound(g, 5), zolotarev_interval_bound(g * 10, 5));
    }
    EXPECT_THROW(zolotarev_interval_bound(1.0 / 16.0, 1), std::domain_error);
}

TEST(Zolotarev, KForEpsilonIsMinimalOnRandomPairs) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lg(0.0, 12.0), le(-14.0, -0.5);
    for (int t = 0; t < 1000; ++t) {
        const double gamma = std::pow(10.0, lg(rng));
        const double eps = std::pow(10.0, le(rng));
        const std::size_t k = k_for_epsilon_interval(gamma, eps);
        EXPECT_LE(zolotarev_interval_bound(gamma, k), eps);
        if (k > 0) EXPECT_GT(zolotarev_interval_bound(gamma, k - 1), eps);
    }
}

TEST(Gamma, IntervalFormulaMatchesSeparatedPair) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int t = 0; t < 200; ++t) {
        const double a = u(rng), b = a * (1.0 + 100.0 * u(rng));
        for (std::size_t d : {2u, 3u, 5u}) {
            for (std::size_t j = 1; j < d; ++j) {
                const double jj = static_cast<double>(j), rest = static_cast<double>(d - j);
                const double g = gamma_interval(a, b, j, d);
                EXPECT_NEAR(g, gamma_separated({jj * a, jj * b}, {-rest * b, -rest * a}), 1e-12 * g);
                EXPECT_NEAR(g, gamma_interval(a, b, d - j, d), 1e-12 * g);
                EXPECT_GE(g, 1.0 - 1e-15);
            }
        }
    }
}

TEST(Gamma, PointSpectraGiveOne) {
    EXPECT_NEAR(gamma_interval(2.0, 2.0, 1, 3), 1.0, 1e-15);
    EXPECT_THROW(gamma_interval(0.0, 1.0, 1, 3), std::domain_error);
    EXPECT_THROW(gamma_interval(1.0, 2.0, 3, 3), std::domain_error);
    EXPECT_THROW(gamma_separated({0.0, 1.0}, {0.5, 2.0}), std::domain_error);
}

TEST(Disk, FrozenRho) {
    EXPECT_NEAR(rho_disk(2.0, 1.0, 1, 3), 15.435213074469699, 1e-12);
    EXPECT_NEAR(zolotarev_disk_bound(2.0, 1.0, 1, 3, 2), std::pow(15.435213074469699, -2.0), 1e-15);
    EXPECT_THROW(rho_disk(1.0, 1.0, 1, 3), std::domain_error);
    const std::size_t k = k_for_epsilon_disk(2.0, 1.0, 1, 3, 1e-8);
    EXPECT_LE(zolotarev_disk_bound(2.0, 1.0, 1, 3, k), 1e-8 / std::sqrt(3.0));
    EXPECT_GT(zolotarev_disk_bound(2.0, 1.0, 1, 3, k - 1), 1e-8 / std::sqrt(3.0));
}

// ---------------------------------------------------------------------------
// Separation and storage bounds

TEST(Separation, IntervalSums) {
    const std::vector<SpectralSet> sets(3, SpectralSet::interval(1.0, 4.0));
    const auto pairs = check_minkowski_sum_separated(sets);
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_EQ(pairs[0].e_interval.lo, 1.0);
    EXPECT_EQ(pairs[0].f_interval.lo, -8.0);
    EXPECT_EQ(pairs[0].f_interval.hi, -2.0);
    EXPECT_NEAR(pairs[0].conditioning(), gamma_interval(1.0, 4.0, 1, 3), 1e-14);
    EXPECT_EQ(check_minkowski_singly_separated(sets).size(), 3u);
}

TEST(Separation, OverlapReportsSplit) {
    const std::vector<SpectralSet> sets{SpectralSet::interval(1.0, 2.0), SpectralSet::interval(-5.0, 3.0),
                                        SpectralSet::interval(1.0, 2.0)};
    try {
        check_minkowski_sum_separated(sets);
        FAIL() << "expected SeparationError";
    } catch (const SeparationError& e) {
        EXPECT_EQ(e.split(), 1u);
    }
    EXPECT_THROW(check_minkowski_sum_separated({SpectralSet::interval(1, 2), SpectralSet::disk(2, 1)}),
                 std::invalid_argument);
    EXPECT_THROW(check_minkowski_sum_separated({SpectralSet::interval(1, 2)}), std::invalid_argument);
    EXPECT_THROW(SpectralSet::interval(2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(SpectralSet::disk(1.0, 2.0), std::invalid_argument);
}

TEST(Separation, Disks) {
    const std::vector<SpectralSet> sets(3, SpectralSet::disk(2.0, 1.0));
    const auto pairs = check_minkowski_sum_separated(sets);
    EXPECT_NEAR(pairs[0].conditioning(), rho_disk(2.0, 1.0, 1, 3), 1e-12);
    EXPECT_NEAR(pairs[1].conditioning(), rho_disk(2.0, 1.0, 2, 3), 1e-12);
}

TEST(StorageBound, HilbertSmallCase) {
    EXPECT_EQ(hilbert_s1_bound(10, 1e-10), 12u);
    EXPECT_EQ(cubic_tt_storage(10, 12), 1680u);
}

TEST(StorageBound, HilbertHundred) {
    const std::size_t s1 = hilbert_s1_bound(100, 1e-10);
    EXPECT_EQ(s1, 18u);
    EXPECT_EQ(cubic_tt_storage(100, s1), 36000u);
}

TEST(StorageBound, FrozenClosedForms) {
    const std::size_t ns[] = {10, 100, 500};
    const std::size_t hil[] = {12, 18, 22}, fd[] = {13, 22, 29}, sp[] = {36, 59, 75};
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(hilbert_s1_bound(ns[i], 1e-10), hil[i]);
        EXPECT_EQ(fd_poisson_s1_bound(ns[i], 1e-8), fd[i]);
        EXPECT_EQ(spectral_poisson_s1_bound(ns[i], 1e-10), sp[i]);
    }
}

TEST(StorageBound, GeneralMachineryMatchesClosedForms) {
    for (std::size_t n : {10u, 100u, 500u}) {
        const auto hil = hilbert_displacement(n);
        const auto r = tt_storage_bound(hil.spectra_list(), {1, 1}, {n, n, n}, 1e-10);
        EXPECT_EQ(r.rank_bound[1], hilbert_s1_bound(n, 1e-10)) << n;
        EXPECT_EQ(r.rank_bound[2], r.rank_bound[1]);
        EXPECT_EQ(r.storage_bound, cubic_tt_storage(n, r.rank_bound[1]));

        const auto fd = fd_poisson(n);
        const auto rf = tt_storage_bound(fd.spectra_list(), {1, 1}, fd.extents(), 1e-8);
        EXPECT_EQ(rf.rank_bound[1], fd_poisson_s1_bound(n, 1e-8)) << n;

        const std::vector<SpectralSet> sp(3, SpectralSet::interval(1.0, 30.0 * std::pow(static_cast<double>(n), 4)));
        const auto rs = tt_storage_bound(sp, {1, 1}, {n + 1, n + 1, n + 1}, 1e-10);
        EXPECT_EQ(rs.rank_bound[1], spectral_poisson_s1_bound(n, 1e-10)) << n;
    }
}

TEST(StorageBound, ScalesWithUnfoldingRank) {
    const std::vector<SpectralSet> sets(3, SpectralSet::interval(1.0, 100.0));
    const auto r1 = tt_storage_bound(sets, {1, 1}, {20, 20, 20}, 1e-6);
    const auto r3 = tt_storage_bound(sets, {3, 2}, {20, 20, 20}, 1e-6);
    EXPECT_EQ(r3.rank_bound[1], 3 * r1.rank_bound[1]);
    EXPECT_EQ(r3.rank_bound[2], 2 * r1.rank_bound[2]);
    EXPECT_EQ(r3.storage_bound, tt_storage_from_ranks(r3.rank_bound, {20, 20, 20}));
    EXPECT_THROW(tt_storage_bound(sets, {1}, {20, 20, 20}, 1e-6), std::invalid_argument);
    EXPECT_THROW(tt_storage_bound(sets, {1, 1}, {20, 20, 20}, 0.0), std::domain_error);
}

TEST(StorageBound, Multilinear) {
    const std::vector<SpectralSet> sets(3, SpectralSet::interval(1.0, 100.0));
    const auto r = ml_storage_bound(sets, {1, 2, 1}, {20, 20, 20}, 1e-6);
    ASSERT_EQ(r.k_values.size(), 3u);
    EXPECT_EQ(r.rank_bound[1], 2 * r.k_values[1]);
    EXPECT_EQ(r.storage_bound, ml_storage_from_ranks(r.rank_bound, {20, 20, 20}));
    // Singly separated pairs are better conditioned than the mode sums, so k_j is no larger.
    const auto tt = tt_storage_bound(sets, {1, 1}, {20, 20, 20}, 1e-6);
    EXPECT_LE(r.k_values[0], tt.k_values[0]);
}

// ---------------------------------------------------------------------------
// Polynomial sampling

TEST(PolyBounds, ClosedValues) {
    const auto b = poly_sampling_bounds({2, 3, 4}, {10, 10, 10});
    EXPECT_EQ(b.tt_ranks, (std::vector<std::size_t>{1, 2, 4, 1}));
    EXPECT_EQ(b.tt_storage, 140u);
    EXPECT_EQ(b.ml_storage, 114u);
    EXPECT_EQ(b.cp_rank, 6u);
    EXPECT_EQ(b.cp_storage, 186u);
    EXPECT_THROW(poly_sampling_bounds({2, 0}, {4, 4}), std::invalid_argument);
}

TEST(PolyBounds, ObservedRanksStayBelow) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const std::array<std::size_t, 3> deg{1 + seed % 3, 2 + seed % 4, 1 + seed % 5};
        const auto x = random_polynomial_tensor(deg, 12, seed);
        const auto b = poly_sampling_bounds({deg[0], deg[1], deg[2]}, {12, 12, 12});
        const auto tt = tt_svd(x, 1e-12);
        const auto s = tt.rank_vector();
        for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(s[k], b.tt_ranks[k]);
        EXPECT_LE(tt.storage_count(), b.tt_storage);
        const auto tk = hosvd(x, 1e-12);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(tk.rank_vector()[k], deg[k]);
        EXPECT_LE(tk.storage_count(), b.ml_storage);
    }
}

// ---------------------------------------------------------------------------
// Gaussian bumps

TEST(GaussianBound, FrozenEll) {
    EXPECT_EQ(gaussian_bump_bound(300, 400, 100.0, 1e-10).ell, 92u);
    EXPECT_EQ(gaussian_bump_bound(300, 400, 10.0, 1e-10).ell, 38u);
    EXPECT_EQ(gaussian_bump_bound(300, 400, 1000.0, 1e-10).ell, 270u);
    EXPECT_EQ(gaussian_bump_bound(300, 400, 100.0, 1e-10).s1_bound, 93u);
}

TEST(GaussianBound, FrozenSweep) {
    const std::size_t g10[] = {20, 22, 24, 26, 28, 30, 32, 34, 36};
    const std::size_t g100[] = {54, 60, 64, 68, 72, 76, 80, 82, 86};
    for (int i = 0; i < 9; ++i) {
        const double eps = std::pow(10.0, -2 - i);
        EXPECT_EQ(gaussian_bump_bound(50, 80, 10.0, eps).ell, g10[i]) << eps;
        EXPECT_EQ(gaussian_bump_bound(50, 80, 100.0, eps).ell, g100[i]) << eps;
    }
}

TEST(GaussianBound, MonotoneAndMinimal) {
    std::size_t prev = 0;
    for (double g : {1.0, 5.0, 20.0, 80.0, 320.0, 1280.0}) {
        const auto b = gaussian_bump_bound(100, 64, g, 1e-8);
        EXPECT_GE(b.ell, prev);
        prev = b.ell;
        EXPECT_LE(b.lhs, 1e-8);
        if (b.ell >= 2) {
            const double before = 6.0 * 100 * std::pow(64.0, 1.5) * bessel_i_scaled(b.ell / 2, 0.25 * g);
            EXPECT_GT(before, 1e-8);
        }
    }
    EXPECT_THROW(gaussian_bump_bound(0, 10, 1.0, 1e-3), std::domain_error);
    EXPECT_THROW(gaussian_bump_bound(1, 10, -1.0, 1e-3), std::domain_error);
}
