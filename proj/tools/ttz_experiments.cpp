// ttz-experiments: CSV data for the compression and solver experiments.

#include "cli_support.hpp"

#include "ttz/ttz.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace ttz;
using cli::ExperimentRecord;
using Rows = std::vector<ExperimentRecord>;
using Task = std::function<Rows()>;

// Residuals need the dense solution; skip them above this many entries.
constexpr std::size_t kResidualCap = std::size_t{1} << 22;
// The eigen oracle stores a complex copy of the full tensor.
constexpr std::size_t kEigenSolveCap = std::size_t{1} << 24;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::string output;
    std::uint64_t seed = 1;
    bool paper_scale = false;
    bool no_assert = false;
};

std::string point(const std::string& name, std::size_t n, double eps) {
    return name + " at n=" + std::to_string(n) + ", eps=" + cli::format_double(eps);
}

template <typename F>
auto with_point(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const CapacityError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<double> relative_residual(const SylvesterProblem3D& p, const TTTensor<double>& x) {
    if (element_count(p.extents()) > kResidualCap) return std::nullopt;
    const double f = frobenius_norm(p.rhs_dense());
    if (f == 0.0) return std::nullopt;
    return residual_3d(p, x) / f;
}

std::size_t cube_storage(std::size_t extent, std::size_t s1) {
    return tt_storage_from_ranks({1, s1, s1, 1}, {extent, extent, extent});
}

void check_eps(const std::vector<double>& eps) {
    for (double e : eps)
        if (!(e > 0.0 && e < 1.0)) throw UsageError("eps values must lie in (0, 1), got " + cli::format_double(e));
}

void check_min_n(const std::vector<std::size_t>& ns, std::size_t lo, const char* what) {
    for (auto n : ns)
        if (n < lo) throw UsageError(std::string(what) + ": n must be at least " + std::to_string(lo));
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns one task per independent unit of work.

struct FourierArgs {
    std::size_t n = 0;
    double m_min = 0, m_max = 0, m_step = 0;
    double eps = 1e-10;
};

std::vector<Task> fourier_tasks(const FourierArgs& a) {
    if (a.n < 2) throw UsageError("fourier-ratio: n must be at least 2");
    if (!(a.m_step > 0) || a.m_min > a.m_max || !(a.m_min > 0)) throw UsageError("fourier-ratio: bad M range");
    check_eps({a.eps});
    std::vector<Task> tasks;
    for (double m = a.m_min; m <= a.m_max + 1e-9 * a.m_max; m += a.m_step) {
        tasks.emplace_back([=] {
            return with_point(point("fourier-ratio M=" + cli::format_double(m), a.n, a.eps), [&] {
                const auto tt = tt_svd(fourier_like(m, a.n), a.eps);
                ExperimentRecord r{.experiment = "fourier-ratio", .n = a.n, .eps = a.eps, .m = m};
                r.s1_observed = tt.rank_vector()[1];
                r.storage_observed = tt.storage_count();
                return Rows{r};
            });
        });
    }
    return tasks;
}

struct GaussArgs {
    std::size_t n = 0, m = 300;
    std::vector<double> gamma{10, 100, 1000};
    std::string eps_sweep = "1e-2:1e-10";
};

std::vector<Task> gauss_tasks(const GaussArgs& a, std::uint64_t seed) {
    if (a.n < 2 || a.m == 0) throw UsageError("gauss-bumps: need n >= 2 and M >= 1");
    const auto eps = cli::parse_eps_sweep(a.eps_sweep);
    check_eps(eps);
    for (double g : a.gamma)
        if (!(g > 0)) throw UsageError("gauss-bumps: gamma must be positive");
    std::vector<Task> tasks;
    for (double g : a.gamma) {
        tasks.emplace_back([=] {
            const auto x = gaussian_bumps(a.m, g, a.n, seed);
            Rows rows;
            for (double e : eps) {
                rows.push_back(with_point(point("gauss-bumps gamma=" + cli::format_double(g), a.n, e), [&] {
                    const auto tt = tt_svd(x, e);
                    const auto bound = gaussian_bump_bound(a.m, a.n, g, e);
                    ExperimentRecord r{.experiment = "gauss-bumps",
                                       .n = a.n,
                                       .eps = e,
                                       .m = static_cast<double>(a.m),
                                       .gamma = g,
                                       .seed = seed};
                    r.s1_observed = tt.rank_vector()[1];
                    r.s1_bound = bound.s1_bound;
                    r.storage_observed = tt.storage_count();
                    r.storage_bound = cube_storage(a.n, bound.s1_bound);
                    return r;
                }));
            }
            return rows;
        });
    }
    return tasks;
}

// Hilbert rows: TT-SVD of the dense tensor for moderate n, the fADI solver otherwise.
constexpr std::size_t kHilbertDenseMax = 200;

std::vector<Task> hilbert_tasks(const std::vector<std::size_t>& ns, const std::vector<double>& eps) {
    check_min_n(ns, 2, "hilbert");
    check_eps(eps);
    std::vector<Task> tasks;
    for (auto n : ns) {
        tasks.emplace_back([=] {
            Rows rows;
            const auto p = hilbert_displacement(n);
            std::optional<DenseTensor<double>> dense;
            if (n <= kHilbertDenseMax) dense = hilbert_tensor(n);
            for (double e : eps) {
                rows.push_back(with_point(point("hilbert", n, e), [&] {
                    const auto tt = dense ? tt_svd(*dense, e) : tt_sylvester_solve_3d(p, e);
                    const std::size_t b = hilbert_s1_bound(n, e);
                    ExperimentRecord r{.experiment = "hilbert", .n = n, .eps = e};
                    r.s1_observed = tt.rank_vector()[1];
                    r.s1_bound = b;
                    r.storage_observed = tt.storage_count();
                    r.storage_bound = cubic_tt_storage(n, b);
                    r.residual = relative_residual(p, tt);
                    return r;
                }));
            }
            return rows;
        });
    }
    return tasks;
}

enum class Pde { fd, spectral };

SylvesterProblem3D pde_problem(Pde kind, std::size_t n) {
    return kind == Pde::fd ? fd_poisson(n) : spectral_poisson(n).problem;
}

std::size_t pde_extent(Pde kind, std::size_t n) { return kind == Pde::fd ? n - 1 : n + 1; }

std::size_t pde_s1_bound(Pde kind, std::size_t n, double eps) {
    return kind == Pde::fd ? fd_poisson_s1_bound(n, eps) : spectral_poisson_s1_bound(n, eps);
}

std::vector<Task> poisson_tasks(Pde kind, const std::vector<std::size_t>& ns, const std::vector<double>& eps) {
    const char* name = kind == Pde::fd ? "poisson-fd" : "poisson-spectral";
    check_min_n(ns, kind == Pde::fd ? 3 : 4, name);
    check_eps(eps);
    std::vector<Task> tasks;
    for (auto n : ns) {
        tasks.emplace_back([=] {
            const auto p = pde_problem(kind, n);
            Rows rows;
            for (double e : eps) {
                rows.push_back(with_point(point(name, n, e), [&] {
                    const auto tt = tt_sylvester_solve_3d(p, e);
                    const std::size_t b = pde_s1_bound(kind, n, e);
                    ExperimentRecord r{.experiment = name, .n = n, .eps = e};
                    r.s1_observed = tt.rank_vector()[1];
                    r.s1_bound = b;
                    r.storage_observed = tt.storage_count();
                    r.storage_bound = cube_storage(pde_extent(kind, n), b);
                    r.residual = relative_residual(p, tt);
                    return r;
                }));
            }
            return rows;
        });
    }
    return tasks;
}

struct BenchArgs {
    std::string problem = "spectral";
    std::string solvers = "direct,eigen,fadi";
    std::string n_sweep;
    double eps = 1e-8;
    std::size_t repeat = 1;
};

std::vector<Task> bench_tasks(const BenchArgs& a) {
    Pde kind{};
    if (a.problem == "spectral") kind = Pde::spectral;
    else if (a.problem == "fd") kind = Pde::fd;
    else throw UsageError("bench-solvers: --problem must be spectral or fd");
    const auto ns = cli::parse_n_sweep(a.n_sweep);
    check_min_n(ns, kind == Pde::fd ? 3 : 4, "bench-solvers");
    check_eps({a.eps});
    if (a.repeat == 0) throw UsageError("bench-solvers: --repeat must be positive");
    std::vector<std::string> solvers;
    for (const auto& s : cli::detail::split(a.solvers, ',')) {
        if (s != "direct" && s != "eigen" && s != "fadi") throw UsageError("bench-solvers: unknown solver '" + s + "'");
        solvers.push_back(s);
    }
    const std::string prefix = "bench-" + a.problem + "-";
    std::vector<Task> tasks;
    for (auto n : ns) {
        tasks.emplace_back([=] {
            const auto p = pde_problem(kind, n);
            const std::size_t total = element_count(p.extents());
            Rows rows;
            for (const auto& s : solvers) {
                if (s == "direct" && total > kDirectSolveCap) continue;
                if (s == "eigen" && total > kEigenSolveCap) continue;
                rows.push_back(with_point(point(prefix + s, n, a.eps), [&] {
                    ExperimentRecord r{.experiment = prefix + s, .n = n};
                    double best = std::numeric_limits<double>::infinity();
                    for (std::size_t rep = 0; rep < a.repeat; ++rep) {
                        const auto t0 = std::chrono::steady_clock::now();
                        if (s == "fadi") {
                            const auto tt = tt_sylvester_solve_3d(p, a.eps);
                            best = std::min(best, elapsed_ms(t0));
                            r.eps = a.eps;
                            r.s1_observed = tt.rank_vector()[1];
                            r.s1_bound = pde_s1_bound(kind, n, a.eps);
                            r.storage_observed = tt.storage_count();
                            r.storage_bound = cube_storage(pde_extent(kind, n), *r.s1_bound);
                            if (rep == 0) r.residual = relative_residual(p, tt);
                        } else {
                            const auto x = s == "direct" ? direct_kron_solve_3d(p) : eigen_solve_3d(p);
                            best = std::min(best, elapsed_ms(t0));
                            if (rep == 0 && total <= kResidualCap)
                                r.residual = residual_3d(p, x) / frobenius_norm(p.rhs_dense());
                        }
                    }
                    r.time_ms = best;
                    return r;
                }));
            }
            return rows;
        });
    }
    return tasks;
}

struct BoundArgs {
    std::string problem = "hilbert";
    double a = 0, b = 0;
};

std::vector<Task> bound_tasks(const BoundArgs& a, const std::vector<std::size_t>& ns, const std::vector<double>& eps) {
    check_eps(eps);
    check_min_n(ns, 1, "bound-calc");
    if (a.problem == "fd") check_min_n(ns, 3, "bound-calc");
    if (a.problem == "spectral") check_min_n(ns, 4, "bound-calc");
    if (a.problem == "interval" && !(a.a > 0 && a.a <= a.b))
        throw UsageError("bound-calc: interval needs 0 < a <= b (--a, --b)");
    if (a.problem != "hilbert" && a.problem != "fd" && a.problem != "spectral" && a.problem != "interval")
        throw UsageError("bound-calc: --problem must be hilbert, fd, spectral or interval");
    const std::string name = "bound-calc-" + a.problem;
    std::vector<Task> tasks;
    tasks.emplace_back([=] {
        Rows rows;
        for (auto n : ns)
            for (double e : eps) {
                ExperimentRecord r{.experiment = name, .n = n, .eps = e};
                std::size_t s1 = 0, extent = n;
                if (a.problem == "hilbert") {
                    s1 = hilbert_s1_bound(n, e);
                } else if (a.problem == "fd") {
                    s1 = fd_poisson_s1_bound(n, e);
                    extent = n - 1;
                } else if (a.problem == "spectral") {
                    s1 = spectral_poisson_s1_bound(n, e);
                    extent = n + 1;
                } else {
                    const std::vector<SpectralSet> sets(3, SpectralSet::interval(a.a, a.b));
                    s1 = tt_storage_bound(sets, {1, 1}, {n, n, n}, e).rank_bound[1];
                }
                r.s1_bound = s1;
                r.storage_bound = cube_storage(extent, s1);
                rows.push_back(r);
            }
        return rows;
    });
    return tasks;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compression and solver experiments; writes CSV"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--output,-o", common.output, "CSV path (default: stdout)");
    app.add_option("--seed", common.seed, "Seed for randomised experiments");
    app.add_flag("--paper-scale", common.paper_scale, "Use the published problem sizes");
    app.add_flag("--no-assert", common.no_assert, "Do not fail when an observed value exceeds its bound");

    FourierArgs fourier;
    std::optional<std::size_t> fourier_n;
    std::optional<double> m_min, m_max, m_step;
    auto* fr = app.add_subcommand("fourier-ratio", "First TT rank of e^{iMπxyz} samples against 2M");
    fr->add_option("--n", fourier_n, "Grid size (desk 120, paper 600)");
    fr->add_option("--m-min", m_min, "Smallest M (desk 5, paper 15)");
    fr->add_option("--m-max", m_max, "Largest M (desk 30, paper 150)");
    fr->add_option("--m-step", m_step, "M increment (desk 5, paper 15)");
    fr->add_option("--eps", fourier.eps, "TT-SVD tolerance");

    GaussArgs gauss;
    std::optional<std::size_t> gauss_n;
    auto* gb = app.add_subcommand("gauss-bumps", "First TT rank of Gaussian-bump samples against the Bessel bound");
    gb->add_option("--n", gauss_n, "Grid size (desk 80, paper 400)");
    gb->add_option("--m", gauss.m, "Number of bumps");
    gb->add_option("--gamma", gauss.gamma, "Bump widths")->delimiter(',');
    gb->add_option("--eps-sweep", gauss.eps_sweep, "Tolerances: list or decade range a:b");

    std::string hilbert_n = "10,100,500", hilbert_eps = "1e-2:1e-13";
    auto* hb = app.add_subcommand("hilbert", "Hilbert tensor ranks and storage against the displacement bound");
    hb->add_option("--n", hilbert_n, "Sizes: list or doubling range a:b");
    hb->add_option("--eps-sweep", hilbert_eps, "Tolerances");

    std::string fd_n = "10,100,500", fd_eps = "1e-2:1e-10";
    auto* pf = app.add_subcommand("poisson-fd", "Finite-difference Poisson solution ranks (fADI solver)");
    pf->add_option("--n", fd_n, "Sizes");
    pf->add_option("--eps-sweep", fd_eps, "Tolerances");

    std::string sp_n = "10,100,500", sp_eps = "1e-2:1e-10";
    auto* ps = app.add_subcommand("poisson-spectral", "Ultraspherical spectral Poisson solution ranks (fADI solver)");
    ps->add_option("--n", sp_n, "Sizes");
    ps->add_option("--eps-sweep", sp_eps, "Tolerances");

    BenchArgs bench;
    auto* bs = app.add_subcommand("bench-solvers", "Wall time of the direct, eigen and fADI solvers");
    bs->add_option("--problem", bench.problem, "spectral or fd");
    bs->add_option("--solvers", bench.solvers, "Comma list of direct, eigen, fadi");
    bs->add_option("--n-sweep", bench.n_sweep, "Sizes (desk 4:256, paper 4:1500)");
    bs->add_option("--eps", bench.eps, "fADI tolerance");
    bs->add_option("--repeat", bench.repeat, "Runs per point; the minimum time is reported");

    BoundArgs bound;
    std::string bound_n = "10", bound_eps = "1e-10";
    auto* bc = app.add_subcommand("bound-calc", "Evaluate s1 and storage bounds without solving");
    bc->add_option("--problem", bound.problem, "hilbert, fd, spectral or interval");
    bc->add_option("--n", bound_n, "Sizes");
    bc->add_option("--eps-sweep", bound_eps, "Tolerances");
    bc->add_option("--a", bound.a, "Interval left endpoint");
    bc->add_option("--b", bound.b, "Interval right endpoint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::vector<Task> tasks;
    bool timed = false;
    try {
        const bool ps_ = common.paper_scale;
        if (*fr) {
            fourier.n = fourier_n.value_or(ps_ ? 600 : 120);
            fourier.m_min = m_min.value_or(ps_ ? 15 : 5);
            fourier.m_max = m_max.value_or(ps_ ? 150 : 30);
            fourier.m_step = m_step.value_or(ps_ ? 15 : 5);
            tasks = fourier_tasks(fourier);
        } else if (*gb) {
            gauss.n = gauss_n.value_or(ps_ ? 400 : 80);
            tasks = gauss_tasks(gauss, common.seed);
        } else if (*hb) {
            tasks = hilbert_tasks(cli::parse_n_sweep(hilbert_n), cli::parse_eps_sweep(hilbert_eps));
        } else if (*pf) {
            tasks = poisson_tasks(Pde::fd, cli::parse_n_sweep(fd_n), cli::parse_eps_sweep(fd_eps));
        } else if (*ps) {
            tasks = poisson_tasks(Pde::spectral, cli::parse_n_sweep(sp_n), cli::parse_eps_sweep(sp_eps));
        } else if (*bs) {
            if (bench.n_sweep.empty()) bench.n_sweep = ps_ ? "4:1500" : "4:256";
            tasks = bench_tasks(bench);
            timed = true;
        } else if (*bc) {
            tasks = bound_tasks(bound, cli::parse_n_sweep(bound_n), cli::parse_eps_sweep(bound_eps));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    // Timings are taken one point at a time so runs do not compete for cores.
    const std::size_t workers = timed ? 1 : cli::worker_count_from_env();
    std::vector<Rows> results;
    try {
        results = cli::run_ordered(tasks, workers);
    } catch (const cli::TaskError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    Rows rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());

    if (common.output.empty()) {
        cli::write_csv(std::cout, rows);
    } else {
        std::ofstream out(common.output, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open " << common.output << "\n";
            return 2;
        }
        cli::write_csv(out, rows);
    }

    int status = 0;
    for (const auto& r : rows) {
        if (!r.violates_bound()) continue;
        std::cerr << (common.no_assert ? "warning" : "error") << ": observed exceeds bound in row: " << cli::csv_row(r)
                  << "\n";
        if (!common.no_assert) status = 3;
    }
    return status;
}
