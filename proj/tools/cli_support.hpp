#pragma once

// Plumbing for the experiment runner: CSV records, sweep parsing and an
// ordered worker pool.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ttz::cli {

inline const char* const kCsvHeader =
    "experiment,n,eps,M,gamma,seed,s1_observed,s1_bound,storage_observed,storage_bound,residual,time_ms";

struct ExperimentRecord {
    std::string experiment;
    std::optional<std::size_t> n;
    std::optional<double> eps;
    std::optional<double> m;
    std::optional<double> gamma;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> s1_observed;
    std::optional<std::size_t> s1_bound;
    std::optional<std::size_t> storage_observed;
    std::optional<std::size_t> storage_bound;
    std::optional<double> residual;
    std::optional<double> time_ms;

    [[nodiscard]] bool violates_bound() const {
        return (s1_observed && s1_bound && *s1_observed > *s1_bound) ||
               (storage_observed && storage_bound && *storage_observed > *storage_bound);
    }
};

/// Shortest-round-trip is not required; %.17g always round-trips binary64.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_row(const ExperimentRecord& r) {
    std::string line = quote_field(r.experiment);
    auto add_int = [&](const auto& v) {
        line += ',';
        if (v) line += std::to_string(*v);
    };
    auto add_real = [&](const std::optional<double>& v) {
        line += ',';
        if (v) line += format_double(*v);
    };
    add_int(r.n);
    add_real(r.eps);
    add_real(r.m);
    add_real(r.gamma);
    add_int(r.seed);
    add_int(r.s1_observed);
    add_int(r.s1_bound);
    add_int(r.storage_observed);
    add_int(r.storage_bound);
    add_real(r.residual);
    add_real(r.time_ms);
    return line;
}

inline void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& rows) {
    os << kCsvHeader << "\r\n";
    for (const auto& r : rows) os << csv_row(r) << "\r\n";
}

// ---------------------------------------------------------------------------
// Sweeps

class SweepError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

inline double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw SweepError("not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw SweepError("not a number: '" + s + "'");
    return v;
}

inline std::size_t parse_size(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw SweepError("not a nonnegative integer: '" + s + "'");
    try {
        return static_cast<std::size_t>(std::stoull(s));
    } catch (const std::exception&) {
        throw SweepError("integer out of range: '" + s + "'");
    }
}

}  // namespace detail

/// "a,b,c" as listed, or "a:b" as decades from a down (or up) to b.
/// Decade values are produced by decimal parsing so 1e-3 is the double nearest 10⁻³.
inline std::vector<double> parse_eps_sweep(const std::string& spec) {
    if (spec.find(':') != std::string::npos) {
        const auto parts = detail::split(spec, ':');
        if (parts.size() != 2) throw SweepError("range must look like a:b, got '" + spec + "'");
        const double a = detail::parse_real(parts[0]), b = detail::parse_real(parts[1]);
        if (!(a > 0 && b > 0)) throw SweepError("decade range needs positive endpoints");
        const double ea = std::log10(a), eb = std::log10(b);
        const long pa = std::lround(ea), pb = std::lround(eb);
        if (std::abs(ea - static_cast<double>(pa)) > 1e-9 || std::abs(eb - static_cast<double>(pb)) > 1e-9)
            throw SweepError("decade range endpoints must be powers of ten, got '" + spec + "'");
        std::vector<double> out;
        const long step = pa >= pb ? -1 : 1;
        for (long p = pa;; p += step) {
            out.push_back(detail::parse_real("1e" + std::to_string(p)));
            if (p == pb) break;
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& p : detail::split(spec, ',')) out.push_back(detail::parse_real(p));
    if (out.empty()) throw SweepError("empty sweep");
    return out;
}

/// "a,b,c" as listed, or "a:b" as a, 2a, 4a, … up to b, with b appended when it is not on the ladder.
inline std::vector<std::size_t> parse_n_sweep(const std::string& spec) {
    if (spec.find(':') != std::string::npos) {
        const auto parts = detail::split(spec, ':');
        if (parts.size() != 2) throw SweepError("range must look like a:b, got '" + spec + "'");
        const std::size_t a = detail::parse_size(parts[0]), b = detail::parse_size(parts[1]);
        if (a == 0 || a > b) throw SweepError("size range needs 0 < a <= b, got '" + spec + "'");
        std::vector<std::size_t> out;
        for (std::size_t v = a; v <= b; v *= 2) out.push_back(v);
        if (out.back() != b) out.push_back(b);
        return out;
    }
    std::vector<std::size_t> out;
    for (const auto& p : detail::split(spec, ',')) out.push_back(detail::parse_size(p));
    if (out.empty()) throw SweepError("empty sweep");
    return out;
}

inline std::vector<double> parse_real_list(const std::string& spec) {
    std::vector<double> out;
    for (const auto& p : detail::split(spec, ',')) out.push_back(detail::parse_real(p));
    if (out.empty()) throw SweepError("empty list");
    return out;
}

// ---------------------------------------------------------------------------
// Worker pool

/// Worker count from TZ_THREADS (if set and positive), else the hardware concurrency.
inline std::size_t worker_count_from_env() {
    if (const char* env = std::getenv("TZ_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Thrown by run_ordered for the first failing task in submission order.
class TaskError : public std::runtime_error {
public:
    TaskError(std::size_t index, const std::string& what) : std::runtime_error(what), index_(index) {}
    [[nodiscard]] std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Runs every task on up to `workers` threads and returns results in submission order.
template <typename T>
std::vector<T> run_ordered(const std::vector<std::function<T()>>& tasks, std::size_t workers) {
    std::vector<std::optional<T>> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                results[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, tasks.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::vector<T> out;
    out.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw TaskError(i, e.what());
            } catch (...) {
                throw TaskError(i, "unknown error");
            }
        }
        out.push_back(std::move(*results[i]));
    }
    return out;
}

}  // namespace ttz::cli
