#ifndef ALSPIA_BENCH_HPP_
#define ALSPIA_BENCH_HPP_

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "alspia/datasets.hpp"
#include "alspia/solver.hpp"

namespace alspia::bench {

/// One benchmark case: example id, optional hole masking ('h' suffix in
/// the textual form), sample sizes, and the control count.
struct BenchCase {
    int example_id = 1;
    bool hole = false;
    std::size_t m = 0;
    std::optional<std::size_t> p;
    int n = 0;
};

inline std::string to_string(const BenchCase& c) {
    std::string s = "ex" + std::to_string(c.example_id) + (c.hole ? "h" : "");
    s += ":" + std::to_string(c.m);
    if (c.p) s += ":" + std::to_string(*c.p);
    s += ":" + std::to_string(c.n);
    return s;
}

/// Parse "1:800:100", "5:50:50:20", "3h:1460:200", with an optional
/// leading "ex".
inline BenchCase parse_case(std::string spec) {
    BenchCase c;
    if (spec.rfind("ex", 0) == 0) spec = spec.substr(2);
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos != std::string::npos) {
        const auto next = spec.find(':', pos);
        parts.push_back(spec.substr(pos, next == std::string::npos ? next : next - pos));
        pos = next == std::string::npos ? next : next + 1;
    }
    if (parts.size() < 3 || parts.size() > 4)
        throw std::invalid_argument("bench case must be id:m:n or id:m:p:n, got " + spec);
    std::string id = parts[0];
    if (!id.empty() && (id.back() == 'h' || id.back() == 'H')) {
        c.hole = true;
        id.pop_back();
    }
    c.example_id = std::stoi(id);
    c.m = std::stoul(parts[1]);
    if (parts.size() == 4) {
        c.p = std::stoul(parts[2]);
        c.n = std::stoi(parts[3]);
    } else {
        c.n = std::stoi(parts[2]);
    }
    if (c.example_id < 1 || c.example_id > 6)
        throw std::invalid_argument("bench case: example id must be 1..6");
    if ((c.example_id >= 5) != c.p.has_value())
        throw std::invalid_argument("bench case: surface examples need id:m:p:n, curves id:m:n");
    if (c.hole && c.example_id != 3 && c.example_id != 4)
        throw std::invalid_argument("bench case: holes only for examples 3 and 4");
    return c;
}

struct MethodRow {
    Method method = Method::LSPIA;
    bool converged = false;
    double final_error = 0.0;
    int iterations = 0;
    int max_iterations = 0;
    double wall_seconds = 0.0;
};

struct CaseOutcome {
    BenchCase c;
    std::vector<MethodRow> rows;
    std::string failure;  // non-empty when the case could not run
    double s_it = 0.0;
    double s_cpu = 0.0;
    bool speedups_valid = false;
};

namespace detail {

inline MethodRow to_row(const FitReport& r) {
    MethodRow row;
    row.method = r.method;
    row.converged = r.converged;
    row.final_error = r.final_error;
    row.iterations = r.iterations;
    row.max_iterations = r.max_iterations;
    row.wall_seconds = r.wall_seconds;
    return row;
}

}  // namespace detail

/// Run LSPIA and ALSPIA (plus singular LSPIA when the instance is rank
/// deficient) on one case. Failures are recorded in the outcome instead of
/// propagating, so a sweep continues past bad cases.
inline CaseOutcome run_case(const BenchCase& c, const FitConfig& base) {
    CaseOutcome out;
    out.c = c;
    try {
        FitConfig cfg = base;
        MethodRow lspia_row, alspia_row;
        bool deficient = false;

        if (c.p) {
            const auto geo = gen_example(c.example_id, c.m, c.p);
            const auto prob = make_surface_problem(geo.grid, c.n);
            cfg.method = Method::LSPIA;
            lspia_row = detail::to_row(
                fit_surface(geo.grid, prob.params_x, prob.params_y, prob.knots_x, prob.knots_y, cfg)
                    .report);
            cfg.method = Method::ALSPIA;
            const auto rep =
                fit_surface(geo.grid, prob.params_x, prob.params_y, prob.knots_x, prob.knots_y, cfg)
                    .report;
            alspia_row = detail::to_row(rep);
            deficient = rep.rank == Rank::RankDeficient;
        } else {
            std::vector<HoleRange> mask;
            if (c.hole) mask = singular_mask(c.example_id, c.m, c.n);
            const auto geo = gen_example(c.example_id, c.m, std::nullopt, mask);
            const auto pts = geo.remaining_points();
            const auto prob = make_curve_problem(pts, mask, c.m, c.n);
            cfg.method = Method::LSPIA;
            lspia_row = detail::to_row(fit_curve(pts, prob.params, prob.knots, cfg).report);
            cfg.method = Method::ALSPIA;
            const auto rep = fit_curve(pts, prob.params, prob.knots, cfg).report;
            alspia_row = detail::to_row(rep);
            deficient = rep.rank == Rank::RankDeficient;
            if (deficient) {
                cfg.method = Method::SingularLSPIA;
                out.rows.push_back(
                    detail::to_row(fit_curve(pts, prob.params, prob.knots, cfg).report));
            }
        }
        out.rows.insert(out.rows.begin(), lspia_row);
        out.rows.push_back(alspia_row);

        if (lspia_row.converged && alspia_row.converged && alspia_row.iterations > 0) {
            out.s_it = static_cast<double>(lspia_row.iterations) /
                       static_cast<double>(alspia_row.iterations);
            out.s_cpu = alspia_row.wall_seconds > 0.0
                            ? lspia_row.wall_seconds / alspia_row.wall_seconds
                            : 0.0;
            out.speedups_valid = true;
        } else if (lspia_row.converged && alspia_row.converged &&
                   lspia_row.iterations == alspia_row.iterations) {
            out.s_it = 1.0;
            out.s_cpu = 1.0;
            out.speedups_valid = true;
        }
    } catch (const std::exception& e) {
        out.failure = e.what();
    }
    return out;
}

inline std::vector<BenchCase> desk_preset() {
    return {
        parse_case("1:800:100"),   parse_case("2:800:100"),   parse_case("3h:1460:200"),
        parse_case("4h:1889:300"), parse_case("5:50:50:30"),  parse_case("6:60:60:20"),
    };
}

/// Full-size runs; the hole cases oversample so that the surviving point
/// count lands near the intended size after masking.
inline std::vector<BenchCase> paper_preset() {
    return {
        parse_case("1:8000:1000"),  parse_case("2:8000:1000"), parse_case("3h:15208:2000"),
        parse_case("4h:20766:3000"), parse_case("5:80:80:20"), parse_case("6:80:80:20"),
    };
}

namespace detail {

inline std::string fmt_err(double e) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", e);
    return buf;
}

inline std::string fmt_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

inline std::string sentinel(int max_iterations) {
    return max_iterations == 10000 ? ">10^4" : ">" + std::to_string(max_iterations);
}

}  // namespace detail

/// Comparison table. Capped runs carry the iteration sentinel and '#' in
/// the value columns; speed-ups appear on the adaptive-step rows.
inline std::string to_csv(const std::vector<CaseOutcome>& outcomes) {
    std::string out = "case,method,E_inf,IT,wall_seconds,S_it,S_cpu\n";
    for (const auto& oc : outcomes) {
        if (!oc.failure.empty()) {
            out += to_string(oc.c) + ",error,#,#,#,#,#\n";
            continue;
        }
        for (const auto& row : oc.rows) {
            out += to_string(oc.c) + "," + alspia::to_string(row.method) + ",";
            if (row.converged) {
                out += detail::fmt_err(row.final_error) + "," + std::to_string(row.iterations) +
                       "," + detail::fmt_fixed(row.wall_seconds) + ",";
            } else {
                out += "#," + detail::sentinel(row.max_iterations) + ",#,";
            }
            if (row.method == Method::ALSPIA && oc.speedups_valid)
                out += detail::fmt_fixed(oc.s_it) + "," + detail::fmt_fixed(oc.s_cpu);
            else
                out += "#,#";
            out += '\n';
        }
    }
    return out;
}

/// Environment cap on bench parallelism.
inline int thread_cap() {
    if (const char* env = std::getenv("ALSPIA_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return static_cast<int>(std::thread::hardware_concurrency());
}

/// Run all cases, sequential by default. With workers > 1 the independent
/// cases run concurrently (each case owns its state); row order follows
/// the case list either way.
inline std::vector<CaseOutcome> run_bench(const std::vector<BenchCase>& cases,
                                          const FitConfig& base, int workers = 1) {
    std::vector<CaseOutcome> out(cases.size());
    workers = std::max(1, std::min({workers, thread_cap(), static_cast<int>(cases.size())}));
    if (workers == 1) {
        for (std::size_t i = 0; i < cases.size(); ++i) out[i] = run_case(cases[i], base);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cases.size()) return;
                out[i] = run_case(cases[i], base);
            }
        });
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace alspia::bench

#endif  // ALSPIA_BENCH_HPP_
