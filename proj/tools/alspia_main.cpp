// Command-line front end: dataset generation, curve/surface fitting,
// method comparison benchmarks, and SVG convergence plots.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alspia/bench.hpp"
#include "alspia/datasets.hpp"
#include "alspia/io.hpp"
#include "alspia/solver.hpp"
#include "alspia/svg.hpp"

namespace {

struct FitFlags {
    std::string input;
    std::string report_path = "report.json";
    std::string controls_path = "controls.csv";
    std::string method = "alspia";
    std::string regime = "auto";
    std::string params = "chord";
    int n = 0;
    double tolerance = 1e-6;
    int max_iterations = 10000;
    int cycle_k = 0;
    double eigen_tol = 1e-8;
    double rank_threshold = 1e-10;
    bool no_timing = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("-i,--input", f.input, "input points CSV")->required();
    cmd->add_option("-n,--n", f.n, "control point count minus one")->required();
    cmd->add_option("--report", f.report_path, "output report JSON path");
    cmd->add_option("--controls", f.controls_path, "output controls CSV path");
    cmd->add_option("--method", f.method, "lspia | singular-lspia | alspia")
        ->check(CLI::IsMember({"lspia", "singular-lspia", "slspia", "alspia"}));
    cmd->add_option("--tolerance", f.tolerance, "relative fitting error target");
    cmd->add_option("--max-iterations", f.max_iterations, "iteration cap");
    cmd->add_option("--cycle-k", f.cycle_k, "step cycle length (0 = automatic)");
    cmd->add_option("--force-regime", f.regime, "auto | singular | nonsingular")
        ->check(CLI::IsMember({"auto", "singular", "nonsingular"}));
    cmd->add_option("--eigen-tol", f.eigen_tol, "eigen estimation tolerance");
    cmd->add_option("--rank-threshold", f.rank_threshold,
                    "relative threshold declaring rank deficiency");
    cmd->add_option("--params", f.params, "chord | uniform parameterization")
        ->check(CLI::IsMember({"chord", "uniform"}));
    cmd->add_flag("--no-timing", f.no_timing, "zero all recorded times (golden-file runs)");
}

alspia::FitConfig to_config(const FitFlags& f) {
    alspia::FitConfig cfg;
    cfg.method = alspia::method_from_string(f.method);
    cfg.tolerance = f.tolerance;
    cfg.max_iterations = f.max_iterations;
    if (f.cycle_k > 0) cfg.cycle_k = f.cycle_k;
    cfg.eigen_tol = f.eigen_tol;
    cfg.rank_threshold = f.rank_threshold;
    cfg.record_timing = !f.no_timing;
    if (f.regime == "singular") cfg.regime = alspia::RegimeChoice::ForceSingular;
    if (f.regime == "nonsingular") cfg.regime = alspia::RegimeChoice::ForceNonsingular;
    return cfg;
}

int run_fit(const FitFlags& flags, bool surface_mode) {
    const auto file = alspia::io::read_points_file(flags.input);
    const auto cfg = to_config(flags);

    alspia::FitResult result;
    alspia::io::ReportDoc doc;
    if (surface_mode) {
        if (!file.is_grid()) throw std::runtime_error("fit-surface: input is not a surface file");
        const auto prob = alspia::make_surface_problem(file.grid, flags.n,
                                                       flags.params == "uniform");
        result = alspia::fit_surface(file.grid, prob.params_x, prob.params_y, prob.knots_x,
                                     prob.knots_y, cfg);
        doc.p = *file.p;
    } else {
        if (file.is_grid()) throw std::runtime_error("fit-curve: input is not a curve file");
        const auto prob = alspia::make_curve_problem(file.points, file.holes, file.m, flags.n,
                                                     flags.params == "uniform");
        result = alspia::fit_curve(file.points, prob.params, prob.knots, cfg);
    }
    doc.report = result.report;
    doc.m = file.m;
    doc.n = flags.n;

    alspia::io::write_report_file(flags.report_path, doc);
    alspia::io::write_points_file(flags.controls_path,
                                  alspia::io::controls_to_point_file(result.controls));
    std::printf("%s: %s in %d iterations, E = %.3e (report: %s)\n",
                alspia::to_string(result.report.method),
                result.report.converged ? "converged" : "did not converge",
                result.report.iterations, result.report.final_error, flags.report_path.c_str());
    return result.report.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"B-spline least-squares fitting by progressive iteration"};
    app.require_subcommand(1);

    // generate
    int gen_example_id = 1;
    std::size_t gen_m = 100;
    std::size_t gen_p = 0;
    int gen_n = 0;
    bool gen_holes = false;
    std::string gen_out = "points.csv";
    auto* gen = app.add_subcommand("generate", "sample one of the six test geometries");
    gen->add_option("--example", gen_example_id, "example id, 1..6")->required();
    gen->add_option("--m", gen_m, "samples minus one in the first direction")->required();
    gen->add_option("--p", gen_p, "samples minus one in the second direction (surfaces)");
    gen->add_flag("--holes", gen_holes, "remove the deterministic hole ranges (examples 3, 4)");
    gen->add_option("-n,--n", gen_n, "intended control count, sizes the holes");
    gen->add_option("-o,--output", gen_out, "output CSV path");

    FitFlags curve_flags, surf_flags;
    auto* fitc = app.add_subcommand("fit-curve", "fit a B-spline curve to a point file");
    add_fit_flags(fitc, curve_flags);
    auto* fits = app.add_subcommand("fit-surface", "fit a tensor-product surface to a grid file");
    add_fit_flags(fits, surf_flags);

    // bench
    std::vector<std::string> bench_specs;
    bool bench_desk = false, bench_paper = false, bench_no_timing = false;
    int bench_parallel = 1;
    double bench_tol = 1e-6;
    int bench_max_it = 10000;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "compare the methods over a list of cases");
    bench->add_option("--case", bench_specs, "case spec id[h]:m[:p]:n (repeatable)");
    bench->add_flag("--desk", bench_desk, "desk-scale preset (default when no cases given)");
    bench->add_flag("--paper-scale", bench_paper, "full-size preset (slow)");
    bench->add_option("--tolerance", bench_tol, "relative fitting error target");
    bench->add_option("--max-iterations", bench_max_it, "iteration cap");
    bench->add_option("--parallel", bench_parallel,
                      "worker threads (capped by ALSPIA_THREADS)");
    bench->add_flag("--no-timing", bench_no_timing, "zero all recorded times");
    bench->add_option("-o,--output", bench_out, "output CSV path (default stdout)");

    // plot
    std::vector<std::string> plot_inputs;
    std::string plot_out = "plot.svg";
    std::string plot_axis = "time";
    std::string plot_title;
    auto* plot = app.add_subcommand("plot", "render convergence histories to SVG");
    plot->add_option("-i,--input", plot_inputs, "report JSON files")->required();
    plot->add_option("-o,--output", plot_out, "output SVG path");
    plot->add_option("--x-axis", plot_axis, "time | iteration")
        ->check(CLI::IsMember({"time", "iteration"}));
    plot->add_option("--title", plot_title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            std::vector<alspia::HoleRange> mask;
            if (gen_holes) {
                if (gen_n <= 0)
                    throw std::runtime_error("generate --holes requires --n to size the holes");
                mask = alspia::singular_mask(gen_example_id, gen_m, gen_n);
            }
            const auto geo = alspia::gen_example(
                gen_example_id, gen_m,
                gen_p > 0 ? std::optional<std::size_t>(gen_p) : std::nullopt, mask);
            alspia::io::PointFile f;
            f.m = gen_m;
            f.holes = geo.mask;
            if (geo.surface) {
                f.kind = alspia::io::PointFile::Kind::Surface;
                f.p = geo.grid.cols - 1;  // --p defaults to --m
                f.grid = geo.grid;
            } else {
                f.kind = alspia::io::PointFile::Kind::Curve;
                f.points = geo.remaining_points();
            }
            alspia::io::write_points_file(gen_out, f);
            std::printf("wrote %s\n", gen_out.c_str());
            return 0;
        }
        if (fitc->parsed()) return run_fit(curve_flags, false);
        if (fits->parsed()) return run_fit(surf_flags, true);
        if (bench->parsed()) {
            std::vector<alspia::bench::BenchCase> cases;
            for (const auto& s : bench_specs) cases.push_back(alspia::bench::parse_case(s));
            if (bench_paper) {
                const auto preset = alspia::bench::paper_preset();
                cases.insert(cases.end(), preset.begin(), preset.end());
            }
            if (bench_desk || cases.empty()) {
                const auto preset = alspia::bench::desk_preset();
                cases.insert(cases.end(), preset.begin(), preset.end());
            }
            alspia::FitConfig base;
            base.tolerance = bench_tol;
            base.max_iterations = bench_max_it;
            base.record_timing = !bench_no_timing;
            const auto outcomes = alspia::bench::run_bench(cases, base, bench_parallel);
            const auto csv = alspia::bench::to_csv(outcomes);
            if (bench_out.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                std::ofstream out(bench_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open for writing: " + bench_out);
                out << csv;
            }
            return 0;
        }
        if (plot->parsed()) {
            std::vector<alspia::svg::Series> series;
            for (const auto& path : plot_inputs) {
                const auto doc = alspia::io::read_report_file(path);
                alspia::svg::Series s;
                s.label = alspia::to_string(doc.report.method);
                s.history = doc.report.history;
                series.push_back(std::move(s));
            }
            alspia::svg::PlotOptions opt;
            opt.x_axis = plot_axis == "iteration" ? alspia::svg::XAxis::Iteration
                                                  : alspia::svg::XAxis::Time;
            opt.title = plot_title;
            std::ofstream out(plot_out, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open for writing: " + plot_out);
            out << alspia::svg::render_convergence(series, opt);
            std::printf("wrote %s\n", plot_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
