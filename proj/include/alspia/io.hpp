#ifndef ALSPIA_IO_HPP_
#define ALSPIA_IO_HPP_

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alspia/bspline.hpp"
#include "alspia/geometry.hpp"
#include "alspia/solver.hpp"

namespace alspia::io {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// In-memory form of a point-cloud file: either an ordered curve point set
/// or an h-major surface grid, plus the removed index ranges for masked
/// curve data.
struct PointFile {
    enum class Kind { Curve, Surface, Controls };
    Kind kind = Kind::Curve;
    std::size_t m = 0;                 // declared original index bound
    std::optional<std::size_t> p;      // surface only
    PointSet points;                   // curve / controls rows
    PointGrid grid;                    // surface rows
    std::vector<HoleRange> holes;

    bool is_grid() const { return p.has_value(); }
};

inline const char* kind_token(PointFile::Kind k) {
    switch (k) {
        case PointFile::Kind::Curve: return "curve";
        case PointFile::Kind::Surface: return "surface";
        case PointFile::Kind::Controls: return "controls";
    }
    return "?";
}

inline std::string format_holes(const std::vector<HoleRange>& holes) {
    std::string s;
    for (std::size_t i = 0; i < holes.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(holes[i].first);
        s += '-';
        s += std::to_string(holes[i].last);
    }
    return s;
}

inline std::vector<HoleRange> parse_holes(const std::string& spec) {
    std::vector<HoleRange> holes;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto dash = tok.find('-');
        if (dash == std::string::npos) throw std::runtime_error("bad hole range: " + tok);
        HoleRange h;
        h.first = std::stoul(tok.substr(0, dash));
        h.last = std::stoul(tok.substr(dash + 1));
        holes.push_back(h);
    }
    return holes;
}

/// Point-cloud CSV. Header line:
///   # alspia-points v1 <curve|surface|controls> dim=<2|3> m=<m> [p=<p>]
/// then one x,y[,z] row per point; surface rows are h-major (h outer, l
/// inner). Masked curve points are omitted from the rows and their
/// original index ranges recorded in a trailing "# holes:" comment.
inline std::string write_points_text(const PointFile& f) {
    std::string out = "# alspia-points v1 ";
    out += kind_token(f.kind);
    out += " dim=" + std::to_string(f.is_grid() ? f.grid.dim : f.points.dim);
    out += " m=" + std::to_string(f.m);
    if (f.p) out += " p=" + std::to_string(*f.p);
    out += '\n';
    if (f.is_grid()) {
        for (std::size_t h = 0; h < f.grid.rows; ++h)
            for (std::size_t l = 0; l < f.grid.cols; ++l) {
                out += fmt_double(f.grid.at(0, h, l));
                for (int c = 1; c < f.grid.dim; ++c) {
                    out += ',';
                    out += fmt_double(f.grid.at(c, h, l));
                }
                out += '\n';
            }
    } else {
        for (std::size_t j = 0; j < f.points.size(); ++j) {
            out += fmt_double(f.points.coord(0, j));
            for (int c = 1; c < f.points.dim; ++c) {
                out += ',';
                out += fmt_double(f.points.coord(c, j));
            }
            out += '\n';
        }
    }
    if (!f.holes.empty()) out += "# holes: " + format_holes(f.holes) + "\n";
    return out;
}

inline PointFile read_points_text(const std::string& text) {
    std::stringstream in(text);
    std::string line;
    PointFile f;
    bool saw_header = false;
    int dim = 0;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ls(line);
            std::string hash, tag;
            ls >> hash >> tag;
            if (tag == "alspia-points") {
                std::string version, kind;
                ls >> version >> kind;
                if (version != "v1") throw std::runtime_error("unsupported points version");
                if (kind == "curve")
                    f.kind = PointFile::Kind::Curve;
                else if (kind == "surface")
                    f.kind = PointFile::Kind::Surface;
                else if (kind == "controls")
                    f.kind = PointFile::Kind::Controls;
                else
                    throw std::runtime_error("unknown points kind: " + kind);
                std::string kv;
                while (ls >> kv) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) continue;
                    const std::string key = kv.substr(0, eq);
                    const std::string val = kv.substr(eq + 1);
                    if (key == "dim")
                        dim = std::stoi(val);
                    else if (key == "m")
                        f.m = std::stoul(val);
                    else if (key == "p")
                        f.p = std::stoul(val);
                }
                saw_header = true;
            } else if (tag == "holes:") {
                std::string spec;
                ls >> spec;
                f.holes = parse_holes(spec);
            }
            continue;
        }
        if (!saw_header) throw std::runtime_error("point rows before header");
        std::array<double, 3> row{0.0, 0.0, 0.0};
        std::stringstream ls(line);
        std::string cell;
        int c = 0;
        while (std::getline(ls, cell, ',') && c < 3) row[static_cast<std::size_t>(c++)] = std::stod(cell);
        if (c != dim) throw std::runtime_error("bad point row: " + line);
        rows.push_back(row);
    }
    if (!saw_header) throw std::runtime_error("missing alspia-points header");
    if (dim != 2 && dim != 3) throw std::runtime_error("bad dim in points file");

    if (f.p) {
        const std::size_t rcount = f.m + 1, ccount = *f.p + 1;
        if (rows.size() != rcount * ccount)
            throw std::runtime_error("surface row count does not match m/p header");
        f.grid = PointGrid(dim, rcount, ccount);
        for (std::size_t h = 0; h < rcount; ++h)
            for (std::size_t l = 0; l < ccount; ++l)
                for (int c = 0; c < dim; ++c)
                    f.grid.at(c, h, l) = rows[h * ccount + l][static_cast<std::size_t>(c)];
    } else {
        std::size_t removed = 0;
        for (const auto& h : f.holes) removed += h.count();
        if (rows.size() + removed != f.m + 1)
            throw std::runtime_error("curve row count does not match m header and holes");
        f.points = PointSet(dim, rows.size());
        for (std::size_t j = 0; j < rows.size(); ++j)
            for (int c = 0; c < dim; ++c)
                f.points.coord(c, j) = rows[j][static_cast<std::size_t>(c)];
    }
    return f;
}

inline void write_points_file(const std::string& path, const PointFile& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << write_points_text(f);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline PointFile read_points_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return read_points_text(ss.str());
}

/// Fit report with the problem sizes it was produced from.
struct ReportDoc {
    FitReport report;
    std::size_t m = 0;
    int n = 0;
    std::optional<std::size_t> p;
};

inline nlohmann::json report_to_json(const ReportDoc& doc) {
    const FitReport& r = doc.report;
    nlohmann::json j;
    j["method"] = to_string(r.method);
    j["m"] = doc.m;
    j["n"] = doc.n;
    if (doc.p) j["p"] = *doc.p;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["final_error"] = r.final_error;
    j["u"] = r.bounds.u;
    j["v"] = r.bounds.v;
    j["cycle_k"] = r.cycle_k;
    j["regime"] = to_string(r.rank);
    j["schedule"] = to_string(r.schedule_kind);
    j["tolerance"] = r.tolerance;
    j["max_iterations"] = r.max_iterations;
    j["eigen_seed"] = 0xA15;
    j["error_definition"] = "squared Frobenius norm of the back-projected residual over its initial value";
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& h : r.history) hist.push_back({h.iteration, h.error, h.seconds});
    j["error_history"] = std::move(hist);
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

inline ReportDoc report_from_json(const nlohmann::json& j) {
    ReportDoc doc;
    doc.report.method = method_from_string(j.at("method").get<std::string>());
    doc.m = j.at("m").get<std::size_t>();
    doc.n = j.at("n").get<int>();
    if (j.contains("p")) doc.p = j.at("p").get<std::size_t>();
    doc.report.converged = j.at("converged").get<bool>();
    doc.report.iterations = j.at("iterations").get<int>();
    doc.report.final_error = j.at("final_error").get<double>();
    doc.report.bounds.u = j.at("u").get<double>();
    doc.report.bounds.v = j.at("v").get<double>();
    doc.report.cycle_k = j.at("cycle_k").get<int>();
    doc.report.tolerance = j.at("tolerance").get<double>();
    doc.report.max_iterations = j.at("max_iterations").get<int>();
    for (const auto& h : j.at("error_history")) {
        HistoryEntry e;
        e.iteration = h.at(0).get<int>();
        e.error = h.at(1).get<double>();
        e.seconds = h.at(2).get<double>();
        doc.report.history.push_back(e);
    }
    doc.report.wall_seconds = j.at("wall_seconds").get<double>();
    return doc;
}

inline void write_report_file(const std::string& path, const ReportDoc& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << report_to_json(doc).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline ReportDoc read_report_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    in >> j;
    return report_from_json(j);
}

/// Controls as a point file (curve sequence or square surface grid).
inline PointFile controls_to_point_file(const ControlNet& net) {
    PointFile f;
    f.kind = PointFile::Kind::Controls;
    f.m = net.count_u - 1;
    if (net.is_surface) {
        f.p = net.count_v - 1;
        f.grid = PointGrid(net.dim, net.count_u, net.count_v);
        for (int c = 0; c < net.dim; ++c) f.grid.ch[static_cast<std::size_t>(c)] = net.ch[static_cast<std::size_t>(c)];
    } else {
        f.points = PointSet(net.dim, net.count_u);
        for (int c = 0; c < net.dim; ++c) f.points.ch[static_cast<std::size_t>(c)] = net.ch[static_cast<std::size_t>(c)];
    }
    return f;
}

}  // namespace alspia::io

#endif  // ALSPIA_IO_HPP_
