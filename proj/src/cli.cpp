#include "shearlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shearlab/harness.hpp"
#include "shearlab/hyp_core.hpp"
#include "shearlab/strip.hpp"
#include "shearlab/surface.hpp"
#include "shearlab/traintrack.hpp"

namespace shearlab::cli {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& field, const std::string& what) : std::runtime_error(field + ": " + what) {}
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct Outcome {
    Table table;
    json summary = json::object();
    bool passed = true;
};

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string to_csv(const Table& t) {
    std::string out;
    for (size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
        out += '\n';
    }
    return out;
}

// NaN and infinities are not JSON; they become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- config access ---------------------------------------------------------

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw UsageError(path + key, "missing field");
    return j.at(key);
}

double as_double(const json& v, const std::string& field) {
    if (!v.is_number()) throw UsageError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw UsageError(field, "expected a finite number");
    return d;
}

long long as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw UsageError(field, "expected an integer");
    return v.get<long long>();
}

std::string as_string(const json& v, const std::string& field) {
    if (!v.is_string()) throw UsageError(field, "expected a string");
    return v.get<std::string>();
}

double number_or(const json& cfg, const std::string& key, double fallback) {
    return cfg.contains(key) ? as_double(cfg.at(key), key) : fallback;
}

long long int_or(const json& cfg, const std::string& key, long long fallback) {
    return cfg.contains(key) ? as_int(cfg.at(key), key) : fallback;
}

std::vector<double> as_vector(const json& v, const std::string& field) {
    if (!v.is_array()) throw UsageError(field, "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

// ---- strips ----------------------------------------------------------------

strip::StripShape parse_strip(const json& cfg) {
    const json& s = require(cfg, "strip", "");
    const long long n = as_int(require(s, "n", "strip."), "strip.n");
    if (n < 1) throw UsageError("strip.n", "must be at least 1");
    const json& sides = require(s, "apex_sides", "strip.");
    if (!sides.is_array() || static_cast<long long>(sides.size()) != n)
        throw UsageError("strip.apex_sides", "expected " + std::to_string(n) + " entries");
    std::vector<strip::Side> apex;
    for (size_t i = 0; i < sides.size(); ++i) {
        const std::string v = as_string(sides[i], "strip.apex_sides");
        if (v != "L" && v != "R") throw UsageError("strip.apex_sides", "entries must be \"L\" or \"R\"");
        apex.push_back(strip::side_from_char(v[0]));
    }
    const std::vector<double> shears = as_vector(require(s, "shears", "strip."), "strip.shears");
    if (static_cast<long long>(shears.size()) != n - 1)
        throw UsageError("strip.shears", "expected n-1 = " + std::to_string(n - 1) + " entries, got " +
                                             std::to_string(shears.size()));
    try {
        return strip::StripShape(strip::WedgeCombinatorics(apex), shears);
    } catch (const std::invalid_argument& e) {
        throw UsageError("strip", e.what());
    }
}

std::vector<double> parse_shears_for(const strip::StripShape& base, const json& v, const std::string& field) {
    std::vector<double> x = as_vector(v, field);
    if (static_cast<int>(x.size()) != base.wedges() - 1)
        throw UsageError(field, "expected n-1 = " + std::to_string(base.wedges() - 1) + " entries, got " +
                                    std::to_string(x.size()));
    return x;
}

Outcome strip_geodesic(const json& cfg, std::uint64_t seed) {
    const strip::StripShape base = parse_strip(cfg);
    const std::vector<double> x = cfg.contains("x") ? parse_shears_for(base, cfg["x"], "x") : base.shears;
    std::vector<std::pair<double, double>> cases;
    if (cfg.contains("cases")) {
        const json& c = cfg["cases"];
        if (!c.is_array()) throw UsageError("cases", "expected an array of [y_minus, y_plus] pairs");
        for (size_t i = 0; i < c.size(); ++i) {
            const auto v = as_vector(c[i], "cases[" + std::to_string(i) + "]");
            if (v.size() != 2) throw UsageError("cases[" + std::to_string(i) + "]", "expected two numbers");
            cases.emplace_back(v[0], v[1]);
        }
    }
    const long long random_cases = int_or(cfg, "random_cases", cases.empty() ? 20 : 0);
    if (random_cases < 0) throw UsageError("random_cases", "must be nonnegative");
    const double range = number_or(cfg, "y_range", 2.0);
    harness::Uniform u(seed);
    for (long long i = 0; i < random_cases; ++i) {
        const double ym = u(-range, range);
        cases.emplace_back(ym, u(-range, range));
    }

    const strip::DevelopedStrip d = strip::develop(base.with_shears(x));
    Outcome o;
    o.table.columns = {"case", "y_minus", "y_plus", "length", "developed_distance", "relative_error", "iterations"};
    double worst = 0;
    for (size_t i = 0; i < cases.size(); ++i) {
        const auto [ym, yp] = cases[i];
        const strip::MinimizeResult r = strip::geodesic_length(base, x, ym, yp);
        const double expect = hyp::dist(d.point_on_leaf(0, 1, ym), d.point_on_leaf(base.wedges(), base.wedges(), yp));
        const double rel = std::abs(r.length - expect) / std::max(expect, 1e-300);
        worst = std::max(worst, rel);
        o.table.rows.push_back({static_cast<int>(i), ym, yp, r.length, expect, rel, r.iterations});
    }
    o.passed = worst <= 1e-8;
    o.summary = {{"cases", cases.size()}, {"max_relative_error", worst}, {"tolerance", 1e-8}};
    return o;
}

Outcome strip_core(const json& cfg, std::uint64_t seed) {
    const strip::StripShape base = parse_strip(cfg);
    if (!base.combinatorics.has_core()) throw UsageError("strip.apex_sides", "a pure fan has no core");
    std::vector<std::vector<double>> xs{base.shears};
    if (cfg.contains("shear_vectors")) {
        const json& v = cfg["shear_vectors"];
        if (!v.is_array()) throw UsageError("shear_vectors", "expected an array of shear vectors");
        for (size_t i = 0; i < v.size(); ++i)
            xs.push_back(parse_shears_for(base, v[i], "shear_vectors[" + std::to_string(i) + "]"));
    }
    const long long random_cases = int_or(cfg, "random_cases", 20);
    if (random_cases < 0) throw UsageError("random_cases", "must be nonnegative");
    const double range = number_or(cfg, "x_range", 2.0);
    harness::Uniform u(seed);
    for (long long i = 0; i < random_cases; ++i) {
        std::vector<double> x(base.wedges() - 1);
        for (auto& e : x) e = u(-range, range);
        xs.push_back(std::move(x));
    }
    Outcome o;
    o.table.columns = {"case", "core_length", "boundary_gap", "relative_error", "iterations"};
    double worst = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const strip::MinimizeResult r = strip::core_length(base, xs[i]);
        const strip::DevelopedStrip d = strip::develop(base.with_shears(xs[i]));
        const double expect = hyp::geodesic_gap(d.leaves.front(), d.leaves.back());
        const double rel = std::abs(r.length - expect) / expect;
        worst = std::max(worst, rel);
        o.table.rows.push_back({static_cast<int>(i), r.length, expect, rel, r.iterations});
    }
    o.passed = worst <= 1e-8;
    o.summary = {{"cases", xs.size()}, {"max_relative_error", worst}, {"tolerance", 1e-8}};
    return o;
}

bool chords_move(const strip::StripShape& base, const std::vector<double>& x1, const strip::PwCurveCoords& y1,
                 const std::vector<double>& x2, const strip::PwCurveCoords& y2) {
    const auto a = strip::shifted_positions(base, x1, y1), b = strip::shifted_positions(base, x2, y2);
    return a.minus != b.minus || a.plus != b.plus;
}

Outcome strip_convexity(const json& cfg, std::uint64_t seed) {
    const strip::StripShape base = parse_strip(cfg);
    const long long segments = int_or(cfg, "segments", 200);
    if (segments < 0) throw UsageError("segments", "must be nonnegative");
    const double xr = number_or(cfg, "x_range", 1.5), yr = number_or(cfg, "y_range", 2.0);
    const int n = base.wedges();
    harness::Uniform u(seed);
    auto draw_x = [&] {
        std::vector<double> x(n - 1);
        for (auto& e : x) e = u(-xr, xr);
        return x;
    };
    auto draw_y = [&] {
        strip::PwCurveCoords y(n);
        for (int i = 0; i < n; ++i) {
            y.minus[i] = u(-yr, yr);
            y.plus[i] = u(-yr, yr);
        }
        return y;
    };
    auto mid_x = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> m(a.size());
        for (size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
        return m;
    };
    auto mid_y = [&](const strip::PwCurveCoords& a, const strip::PwCurveCoords& b) {
        strip::PwCurveCoords m(n);
        for (int i = 0; i < n; ++i) {
            m.minus[i] = 0.5 * (a.minus[i] + b.minus[i]);
            m.plus[i] = 0.5 * (a.plus[i] + b.plus[i]);
        }
        return m;
    };

    Outcome o;
    o.table.columns = {"segment", "functional", "margin", "chords_move"};
    std::map<std::string, double> min_margin;
    bool ok = true;
    auto record = [&](long long k, const std::string& name, double m, bool strict_expected) {
        o.table.rows.push_back({k, name, m, strict_expected});
        auto [it, fresh] = min_margin.emplace(name, m);
        if (!fresh) it->second = std::min(it->second, m);
        if (m < -1e-10 || (strict_expected && m <= 1e-9)) ok = false;
    };
    for (long long k = 0; k < segments; ++k) {
        const auto x1 = draw_x(), x2 = draw_x();
        const auto y1 = draw_y(), y2 = draw_y();
        const auto xm = mid_x(x1, x2);
        const auto ym = mid_y(y1, y2);
        const double joint = 0.5 * (strip::pw_length(base, x1, y1) + strip::pw_length(base, x2, y2)) -
                             strip::pw_length(base, xm, ym);
        record(k, "pw_length", joint, chords_move(base, x1, y1, x2, y2));
        const double e0 = u(-yr, yr), e1 = u(-yr, yr);
        const auto g1 = strip::geodesic_length(base, x1, e0, e1), g2 = strip::geodesic_length(base, x2, e0, e1);
        const double gm = strip::geodesic_length(base, xm, e0, e1).length;
        record(k, "geodesic_length", 0.5 * (g1.length + g2.length) - gm,
               chords_move(base, x1, g1.minimizer, x2, g2.minimizer));
        if (base.combinatorics.has_core()) {
            const auto c1 = strip::core_length(base, x1), c2 = strip::core_length(base, x2);
            const double cm = strip::core_length(base, xm).length;
            record(k, "core_length", 0.5 * (c1.length + c2.length) - cm,
                   chords_move(base, x1, c1.minimizer, x2, c2.minimizer));
        }
    }
    o.passed = ok;
    json mins = json::object();
    for (const auto& [name, m] : min_margin) mins[name] = m;
    o.summary = {{"segments", segments},
                 {"min_margin", mins},
                 {"violation_threshold", -1e-10},
                 {"strict_threshold", 1e-9}};
    return o;
}

// ---- train tracks ----------------------------------------------------------

track::TrainTrack parse_track(const json& cfg) {
    const json& t = require(cfg, "track", "");
    if (t.is_string()) {
        const std::string name = t.get<std::string>();
        if (name == "punctured_torus") return track::examples::punctured_torus();
        if (name == "six_branch") return track::examples::six_branch();
        if (name == "genus_two") return track::examples::genus_two();
        throw UsageError("track", "unknown built-in track '" + name + "'");
    }
    const json& b = require(t, "branches", "track.");
    if (!b.is_array()) throw UsageError("track.branches", "expected an array of ids");
    std::vector<track::BranchId> branches;
    for (const auto& id : b) branches.push_back(as_string(id, "track.branches"));
    const json& s = require(t, "switches", "track.");
    if (!s.is_array()) throw UsageError("track.switches", "expected an array of switches");
    std::vector<track::Switch> switches;
    for (size_t i = 0; i < s.size(); ++i) {
        const std::string f = "track.switches[" + std::to_string(i) + "]";
        const json& in = require(s[i], "in", f + ".");
        if (!in.is_array() || in.size() != 2) throw UsageError(f + ".in", "expected two branch ids");
        switches.push_back({as_string(require(s[i], "out", f + "."), f + ".out"),
                            {as_string(in[0], f + ".in"), as_string(in[1], f + ".in")}});
    }
    try {
        return track::TrainTrack(branches, switches);
    } catch (const std::invalid_argument& e) {
        throw UsageError("track", e.what());
    }
}

std::vector<track::SplitStep> parse_path(const json& p, const std::string& field) {
    if (!p.is_array()) throw UsageError(field, "expected an array of split steps");
    std::vector<track::SplitStep> out;
    for (size_t i = 0; i < p.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        const std::string dir = as_string(require(p[i], "dir", f + "."), f + ".dir");
        if (dir != "L" && dir != "R") throw UsageError(f + ".dir", "must be \"L\" or \"R\"");
        out.push_back({as_string(require(p[i], "branch", f + "."), f + ".branch"),
                       dir == "L" ? track::SplitDirection::Left : track::SplitDirection::Right});
    }
    return out;
}

Outcome track_transport(const json& cfg, std::uint64_t seed) {
    const track::TrainTrack start = parse_track(cfg);
    const json& paths = require(cfg, "paths", "");
    if (!paths.is_array() || paths.size() != 2) throw UsageError("paths", "expected exactly two split paths");
    std::vector<track::TransportResult> ends;
    for (size_t i = 0; i < 2; ++i) {
        const std::string f = "paths[" + std::to_string(i) + "]";
        const auto steps = parse_path(paths[i], f);
        try {
            ends.push_back(track::transport(start, steps));
        } catch (const std::invalid_argument& e) {
            throw UsageError(f, e.what());
        }
    }
    const auto& a = ends[0];
    const auto& b = ends[1];
    if (a.track.canonical_key() != b.track.canonical_key() || a.transport.domain != b.transport.domain ||
        a.measure_carrying.matrix != b.measure_carrying.matrix)
        throw UsageError("paths", "the two paths do not end at the same track");
    const long long samples = int_or(cfg, "samples", 10);
    if (samples < 1) throw UsageError("samples", "must be positive");

    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(a.track.switch_matrix()).kernel();
    harness::Uniform u(seed);
    Outcome o;
    o.table.columns = {"sample", "branch", "path_a", "path_b", "difference"};
    double worst = 0;
    const auto& ids = a.track.branches();
    for (long long k = 0; k < samples; ++k) {
        Eigen::VectorXd c(kernel.cols());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = u(-2, 2);
        const Eigen::VectorXd v = kernel * c;
        track::Weights w;
        for (size_t i = 0; i < ids.size(); ++i) w[ids[i]] = v[static_cast<Eigen::Index>(i)];
        const track::Weights ta = a.transport.apply(w), tb = b.transport.apply(w);
        for (const auto& id : start.branches()) {
            const double diff = std::abs(ta.at(id) - tb.at(id));
            worst = std::max(worst, diff);
            o.table.rows.push_back({k, id, ta.at(id), tb.at(id), diff});
        }
    }
    o.passed = worst <= 1e-12;
    o.summary = {{"max_deviation", worst},
                 {"tolerance", 1e-12},
                 {"samples", samples},
                 {"end_track_branches", a.track.branches().size()},
                 {"weight_space_dimension", a.track.weight_space_dimension()}};
    return o;
}

// ---- surfaces --------------------------------------------------------------

surface::TriangulatedSurface parse_surface(const json& cfg) {
    if (!cfg.contains("surface")) return surface::TriangulatedSurface::punctured_torus();
    const json& s = cfg["surface"];
    if (s.is_string()) {
        const std::string name = s.get<std::string>();
        if (name == "punctured_torus") return surface::TriangulatedSurface::punctured_torus();
        if (name == "thrice_punctured_sphere") return surface::TriangulatedSurface::thrice_punctured_sphere();
        throw UsageError("surface", "unknown built-in surface '" + name + "'");
    }
    const long long n = as_int(require(s, "triangles", "surface."), "surface.triangles");
    const json& g = require(s, "edge_gluings", "surface.");
    if (!g.is_array()) throw UsageError("surface.edge_gluings", "expected an array");
    std::vector<std::array<surface::Incidence, 2>> gluings;
    for (size_t e = 0; e < g.size(); ++e) {
        const std::string f = "surface.edge_gluings[" + std::to_string(e) + "]";
        if (!g[e].is_array() || g[e].size() != 2) throw UsageError(f, "expected two [triangle, side] pairs");
        std::array<surface::Incidence, 2> pair{};
        for (int k = 0; k < 2; ++k) {
            const json& p = g[e][k];
            if (!p.is_array() || p.size() != 2) throw UsageError(f, "expected [triangle, side]");
            pair[k] = {static_cast<int>(as_int(p[0], f)), static_cast<int>(as_int(p[1], f))};
        }
        gluings.push_back(pair);
    }
    std::vector<std::string> names;
    if (s.contains("edge_names"))
        for (const auto& v : s["edge_names"]) names.push_back(as_string(v, "surface.edge_names"));
    std::optional<surface::TriangulatedSurface> out;
    try {
        out.emplace(surface::TriangulatedSurface::from_gluings(static_cast<int>(n), gluings, names));
    } catch (const std::invalid_argument& e) {
        throw UsageError("surface", e.what());
    }
    if (s.contains("puncture_cycles")) {
        auto normalize = [](std::vector<std::vector<int>> cycles) {
            for (auto& c : cycles) std::sort(c.begin(), c.end());
            std::sort(cycles.begin(), cycles.end());
            return cycles;
        };
        std::vector<std::vector<int>> given;
        const json& pc = s["puncture_cycles"];
        if (!pc.is_array()) throw UsageError("surface.puncture_cycles", "expected an array of edge lists");
        for (const auto& c : pc) {
            std::vector<int> cycle;
            if (!c.is_array()) throw UsageError("surface.puncture_cycles", "expected an array of edge lists");
            for (const auto& e : c) cycle.push_back(static_cast<int>(as_int(e, "surface.puncture_cycles")));
            given.push_back(cycle);
        }
        if (normalize(given) != normalize(out->puncture_cycles()))
            throw UsageError("surface.puncture_cycles", "does not match the corner cycles of the gluing");
    }
    return *out;
}

surface::ShearPoint parse_point(const surface::TriangulatedSurface& s, const json& cfg, const std::string& key) {
    const json& v = require(cfg, key, "");
    try {
        if (v.is_object()) {
            std::map<std::string, double> m;
            for (const auto& [name, value] : v.items()) m[name] = as_double(value, key + "." + name);
            return surface::ShearPoint(s, m);
        }
        return surface::ShearPoint(s, as_vector(v, key));
    } catch (const surface::SurfaceError& e) {
        throw UsageError(key, e.what());
    }
}

struct NamedCurve {
    std::string id;
    surface::CurveWord word;
    double weight;
};

std::vector<NamedCurve> parse_curves(const surface::TriangulatedSurface& s, const json& cfg) {
    const json& c = require(cfg, "curves", "");
    if (!c.is_array() || c.empty()) throw UsageError("curves", "expected a nonempty array");
    std::vector<NamedCurve> out;
    for (size_t i = 0; i < c.size(); ++i) {
        const std::string f = "curves[" + std::to_string(i) + "]";
        std::string id = "curve" + std::to_string(i), word;
        double weight = 1.0;
        if (c[i].is_string()) {
            word = c[i].get<std::string>();
        } else {
            word = as_string(require(c[i], "word", f + "."), f + ".word");
            if (c[i].contains("id")) id = as_string(c[i]["id"], f + ".id");
            if (c[i].contains("weight")) weight = as_double(c[i]["weight"], f + ".weight");
        }
        if (weight < 0) throw UsageError(f + ".weight", "must be nonnegative");
        try {
            out.push_back({id, surface::parse_word(s, word), weight});
        } catch (const surface::SurfaceError& e) {
            throw UsageError(f + ".word", e.what());
        }
    }
    return out;
}

// Length, or NaN with the reason when the holonomy is not hyperbolic.
std::pair<double, std::string> try_length(const surface::TriangulatedSurface& s, const surface::ShearPoint& x,
                                          const surface::CurveWord& c) {
    try {
        return {surface::curve_length(s, x, c), "ok"};
    } catch (const surface::NotHyperbolic&) {
        return {std::nan(""), "not_hyperbolic"};
    }
}

Outcome surface_lengths(const json& cfg, std::uint64_t) {
    const auto s = parse_surface(cfg);
    const auto x = parse_point(s, cfg, "x");
    const auto curves = parse_curves(s, cfg);
    Outcome o;
    o.table.columns = {"curve_id", "word", "log_abs_trace", "length", "status"};
    double total = 0;
    bool total_defined = true;
    for (const auto& c : curves) {
        const auto [len, status] = try_length(s, x, c.word);
        o.table.rows.push_back(
            {c.id, surface::to_string(s, c.word), surface::log_abs_trace(s, x, c.word), number(len), status});
        if (status != "ok" && c.weight > 0) total_defined = false;
        if (status == "ok") total += c.weight * len;
    }
    o.summary = {{"curves", curves.size()}, {"multicurve_length", total_defined ? json(total) : json(nullptr)}};
    return o;
}

bool crosses_every_edge(const surface::TriangulatedSurface& s, const surface::CurveWord& c) {
    const auto counts = surface::crossing_counts(s, c);
    return std::all_of(counts.begin(), counts.end(), [](int k) { return k > 0; });
}

Outcome stretch_scan(const json& cfg, std::uint64_t) {
    const auto s = parse_surface(cfg);
    const auto base = parse_point(s, cfg, "base");
    const auto curves = parse_curves(s, cfg);
    const double t_min = number_or(cfg, "t_min", -3.0), t_max = number_or(cfg, "t_max", 3.0);
    const double step = number_or(cfg, "t_step", 0.1);
    if (!(step > 0) || !(t_max > t_min)) throw UsageError("t_step", "need t_min < t_max and a positive step");
    const long long count = std::llround((t_max - t_min) / step) + 1;
    if (count < 3 || count > 1000000) throw UsageError("t_step", "grid must have between 3 and 10^6 points");
    std::vector<double> t(count), u(count);
    for (long long i = 0; i < count; ++i) {
        t[i] = t_min + static_cast<double>(i) * step;
        u[i] = std::exp(t[i]);
    }
    const auto line = surface::DeformationLine::stretch(base);
    const bool nonzero_base =
        std::all_of(base.values().begin(), base.values().end(), [](double v) { return v != 0.0; });

    Outcome o;
    o.table.columns = {"t", "u", "curve_id", "length"};
    json per_curve = json::array();
    for (const auto& c : curves) {
        auto f = [&](double uu) { return surface::curve_length(s, surface::stretch_point_u(line, uu), c.word); };
        const auto scan = surface::convexity_scan(f, u);
        for (long long i = 0; i < count; ++i) o.table.rows.push_back({t[i], u[i], c.id, number(scan.values[i])});
        const bool strict_expected = nonzero_base && crosses_every_edge(s, c.word);
        const auto v = scan.convexity.verdict;
        if (v == harness::Verdict::NotConvex || (strict_expected && v != harness::Verdict::StrictlyConvex))
            o.passed = false;
        json entry = {{"curve_id", c.id}, {"verdict_u", harness::to_string(v)}, {"strict_expected", strict_expected}};
        entry["scan"] = surface::to_json(scan);
        per_curve.push_back(entry);
    }
    o.summary = {{"points", count}, {"parameterization", "u = exp(t)"}, {"curves", per_curve}};
    return o;
}

Outcome earthquake_scan(const json& cfg, std::uint64_t) {
    const auto s = parse_surface(cfg);
    const auto base = parse_point(s, cfg, "base");
    const auto curves = parse_curves(s, cfg);
    const auto direction = as_vector(require(cfg, "direction", ""), "direction");
    std::optional<surface::DeformationLine> line;
    try {
        line.emplace(surface::DeformationLine::earthquake(s, base, direction));
    } catch (const surface::SurfaceError& e) {
        throw UsageError("direction", e.what());
    }
    surface::EarthquakeSide side = surface::EarthquakeSide::Left;
    if (cfg.contains("side")) {
        const std::string v = as_string(cfg["side"], "side");
        if (v == "right")
            side = surface::EarthquakeSide::Right;
        else if (v != "left")
            throw UsageError("side", "must be \"left\" or \"right\"");
    }
    const double t_min = number_or(cfg, "t_min", -2.0), t_max = number_or(cfg, "t_max", 2.0);
    const long long samples = int_or(cfg, "samples", 61);
    if (samples < 3 || !(t_max > t_min)) throw UsageError("samples", "need t_min < t_max and at least 3 samples");
    const auto t = surface::uniform_grid(t_min, t_max, static_cast<int>(samples));

    Outcome o;
    o.table.columns = {"t", "curve_id", "length"};
    json per_curve = json::array();
    for (const auto& c : curves) {
        auto f = [&](double tt) { return surface::curve_length(s, surface::earthquake_point(*line, tt, side), c.word); };
        const auto scan = surface::convexity_scan(f, t);
        for (size_t i = 0; i < t.size(); ++i) o.table.rows.push_back({t[i], c.id, number(scan.values[i])});
        const auto counts = surface::crossing_counts(s, c.word);
        double weighted = 0;
        for (size_t e = 0; e < counts.size(); ++e) weighted += counts[e] * std::abs(direction[e]);
        const bool strict_expected = weighted > 0;
        const auto v = scan.convexity.verdict;
        if (v == harness::Verdict::NotConvex || (strict_expected && v != harness::Verdict::StrictlyConvex))
            o.passed = false;
        json entry = {{"curve_id", c.id},
                      {"verdict", harness::to_string(v)},
                      {"direction_weighted_crossing", weighted},
                      {"strict_expected", strict_expected}};
        entry["scan"] = surface::to_json(scan);
        per_curve.push_back(entry);
    }
    o.summary = {{"points", samples}, {"side", side == surface::EarthquakeSide::Left ? "left" : "right"},
                 {"curves", per_curve}};
    return o;
}

Outcome thurston_estimate(const json& cfg, std::uint64_t) {
    const auto s = parse_surface(cfg);
    const auto g = parse_point(s, cfg, "g");
    const auto h = parse_point(s, cfg, "h");
    const auto curves = parse_curves(s, cfg);
    Outcome o;
    o.table.columns = {"curve_id", "length_g", "length_h", "log_ratio"};
    std::vector<surface::CurveWord> family;
    for (const auto& c : curves) {
        const double lg = surface::curve_length(s, g, c.word), lh = surface::curve_length(s, h, c.word);
        o.table.rows.push_back({c.id, lg, lh, std::log(lh / lg)});
        family.push_back(c.word);
    }
    o.summary = {{"estimate_g_to_h", surface::thurston_distance_estimate(s, g, h, family)},
                 {"estimate_h_to_g", surface::thurston_distance_estimate(s, h, g, family)},
                 {"family_size", family.size()}};
    return o;
}

using Command = std::function<Outcome(const json&, std::uint64_t)>;

const std::vector<std::pair<std::string, Command>>& commands() {
    static const std::vector<std::pair<std::string, Command>> table = {
        {"strip-geodesic", strip_geodesic},     {"strip-core", strip_core},
        {"strip-convexity", strip_convexity},   {"track-transport", track_transport},
        {"surface-lengths", surface_lengths},   {"stretch-scan", stretch_scan},
        {"earthquake-scan", earthquake_scan},   {"thurston-estimate", thurston_estimate},
    };
    return table;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) return false;
    f << content;
    return static_cast<bool>(f);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"shearlab: shear-coordinate experiments"};
    app.require_subcommand(1);
    std::string config_path, out_path, format = "csv";
    std::optional<std::uint64_t> seed_flag;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, cmd] : commands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config")->required();
        sub->add_option("--out", out_path, "output path")->required();
        sub->add_option("--seed", seed_flag, "random seed");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        subs[name] = sub;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }
    std::string name;
    Command cmd;
    for (const auto& [n, c] : commands())
        if (subs[n]->parsed()) {
            name = n;
            cmd = c;
        }

    json config;
    {
        std::ifstream f(config_path);
        if (!f) {
            err << "config: cannot read " << config_path << '\n';
            return kExitUsage;
        }
        try {
            config = json::parse(f);
        } catch (const json::parse_error& e) {
            err << "config: " << e.what() << '\n';
            return kExitUsage;
        }
    }

    Outcome result;
    std::uint64_t seed = 1;
    try {
        const json& schema = require(config, "schema", "");
        if (!schema.is_number_integer() || schema.get<long long>() != 1)
            throw UsageError("schema", "unsupported schema version (expected 1)");
        if (config.contains("seed")) {
            if (!config["seed"].is_number_unsigned() && !(config["seed"].is_number_integer() && config["seed"].get<long long>() >= 0))
                throw UsageError("seed", "expected a nonnegative integer");
            seed = config["seed"].get<std::uint64_t>();
        }
        if (seed_flag) seed = *seed_flag;
        result = cmd(config, seed);
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "config: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << '\n';
        return kExitPropertyFailed;
    }

    json summary = {{"schema", 1}, {"subcommand", name}, {"seed", seed}, {"rows", result.table.rows.size()},
                    {"passed", result.passed}};
    summary.update(result.summary);
    bool written;
    if (format == "json") {
        json doc = {{"schema", 1}, {"columns", result.table.columns}, {"rows", result.table.rows}, {"summary", summary}};
        written = write_file(out_path, doc.dump(2) + "\n");
    } else {
        written = write_file(out_path, to_csv(result.table)) &&
                  write_file(out_path + ".summary.json", summary.dump(2) + "\n");
    }
    if (!written) {
        err << "out: cannot write " << out_path << '\n';
        return kExitUsage;
    }
    out << name << ": " << (result.passed ? "passed" : "FAILED") << " (" << result.table.rows.size() << " rows)\n";
    return result.passed ? kExitOk : kExitPropertyFailed;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace shearlab::cli
