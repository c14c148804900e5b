// Runs the nine acceptance checks and prints one PASS/FAIL line for each.
// Exit status is the number of failed checks.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "shearlab/cli.hpp"
#include "shearlab/harness.hpp"
#include "shearlab/hyp_core.hpp"
#include "shearlab/strip.hpp"
#include "shearlab/surface.hpp"
#include "shearlab/traintrack.hpp"

using namespace shearlab;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail << "first failure: " << what << "; ";
        ok = ok && cond;
    }
};

// ---- strips ----------------------------------------------------------------

strip::StripShape random_shape(harness::Uniform& u, int max_n, double bound) {
    while (true) {
        const int n = 2 + static_cast<int>(u() * (max_n - 1));
        std::vector<strip::Side> sides(n);
        for (auto& s : sides) s = u() < 0.5 ? strip::Side::Left : strip::Side::Right;
        strip::WedgeCombinatorics c(sides);
        if (!c.has_core()) continue;
        std::vector<double> x(n - 1);
        for (auto& v : x) v = u(-bound, bound);
        return {c, x};
    }
}

std::vector<double> random_shears(harness::Uniform& u, int n, double bound) {
    std::vector<double> x(n - 1);
    for (auto& v : x) v = u(-bound, bound);
    return x;
}

strip::PwCurveCoords random_coords(harness::Uniform& u, int n, double bound) {
    strip::PwCurveCoords y(n);
    for (int i = 0; i < n; ++i) {
        y.minus[i] = u(-bound, bound);
        y.plus[i] = u(-bound, bound);
    }
    return y;
}

hyp::IdealPoint far_vertex(const strip::DevelopedStrip& d, int i) {
    return d.shape.combinatorics.apex_sides[i - 1] == strip::Side::Left ? d.leaves[i].from() : d.leaves[i].to();
}

hyp::IdealPoint back_vertex(const strip::DevelopedStrip& d, int i) {
    return d.shape.combinatorics.apex_sides[i - 1] == strip::Side::Left ? d.leaves[i - 1].from()
                                                                         : d.leaves[i - 1].to();
}

double max_coord_gap(const strip::PwCurveCoords& a, const strip::PwCurveCoords& b) {
    double g = 0;
    for (int i = 0; i < a.wedges(); ++i)
        g = std::max({g, std::abs(a.minus[i] - b.minus[i]), std::abs(a.plus[i] - b.plus[i])});
    return g;
}

bool chords_move(const strip::StripShape& base, const std::vector<double>& x1, const strip::PwCurveCoords& y1,
                 const std::vector<double>& x2, const strip::PwCurveCoords& y2) {
    const auto a = strip::shifted_positions(base, x1, y1), b = strip::shifted_positions(base, x2, y2);
    return a.minus != b.minus || a.plus != b.plus;
}

// ---- criteria --------------------------------------------------------------

void wedge_convexity(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    auto f = [](const Eigen::VectorXd& p) { return hyp::wedge_distance(p[0], p[1]); };
    const auto rep = harness::probe_segments(f, harness::segment_sampler({{-3, -3}, {3, 3}}, 1000, 101));
    c.require(rep.min_midpoint_margin > 1e-9, "midpoint margin");
    harness::Uniform u(102);
    double min_eig = INFINITY;
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd p(2);
        p << u(-3, 3), u(-3, 3);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(harness::fd_hessian(f, p, 1e-4));
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    c.require(min_eig > 0, "Hessian not positive definite");
    c.require(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1), "slower than 1 s");
    c.detail << "min margin " << rep.min_midpoint_margin << ", min Hessian eigenvalue " << min_eig;
}

void developing_round_trip(Check& c) {
    harness::Uniform u(201);
    double worst_trip = 0, worst_cr = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_shape(u, 8, 2.0);
        const auto d = strip::develop(s);
        for (int j = 1; j < s.wedges(); ++j) {
            worst_trip = std::max(worst_trip, std::abs(strip::measure_shear(d, j) - s.shears[j - 1]));
            const auto& leaf = d.leaves[j];
            const double cr = hyp::cross_ratio(leaf.to(), leaf.from(), back_vertex(d, j), far_vertex(d, j + 1));
            worst_cr = std::max(worst_cr, std::abs(strip::measure_shear(d, j) - std::log(std::abs(cr))));
        }
    }
    c.require(worst_trip <= 1e-10, "round trip");
    c.require(worst_cr <= 1e-10, "cross-ratio oracle");
    c.detail << "round trip " << worst_trip << ", cross ratio " << worst_cr;
}

void variational_length(Check& c) {
    harness::Uniform u(301);
    double geo = 0, core = 0, restart = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto base = random_shape(u, 8, 2.0);
        const int n = base.wedges();
        const auto x = random_shears(u, n, 2.0);
        const double ym = u(-2, 2), yp = u(-2, 2);
        const auto d = strip::develop(base.with_shears(x));

        const auto g = strip::geodesic_length(base, x, ym, yp);
        const double gd = hyp::dist(d.point_on_leaf(0, 1, ym), d.point_on_leaf(n, n, yp));
        geo = std::max(geo, std::abs(g.length - gd) / gd);

        const auto k = strip::core_length(base, x);
        const double kd = hyp::geodesic_gap(d.leaves.front(), d.leaves.back());
        core = std::max(core, std::abs(k.length - kd) / kd);

        for (int r = 0; r < 10; ++r) {
            strip::MinimizeOptions opts;
            opts.initial = random_coords(u, n, 5.0);
            restart = std::max(restart, max_coord_gap(strip::geodesic_length(base, x, ym, yp, opts).minimizer,
                                                      g.minimizer));
            restart = std::max(restart, max_coord_gap(strip::core_length(base, x, opts).minimizer, k.minimizer));
        }
    }
    c.require(geo <= 1e-8, "geodesic_length vs developed distance");
    c.require(core <= 1e-8, "core_length vs boundary gap");
    c.require(restart <= 1e-7, "restart disagreement");
    c.detail << "geodesic rel " << geo << ", core rel " << core << ", restart spread " << restart;
}

void strip_joint_convexity(Check& c) {
    harness::Uniform u(401);
    double joint_min = INFINITY, strict_min = INFINITY, geo_min = INFINITY, core_min = INFINITY;
    int strict_count = 0;
    auto midpoint = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> m(a.size());
        for (size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
        return m;
    };
    auto observe = [&](double m, bool moves, double& bucket) {
        bucket = std::min(bucket, m);
        if (moves) {
            ++strict_count;
            strict_min = std::min(strict_min, m);
        }
    };
    for (int k = 0; k < 1000; ++k) {
        const auto base = random_shape(u, 6, 1.5);
        const int n = base.wedges();
        const auto x1 = random_shears(u, n, 1.5), x2 = random_shears(u, n, 1.5);
        const auto y1 = random_coords(u, n, 2.0), y2 = random_coords(u, n, 2.0);
        const auto xm = midpoint(x1, x2);
        strip::PwCurveCoords ym(n);
        ym.minus = midpoint(y1.minus, y2.minus);
        ym.plus = midpoint(y1.plus, y2.plus);
        observe(0.5 * (strip::pw_length(base, x1, y1) + strip::pw_length(base, x2, y2)) -
                    strip::pw_length(base, xm, ym),
                chords_move(base, x1, y1, x2, y2), joint_min);

        const double e0 = u(-2, 2), e1 = u(-2, 2);
        const auto g1 = strip::geodesic_length(base, x1, e0, e1), g2 = strip::geodesic_length(base, x2, e0, e1);
        observe(0.5 * (g1.length + g2.length) - strip::geodesic_length(base, xm, e0, e1).length,
                chords_move(base, x1, g1.minimizer, x2, g2.minimizer), geo_min);
        const auto c1 = strip::core_length(base, x1), c2 = strip::core_length(base, x2);
        observe(0.5 * (c1.length + c2.length) - strip::core_length(base, xm).length,
                chords_move(base, x1, c1.minimizer, x2, c2.minimizer), core_min);
    }
    c.require(joint_min >= -1e-10, "pw_length violation");
    c.require(geo_min >= -1e-10, "geodesic_length violation");
    c.require(core_min >= -1e-10, "core_length violation");
    c.require(strict_min > 1e-9, "strict margin where a chord endpoint moves");
    c.detail << "min margins pw " << joint_min << ", geodesic " << geo_min << ", core " << core_min
             << ", strict cases " << strict_count << " min " << strict_min;
}

Eigen::MatrixXd kernel(const track::TrainTrack& t) { return Eigen::FullPivLU<Eigen::MatrixXd>(t.switch_matrix()).kernel(); }

track::Weights random_valid(harness::Uniform& u, const track::TrainTrack& t) {
    const Eigen::MatrixXd k = kernel(t);
    Eigen::VectorXd coeff(k.cols());
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = u(-2, 2);
    const Eigen::VectorXd v = k * coeff;
    track::Weights w;
    for (size_t i = 0; i < t.branches().size(); ++i) w[t.branches()[i]] = v[static_cast<Eigen::Index>(i)];
    return w;
}

void enumerate(const track::TrainTrack& t, std::vector<track::SplitStep>& prefix, int depth,
               std::vector<std::vector<track::SplitStep>>& out) {
    out.push_back(prefix);
    if (depth == 0) return;
    for (const auto& b : t.large_branches())
        for (auto dir : {track::SplitDirection::Left, track::SplitDirection::Right}) {
            prefix.push_back({b, dir});
            enumerate(track::split(t, b, dir).track, prefix, depth - 1, out);
            prefix.pop_back();
        }
}

void train_track_algebra(Check& c) {
    using track::SplitDirection;
    harness::Uniform u(501);
    // Same triangulation as six_branch with two disjoint large branches.
    const auto two_large = track::TrainTrack::from_faces(
        {{"1", "n1", "n0"}, {"2", "n2", "n1"}, {"3", "n0", "n2"}, {"1", "2", "3"}}, {2, 0, 1, 1});
    const std::vector<track::TrainTrack> tracks = {track::examples::punctured_torus(), track::examples::six_branch(),
                                                   two_large, track::examples::genus_two()};

    double residual = 0, sign_err = 0;
    int sign_cases = 0;
    for (const auto& t : tracks)
        for (const auto& e : t.large_branches()) {
            const auto ends = t.ends(e);
            const int v1 = std::min(ends[0].sw, ends[1].sw), v2 = std::max(ends[0].sw, ends[1].sw);
            const auto& nw = t.switches()[v1].in[1];
            const auto& ne = t.switches()[v2].in[0];
            for (auto dir : {SplitDirection::Left, SplitDirection::Right}) {
                const auto r = track::split(t, e, dir);
                for (int i = 0; i < 100; ++i) {
                    const auto s = random_valid(u, t);
                    const auto fwd = r.shear_forward.apply(s);
                    residual = std::max(residual, track::switch_residual(r.track, fwd));
                    const double sign = dir == SplitDirection::Left ? 1.0 : -1.0;
                    sign_err = std::max(sign_err, std::abs(fwd.at(e) - sign * (s.at(ne) - s.at(nw))));
                    ++sign_cases;
                }
            }
        }
    c.require(residual <= 1e-12, "switch residual after split");
    c.require(sign_err <= 1e-12, "central shear sign");

    double path_dev = 0;
    int pairs = 0;
    for (const auto& start : tracks) {
        if (start.branches().size() > 8) continue;
        std::vector<std::vector<track::SplitStep>> paths;
        std::vector<track::SplitStep> prefix;
        enumerate(start, prefix, 4, paths);
        for (const auto& p : paths) {
            auto before = start;
            for (size_t i = 0; i + 1 < p.size(); ++i) {
                if (p[i].branch != p[i + 1].branch && before.is_large(p[i + 1].branch)) {
                    auto q = p;
                    std::swap(q[i], q[i + 1]);
                    const auto rp = track::transport(start, p), rq = track::transport(start, q);
                    if (rp.track.canonical_key() != rq.track.canonical_key() ||
                        rp.transport.domain != rq.transport.domain) {
                        c.require(false, "commuting splits reach different tracks");
                        continue;
                    }
                    const Eigen::MatrixXd diff = (rp.transport.matrix - rq.transport.matrix) * kernel(rp.track);
                    path_dev = std::max(path_dev, diff.cwiseAbs().maxCoeff());
                    ++pairs;
                }
                before = track::split(before, p[i].branch, p[i].dir).track;
            }
        }
    }
    c.require(pairs > 0 && path_dev <= 1e-12, "path independence");

    const auto dual = track::dual(track::examples::genus_two());
    c.require(dual.edges.size() == 18 && dual.faces.size() == 12 && dual.vertex_count == 4, "genus-2 dual counts");
    c.detail << "residual " << residual << ", sign cases " << sign_cases << " err " << sign_err << ", path pairs "
             << pairs << " dev " << path_dev << ", dual " << dual.edges.size() << "/" << dual.faces.size() << "/"
             << dual.vertex_count;
}

// Plain 2x2 product over the turn letters of a word at the zero shear point.
double zero_point_trace(const std::string& word) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity(), l, r;
    l << 1, 1, 0, 1;
    r << 1, 0, 1, 1;
    std::istringstream in(word);
    std::string edge, turn;
    while (in >> edge >> turn) m = m * (turn == "L" ? l : r);
    return m.trace();
}

const surface::TriangulatedSurface& torus() {
    static const auto t = surface::TriangulatedSurface::punctured_torus();
    return t;
}

surface::ShearPoint random_point(harness::Uniform& u, double bound) {
    const Eigen::MatrixXd q = surface::relation_subspace(torus());
    const Eigen::VectorXd v = q * Eigen::Vector2d(u(-bound, bound), u(-bound, bound));
    return surface::ShearPoint(torus(), std::vector<double>(v.data(), v.data() + v.size()));
}

const char* kGenerators[] = {"a R b L", "b R c L", "c R a L"};
const char* kAllEdges = "c R a R b L a L";

void punctured_torus_lengths(Check& c) {
    const surface::ShearPoint zero(torus(), std::vector<double>{0, 0, 0});
    double worst = 0, oracle = 0;
    for (const char* w : kGenerators) {
        const double l = surface::curve_length(torus(), zero, surface::parse_word(torus(), w));
        worst = std::max(worst, std::abs(l - 2 * std::acosh(1.5)));
        oracle = std::max(oracle, std::abs(l - 2 * std::acosh(zero_point_trace(w) / 2)));
    }
    c.require(worst <= 1e-10, "generator length");
    c.require(oracle <= 1e-10, "matrix product oracle");
    harness::Uniform u(601);
    int rejected = 0, tried = 0;
    for (int i = 0; i < 20; ++i) {
        const auto x = i == 0 ? zero : random_point(u, 2.0);
        for (const char* w : {"a R b R c R a R b R c R", "a L c L b L a L c L b L"}) {
            ++tried;
            try {
                surface::curve_length(torus(), x, surface::parse_word(torus(), w));
            } catch (const surface::NotHyperbolic&) {
                ++rejected;
            }
        }
    }
    c.require(rejected == tried, "peripheral loop accepted");
    c.detail << "length err " << worst << ", oracle err " << oracle << ", peripheral rejected " << rejected << "/"
             << tried;
}

void random_lines(Check& c) {
    harness::Uniform u(701);
    const auto all = surface::parse_word(torus(), kAllEdges);
    const auto partial = surface::parse_word(torus(), "a R b L");
    const Eigen::MatrixXd q = surface::relation_subspace(torus());
    const auto grid = surface::uniform_grid(-1, 1, 61);
    double worst = INFINITY, partial_worst = INFINITY;
    for (int i = 0; i < 20; ++i) {
        const auto base = random_point(u, 1.0);
        for (int j = 0; j < 20; ++j) {
            Eigen::VectorXd d = q * Eigen::Vector2d(u(-1, 1), u(-1, 1));
            d.normalize();
            const std::vector<double> dir(d.data(), d.data() + d.size());
            auto f = [&](double t) { return surface::curve_length(torus(), surface::shifted(base, dir, t), all); };
            worst = std::min(worst, surface::convexity_scan(f, grid).convexity.min_second_difference);
            auto g = [&](double t) { return surface::curve_length(torus(), surface::shifted(base, dir, t), partial); };
            partial_worst = std::min(partial_worst, surface::convexity_scan(g, grid).convexity.min_second_difference);
        }
    }
    c.require(worst > harness::kStrictSecondDifference, "second difference at threshold");
    c.detail << "400 lines, min second difference " << worst << " (reported only: a R b L min " << partial_worst
             << ")";
}

void deformation_lines(Check& c) {
    using harness::Verdict;
    harness::Uniform u(801);
    std::vector<double> ugrid;
    for (int i = 0; i <= 60; ++i) ugrid.push_back(std::exp(-3.0 + 0.1 * i));
    std::vector<surface::CurveWord> curves;
    for (const char* w : kGenerators) curves.push_back(surface::parse_word(torus(), w));
    curves.push_back(surface::parse_word(torus(), kAllEdges));

    int stretch_lines = 0, quake_lines = 0;
    double stretch_sd = INFINITY, quake_sd = INFINITY;
    for (int i = 0; i < 20; ++i) {
        const auto base =
            i == 0 ? surface::ShearPoint(torus(), std::vector<double>{0.5, 0.5, -1.0}) : random_point(u, 1.0);
        const auto line = surface::DeformationLine::stretch(base);
        for (const auto& w : curves) {
            auto f = [&](double uu) { return surface::curve_length(torus(), surface::stretch_point_u(line, uu), w); };
            const auto r = surface::convexity_scan(f, ugrid);
            c.require(r.convexity.verdict == Verdict::StrictlyConvex, "stretch line not strictly convex");
            stretch_sd = std::min(stretch_sd, r.convexity.min_second_difference);
            ++stretch_lines;
        }
        const Eigen::MatrixXd q = surface::relation_subspace(torus());
        const Eigen::VectorXd d = q * Eigen::Vector2d(u(-1, 1), u(-1, 1));
        const auto quake =
            surface::DeformationLine::earthquake(torus(), base, std::vector<double>(d.data(), d.data() + d.size()));
        for (const auto& w : curves) {
            // Curves transverse to the earthquake direction (here every one, since
            // a random relation direction is nonzero on all three edges).
            auto f = [&](double t) { return surface::curve_length(torus(), surface::earthquake_point(quake, t), w); };
            const auto r = surface::convexity_scan(f, surface::uniform_grid(-2, 2, 61));
            c.require(r.convexity.verdict == Verdict::StrictlyConvex, "earthquake line not strictly convex");
            quake_sd = std::min(quake_sd, r.convexity.min_second_difference);
            ++quake_lines;
        }
    }

    const auto growth = surface::DeformationLine::stretch(surface::ShearPoint(torus(), std::vector<double>{0.5, 0.5, -1}));
    const auto decay =
        surface::DeformationLine::stretch(surface::ShearPoint(torus(), std::vector<double>{0, 5e-4, -5e-4}));
    const auto r1 = surface::asymptotic_probe(torus(), growth, {{surface::parse_word(torus(), "a R b L"), 1.0}},
                                              {false, false, true, false});
    const auto r2 = surface::asymptotic_probe(torus(), decay, {{surface::parse_word(torus(), "b R c L"), 1.0}},
                                              {false, false, true, true});
    const bool patterns = r1.forward_observed == surface::Limit::Infinity && r1.forward_consistent &&
                          r1.backward_observed == surface::Limit::Bounded && r1.backward_consistent &&
                          r2.forward_observed == surface::Limit::Zero && r2.forward_consistent &&
                          r2.backward_observed == surface::Limit::Bounded && r2.backward_consistent;
    c.require(patterns, "asymptotic pattern mismatch");
    c.detail << "stretch " << stretch_lines << " scans min sd " << stretch_sd << ", earthquake " << quake_lines
             << " scans min sd " << quake_sd << ", asymptotic patterns " << (patterns ? 4 : 0) << "/4";
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

void cli_reproducibility(Check& c) {
    using nlohmann::json;
    const fs::path dir = fs::temp_directory_path() / "shearlab_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const json strip_cfg = {{"schema", 1},
                            {"strip", {{"n", 4}, {"apex_sides", {"L", "R", "R", "L"}}, {"shears", {0.3, -0.5, 1.1}}}}};
    const json curves = {"a R b L", "b R c L", "c R a L", kAllEdges};
    const std::vector<std::pair<std::string, json>> runs = {
        {"strip-geodesic", strip_cfg},
        {"strip-core", strip_cfg},
        {"strip-convexity", strip_cfg},
        {"track-transport",
         {{"schema", 1},
          {"track", "genus_two"},
          {"paths",
           {{{{"branch", "b"}, {"dir", "L"}}, {{"branch", "g2"}, {"dir", "R"}}},
            {{{"branch", "g2"}, {"dir", "R"}}, {{"branch", "b"}, {"dir", "L"}}}}}}},
        {"surface-lengths", {{"schema", 1}, {"x", {0.3, -0.1, -0.2}}, {"curves", curves}}},
        {"stretch-scan", {{"schema", 1}, {"base", {0.5, 0.5, -1.0}}, {"curves", curves}}},
        {"earthquake-scan", {{"schema", 1}, {"base", {0.5, 0.5, -1.0}}, {"direction", {1, 0, -1}}, {"curves", curves}}},
        {"thurston-estimate", {{"schema", 1}, {"g", {0.5, 0.5, -1.0}}, {"h", {0.2, -0.7, 0.5}}, {"curves", curves}}},
    };
    int compared = 0;
    std::ostringstream sink;
    for (const auto& [sub, cfg] : runs) {
        const fs::path config = dir / (sub + ".json");
        std::ofstream(config) << cfg.dump();
        for (const std::string format : {"csv", "json"}) {
            std::vector<std::string> outputs;
            for (int rep = 0; rep < 2; ++rep) {
                const fs::path out = dir / (sub + "_" + std::to_string(rep) + "." + format);
                const int code = cli::run(
                    {sub, "--config", config.string(), "--out", out.string(), "--seed", "2024", "--format", format},
                    sink, sink);
                c.require(code == cli::kExitOk, sub + " exit code " + std::to_string(code));
                std::string bytes = slurp(out);
                if (format == "csv") bytes += slurp(out.string() + ".summary.json");
                outputs.push_back(bytes);
            }
            c.require(!outputs[0].empty() && outputs[0] == outputs[1], sub + " output differs between runs");
            ++compared;
        }
    }
    fs::remove_all(dir);
    c.detail << compared << " subcommand/format pairs compared";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"1 wedge convexity", wedge_convexity},
        {"2 developing round trip", developing_round_trip},
        {"3 variational = geometric length", variational_length},
        {"4 strip joint convexity", strip_joint_convexity},
        {"5 train-track algebra", train_track_algebra},
        {"6 punctured-torus lengths", punctured_torus_lengths},
        {"7 random affine lines", random_lines},
        {"8 stretch/earthquake/asymptotics", deformation_lines},
        {"9 CLI reproducibility", cli_reproducibility},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (c.ok ? "PASS " : "FAIL ") << name << " [" << c.detail.str() << "] (" << secs << " s)"
                  << std::endl;
        failed += c.ok ? 0 : 1;
    }
    return failed;
}
