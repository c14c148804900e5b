#include "shearlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace shearlab::surface {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sup_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TriangulatedSurface::TriangulatedSurface(std::vector<std::string> edge_names,
                                         std::vector<std::array<int, 3>> triangles)
    : names_(std::move(edge_names)), tri_(std::move(triangles)) {
    const int n = static_cast<int>(names_.size());
    if (tri_.empty()) throw SurfaceError("surface has no triangles");
    std::set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty() || name == "L" || name == "R" ||
            name.find_first_of(" \t\n") != std::string::npos)
            throw SurfaceError("invalid edge name '" + name + "'");
        if (!seen.insert(name).second) throw SurfaceError("duplicate edge name '" + name + "'");
    }
    std::vector<std::vector<Incidence>> found(n);
    for (int t = 0; t < triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int e = tri_[t][k];
            if (e < 0 || e >= n) throw SurfaceError("triangle " + std::to_string(t) + " uses an unknown edge");
            found[e].push_back({t, k});
        }
    for (int e = 0; e < n; ++e) {
        if (found[e].size() != 2)
            throw SurfaceError("edge '" + names_[e] + "' has " + std::to_string(found[e].size()) +
                               " incidences, expected 2");
        inc_.push_back({found[e][0], found[e][1]});
    }

    // Vertex k of triangle t continues as vertex s'+1 of the triangle across side k.
    std::vector<std::array<bool, 3>> visited(tri_.size(), {false, false, false});
    for (int t = 0; t < triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            if (visited[t][k]) continue;
            std::vector<int> cycle;
            Incidence at{t, k};
            while (!visited[at.triangle][at.side]) {
                visited[at.triangle][at.side] = true;
                cycle.push_back(edge_at(at));
                const Incidence other = across(at);
                at = {other.triangle, (other.side + 1) % 3};
            }
            cycles_.push_back(std::move(cycle));
        }
    if (euler_characteristic() >= 0)
        throw SurfaceError("Euler characteristic must be negative, got " + std::to_string(euler_characteristic()));
}

TriangulatedSurface TriangulatedSurface::from_gluings(int triangles,
                                                      const std::vector<std::array<Incidence, 2>>& gluings,
                                                      std::vector<std::string> edge_names) {
    if (triangles <= 0) throw SurfaceError("triangle count must be positive");
    if (edge_names.empty())
        for (size_t e = 0; e < gluings.size(); ++e) edge_names.push_back(std::to_string(e));
    if (edge_names.size() != gluings.size()) throw SurfaceError("edge name count does not match gluings");
    std::vector<std::array<int, 3>> tri(triangles, {-1, -1, -1});
    for (size_t e = 0; e < gluings.size(); ++e)
        for (const Incidence& i : gluings[e]) {
            if (i.triangle < 0 || i.triangle >= triangles || i.side < 0 || i.side > 2)
                throw SurfaceError("gluing of edge " + std::to_string(e) + " names a missing side");
            if (tri[i.triangle][i.side] != -1)
                throw SurfaceError("side " + std::to_string(i.side) + " of triangle " + std::to_string(i.triangle) +
                                   " is glued twice");
            tri[i.triangle][i.side] = static_cast<int>(e);
        }
    for (int t = 0; t < triangles; ++t)
        for (int k = 0; k < 3; ++k)
            if (tri[t][k] == -1)
                throw SurfaceError("side " + std::to_string(k) + " of triangle " + std::to_string(t) + " is unglued");
    return TriangulatedSurface(std::move(edge_names), std::move(tri));
}

TriangulatedSurface TriangulatedSurface::punctured_torus() {
    return TriangulatedSurface({"a", "b", "c"}, {{{0, 1, 2}}, {{0, 1, 2}}});
}

TriangulatedSurface TriangulatedSurface::thrice_punctured_sphere() {
    return TriangulatedSurface({"a", "b", "c"}, {{{0, 1, 2}}, {{0, 2, 1}}});
}

int TriangulatedSurface::edge_index(std::string_view name) const {
    for (int e = 0; e < edge_count(); ++e)
        if (names_[e] == name) return e;
    throw SurfaceError("unknown edge '" + std::string(name) + "'");
}

Incidence TriangulatedSurface::across(Incidence i) const {
    const auto& pair = inc_.at(edge_at(i));
    return pair[0] == i ? pair[1] : pair[0];
}

int TriangulatedSurface::euler_characteristic() const {
    // Punctures are removed vertices, so they do not count.
    return triangle_count() - edge_count();
}

Eigen::MatrixXd TriangulatedSurface::relation_matrix() const {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cycles_.size()), edge_count());
    for (size_t p = 0; p < cycles_.size(); ++p)
        for (int e : cycles_[p]) c(static_cast<Eigen::Index>(p), e) += 1.0;
    return c;
}

double relation_residual(const TriangulatedSurface& s, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != s.edge_count()) throw SurfaceError("shear vector has the wrong length");
    double r = 0;
    for (const auto& cycle : s.puncture_cycles()) {
        double sum = 0;
        for (int e : cycle) sum += x[e];
        r = std::max(r, std::abs(sum));
    }
    return r;
}

Eigen::MatrixXd relation_subspace(const TriangulatedSurface& s) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.relation_matrix(), Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const Eigen::Index rank = svd.rank();
    return svd.matrixV().rightCols(s.edge_count() - rank);
}

ShearPoint::ShearPoint(const TriangulatedSurface& s, std::vector<double> x) : x_(std::move(x)) {
    if (static_cast<int>(x_.size()) != s.edge_count())
        throw SurfaceError("shear vector has " + std::to_string(x_.size()) + " entries, surface has " +
                           std::to_string(s.edge_count()) + " edges");
    for (double v : x_)
        if (!std::isfinite(v)) throw SurfaceError("shear vector has a non-finite entry");
    const Eigen::MatrixXd c = s.relation_matrix();
    const Eigen::Map<Eigen::VectorXd> v(x_.data(), static_cast<Eigen::Index>(x_.size()));
    const Eigen::VectorXd r = c * v;
    if (r.cwiseAbs().maxCoeff() == 0.0) return;
    // Minimum-norm correction back onto the relation subspace.
    const Eigen::VectorXd delta = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(c).solve(r);
    if (delta.cwiseAbs().maxCoeff() > kProjectionTolerance * std::max(1.0, sup_norm(x_)))
        throw SurfaceError("shear vector violates the puncture relations (distance " +
                           std::to_string(delta.cwiseAbs().maxCoeff()) + ")");
    for (size_t i = 0; i < x_.size(); ++i) x_[i] -= delta[static_cast<Eigen::Index>(i)];
}

namespace {

std::vector<double> from_named(const TriangulatedSurface& s, const std::map<std::string, double>& x) {
    if (static_cast<int>(x.size()) != s.edge_count()) throw SurfaceError("shear map must name every edge once");
    std::vector<double> v(s.edge_count());
    for (const auto& [name, value] : x) v[s.edge_index(name)] = value;
    return v;
}

}  // namespace

ShearPoint::ShearPoint(const TriangulatedSurface& s, const std::map<std::string, double>& x)
    : ShearPoint(s, from_named(s, x)) {}

ShearPoint scaled(const ShearPoint& x, double u) {
    std::vector<double> v = x.values();
    for (double& e : v) e *= u;
    return ShearPoint(std::move(v), ShearPoint::Trusted{});
}

ShearPoint shifted(const ShearPoint& x, const std::vector<double>& d, double t) {
    if (d.size() != x.values().size()) throw SurfaceError("direction has the wrong length");
    std::vector<double> v = x.values();
    for (size_t i = 0; i < v.size(); ++i) v[i] += t * d[i];
    return ShearPoint(std::move(v), ShearPoint::Trusted{});
}

namespace {

// Walks the word from `start`; returns the side left at each crossing, or
// nothing when the path does not follow the triangulation or fails to close.
std::optional<std::vector<Incidence>> walk(const TriangulatedSurface& s, const std::vector<int>& edges,
                                           const std::vector<Turn>& turns, Incidence start) {
    std::vector<Incidence> from;
    Incidence at = start;
    for (size_t i = 0; i < edges.size(); ++i) {
        if (s.edge_at(at) != edges[i]) return std::nullopt;
        from.push_back(at);
        const Incidence in = s.across(at);
        // Entering through side k, side k+1 is on the right and k+2 on the left.
        at = {in.triangle, (in.side + (turns[i] == Turn::Right ? 1 : 2)) % 3};
    }
    if (!(at == start)) return std::nullopt;
    return from;
}

}  // namespace

CurveWord parse_word(const TriangulatedSurface& s, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    CurveWord c;
    if (tokens.empty()) return c;
    if (tokens.size() % 2 != 0) throw SurfaceError("curve word must alternate edges and turns: '" + std::string(text) + "'");
    for (size_t i = 0; i < tokens.size(); i += 2) {
        c.edges.push_back(s.edge_index(tokens[i]));
        if (tokens[i + 1] == "L")
            c.turns.push_back(Turn::Left);
        else if (tokens[i + 1] == "R")
            c.turns.push_back(Turn::Right);
        else
            throw SurfaceError("expected L or R, got '" + tokens[i + 1] + "'");
    }
    for (const Incidence& start : s.incidences(c.edges[0])) {
        if (walk(s, c.edges, c.turns, start)) {
            c.start = start;
            return c;
        }
    }
    throw SurfaceError("curve word does not close up on this surface: '" + std::string(text) + "'");
}

std::string to_string(const TriangulatedSurface& s, const CurveWord& c) {
    std::string out;
    for (int i = 0; i < c.crossings(); ++i) {
        if (i) out += ' ';
        out += s.edge_name(c.edges[i]);
        out += c.turns[i] == Turn::Left ? " L" : " R";
    }
    return out;
}

CurveWord rotated(const TriangulatedSurface& s, const CurveWord& c, int k) {
    const int n = c.crossings();
    if (n == 0) return c;
    if (k < 0 || k >= n) throw SurfaceError("rotation index out of range");
    const auto from = walk(s, c.edges, c.turns, c.start);
    if (!from) throw SurfaceError("curve word does not belong to this surface");
    CurveWord r;
    for (int i = 0; i < n; ++i) {
        r.edges.push_back(c.edges[(i + k) % n]);
        r.turns.push_back(c.turns[(i + k) % n]);
    }
    r.start = (*from)[k];
    return r;
}

std::vector<int> crossing_counts(const TriangulatedSurface& s, const CurveWord& c) {
    std::vector<int> counts(s.edge_count(), 0);
    for (int e : c.edges) ++counts.at(e);
    return counts;
}

hyp::MobiusMap holonomy(const TriangulatedSurface& s, const ShearPoint& x, const CurveWord& c) {
    if (x.size() != s.edge_count()) throw SurfaceError("shear point does not match the surface");
    if (c.crossings() > 0 && !walk(s, c.edges, c.turns, c.start))
        throw SurfaceError("curve word does not belong to this surface");
    double m[2][2] = {{1, 0}, {0, 1}};
    for (int i = 0; i < c.crossings(); ++i) {
        const double h = 0.5 * x[c.edges[i]];
        const double p = std::exp(h), q = std::exp(-h);
        // X(z) L = [[p, p], [0, q]],  X(z) R = [[p, 0], [q, q]]
        double f[2][2];
        if (c.turns[i] == Turn::Left) {
            f[0][0] = p; f[0][1] = p; f[1][0] = 0; f[1][1] = q;
        } else {
            f[0][0] = p; f[0][1] = 0; f[1][0] = q; f[1][1] = q;
        }
        double r[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) r[a][b] = m[a][0] * f[0][b] + m[a][1] * f[1][b];
        std::copy(&r[0][0], &r[0][0] + 4, &m[0][0]);
    }
    return hyp::MobiusMap(m[0][0], m[0][1], m[1][0], m[1][1]);
}

namespace {

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

int canonical_rotation(const CurveWord& c) {
    const int n = c.crossings();
    int best = 0;
    for (int k = 1; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            const int a = (k + i) % n, b = (best + i) % n;
            const auto ka = std::make_pair(c.edges[a], static_cast<int>(c.turns[a]));
            const auto kb = std::make_pair(c.edges[b], static_cast<int>(c.turns[b]));
            if (ka != kb) {
                if (ka < kb) best = k;
                break;
            }
        }
    }
    return best;
}

}  // namespace

double log_abs_trace(const TriangulatedSurface& s, const ShearPoint& x, const CurveWord& c) {
    if (x.size() != s.edge_count()) throw SurfaceError("shear point does not match the surface");
    const int n = c.crossings();
    if (n == 0) return std::log(2.0);
    if (!walk(s, c.edges, c.turns, c.start)) throw SurfaceError("curve word does not belong to this surface");
    const int k0 = canonical_rotation(c);
    double m[2][2] = {{0, kNegInf}, {kNegInf, 0}};
    for (int j = 0; j < n; ++j) {
        const int i = (k0 + j) % n;
        const double h = 0.5 * x[c.edges[i]];
        double f[2][2];
        if (c.turns[i] == Turn::Left) {
            f[0][0] = h; f[0][1] = h; f[1][0] = kNegInf; f[1][1] = -h;
        } else {
            f[0][0] = h; f[0][1] = kNegInf; f[1][0] = -h; f[1][1] = -h;
        }
        double r[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) r[a][b] = log_add(m[a][0] + f[0][b], m[a][1] + f[1][b]);
        std::copy(&r[0][0], &r[0][0] + 4, &m[0][0]);
    }
    return log_add(m[0][0], m[1][1]);
}

double curve_length(const TriangulatedSurface& s, const ShearPoint& x, const CurveWord& c) {
    const double lt = log_abs_trace(s, x, c);
    if (lt > 30.0) return 2.0 * (lt - std::log(2.0) + std::log1p(std::sqrt(1.0 - 4.0 * std::exp(-2.0 * lt))));
    const double tr = std::exp(lt);
    if (tr <= 2.0 + 1e-12)
        throw NotHyperbolic("holonomy of '" + to_string(s, c) + "' is not hyperbolic (|trace| = " +
                                std::to_string(tr) + ")",
                            tr);
    return 2.0 * std::acosh(0.5 * tr);
}

double multicurve_length(const TriangulatedSurface& s, const ShearPoint& x,
                         const std::vector<WeightedCurve>& curves) {
    double total = 0;
    for (const auto& wc : curves) {
        if (!(wc.weight >= 0) || !std::isfinite(wc.weight)) throw SurfaceError("multicurve weights must be nonnegative");
        total += wc.weight * curve_length(s, x, wc.curve);
    }
    return total;
}

DeformationLine DeformationLine::stretch(ShearPoint base) {
    return DeformationLine(Kind::Stretch, std::move(base), {});
}

DeformationLine DeformationLine::earthquake(const TriangulatedSurface& s, ShearPoint base,
                                            std::vector<double> direction) {
    if (base.size() != s.edge_count()) throw SurfaceError("base point does not match the surface");
    if (static_cast<int>(direction.size()) != s.edge_count()) throw SurfaceError("direction has the wrong length");
    for (double v : direction)
        if (!std::isfinite(v)) throw SurfaceError("direction has a non-finite entry");
    const double norm = sup_norm(direction);
    if (norm == 0.0) throw SurfaceError("earthquake direction is zero");
    if (relation_residual(s, direction) > kRelationTolerance * std::max(1.0, norm))
        throw SurfaceError("earthquake direction violates the puncture relations");
    return DeformationLine(Kind::Earthquake, std::move(base), std::move(direction));
}

ShearPoint stretch_point(const DeformationLine& line, double t) {
    if (line.kind() != DeformationLine::Kind::Stretch) throw SurfaceError("not a stretch line");
    return scaled(line.base(), std::exp(t));
}

ShearPoint stretch_point_u(const DeformationLine& line, double u) {
    if (line.kind() != DeformationLine::Kind::Stretch) throw SurfaceError("not a stretch line");
    if (!(u > 0)) throw SurfaceError("stretch parameter u must be positive");
    return scaled(line.base(), u);
}

ShearPoint earthquake_point(const DeformationLine& line, double t, EarthquakeSide side) {
    if (line.kind() != DeformationLine::Kind::Earthquake) throw SurfaceError("not an earthquake line");
    return shifted(line.base(), line.direction(), side == EarthquakeSide::Left ? t : -t);
}

std::vector<double> uniform_grid(double lo, double hi, int samples) {
    if (samples < 2 || !(lo < hi)) throw SurfaceError("grid needs lo < hi and at least two samples");
    std::vector<double> t(samples);
    const double h = (hi - lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) t[i] = lo + i * h;
    t.back() = hi;
    return t;
}

ScanReport convexity_scan(const std::function<double(double)>& f, const std::vector<double>& t) {
    const int n = static_cast<int>(t.size());
    for (int i = 1; i < n; ++i)
        if (!(t[i] > t[i - 1])) throw SurfaceError("scan grid must be strictly increasing");
    ScanReport r;
    r.t = t;
    bool any_failed = false;
    for (double ti : t) {
        try {
            r.values.push_back(f(ti));
            r.errors.emplace_back();
        } catch (const std::exception& e) {
            r.values.push_back(kNaN);
            r.errors.emplace_back(e.what());
            any_failed = true;
        }
    }
    bool uniform = n >= 2;
    for (int i = 1; i < n && uniform; ++i)
        uniform = std::abs((t[i] - t[i - 1]) - (t[1] - t[0])) <= 1e-9 * (t[1] - t[0]);

    auto& rep = r.convexity;
    rep.samples = n;
    rep.min_second_difference = std::numeric_limits<double>::infinity();
    rep.min_midpoint_margin = std::numeric_limits<double>::infinity();
    const auto& v = r.values;
    for (int i = 1; i + 1 < n; ++i) {
        double sd;
        if (uniform) {
            sd = v[i - 1] - 2 * v[i] + v[i + 1];
        } else {
            const double w0 = (t[i + 1] - t[i]) / (t[i + 1] - t[i - 1]);
            sd = 2 * (w0 * v[i - 1] + (1 - w0) * v[i + 1] - v[i]);
        }
        r.second_differences.push_back(sd);
        if (std::isnan(sd)) continue;
        rep.min_second_difference = std::min(rep.min_second_difference, sd);
        if (sd < harness::kViolation)
            rep.failures.push_back({{t[i]}, sd, "second difference violation"});
        else if (sd <= harness::kStrictSecondDifference)
            rep.failures.push_back({{t[i]}, sd, "second difference inconclusive"});
    }
    for (int i = 1; i + 1 < n; ++i) {
        const int kmax = uniform ? std::min(i, n - 1 - i) : 1;
        for (int k = 1; k <= kmax; ++k) {
            double m;
            if (uniform) {
                m = 0.5 * (v[i - k] + v[i + k]) - v[i];
            } else {
                m = 0.5 * r.second_differences[i - 1];
            }
            if (std::isnan(m)) continue;
            rep.min_midpoint_margin = std::min(rep.min_midpoint_margin, m);
            if (m < harness::kViolation) rep.failures.push_back({{t[i - k], t[i + k]}, m, "midpoint violation"});
        }
    }
    for (int i = 0; i < n; ++i)
        if (!r.errors[i].empty()) rep.failures.push_back({{t[i]}, kNaN, "evaluation failed: " + r.errors[i]});
    if (n < 3) {
        rep.min_second_difference = kNaN;
        rep.min_midpoint_margin = 0.0;
    }
    rep.verdict = harness::classify(rep.min_second_difference, rep.min_midpoint_margin);
    if (n < 3 || (any_failed && rep.verdict == harness::Verdict::StrictlyConvex)) rep.verdict = harness::Verdict::Convex;

    for (int i = 0; i + 1 < n;) {
        const double d = v[i + 1] - v[i];
        const int dir = d > 0 ? 1 : (d < 0 ? -1 : 0);
        int j = i + 1;
        while (j + 1 < n) {
            const double dj = v[j + 1] - v[j];
            if ((dj > 0 ? 1 : (dj < 0 ? -1 : 0)) != dir) break;
            ++j;
        }
        r.monotone.push_back({i, j, dir});
        i = j;
    }
    return r;
}

nlohmann::json to_json(const ScanReport& r) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : r.monotone) segs.push_back({{"begin", s.begin}, {"end", s.end}, {"direction", s.direction}});
    return {{"convexity", harness::to_json(r.convexity)}, {"monotone_segments", segs}};
}

std::string to_string(Limit l) {
    switch (l) {
    case Limit::Infinity: return "infinity";
    case Limit::Zero: return "zero";
    case Limit::Bounded: return "bounded";
    case Limit::Undetermined: return "undetermined";
    }
    return "?";
}

PredictedLimits predicted_limits(const IntersectionPattern& p) {
    if (p.inside_stump && !p.meets_stump) throw SurfaceError("a curve inside the stump meets it");
    if (p.inside_horocyclic && !p.meets_horocyclic) throw SurfaceError("a curve inside the horocyclic lamination meets it");
    PredictedLimits out;
    out.forward = !p.meets_horocyclic ? Limit::Bounded : (p.inside_horocyclic ? Limit::Zero : Limit::Infinity);
    out.backward = !p.meets_stump ? Limit::Bounded : (p.inside_stump ? Limit::Zero : Limit::Infinity);
    return out;
}

Limit observed_trend(const std::vector<double>& v) {
    if (v.size() < 2) return Limit::Undetermined;
    for (double x : v)
        if (!std::isfinite(x)) return Limit::Undetermined;
    bool up = true, down = true;
    for (size_t i = 1; i < v.size(); ++i) {
        up = up && v[i] > v[i - 1];
        down = down && v[i] < v[i - 1];
    }
    if (up && v.back() >= 2 * v.front()) return Limit::Infinity;
    if (down && v.back() <= 0.5 * v.front()) return Limit::Zero;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi - *lo <= 0.05 * std::abs(*hi)) return Limit::Bounded;
    return Limit::Undetermined;
}

AsymptoticReport asymptotic_probe(const TriangulatedSurface& s, const DeformationLine& line,
                                  const std::vector<WeightedCurve>& alpha, const IntersectionPattern& pattern,
                                  double t_min, double t_max, int samples) {
    if (line.kind() != DeformationLine::Kind::Stretch) throw SurfaceError("asymptotic probe needs a stretch line");
    if (alpha.empty()) throw SurfaceError("asymptotic probe needs at least one curve");
    AsymptoticReport r;
    r.predicted = predicted_limits(pattern);
    r.forward_t = uniform_grid(t_min, t_max, samples);
    for (double t : r.forward_t) r.forward_lengths.push_back(multicurve_length(s, stretch_point(line, t), alpha));
    for (double t : r.forward_t) {
        r.backward_t.push_back(-t);
        r.backward_lengths.push_back(multicurve_length(s, stretch_point(line, -t), alpha));
    }
    r.forward_observed = observed_trend(r.forward_lengths);
    r.backward_observed = observed_trend(r.backward_lengths);
    r.forward_consistent = r.forward_observed == r.predicted.forward;
    r.backward_consistent = r.backward_observed == r.predicted.backward;
    return r;
}

double thurston_distance_estimate(const TriangulatedSurface& s, const ShearPoint& g, const ShearPoint& h,
                                  const std::vector<CurveWord>& family) {
    if (family.empty()) throw SurfaceError("curve family is empty");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : family) best = std::max(best, std::log(curve_length(s, h, c) / curve_length(s, g, c)));
    // The distance itself is nonnegative, so 0 is always a valid lower bound.
    return std::max(best, 0.0);
}

}  // namespace shearlab::surface
