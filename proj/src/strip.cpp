#include "shearlab/strip.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace shearlab::strip {

using hyp::Geodesic;
using hyp::IdealPoint;
using hyp::MobiusMap;
using hyp::UhpPoint;

char to_char(Side s) { return s == Side::Left ? 'L' : 'R'; }

Side side_from_char(char c) {
    if (c == 'L' || c == 'l') return Side::Left;
    if (c == 'R' || c == 'r') return Side::Right;
    throw StripError(std::string("apex side must be L or R, got '") + c + "'");
}

WedgeCombinatorics::WedgeCombinatorics(std::vector<Side> sides) : apex_sides(std::move(sides)) {
    if (apex_sides.size() < 2) throw StripError("a strip needs at least two wedges");
}

bool WedgeCombinatorics::has_core() const {
    return std::adjacent_find(apex_sides.begin(), apex_sides.end(), std::not_equal_to<>()) !=
           apex_sides.end();
}

StripShape::StripShape(WedgeCombinatorics c, std::vector<double> s)
    : combinatorics(std::move(c)), shears(std::move(s)) {
    if (static_cast<int>(shears.size()) != combinatorics.wedges() - 1) {
        throw StripError("expected " + std::to_string(combinatorics.wedges() - 1) +
                         " shears, got " + std::to_string(shears.size()));
    }
    for (double v : shears) {
        if (!std::isfinite(v)) throw StripError("shears must be finite");
    }
}

namespace {

// End of a leaf away from the apex of an adjacent wedge.
const IdealPoint& far_end(const Geodesic& leaf, Side apex) {
    return apex == Side::Left ? leaf.from() : leaf.to();
}

const IdealPoint& apex_end(const Geodesic& leaf, Side apex) {
    return apex == Side::Left ? leaf.to() : leaf.from();
}

void check_leaf(const DevelopedStrip& d, int leaf) {
    if (leaf < 0 || leaf > d.n()) throw std::out_of_range("leaf index out of range");
}

void check_interior_leaf(const DevelopedStrip& d, int leaf) {
    if (leaf < 1 || leaf > d.n() - 1) throw std::out_of_range("interior leaf index out of range");
}

std::vector<double> deltas(const StripShape& base, const std::vector<double>& x) {
    const int n = base.wedges();
    if (static_cast<int>(x.size()) != n - 1) {
        throw StripError("shear vector has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(n - 1));
    }
    // Padded with zeros at both boundary leaves.
    std::vector<double> delta(n + 1, 0.0);
    for (int j = 1; j < n; ++j) delta[j] = x[j - 1] - base.shears[j - 1];
    return delta;
}

void check_coords(const StripShape& base, const PwCurveCoords& y) {
    if (y.minus.size() != y.plus.size() || y.wedges() != base.wedges()) {
        throw StripError("curve coordinates must have one pair per wedge");
    }
}

}  // namespace

const UhpPoint& DevelopedStrip::marked_point(int wedge_index, int leaf) const {
    const DevelopedWedge& w = wedge(wedge_index);
    if (leaf == wedge_index - 1) return w.near_marked;
    if (leaf == wedge_index) return w.far_marked;
    throw std::out_of_range("wedge does not touch the requested leaf");
}

UhpPoint DevelopedStrip::point_on_leaf(int leaf, int wedge_index, double position) const {
    return hyp::point_along(leaves.at(leaf), marked_point(wedge_index, leaf), position);
}

double DevelopedStrip::position_on_leaf(int leaf, int wedge_index, const UhpPoint& p) const {
    return hyp::signed_position(leaves.at(leaf), marked_point(wedge_index, leaf), p);
}

DevelopedStrip develop(const StripShape& shape) {
    const auto& sides = shape.combinatorics.apex_sides;
    if (!shape.combinatorics.has_core()) {
        throw DegenerateStrip("all wedge apices lie on one side; boundary leaves are asymptotic");
    }
    const int n = shape.wedges();
    DevelopedStrip d{shape, {}, {}};
    d.leaves.reserve(n + 1);
    d.wedges.reserve(n);

    const IdealPoint inf = IdealPoint::infinity();
    const IdealPoint zero(0.0), one(1.0);
    // Wedge 1 in standard position. The core runs toward +x when the apex
    // (∞) is on its left and toward -x otherwise.
    if (sides[0] == Side::Left) {
        d.leaves.emplace_back(zero, inf);
        d.leaves.emplace_back(one, inf);
    } else {
        d.leaves.emplace_back(inf, one);
        d.leaves.emplace_back(inf, zero);
    }

    for (int i = 1; i <= n; ++i) {
        const Side apex = sides[i - 1];
        if (i > 1) {
            // Glue wedge i onto leaf i-1.
            const Geodesic& leaf = d.leaves[i - 1];
            const DevelopedWedge& prev = d.wedges.back();
            const MobiusMap norm = MobiusMap::normalizing(leaf.from(), leaf.to());
            const IdealPoint behind = norm.apply(far_end(d.leaves[i - 2], sides[i - 2]));
            const UhpPoint p = norm.apply(prev.far_marked);
            const double h = std::hypot(p.x, p.y) * std::exp(shape.shears[i - 2]);
            const double v_norm = behind.value() < 0.0 ? h : -h;
            const IdealPoint v = norm.inverse().apply(IdealPoint(v_norm));
            if (apex == Side::Left) {
                d.leaves.emplace_back(v, leaf.to());
            } else {
                d.leaves.emplace_back(leaf.from(), v);
            }
        }
        const Geodesic& near = d.leaves[i - 1];
        const Geodesic& far = d.leaves[i];
        DevelopedWedge w;
        w.apex = apex_end(near, apex);
        const IdealPoint& near_far = far_end(near, apex);
        const IdealPoint& far_far = far_end(far, apex);
        w.near_marked = hyp::foot_of_perpendicular(near, far_far);
        w.far_marked = hyp::foot_of_perpendicular(far, near_far);
        // Left apex: x=0 goes to the near leaf. Right apex: x=1 does.
        if (apex == Side::Left) {
            w.frame = MobiusMap::from_triples({zero, one, inf}, {near_far, far_far, w.apex});
        } else {
            w.frame = MobiusMap::from_triples({one, zero, inf}, {near_far, far_far, w.apex});
        }
        d.wedges.push_back(w);
    }

    const Geodesic& lo = d.leaves.front();
    const Geodesic& hi = d.leaves.back();
    if (lo.from() == hi.from() || lo.from() == hi.to() || lo.to() == hi.from() ||
        lo.to() == hi.to()) {
        throw DegenerateStrip("boundary leaves share an ideal endpoint");
    }
    return d;
}

double measure_shear(const DevelopedStrip& d, int leaf) {
    check_interior_leaf(d, leaf);
    return hyp::signed_position(d.leaves[leaf], d.wedge(leaf).far_marked,
                                d.wedge(leaf + 1).near_marked);
}

double shear_between(const DevelopedStrip& d, int i1, int i2) {
    if (i1 < 1 || i2 > d.n() || i1 >= i2) throw std::out_of_range("need 1 <= i1 < i2 <= n");
    double total = 0.0;
    for (int j = i1; j < i2; ++j) total += measure_shear(d, j);
    return total;
}

double horocyclic_project(const DevelopedStrip& d, int from_leaf, double position, int to_leaf) {
    check_leaf(d, from_leaf);
    check_leaf(d, to_leaf);
    if (from_leaf >= to_leaf) throw std::out_of_range("need from_leaf < to_leaf");
    UhpPoint p = d.point_on_leaf(from_leaf, from_leaf + 1, position);
    for (int k = from_leaf + 1; k <= to_leaf; ++k) {
        const DevelopedWedge& w = d.wedge(k);
        const Side apex = d.shape.combinatorics.apex_sides[k - 1];
        const IdealPoint& target = far_end(d.leaves[k], apex);
        // Send the apex to ∞: its horocycles become horizontal lines.
        const MobiusMap m = MobiusMap::normalizing(target, w.apex);
        const UhpPoint q = m.apply(p);
        p = m.inverse().apply(UhpPoint(0.0, q.y));
    }
    return d.position_on_leaf(to_leaf, to_leaf, p);
}

double wedge_chord(Side apex, double p_minus, double p_plus) {
    // Leaves point toward a Left apex and away from a Right one.
    if (apex == Side::Left) return hyp::wedge_distance(p_minus, p_plus);
    return hyp::wedge_distance(-p_minus, -p_plus);
}

ChordEnds shifted_positions(const StripShape& base, const std::vector<double>& x,
                            const PwCurveCoords& y) {
    check_coords(base, y);
    const std::vector<double> delta = deltas(base, x);
    const int n = base.wedges();
    ChordEnds e{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 1; i <= n; ++i) {
        e.minus[i - 1] = y.minus[i - 1] - 0.5 * delta[i - 1];
        e.plus[i - 1] = y.plus[i - 1] + 0.5 * delta[i];
    }
    return e;
}

double gap_term(const StripShape& base, const PwCurveCoords& y, int leaf) {
    check_coords(base, y);
    if (leaf < 1 || leaf >= base.wedges()) throw std::out_of_range("interior leaf index out of range");
    return std::abs(y.plus[leaf - 1] - y.minus[leaf] - base.shears[leaf - 1]);
}

double pw_length(const StripShape& base, const std::vector<double>& x, const PwCurveCoords& y) {
    const ChordEnds e = shifted_positions(base, x, y);
    const auto& sides = base.combinatorics.apex_sides;
    double total = 0.0;
    for (int i = 0; i < base.wedges(); ++i) total += wedge_chord(sides[i], e.minus[i], e.plus[i]);
    for (int j = 1; j < base.wedges(); ++j) total += gap_term(base, y, j);
    return total;
}

namespace {

// Once every leaf gap is collapsed the functional depends only on where the
// curve crosses each leaf. Collapsing a gap never increases the length since
// wedge chords are 1-Lipschitz in their endpoints, so the minimum over y is
// the minimum of this smooth, strictly convex reduced problem.
//
// Variable c_j is the crossing position on leaf j relative to wedge j's
// distinguished point (relative to wedge 1's on leaf 0). Only the leaves
// listed in `free` vary.
class Reduced {
public:
    Reduced(const StripShape& base, const std::vector<double>& x, double c0, double cn, bool ends_free)
        : sides_(base.combinatorics.apex_sides), x_(x), n_(base.wedges()), c_(n_ + 1, 0.0) {
        c_[0] = c0;
        c_[n_] = cn;
        first_ = ends_free ? 0 : 1;
        last_ = ends_free ? n_ : n_ - 1;
    }

    int dim() const { return last_ - first_ + 1; }

    void set(const Eigen::VectorXd& z) {
        for (int k = 0; k < dim(); ++k) c_[first_ + k] = z[k];
    }

    Eigen::VectorXd get() const {
        Eigen::VectorXd z(dim());
        for (int k = 0; k < dim(); ++k) z[k] = c_[first_ + k];
        return z;
    }

    double crossing(int leaf) const { return c_[leaf]; }

    // Chord ends of wedge i (1-based) as leaf positions relative to wedge i's marks.
    double p_minus(int i) const { return i == 1 ? c_[0] : c_[i - 1] - x_[i - 2]; }
    double p_plus(int i) const { return c_[i]; }

    double value() const {
        double f = 0.0;
        for (int i = 1; i <= n_; ++i) f += wedge_chord(sides_[i - 1], p_minus(i), p_plus(i));
        return f;
    }

    // Value, gradient and (tridiagonal) Hessian at the current point.
    double jet(Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
        g.setZero(dim());
        h.setZero(dim(), dim());
        double f = 0.0;
        for (int i = 1; i <= n_; ++i) {
            const bool left = sides_[i - 1] == Side::Left;
            const double s = left ? 1.0 : -1.0;
            const hyp::WedgeJet j = hyp::wedge_distance_jet(s * p_minus(i), s * p_plus(i));
            f += j.value;
            // d p_minus / d c_{i-1} = 1 and d p_plus / d c_i = 1.
            const int a = i - 1 - first_;
            const int b = i - first_;
            const bool has_a = a >= 0 && a < dim();
            const bool has_b = b >= 0 && b < dim();
            if (has_a) {
                g[a] += s * j.da;
                h(a, a) += j.daa;
            }
            if (has_b) {
                g[b] += s * j.db;
                h(b, b) += j.dbb;
            }
            if (has_a && has_b) {
                h(a, b) += j.dab;
                h(b, a) += j.dab;
            }
        }
        return f;
    }

private:
    const std::vector<Side>& sides_;
    const std::vector<double>& x_;
    int n_;
    std::vector<double> c_;
    int first_ = 0;
    int last_ = 0;
};

struct SolveOutcome {
    bool converged = false;
    int iterations = 0;
    double best = std::numeric_limits<double>::infinity();
};

SolveOutcome newton(Reduced& r, const MinimizeOptions& opts) {
    SolveOutcome out;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    Eigen::VectorXd z = r.get();
    double f = r.jet(g, h);
    out.best = f;
    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it;
        if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
            out.converged = true;
            return out;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        Eigen::VectorXd step;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) step = -ldlt.solve(g);
        if (step.size() == 0 || !step.allFinite() || step.dot(g) >= 0.0) step = -g;

        const double slope = step.dot(g);
        // Near the optimum the predicted decrease drowns in rounding of f;
        // there a full step is accepted whenever it shrinks the gradient.
        Eigen::VectorXd g_full;
        Eigen::MatrixXd h_full;
        r.set(z + step);
        const double f_full = r.jet(g_full, h_full);
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
        const bool sufficient = f_full <= f + 1e-4 * slope;
        const bool flat = f_full <= f + noise &&
                          g_full.lpNorm<Eigen::Infinity>() < g.lpNorm<Eigen::Infinity>();
        if (sufficient || flat) {
            z += step;
            f = f_full;
            g = g_full;
            h = h_full;
        } else {
            double t = 0.5;
            bool moved = false;
            for (int k = 0; k < 60; ++k, t *= 0.5) {
                r.set(z + t * step);
                if (r.value() <= f + 1e-4 * t * slope) {
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                r.set(z);
                return out;
            }
            z += t * step;
            r.set(z);
            f = r.jet(g, h);
        }
        out.best = std::min(out.best, f);
    }
    out.iterations = opts.max_iterations;
    out.converged = g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance;
    return out;
}

// Minimizes along coordinate k by safeguarded Newton on the monotone partial derivative.
void minimize_coordinate(Reduced& r, Eigen::VectorXd& z, int k) {
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    auto deriv = [&](double t, double& curvature) {
        z[k] = t;
        r.set(z);
        r.jet(g, h);
        curvature = h(k, k);
        return g[k];
    };
    double curv = 0.0;
    double t = z[k];
    double gt = deriv(t, curv);
    if (gt == 0.0) return;
    // Bracket the root of the increasing derivative.
    double lo = t, hi = t;
    double step = 1.0;
    if (gt > 0.0) {
        while (true) {
            lo = t - step;
            double c;
            if (deriv(lo, c) <= 0.0 || step > 1e6) break;
            step *= 2.0;
        }
    } else {
        while (true) {
            hi = t + step;
            double c;
            if (deriv(hi, c) >= 0.0 || step > 1e6) break;
            step *= 2.0;
        }
    }
    for (int it = 0; it < 200; ++it) {
        gt = deriv(t, curv);
        if (std::abs(gt) <= 1e-15) break;
        if (gt > 0.0) hi = t; else lo = t;
        double next = curv > 0.0 ? t - gt / curv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(t))) break;
        t = next;
    }
    z[k] = t;
    r.set(z);
}

SolveOutcome coordinate_descent(Reduced& r, const MinimizeOptions& opts) {
    SolveOutcome out;
    Eigen::VectorXd z = r.get();
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    for (int sweep = 0; sweep < opts.max_iterations; ++sweep) {
        r.set(z);
        const double f = r.jet(g, h);
        out.best = std::min(out.best, f);
        out.iterations = sweep;
        if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
            out.converged = true;
            return out;
        }
        for (int k = 0; k < r.dim(); ++k) minimize_coordinate(r, z, k);
    }
    r.set(z);
    out.best = std::min(out.best, r.value());
    out.iterations = opts.max_iterations;
    return out;
}

MinimizeResult solve(Reduced& r, const StripShape& base, const std::vector<double>& x,
                     const MinimizeOptions& opts) {
    MinimizeResult res;
    SolveOutcome out;
    const Eigen::VectorXd start = r.get();
    if (!opts.force_coordinate_descent) out = newton(r, opts);
    if (!out.converged) {
        const double newton_best = out.best;
        const int newton_iterations = out.iterations;
        r.set(start);
        out = coordinate_descent(r, opts);
        out.best = std::min(out.best, newton_best);
        out.iterations += newton_iterations;
        res.used_fallback = true;
    }
    if (!out.converged) {
        throw ConvergenceError("strip length minimization did not converge", out.best);
    }
    const int n = base.wedges();
    const std::vector<double> delta = deltas(base, x);
    res.minimizer = PwCurveCoords(n);
    for (int i = 1; i <= n; ++i) {
        res.minimizer.minus[i - 1] = r.p_minus(i) + 0.5 * delta[i - 1];
        res.minimizer.plus[i - 1] = r.p_plus(i) - 0.5 * delta[i];
    }
    res.length = r.value();
    res.iterations = out.iterations;
    return res;
}

void seed_from(Reduced& r, const StripShape& base, const std::vector<double>& x,
               const std::optional<PwCurveCoords>& initial) {
    if (!initial) return;
    const ChordEnds e = shifted_positions(base, x, *initial);
    Eigen::VectorXd z = r.get();
    const int n = base.wedges();
    const int offset = r.dim() == n + 1 ? 0 : 1;
    for (int k = 0; k < r.dim(); ++k) {
        const int leaf = k + offset;
        z[k] = leaf == 0 ? e.minus[0] : e.plus[leaf - 1];
    }
    r.set(z);
}

}  // namespace

MinimizeResult geodesic_length(const StripShape& base, const std::vector<double>& x,
                               double y_minus, double y_plus, const MinimizeOptions& opts) {
    deltas(base, x);
    Reduced r(base, x, y_minus, y_plus, false);
    seed_from(r, base, x, opts.initial);
    return solve(r, base, x, opts);
}

MinimizeResult core_length(const StripShape& base, const std::vector<double>& x,
                           const MinimizeOptions& opts) {
    deltas(base, x);
    if (!base.combinatorics.has_core()) {
        throw DegenerateStrip("all wedge apices lie on one side; the strip has no core");
    }
    Reduced r(base, x, 0.0, 0.0, true);
    seed_from(r, base, x, opts.initial);
    return solve(r, base, x, opts);
}

}  // namespace shearlab::strip
