#include "shearlab/hyp_core.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace shearlab::hyp {

namespace {

using Complex = std::complex<double>;

// Unnormalized 2x2 real matrix; the determinant may have either sign.
struct Raw {
    double a, b, c, d;
    double det() const { return a * d - b * c; }
    Raw operator*(const Raw& r) const {
        return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
    }
    Raw adjugate() const { return {d, -b, -c, a}; }
};

// Map sending p1 -> 0, p2 -> ∞, p3 -> 1.
Raw to_standard_frame(const IdealPoint& p1, const IdealPoint& p2, const IdealPoint& p3) {
    if (p1 == p2 || p2 == p3 || p1 == p3) {
        throw GeometryError("coincident points in Mobius triple");
    }
    if (p1.is_infinite()) {
        const double q2 = p2.value(), q3 = p3.value();
        return {0.0, q3 - q2, 1.0, -q2};
    }
    if (p2.is_infinite()) {
        const double q1 = p1.value(), q3 = p3.value();
        return {1.0, -q1, 0.0, q3 - q1};
    }
    if (p3.is_infinite()) {
        const double q1 = p1.value(), q2 = p2.value();
        return {1.0, -q1, 1.0, -q2};
    }
    const double q1 = p1.value(), q2 = p2.value(), q3 = p3.value();
    return {q3 - q2, -q1 * (q3 - q2), q3 - q1, -q2 * (q3 - q1)};
}

}  // namespace

UhpPoint::UhpPoint(double x_, double y_) : x(x_), y(y_) {
    if (!(y_ > 0.0) || !std::isfinite(x_) || !std::isfinite(y_)) {
        throw GeometryError("upper half-plane point needs finite x and y > 0");
    }
}

bool operator==(const UhpPoint& p, const UhpPoint& q) { return p.x == q.x && p.y == q.y; }

IdealPoint IdealPoint::infinity() {
    IdealPoint p;
    p.infinite_ = true;
    return p;
}

double IdealPoint::value() const {
    if (infinite_) throw GeometryError("value() called on the ideal point at infinity");
    return value_;
}

bool operator==(const IdealPoint& a, const IdealPoint& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
}

std::string to_string(const IdealPoint& p) {
    if (p.is_infinite()) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << p.value();
    return os.str();
}

Geodesic::Geodesic(IdealPoint from, IdealPoint to) : from_(from), to_(to) {
    if (from_ == to_) throw GeometryError("geodesic endpoints must be distinct");
}

bool operator==(const Geodesic& a, const Geodesic& b) {
    return (a.from_ == b.from_ && a.to_ == b.to_) || (a.from_ == b.to_ && a.to_ == b.from_);
}

MobiusMap::MobiusMap(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    if (!(det > 0.0) || !std::isfinite(det)) {
        throw GeometryError("Mobius matrix must have positive finite determinant");
    }
    const double s = std::sqrt(det);
    a_ = a / s;
    b_ = b / s;
    c_ = c / s;
    d_ = d / s;
}

MobiusMap MobiusMap::from_triples(const std::array<IdealPoint, 3>& p,
                                  const std::array<IdealPoint, 3>& q) {
    const Raw tp = to_standard_frame(p[0], p[1], p[2]);
    const Raw tq = to_standard_frame(q[0], q[1], q[2]);
    // adj(tq) inverts tq up to the scalar det(tq); the product's determinant
    // sign is the orientation of the induced map.
    const Raw m = tq.adjugate() * tp;
    if (!(m.det() > 0.0)) throw GeometryError("triples have opposite orientation");
    return {m.a, m.b, m.c, m.d};
}

MobiusMap MobiusMap::normalizing(const IdealPoint& zero_end, const IdealPoint& inf_end) {
    if (zero_end == inf_end) throw GeometryError("normalizing map needs distinct endpoints");
    if (inf_end.is_infinite()) return {1.0, -zero_end.value(), 0.0, 1.0};
    const double q = inf_end.value();
    if (zero_end.is_infinite()) return {0.0, -1.0, 1.0, -q};
    const double p = zero_end.value();
    if (p > q) return {1.0, -p, 1.0, -q};
    return {-1.0, p, 1.0, -q};
}

MobiusMap MobiusMap::inverse() const { return {d_, -b_, -c_, a_}; }

MobiusMap MobiusMap::operator*(const MobiusMap& r) const {
    return {a_ * r.a_ + b_ * r.c_, a_ * r.b_ + b_ * r.d_, c_ * r.a_ + d_ * r.c_,
            c_ * r.b_ + d_ * r.d_};
}

UhpPoint MobiusMap::apply(const UhpPoint& p) const {
    const Complex z(p.x, p.y);
    const Complex w = (a_ * z + b_) / (c_ * z + d_);
    return {w.real(), w.imag()};
}

IdealPoint MobiusMap::apply(const IdealPoint& p) const {
    if (p.is_infinite()) {
        if (c_ == 0.0) return IdealPoint::infinity();
        return IdealPoint(a_ / c_);
    }
    const double x = p.value();
    const double den = c_ * x + d_;
    if (den == 0.0) return IdealPoint::infinity();
    return IdealPoint((a_ * x + b_) / den);
}

Geodesic MobiusMap::apply(const Geodesic& g) const { return {apply(g.from()), apply(g.to())}; }

bool MobiusMap::approx_equal(const MobiusMap& o, double tol) const {
    auto close = [tol](double s, const MobiusMap& m, const MobiusMap& n) {
        return std::abs(m.a_ - s * n.a_) <= tol && std::abs(m.b_ - s * n.b_) <= tol &&
               std::abs(m.c_ - s * n.c_) <= tol && std::abs(m.d_ - s * n.d_) <= tol;
    };
    return close(1.0, *this, o) || close(-1.0, *this, o);
}

IdealTriangle::IdealTriangle(IdealPoint v0, IdealPoint v1, IdealPoint v2) : v_{v0, v1, v2} {
    if (v0 == v1 || v1 == v2 || v0 == v2) {
        throw GeometryError("ideal triangle vertices must be distinct");
    }
}

Geodesic IdealTriangle::side(int k) const { return {v_[k % 3], v_[(k + 1) % 3]}; }

double dist(const UhpPoint& p, const UhpPoint& q) {
    const double chord = std::hypot(p.x - q.x, p.y - q.y);
    return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.y * q.y)));
}

double cross_ratio(const IdealPoint& p1, const IdealPoint& p2, const IdealPoint& p3,
                   const IdealPoint& p4) {
    const std::array<IdealPoint, 4> pts{p1, p2, p3, p4};
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (pts[i] == pts[j]) throw GeometryError("cross ratio of coincident points");
        }
    }
    // Every point enters once above and once below the fraction bar, so the
    // factors containing ∞ cancel.
    if (p1.is_infinite()) return (p2.value() - p4.value()) / (p2.value() - p3.value());
    if (p2.is_infinite()) return (p1.value() - p3.value()) / (p1.value() - p4.value());
    if (p3.is_infinite()) return (p2.value() - p4.value()) / (p1.value() - p4.value());
    if (p4.is_infinite()) return (p1.value() - p3.value()) / (p2.value() - p3.value());
    const double x1 = p1.value(), x2 = p2.value(), x3 = p3.value(), x4 = p4.value();
    return ((x1 - x3) * (x2 - x4)) / ((x1 - x4) * (x2 - x3));
}

UhpPoint foot_of_perpendicular(const Geodesic& g, const IdealPoint& apex) {
    if (apex == g.from() || apex == g.to()) {
        throw GeometryError("perpendicular from an endpoint of the geodesic");
    }
    const MobiusMap n = MobiusMap::normalizing(g.from(), g.to());
    const double r = n.apply(apex).value();
    return n.inverse().apply(UhpPoint(0.0, std::abs(r)));
}

std::array<UhpPoint, 3> distinguished_points(const IdealTriangle& t) {
    const auto& v = t.vertices();
    return {foot_of_perpendicular(t.side(0), v[2]), foot_of_perpendicular(t.side(1), v[0]),
            foot_of_perpendicular(t.side(2), v[1])};
}

MobiusMap translate_along(const Geodesic& g, double s) {
    const MobiusMap n = MobiusMap::normalizing(g.from(), g.to());
    const MobiusMap dilation(std::exp(0.5 * s), 0.0, 0.0, std::exp(-0.5 * s));
    return n.inverse() * dilation * n;
}

double signed_position(const Geodesic& g, const UhpPoint& origin, const UhpPoint& p) {
    const MobiusMap n = MobiusMap::normalizing(g.from(), g.to());
    const UhpPoint o = n.apply(origin);
    const UhpPoint q = n.apply(p);
    return std::log(std::hypot(q.x, q.y) / std::hypot(o.x, o.y));
}

UhpPoint point_along(const Geodesic& g, const UhpPoint& origin, double s) {
    // Scaling in the normalized chart avoids forming the ill-conditioned
    // conjugated matrix when the endpoints of g are close together.
    const MobiusMap n = MobiusMap::normalizing(g.from(), g.to());
    const UhpPoint o = n.apply(origin);
    const double k = std::exp(s);
    return n.inverse().apply(UhpPoint(k * o.x, k * o.y));
}

double geodesic_gap(const Geodesic& g1, const Geodesic& g2) {
    const MobiusMap n = MobiusMap::normalizing(g1.from(), g1.to());
    const IdealPoint e1 = n.apply(g2.from());
    const IdealPoint e2 = n.apply(g2.to());
    if (e1.is_infinite() || e2.is_infinite()) throw GeometryError("asymptotic geodesics");
    const double p = e1.value(), q = e2.value();
    if (p == 0.0 || q == 0.0) throw GeometryError("asymptotic geodesics");
    if ((p < 0.0) != (q < 0.0)) throw GeometryError("crossing geodesics");
    const double lo = std::min(std::abs(p), std::abs(q));
    const double hi = std::max(std::abs(p), std::abs(q));
    // arccosh((hi+lo)/(hi-lo)) written as a log of the square-root ratio.
    return std::log((std::sqrt(hi) + std::sqrt(lo)) / (std::sqrt(hi) - std::sqrt(lo)));
}

double wedge_distance(double a, double b) { return wedge_distance_jet(a, b).value; }

WedgeJet wedge_distance_jet(double a, double b) {
    // cosh d = cosh(a-b) + exp(-(a+b))/2, and u = cosh d - 1 is formed without cancellation.
    const double half_diff = 0.5 * (a - b);
    const double corner = 0.5 * std::exp(-(a + b));
    const double sh = std::sinh(half_diff);
    const double u = 2.0 * sh * sh + corner;
    const double c = 1.0 + u;
    const double sinh_d = std::sqrt(u * (u + 2.0));
    WedgeJet j{};
    j.value = std::log1p(u + sinh_d);
    const double sd = std::sinh(a - b);
    const double ca = sd - corner;
    const double cb = -sd - corner;
    const double caa = c;
    const double cbb = c;
    const double cab = -std::cosh(a - b) + corner;
    j.da = ca / sinh_d;
    j.db = cb / sinh_d;
    j.daa = (caa - c * j.da * j.da) / sinh_d;
    j.dbb = (cbb - c * j.db * j.db) / sinh_d;
    j.dab = (cab - c * j.da * j.db) / sinh_d;
    return j;
}

double distance_to_geodesic(const Geodesic& g, const UhpPoint& p) {
    const MobiusMap n = MobiusMap::normalizing(g.from(), g.to());
    const UhpPoint q = n.apply(p);
    return std::asinh(std::abs(q.x) / q.y);
}

}  // namespace shearlab::hyp
