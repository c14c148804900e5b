#pragma once

// Upper half-plane primitives: points, ideal points, geodesics, PSL(2,R)
// isometries and the closed-form distances used throughout the library.

#include <array>
#include <stdexcept>
#include <string>

namespace shearlab::hyp {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UhpPoint {
    double x = 0.0;
    double y = 1.0;

    UhpPoint() = default;
    UhpPoint(double x_, double y_);
};

bool operator==(const UhpPoint& p, const UhpPoint& q);

/// A point of the boundary circle R ∪ {∞}. The infinite point carries no value.
class IdealPoint {
public:
    IdealPoint() = default;
    explicit IdealPoint(double value) : value_(value) {}
    static IdealPoint infinity();

    bool is_infinite() const { return infinite_; }
    /// Throws GeometryError on the infinite point.
    double value() const;

    friend bool operator==(const IdealPoint& a, const IdealPoint& b);

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

std::string to_string(const IdealPoint& p);

/// Geodesic with an ordered pair of endpoints. Equality ignores the order;
/// the order is the orientation used by translate_along and by signed
/// arclength positions.
class Geodesic {
public:
    Geodesic(IdealPoint from, IdealPoint to);

    const IdealPoint& from() const { return from_; }
    const IdealPoint& to() const { return to_; }
    Geodesic reversed() const { return Geodesic(to_, from_); }

    friend bool operator==(const Geodesic& a, const Geodesic& b);

private:
    IdealPoint from_;
    IdealPoint to_;
};

/// Element of PSL(2,R), stored with determinant 1.
class MobiusMap {
public:
    MobiusMap() = default;
    /// Rescales to determinant 1; throws if the determinant is not positive.
    MobiusMap(double a, double b, double c, double d);

    static MobiusMap identity() { return {}; }
    /// Unique orientation-preserving map sending p1, p2, p3 to q1, q2, q3.
    /// Throws when the two triples have opposite cyclic orientation.
    static MobiusMap from_triples(const std::array<IdealPoint, 3>& p,
                                  const std::array<IdealPoint, 3>& q);
    /// Orientation-preserving map sending `zero_end` to 0 and `inf_end` to ∞.
    static MobiusMap normalizing(const IdealPoint& zero_end, const IdealPoint& inf_end);

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }
    double trace() const { return a_ + d_; }
    double det() const { return a_ * d_ - b_ * c_; }

    MobiusMap inverse() const;
    MobiusMap operator*(const MobiusMap& rhs) const;

    UhpPoint apply(const UhpPoint& p) const;
    IdealPoint apply(const IdealPoint& p) const;
    Geodesic apply(const Geodesic& g) const;

    /// Entrywise comparison up to the global sign of PSL(2,R).
    bool approx_equal(const MobiusMap& other, double tol) const;

private:
    double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
};

/// Ideal triangle with vertices listed in counterclockwise order.
class IdealTriangle {
public:
    IdealTriangle(IdealPoint v0, IdealPoint v1, IdealPoint v2);
    const std::array<IdealPoint, 3>& vertices() const { return v_; }
    /// Side k joins vertex k to vertex k+1.
    Geodesic side(int k) const;

private:
    std::array<IdealPoint, 3> v_;
};

double dist(const UhpPoint& p, const UhpPoint& q);

/// ((p1−p3)(p2−p4)) / ((p1−p4)(p2−p3)) with the usual limits at ∞.
double cross_ratio(const IdealPoint& p1, const IdealPoint& p2, const IdealPoint& p3,
                   const IdealPoint& p4);

/// Foot of the perpendicular dropped from the ideal point `apex` onto `g`.
UhpPoint foot_of_perpendicular(const Geodesic& g, const IdealPoint& apex);

/// Inscribed-circle tangency points; entry k lies on side k.
std::array<UhpPoint, 3> distinguished_points(const IdealTriangle& t);

/// Hyperbolic translation along g by signed length s, positive from g.from() to g.to().
MobiusMap translate_along(const Geodesic& g, double s);

/// Signed arclength from `origin` to `p`, both on g, positive toward g.to().
double signed_position(const Geodesic& g, const UhpPoint& origin, const UhpPoint& p);

/// Point of g at signed arclength s from `origin` (which must lie on g).
UhpPoint point_along(const Geodesic& g, const UhpPoint& origin, double s);

/// Length of the common perpendicular of two ultraparallel geodesics.
double geodesic_gap(const Geodesic& g1, const Geodesic& g2);

/// Distance between the point at arclength a above (0,1) on x = 0 and the
/// point at arclength b above (1,1) on x = 1.
double wedge_distance(double a, double b);

/// First and second partial derivatives of wedge_distance.
struct WedgeJet {
    double value;
    double da, db;
    double daa, dab, dbb;
};
WedgeJet wedge_distance_jet(double a, double b);

/// Hyperbolic distance from p to the geodesic g.
double distance_to_geodesic(const Geodesic& g, const UhpPoint& p);

}  // namespace shearlab::hyp
