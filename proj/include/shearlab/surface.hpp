#pragma once

// Ideally triangulated punctured surfaces with shear coordinates on the
// edges: holonomy of closed edge-paths, lengths, stretch and earthquake
// lines, and the convexity and asymptotic experiments built on them.
//
// Holonomy normalization. A curve is a cyclic word e1 T1 e2 T2 ... where
// e_i is the edge crossed and T_i the turn taken in the triangle entered.
// Its holonomy is the product of X(x_{e_i}) T_i with
//   X(z) = diag(e^{z/2}, e^{-z/2}),  L = [[1,1],[0,1]],  R = [[1,0],[1,1]].
// Every factor has nonnegative entries, which lets lengths be evaluated in
// the log domain far along stretch lines.
//
// Shear sign: standing in one triangle and facing the edge, the shear is
// positive when the other triangle's distinguished point on that edge lies
// to the left of ours.

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shearlab/harness.hpp"
#include "shearlab/hyp_core.hpp"

namespace shearlab::surface {

class SurfaceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotHyperbolic : public std::runtime_error {
public:
    NotHyperbolic(const std::string& what, double trace) : std::runtime_error(what), trace_(trace) {}
    /// |trace| of the offending holonomy.
    double trace() const { return trace_; }

private:
    double trace_;
};

/// Side `side` of triangle `triangle`.
struct Incidence {
    int triangle;
    int side;

    friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// Triangles list their edges counterclockwise; side k runs from vertex k to
/// vertex k+1. Two sides carrying the same edge are glued reversing direction.
class TriangulatedSurface {
public:
    TriangulatedSurface(std::vector<std::string> edge_names, std::vector<std::array<int, 3>> triangles);

    /// gluings[e] lists the two sides carrying edge e.
    static TriangulatedSurface from_gluings(int triangles, const std::vector<std::array<Incidence, 2>>& gluings,
                                            std::vector<std::string> edge_names = {});

    /// Two triangles (a, b, c) and (a, b, c); one puncture.
    static TriangulatedSurface punctured_torus();
    /// Two triangles (a, b, c) and (a, c, b); three punctures.
    static TriangulatedSurface thrice_punctured_sphere();

    int edge_count() const { return static_cast<int>(names_.size()); }
    int triangle_count() const { return static_cast<int>(tri_.size()); }
    const std::string& edge_name(int e) const { return names_.at(e); }
    int edge_index(std::string_view name) const;
    int edge_at(Incidence i) const { return tri_.at(i.triangle)[i.side]; }
    const std::array<Incidence, 2>& incidences(int e) const { return inc_.at(e); }
    /// The other side carrying the same edge.
    Incidence across(Incidence i) const;

    /// Edges met going once around each puncture; an edge with both ends at
    /// the same puncture appears twice.
    const std::vector<std::vector<int>>& puncture_cycles() const { return cycles_; }
    /// Of the punctured surface: triangles minus edges.
    int euler_characteristic() const;
    /// Genus of the filled-in closed surface.
    int genus() const { return (2 - euler_characteristic() - puncture_count()) / 2; }
    int puncture_count() const { return static_cast<int>(cycles_.size()); }
    /// Row p holds the multiplicity of each edge around puncture p.
    Eigen::MatrixXd relation_matrix() const;

private:
    std::vector<std::string> names_;
    std::vector<std::array<int, 3>> tri_;
    std::vector<std::array<Incidence, 2>> inc_;
    std::vector<std::vector<int>> cycles_;
};

inline constexpr double kRelationTolerance = 1e-12;
inline constexpr double kProjectionTolerance = 1e-9;

/// Shears indexed by edge, satisfying every puncture relation.
class ShearPoint {
public:
    /// Projects onto the relation subspace; throws SurfaceError when the input
    /// lies farther than kProjectionTolerance·max(1, |x|∞) from it.
    ShearPoint(const TriangulatedSurface& s, std::vector<double> x);
    ShearPoint(const TriangulatedSurface& s, const std::map<std::string, double>& x);

    const std::vector<double>& values() const { return x_; }
    double operator[](int e) const { return x_.at(e); }
    int size() const { return static_cast<int>(x_.size()); }

private:
    struct Trusted {};
    ShearPoint(std::vector<double> x, Trusted) : x_(std::move(x)) {}
    friend class DeformationLine;
    friend ShearPoint scaled(const ShearPoint&, double);
    friend ShearPoint shifted(const ShearPoint&, const std::vector<double>&, double);

    std::vector<double> x_;
};

/// Largest |relation| over punctures.
double relation_residual(const TriangulatedSurface& s, const std::vector<double>& x);

/// Orthonormal basis (columns) of the relation subspace.
Eigen::MatrixXd relation_subspace(const TriangulatedSurface& s);

/// u·x; stays in the relation subspace by linearity.
ShearPoint scaled(const ShearPoint& x, double u);
/// x + t·d for a direction already checked against the relations.
ShearPoint shifted(const ShearPoint& x, const std::vector<double>& d, double t);

enum class Turn { Left, Right };

/// Closed edge-path. The empty word is the trivial loop.
struct CurveWord {
    std::vector<int> edges;
    std::vector<Turn> turns;
    /// The side through which the first crossing leaves its triangle.
    Incidence start{0, 0};

    int crossings() const { return static_cast<int>(edges.size()); }
};

/// Parses whitespace-separated tokens "e1 T1 e2 T2 ..." with T in {L, R},
/// and checks that the path closes up. Throws SurfaceError on invalid words.
CurveWord parse_word(const TriangulatedSurface& s, std::string_view text);
std::string to_string(const TriangulatedSurface& s, const CurveWord& c);
/// Word started at crossing k (0 ≤ k < crossings).
CurveWord rotated(const TriangulatedSurface& s, const CurveWord& c, int k);
/// How many times the word crosses each edge.
std::vector<int> crossing_counts(const TriangulatedSurface& s, const CurveWord& c);

hyp::MobiusMap holonomy(const TriangulatedSurface& s, const ShearPoint& x, const CurveWord& c);

/// log|trace| of the holonomy, evaluated on the lexicographically least
/// rotation of the word so that rotations agree bit for bit.
double log_abs_trace(const TriangulatedSurface& s, const ShearPoint& x, const CurveWord& c);

/// 2·arccosh(|trace|/2). Throws NotHyperbolic when |trace| ≤ 2 + 1e-12.
double curve_length(const TriangulatedSurface& s, const ShearPoint& x, const CurveWord& c);

struct WeightedCurve {
    CurveWord curve;
    double weight;
};

double multicurve_length(const TriangulatedSurface& s, const ShearPoint& x,
                         const std::vector<WeightedCurve>& curves);

enum class EarthquakeSide { Left, Right };

class DeformationLine {
public:
    enum class Kind { Stretch, Earthquake };

    static DeformationLine stretch(ShearPoint base);
    /// The direction must satisfy the puncture relations and be nonzero.
    static DeformationLine earthquake(const TriangulatedSurface& s, ShearPoint base, std::vector<double> direction);

    Kind kind() const { return kind_; }
    const ShearPoint& base() const { return base_; }
    const std::vector<double>& direction() const { return direction_; }

private:
    DeformationLine(Kind k, ShearPoint base, std::vector<double> d)
        : kind_(k), base_(std::move(base)), direction_(std::move(d)) {}

    Kind kind_;
    ShearPoint base_;
    std::vector<double> direction_;
};

/// e^t·base.
ShearPoint stretch_point(const DeformationLine& line, double t);
/// u·base, the log-arclength parameterization (u = e^t > 0).
ShearPoint stretch_point_u(const DeformationLine& line, double u);
/// base + t·direction (Left) or base − t·direction (Right).
ShearPoint earthquake_point(const DeformationLine& line, double t, EarthquakeSide side = EarthquakeSide::Left);

struct MonotoneSegment {
    int begin;  // first grid index
    int end;    // last grid index
    int direction;  // +1 increasing, -1 decreasing, 0 flat
};

struct ScanReport {
    std::vector<double> t;
    std::vector<double> values;      // NaN where evaluation failed
    std::vector<std::string> errors; // empty string where evaluation succeeded
    /// Entry i is for interior point i+1. On a uniform grid this is
    /// f(t_i) − 2 f(t_{i+1}) + f(t_{i+2}); otherwise twice the gap between
    /// the chord and the middle value.
    std::vector<double> second_differences;
    harness::ConvexityReport convexity;
    std::vector<MonotoneSegment> monotone;
};

nlohmann::json to_json(const ScanReport& r);

/// Samples f on the sorted grid t. The midpoint margins in the report run
/// over every symmetric triple (i−k, i, i+k) of a uniform grid, and over
/// neighbouring triples otherwise.
ScanReport convexity_scan(const std::function<double(double)>& f, const std::vector<double>& t);
/// `samples` evenly spaced points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int samples);

enum class Limit { Infinity, Zero, Bounded, Undetermined };
std::string to_string(Limit l);

/// How α meets the stump μ0 of the supporting lamination and the
/// horocyclic lamination λ of the stretch line. Supplied by the caller.
struct IntersectionPattern {
    bool meets_stump = false;
    bool inside_stump = false;
    bool meets_horocyclic = false;
    bool inside_horocyclic = false;
};

struct PredictedLimits {
    Limit forward;   // t → +∞
    Limit backward;  // t → −∞
};

PredictedLimits predicted_limits(const IntersectionPattern& p);

/// Trend of samples taken in the direction of approach: Infinity for strict
/// growth by at least a factor 2, Zero for strict decay by at least a
/// factor 2, Bounded when all values stay within 5% of the largest.
Limit observed_trend(const std::vector<double>& values_in_approach_order);

struct AsymptoticReport {
    PredictedLimits predicted;
    std::vector<double> forward_t, forward_lengths;
    std::vector<double> backward_t, backward_lengths;  // ordered from −T_min toward −T_max
    Limit forward_observed;
    Limit backward_observed;
    bool forward_consistent;
    bool backward_consistent;
};

/// Samples the stretch line on [t_min, t_max] and on [−t_max, −t_min].
AsymptoticReport asymptotic_probe(const TriangulatedSurface& s, const DeformationLine& line,
                                  const std::vector<WeightedCurve>& alpha, const IntersectionPattern& pattern,
                                  double t_min = 5.0, double t_max = 10.0, int samples = 11);

/// max over the family of log(ℓ(h)/ℓ(g)); a lower bound for Thurston's
/// asymmetric distance from g to h.
double thurston_distance_estimate(const TriangulatedSurface& s, const ShearPoint& g, const ShearPoint& h,
                                  const std::vector<CurveWord>& family);

}  // namespace shearlab::surface
