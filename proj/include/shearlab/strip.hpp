#pragma once

// Strips cut into finitely many wedges. Leaves are indexed 0..n from g⁻ to
// g⁺, wedge i (1-based) lies between leaves i-1 and i. Every leaf is oriented
// toward the Left side of the oriented core, and all arclength positions on a
// leaf are measured in that orientation from a wedge's distinguished point.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shearlab/hyp_core.hpp"

namespace shearlab::strip {

enum class Side { Left, Right };

char to_char(Side s);
Side side_from_char(char c);

class StripError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Pure fans have asymptotic boundary leaves and no core.
class DegenerateStrip : public StripError {
public:
    using StripError::StripError;
};

/// Raised when minimization hits its iteration cap; carries the best value seen.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best) : std::runtime_error(what), best_(best) {}
    double best_value() const { return best_; }

private:
    double best_;
};

struct WedgeCombinatorics {
    std::vector<Side> apex_sides;

    explicit WedgeCombinatorics(std::vector<Side> sides);
    int wedges() const { return static_cast<int>(apex_sides.size()); }
    /// False for pure fans (every apex on the same side).
    bool has_core() const;
};

struct StripShape {
    WedgeCombinatorics combinatorics;
    std::vector<double> shears;  // one per interior leaf 1..n-1

    StripShape(WedgeCombinatorics c, std::vector<double> s);
    int wedges() const { return combinatorics.wedges(); }
    StripShape with_shears(std::vector<double> s) const { return {combinatorics, std::move(s)}; }
};

/// Positions (y_i⁻, y_i⁺) of the endpoints of wedge segment i, relative to the
/// distinguished points of wedge i on its two sides.
struct PwCurveCoords {
    std::vector<double> minus;
    std::vector<double> plus;

    PwCurveCoords() = default;
    explicit PwCurveCoords(int n) : minus(n, 0.0), plus(n, 0.0) {}
    int wedges() const { return static_cast<int>(minus.size()); }
};

struct DevelopedWedge {
    hyp::IdealPoint apex;
    hyp::UhpPoint near_marked;  // on leaf i-1
    hyp::UhpPoint far_marked;   // on leaf i
    hyp::MobiusMap frame;       // standard wedge (sides x=0, x=1, apex ∞) onto this wedge
};

struct DevelopedStrip {
    StripShape shape;
    std::vector<hyp::Geodesic> leaves;   // oriented Right end -> Left end
    std::vector<DevelopedWedge> wedges;  // wedges[i-1] is wedge i

    int n() const { return shape.wedges(); }
    const DevelopedWedge& wedge(int i) const { return wedges.at(i - 1); }
    /// Distinguished point of wedge i on leaf j (j must be i-1 or i).
    const hyp::UhpPoint& marked_point(int wedge_index, int leaf) const;
    /// Point of leaf j at `position` from wedge i's distinguished point.
    hyp::UhpPoint point_on_leaf(int leaf, int wedge_index, double position) const;
    /// Inverse of point_on_leaf.
    double position_on_leaf(int leaf, int wedge_index, const hyp::UhpPoint& p) const;
};

DevelopedStrip develop(const StripShape& shape);

/// Signed arclength from wedge j's to wedge j+1's distinguished point on leaf j.
double measure_shear(const DevelopedStrip& d, int leaf);

/// Sum of the leaf shears separating wedges i1 < i2.
double shear_between(const DevelopedStrip& d, int i1, int i2);

/// Slides a point along the horocycles centered at the wedge apices, from
/// `from_leaf` to `to_leaf` > `from_leaf`. The input position is relative to
/// the distinguished point of wedge from_leaf+1, the output relative to the
/// distinguished point of wedge to_leaf.
double horocyclic_project(const DevelopedStrip& d, int from_leaf, double position, int to_leaf);

/// Chord length of wedge i between leaf positions (p_minus, p_plus) taken in
/// the common Left-pointing leaf orientation.
double wedge_chord(Side apex, double p_minus, double p_plus);

/// Leaf positions of the chord endpoints of wedge i for the curve `y` carried
/// into the structure with shears `x`.
struct ChordEnds {
    std::vector<double> minus;
    std::vector<double> plus;
};
ChordEnds shifted_positions(const StripShape& base, const std::vector<double>& x,
                            const PwCurveCoords& y);

/// Length of the piecewise geodesic curve with coordinates `y` in the strip
/// obtained from `base` by shearing to `x`.
double pw_length(const StripShape& base, const std::vector<double>& x, const PwCurveCoords& y);

/// Leaf-segment term of interior leaf j (independent of x).
double gap_term(const StripShape& base, const PwCurveCoords& y, int leaf);

struct MinimizeOptions {
    std::optional<PwCurveCoords> initial;
    int max_iterations = 10000;
    double gradient_tolerance = 1e-10;
    bool force_coordinate_descent = false;
};

struct MinimizeResult {
    double length = 0.0;
    PwCurveCoords minimizer;
    int iterations = 0;
    bool used_fallback = false;
};

/// Minimum of pw_length over curves with y_1⁻ = y_minus and y_n⁺ = y_plus.
MinimizeResult geodesic_length(const StripShape& base, const std::vector<double>& x,
                               double y_minus, double y_plus, const MinimizeOptions& opts = {});

/// Unconstrained minimum of pw_length: the length of the core.
MinimizeResult core_length(const StripShape& base, const std::vector<double>& x,
                           const MinimizeOptions& opts = {});

}  // namespace shearlab::strip
