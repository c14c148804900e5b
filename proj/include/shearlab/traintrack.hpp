#pragma once

// Generic (trivalent) train tracks stored combinatorially, weight systems
// under the switch conditions, splittings with their linear maps, and the
// dual triangulation.
//
// Switch orientation: standing at a switch and facing its small side,
// in[0] is the incoming branch on the left and in[1] the one on the right.
// Going counterclockwise around the switch the slots read out, in[1], in[0].

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace shearlab::track {

using BranchId = std::string;

class TrackError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SplitDirection { Left, Right };

struct Switch {
    BranchId out;
    std::array<BranchId, 2> in;

    friend bool operator==(const Switch&, const Switch&) = default;
};

/// One end of a branch: switch index and slot (0 = out, 1 = in[0], 2 = in[1]).
struct BranchEnd {
    int sw;
    int slot;
};

class TrainTrack {
public:
    TrainTrack(std::vector<BranchId> branches, std::vector<Switch> switches);

    /// Builds a track from the faces of a triangulation: each face lists its
    /// three edges counterclockwise, and `out_slot` picks the outgoing one.
    static TrainTrack from_faces(const std::vector<std::array<BranchId, 3>>& faces,
                                 const std::vector<int>& out_slot);

    const std::vector<BranchId>& branches() const { return branches_; }
    const std::vector<Switch>& switches() const { return switches_; }
    bool has_branch(const BranchId& b) const { return index_.count(b) > 0; }
    int branch_index(const BranchId& b) const;
    std::array<BranchEnd, 2> ends(const BranchId& b) const;
    const BranchId& slot_branch(int sw, int slot) const;

    /// A branch is large when both of its ends are outgoing slots of distinct switches.
    bool is_large(const BranchId& b) const;
    std::vector<BranchId> large_branches() const;

    /// Switch-condition matrix: row s is σ_out − σ_in0 − σ_in1 in branch order.
    Eigen::MatrixXd switch_matrix() const;
    /// Dimension of the space of vectors satisfying every switch condition.
    int weight_space_dimension() const;

    /// Order-independent description (branch set and switch triples).
    std::string canonical_key() const;

private:
    std::vector<BranchId> branches_;
    std::vector<Switch> switches_;
    std::map<BranchId, int> index_;
    std::vector<std::array<BranchEnd, 2>> ends_;
};

using Weights = std::map<BranchId, double>;

struct ShearVector {
    Weights values;
};

struct MeasureVector {
    Weights values;
};

struct WidthVector {
    Weights values;
};

inline constexpr double kSwitchTolerance = 1e-12;

/// True iff every switch equation holds within kSwitchTolerance.
/// Throws TrackError when keys do not match the branch set.
bool validate(const TrainTrack& t, const ShearVector& v);
/// Also requires every entry to be nonnegative.
bool validate(const TrainTrack& t, const MeasureVector& v);

/// Largest |σ_out − σ_in0 − σ_in1| over switches.
double switch_residual(const TrainTrack& t, const Weights& v);

/// Σ w_b m_b.
double length_pairing(const WidthVector& w, const MeasureVector& m);

/// Σ σ_b m_b. Reported by the transport experiment; not asserted invariant.
double shear_measure_pairing(const ShearVector& s, const MeasureVector& m);

/// Linear map between weight spaces indexed by branch ids.
struct LinearMap {
    std::vector<BranchId> domain;
    std::vector<BranchId> codomain;
    Eigen::MatrixXd matrix;  // codomain.size() x domain.size()

    static LinearMap identity(const std::vector<BranchId>& ids);
    Weights apply(const Weights& v) const;
    /// (*this) ∘ rhs; requires rhs.codomain == domain.
    LinearMap compose(const LinearMap& rhs) const;
};

struct SplitResult {
    TrainTrack track;
    /// Shears on the old track to shears on the split track.
    LinearMap shear_forward;
    /// Shears on the split track back to the old track (the transport).
    LinearMap shear_transport;
    /// Measures on the split track carried to measures on the old track.
    LinearMap measure_carrying;
};

/// Splits the large branch e. The central branch of the result keeps the id e.
///
/// With e drawn horizontally, let v1 be the lower-index switch at its ends,
/// SW = v1.in[0], NW = v1.in[1], NE = v2.in[0], SE = v2.in[1]. Both splits
/// join NW to NE and SW to SE; the new central branch runs NW-to-SE for a
/// Right split and SW-to-NE for a Left split. The new central shear is
/// +(σ_NE − σ_NW) for Left and −(σ_NE − σ_NW) for Right.
SplitResult split(const TrainTrack& t, const BranchId& e, SplitDirection dir);

struct SplitStep {
    BranchId branch;
    SplitDirection dir;
};

struct TransportResult {
    TrainTrack track;       // end of the path
    LinearMap transport;    // shears on the end track to shears on the start track
    LinearMap measure_carrying;
};

/// Composes the per-split transports along a path. Empty path gives the identity.
TransportResult transport(const TrainTrack& start, const std::vector<SplitStep>& path);

/// Dual triangulation: one face per switch, one edge per branch, one vertex
/// per complementary region.
struct DualTriangulation {
    /// Faces as counterclockwise edge triples (out, in[1], in[0]).
    std::vector<std::array<BranchId, 3>> faces;
    std::vector<BranchId> edges;
    /// vertex_of_corner[f][k]: vertex at the corner between slots k and k+1 of face f.
    std::vector<std::array<int, 3>> vertex_of_corner;
    int vertex_count = 0;

    /// Number of cusps (corners between the two incoming slots) at each vertex.
    std::vector<int> cusps_per_vertex() const;
    /// Faces up to rotation, sorted; equal keys mean combinatorially equal triangulations.
    std::string canonical_key() const;
};

DualTriangulation dual(const TrainTrack& t);
DualTriangulation dual_from_faces(std::vector<std::array<BranchId, 3>> faces);

/// Flips the diagonal e shared by two distinct faces.
DualTriangulation flip(const DualTriangulation& d, const BranchId& e);

struct DualPathStep {
    BranchId branch;
    /// Whether this crossing lies on the opposite side of the reference
    /// transversal from the previous one; the first step's flag is ignored.
    bool alternates = true;
};

/// Signed sum of branch shears along a dual path; with every flag set this is
/// σ_1 − σ_2 + σ_3 − ...
double shear_along_dual_path(const ShearVector& s, const std::vector<DualPathStep>& path);
/// Same, additionally checking that consecutive branches share a switch of t.
double shear_along_dual_path(const TrainTrack& t, const ShearVector& s,
                             const std::vector<DualPathStep>& path);

/// Example tracks used by the tests and the CLI.
namespace examples {
/// Once-punctured torus: two faces (1,2,3), branch "1" large.
TrainTrack punctured_torus();
/// Twice-punctured torus with six branches.
TrainTrack six_branch();
/// Complete track on a closed genus-2 surface: 18 branches, 12 switches.
TrainTrack genus_two();
}  // namespace examples

}  // namespace shearlab::track
