#include "shearlab/traintrack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace shearlab::track {

namespace {

const BranchId& slot_of(const Switch& s, int slot) { return slot == 0 ? s.out : s.in[slot - 1]; }

void require_keys(const std::vector<BranchId>& branches, const Weights& v, const char* what) {
    if (v.size() != branches.size()) {
        throw TrackError(std::string(what) + " has " + std::to_string(v.size()) +
                         " entries, track has " + std::to_string(branches.size()) + " branches");
    }
    for (const auto& b : branches) {
        if (!v.count(b)) throw TrackError(std::string(what) + " is missing branch '" + b + "'");
    }
}

std::vector<BranchId> sorted_keys(const Weights& w) {
    std::vector<BranchId> k;
    for (const auto& [b, _] : w) k.push_back(b);
    return k;
}

}  // namespace

TrainTrack::TrainTrack(std::vector<BranchId> branches, std::vector<Switch> switches)
    : branches_(std::move(branches)), switches_(std::move(switches)) {
    if (branches_.empty()) throw TrackError("track has no branches");
    for (size_t i = 0; i < branches_.size(); ++i) {
        if (!index_.emplace(branches_[i], static_cast<int>(i)).second) {
            throw TrackError("duplicate branch id '" + branches_[i] + "'");
        }
    }
    std::vector<std::vector<BranchEnd>> found(branches_.size());
    for (size_t s = 0; s < switches_.size(); ++s) {
        for (int slot = 0; slot < 3; ++slot) {
            const BranchId& b = slot_of(switches_[s], slot);
            auto it = index_.find(b);
            if (it == index_.end()) throw TrackError("switch refers to unknown branch '" + b + "'");
            found[it->second].push_back({static_cast<int>(s), slot});
        }
    }
    ends_.resize(branches_.size());
    for (size_t i = 0; i < branches_.size(); ++i) {
        if (found[i].size() != 2) {
            throw TrackError("branch '" + branches_[i] + "' has " + std::to_string(found[i].size()) +
                             " ends, expected 2");
        }
        ends_[i] = {found[i][0], found[i][1]};
    }
}

TrainTrack TrainTrack::from_faces(const std::vector<std::array<BranchId, 3>>& faces,
                                  const std::vector<int>& out_slot) {
    if (faces.size() != out_slot.size()) throw TrackError("one out slot per face required");
    std::vector<BranchId> branches;
    std::set<BranchId> seen;
    std::vector<Switch> switches;
    for (size_t f = 0; f < faces.size(); ++f) {
        const int k = out_slot[f];
        if (k < 0 || k > 2) throw TrackError("out slot must be 0, 1 or 2");
        const auto& s = faces[f];
        for (const auto& b : s) {
            if (seen.insert(b).second) branches.push_back(b);
        }
        // Counterclockwise (out, in[1], in[0]) = (s_k, s_{k+1}, s_{k+2}).
        switches.push_back({s[k], {s[(k + 2) % 3], s[(k + 1) % 3]}});
    }
    return {branches, switches};
}

int TrainTrack::branch_index(const BranchId& b) const {
    auto it = index_.find(b);
    if (it == index_.end()) throw TrackError("unknown branch '" + b + "'");
    return it->second;
}

std::array<BranchEnd, 2> TrainTrack::ends(const BranchId& b) const { return ends_[branch_index(b)]; }

const BranchId& TrainTrack::slot_branch(int sw, int slot) const {
    return slot_of(switches_.at(sw), slot);
}

bool TrainTrack::is_large(const BranchId& b) const {
    const auto e = ends(b);
    return e[0].slot == 0 && e[1].slot == 0 && e[0].sw != e[1].sw;
}

std::vector<BranchId> TrainTrack::large_branches() const {
    std::vector<BranchId> out;
    for (const auto& b : branches_) {
        if (is_large(b)) out.push_back(b);
    }
    return out;
}

Eigen::MatrixXd TrainTrack::switch_matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(switches_.size(), branches_.size());
    for (size_t s = 0; s < switches_.size(); ++s) {
        m(s, branch_index(switches_[s].out)) += 1.0;
        m(s, branch_index(switches_[s].in[0])) -= 1.0;
        m(s, branch_index(switches_[s].in[1])) -= 1.0;
    }
    return m;
}

int TrainTrack::weight_space_dimension() const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(switch_matrix());
    return static_cast<int>(branches_.size()) - static_cast<int>(lu.rank());
}

std::string TrainTrack::canonical_key() const {
    std::vector<std::string> sw;
    for (const auto& s : switches_) sw.push_back(s.out + "|" + s.in[0] + "|" + s.in[1]);
    std::sort(sw.begin(), sw.end());
    std::vector<BranchId> b = branches_;
    std::sort(b.begin(), b.end());
    std::ostringstream os;
    for (const auto& x : b) os << x << ',';
    os << ';';
    for (const auto& x : sw) os << x << ';';
    return os.str();
}

double switch_residual(const TrainTrack& t, const Weights& v) {
    require_keys(t.branches(), v, "weight vector");
    double worst = 0.0;
    for (const auto& s : t.switches()) {
        const double r = v.at(s.out) - v.at(s.in[0]) - v.at(s.in[1]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

bool validate(const TrainTrack& t, const ShearVector& v) {
    return switch_residual(t, v.values) <= kSwitchTolerance;
}

bool validate(const TrainTrack& t, const MeasureVector& v) {
    if (switch_residual(t, v.values) > kSwitchTolerance) return false;
    return std::all_of(v.values.begin(), v.values.end(), [](const auto& kv) { return kv.second >= 0.0; });
}

double length_pairing(const WidthVector& w, const MeasureVector& m) {
    require_keys(sorted_keys(w.values), m.values, "measure vector");
    double total = 0.0;
    for (const auto& [b, width] : w.values) {
        if (!(width > 0.0)) throw TrackError("width of branch '" + b + "' must be positive");
        const double mass = m.values.at(b);
        if (mass < 0.0) throw TrackError("mass of branch '" + b + "' must be nonnegative");
        total += width * mass;
    }
    return total;
}

double shear_measure_pairing(const ShearVector& s, const MeasureVector& m) {
    require_keys(sorted_keys(s.values), m.values, "measure vector");
    double total = 0.0;
    for (const auto& [b, sigma] : s.values) total += sigma * m.values.at(b);
    return total;
}

LinearMap LinearMap::identity(const std::vector<BranchId>& ids) {
    const auto n = static_cast<Eigen::Index>(ids.size());
    return {ids, ids, Eigen::MatrixXd::Identity(n, n)};
}

Weights LinearMap::apply(const Weights& v) const {
    require_keys(domain, v, "input vector");
    Eigen::VectorXd in(domain.size());
    for (size_t i = 0; i < domain.size(); ++i) in[i] = v.at(domain[i]);
    const Eigen::VectorXd out = matrix * in;
    Weights result;
    for (size_t i = 0; i < codomain.size(); ++i) result[codomain[i]] = out[i];
    return result;
}

LinearMap LinearMap::compose(const LinearMap& rhs) const {
    if (rhs.codomain != domain) throw TrackError("linear maps do not compose: branch orders differ");
    return {rhs.domain, codomain, matrix * rhs.matrix};
}

SplitResult split(const TrainTrack& t, const BranchId& e, SplitDirection dir) {
    if (!t.has_branch(e)) throw TrackError("unknown branch '" + e + "'");
    if (!t.is_large(e)) throw TrackError("branch '" + e + "' is not large and cannot be split");
    auto ends = t.ends(e);
    const int v1 = std::min(ends[0].sw, ends[1].sw);
    const int v2 = std::max(ends[0].sw, ends[1].sw);
    const Switch& s1 = t.switches()[v1];
    const Switch& s2 = t.switches()[v2];
    const BranchId sw_b = s1.in[0], nw_b = s1.in[1], ne_b = s2.in[0], se_b = s2.in[1];

    std::vector<Switch> switches = t.switches();
    if (dir == SplitDirection::Right) {
        switches[v1] = {nw_b, {ne_b, e}};
        switches[v2] = {se_b, {sw_b, e}};
    } else {
        switches[v1] = {sw_b, {e, se_b}};
        switches[v2] = {ne_b, {e, nw_b}};
    }
    TrainTrack next(t.branches(), switches);

    const auto& ids = t.branches();
    const int ie = t.branch_index(e);
    const int inw = t.branch_index(nw_b), ine = t.branch_index(ne_b), isw = t.branch_index(sw_b);

    LinearMap forward = LinearMap::identity(ids);
    forward.matrix.row(ie).setZero();
    const double sign = dir == SplitDirection::Left ? 1.0 : -1.0;
    forward.matrix(ie, ine) += sign;
    forward.matrix(ie, inw) -= sign;

    // The old central branch carries everything entering from the west.
    LinearMap back = LinearMap::identity(ids);
    back.matrix.row(ie).setZero();
    back.matrix(ie, inw) += 1.0;
    back.matrix(ie, isw) += 1.0;

    return {std::move(next), forward, back, back};
}

TransportResult transport(const TrainTrack& start, const std::vector<SplitStep>& path) {
    TransportResult r{start, LinearMap::identity(start.branches()), LinearMap::identity(start.branches())};
    for (size_t k = 0; k < path.size(); ++k) {
        SplitResult s = [&] {
            try {
                return split(r.track, path[k].branch, path[k].dir);
            } catch (const TrackError& err) {
                throw TrackError("split " + std::to_string(k + 1) + " of path: " + err.what());
            }
        }();
        r.transport = r.transport.compose(s.shear_transport);
        r.measure_carrying = r.measure_carrying.compose(s.measure_carrying);
        r.track = std::move(s.track);
    }
    return r;
}

DualTriangulation dual_from_faces(std::vector<std::array<BranchId, 3>> faces) {
    DualTriangulation d;
    d.faces = std::move(faces);
    std::map<BranchId, std::vector<std::pair<int, int>>> inc;
    for (size_t f = 0; f < d.faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) inc[d.faces[f][k]].push_back({static_cast<int>(f), k});
    }
    for (const auto& [e, list] : inc) {
        if (list.size() != 2) throw TrackError("dual edge '" + e + "' is not shared by exactly two face sides");
        d.edges.push_back(e);
    }

    const int nf = static_cast<int>(d.faces.size());
    std::vector<int> parent(3 * nf);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            // Rotating about the corner's vertex crosses the side after it.
            const int side = (k + 1) % 3;
            const auto& list = inc[d.faces[f][side]];
            const auto other = (list[0].first == f && list[0].second == side) ? list[1] : list[0];
            parent[find(3 * f + k)] = find(3 * other.first + other.second);
        }
    }
    std::map<int, int> label;
    d.vertex_of_corner.resize(nf);
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int root = find(3 * f + k);
            auto it = label.emplace(root, static_cast<int>(label.size())).first;
            d.vertex_of_corner[f][k] = it->second;
        }
    }
    d.vertex_count = static_cast<int>(label.size());
    return d;
}

DualTriangulation dual(const TrainTrack& t) {
    std::vector<std::array<BranchId, 3>> faces;
    for (const auto& s : t.switches()) faces.push_back({s.out, s.in[1], s.in[0]});
    return dual_from_faces(std::move(faces));
}

std::vector<int> DualTriangulation::cusps_per_vertex() const {
    std::vector<int> c(vertex_count, 0);
    for (const auto& corners : vertex_of_corner) ++c[corners[1]];
    return c;
}

std::string DualTriangulation::canonical_key() const {
    std::vector<std::string> keys;
    for (const auto& f : faces) {
        int start = 0;
        for (int k = 1; k < 3; ++k) {
            if (f[k] < f[start]) start = k;
        }
        keys.push_back(f[start] + "," + f[(start + 1) % 3] + "," + f[(start + 2) % 3]);
    }
    std::sort(keys.begin(), keys.end());
    std::string out;
    for (const auto& k : keys) out += k + ";";
    return out;
}

DualTriangulation flip(const DualTriangulation& d, const BranchId& e) {
    std::vector<std::pair<int, int>> where;
    for (size_t f = 0; f < d.faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) {
            if (d.faces[f][k] == e) where.push_back({static_cast<int>(f), k});
        }
    }
    if (where.size() != 2) throw TrackError("edge '" + e + "' is not in the triangulation");
    if (where[0].first == where[1].first) throw TrackError("edge '" + e + "' borders a single face");
    auto rotated = [&](std::pair<int, int> at) {
        const auto& f = d.faces[at.first];
        return std::array<BranchId, 3>{f[at.second], f[(at.second + 1) % 3], f[(at.second + 2) % 3]};
    };
    const auto f1 = rotated(where[0]);  // (e, p, q)
    const auto f2 = rotated(where[1]);  // (e, r, s)
    auto faces = d.faces;
    faces[where[0].first] = {e, f1[2], f2[1]};
    faces[where[1].first] = {e, f2[2], f1[1]};
    return dual_from_faces(std::move(faces));
}

double shear_along_dual_path(const ShearVector& s, const std::vector<DualPathStep>& path) {
    if (path.empty()) throw TrackError("dual path is empty");
    std::map<BranchId, int> uses;
    double total = 0.0;
    double sign = 1.0;
    for (size_t k = 0; k < path.size(); ++k) {
        const auto it = s.values.find(path[k].branch);
        if (it == s.values.end()) throw TrackError("dual path crosses unknown branch '" + path[k].branch + "'");
        if (++uses[path[k].branch] > 2) {
            throw TrackError("dual path crosses branch '" + path[k].branch + "' more than twice");
        }
        if (k > 0 && path[k].alternates) sign = -sign;
        total += sign * it->second;
    }
    return total;
}

double shear_along_dual_path(const TrainTrack& t, const ShearVector& s,
                             const std::vector<DualPathStep>& path) {
    for (const auto& step : path) {
        if (!t.has_branch(step.branch)) throw TrackError("dual path crosses unknown branch '" + step.branch + "'");
    }
    for (size_t k = 1; k < path.size(); ++k) {
        bool adjacent = false;
        for (const auto& sw : t.switches()) {
            bool a = false, b = false;
            for (int slot = 0; slot < 3; ++slot) {
                a = a || slot_of(sw, slot) == path[k - 1].branch;
                b = b || slot_of(sw, slot) == path[k].branch;
            }
            adjacent = adjacent || (a && b);
        }
        if (!adjacent) {
            throw TrackError("dual path is disconnected between '" + path[k - 1].branch + "' and '" +
                             path[k].branch + "'");
        }
    }
    return shear_along_dual_path(s, path);
}

namespace examples {

TrainTrack punctured_torus() { return TrainTrack::from_faces({{"1", "2", "3"}, {"1", "2", "3"}}, {0, 0}); }

TrainTrack six_branch() {
    return TrainTrack::from_faces(
        {{"1", "n1", "n0"}, {"2", "n2", "n1"}, {"3", "n0", "n2"}, {"1", "2", "3"}}, {0, 0, 0, 0});
}

TrainTrack genus_two() {
    // Octagon a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹, fan-triangulated from one corner
    // (diagonals g2..g6), then one extra vertex inserted in three faces.
    std::vector<std::array<BranchId, 3>> faces;
    std::vector<int> outs;
    auto insert = [&](const std::array<BranchId, 3>& e, const std::string& tag) {
        const BranchId n0 = tag + "0", n1 = tag + "1", n2 = tag + "2";
        faces.push_back({e[0], n1, n0});
        faces.push_back({e[1], n2, n1});
        faces.push_back({e[2], n0, n2});
        outs.insert(outs.end(), {0, 0, 0});
    };
    insert({"a", "b", "g2"}, "p");
    faces.push_back({"g2", "a", "g3"});
    outs.push_back(0);
    insert({"g3", "b", "g4"}, "q");
    faces.push_back({"g4", "c", "g5"});
    outs.push_back(0);
    insert({"g5", "d", "g6"}, "r");
    faces.push_back({"g6", "c", "d"});
    outs.push_back(0);
    return TrainTrack::from_faces(faces, outs);
}

}  // namespace examples

}  // namespace shearlab::track
