#pragma once

// Numerical probes for convexity checks: midpoint margins, central
// finite differences, seeded segment sampling and pass/fail reports.

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace shearlab::harness {

using VecFn = std::function<double(const Eigen::VectorXd&)>;

class ProbeError : public std::runtime_error {
public:
    ProbeError(const std::string& what, std::vector<double> witness)
        : std::runtime_error(what), witness_(std::move(witness)) {}
    const std::vector<double>& witness() const { return witness_; }

private:
    std::vector<double> witness_;
};

inline constexpr double kStrictSecondDifference = 1e-8;
inline constexpr double kStrictMargin = 1e-9;
inline constexpr double kViolation = -1e-9;

enum class Verdict { StrictlyConvex, Convex, NotConvex };
std::string to_string(Verdict v);

struct Witness {
    std::vector<double> input;
    double value = 0.0;
    std::string note;
};

struct ConvexityReport {
    int samples = 0;
    double min_midpoint_margin = 0.0;
    /// NaN when the report has no grid (segment probes).
    double min_second_difference = 0.0;
    Verdict verdict = Verdict::StrictlyConvex;
    /// Violations and inconclusive samples, in sampling order.
    std::vector<Witness> failures;
};

nlohmann::json to_json(const ConvexityReport& r);

/// ½(f(p1) + f(p2)) − f(midpoint). Evaluation failures are rethrown as
/// ProbeError carrying p1 followed by p2.
double midpoint_probe(const VecFn& f, const Eigen::VectorXd& p1, const Eigen::VectorXd& p2);

Eigen::VectorXd fd_gradient(const VecFn& f, const Eigen::VectorXd& p, double step);
/// Central differences, symmetrized.
Eigen::MatrixXd fd_hessian(const VecFn& f, const Eigen::VectorXd& p, double step);

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Deterministic uniform draw in [0, 1) from the top 53 bits of mt19937_64,
/// so sample streams do not depend on the standard library.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double operator()();
    double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

private:
    std::mt19937_64 gen_;
};

using Segment = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

/// `count` pairs of distinct points drawn uniformly from the box.
std::vector<Segment> segment_sampler(const Box& box, int count, std::uint64_t seed);

/// Midpoint margins over the given segments. Strict when every margin
/// exceeds kStrictMargin; a margin below kViolation is a violation.
ConvexityReport probe_segments(const VecFn& f, const std::vector<Segment>& segments);

/// Verdict from the recorded minima under the shared thresholds; a NaN
/// second difference is ignored.
Verdict classify(double min_second_difference, double min_midpoint_margin);

}  // namespace shearlab::harness
