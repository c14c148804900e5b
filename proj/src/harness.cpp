#include "shearlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shearlab::harness {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::StrictlyConvex: return "StrictlyConvex";
    case Verdict::Convex: return "Convex";
    case Verdict::NotConvex: return "NotConvex";
    }
    return "?";
}

nlohmann::json to_json(const ConvexityReport& r) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& w : r.failures)
        failures.push_back({{"input", w.input}, {"value", w.value}, {"note", w.note}});
    nlohmann::json j{{"samples", r.samples},
                     {"min_midpoint_margin", r.min_midpoint_margin},
                     {"verdict", to_string(r.verdict)},
                     {"failures", failures}};
    if (std::isnan(r.min_second_difference))
        j["min_second_difference"] = nullptr;
    else
        j["min_second_difference"] = r.min_second_difference;
    return j;
}

namespace {

std::vector<double> concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    std::vector<double> out(a.data(), a.data() + a.size());
    out.insert(out.end(), b.data(), b.data() + b.size());
    return out;
}

}  // namespace

double midpoint_probe(const VecFn& f, const Eigen::VectorXd& p1, const Eigen::VectorXd& p2) {
    if (p1.size() != p2.size()) throw std::invalid_argument("midpoint_probe: dimension mismatch");
    try {
        const double f1 = f(p1), f2 = f(p2);
        const double fm = f(0.5 * (p1 + p2));
        if (!std::isfinite(f1) || !std::isfinite(f2) || !std::isfinite(fm))
            throw ProbeError("midpoint_probe: non-finite value", concat(p1, p2));
        return 0.5 * (f1 + f2) - fm;
    } catch (const ProbeError&) {
        throw;
    } catch (const std::exception& e) {
        throw ProbeError(std::string("midpoint_probe: ") + e.what(), concat(p1, p2));
    }
}

Eigen::VectorXd fd_gradient(const VecFn& f, const Eigen::VectorXd& p, double step) {
    if (!(step > 0)) throw std::invalid_argument("fd_gradient: step must be positive");
    Eigen::VectorXd g(p.size());
    Eigen::VectorXd q = p;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        q[i] = p[i] + step;
        const double fp = f(q);
        q[i] = p[i] - step;
        const double fm = f(q);
        q[i] = p[i];
        g[i] = (fp - fm) / (2 * step);
    }
    return g;
}

Eigen::MatrixXd fd_hessian(const VecFn& f, const Eigen::VectorXd& p, double step) {
    if (!(step > 0)) throw std::invalid_argument("fd_hessian: step must be positive");
    const Eigen::Index n = p.size();
    Eigen::MatrixXd h(n, n);
    const double f0 = f(p);
    Eigen::VectorXd q = p;
    for (Eigen::Index i = 0; i < n; ++i) {
        q[i] = p[i] + step;
        const double fp = f(q);
        q[i] = p[i] - step;
        const double fm = f(q);
        q[i] = p[i];
        h(i, i) = (fp - 2 * f0 + fm) / (step * step);
        for (Eigen::Index j = 0; j < i; ++j) {
            auto at = [&](double si, double sj) {
                q[i] = p[i] + si * step;
                q[j] = p[j] + sj * step;
                const double v = f(q);
                q[i] = p[i];
                q[j] = p[j];
                return v;
            };
            h(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * step * step);
            h(j, i) = h(i, j);
        }
    }
    return 0.5 * (h + h.transpose());
}

double Uniform::operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

std::vector<Segment> segment_sampler(const Box& box, int count, std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("segment_sampler: negative count");
    if (box.lo.size() != box.hi.size()) throw std::invalid_argument("segment_sampler: bound size mismatch");
    if (count == 0) return {};
    if (box.lo.empty()) throw std::invalid_argument("segment_sampler: empty domain");
    for (size_t i = 0; i < box.lo.size(); ++i)
        if (!(box.lo[i] < box.hi[i])) throw std::invalid_argument("segment_sampler: empty domain");
    Uniform u(seed);
    const auto n = static_cast<Eigen::Index>(box.lo.size());
    auto draw = [&] {
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p[i] = u(box.lo[i], box.hi[i]);
        return p;
    };
    std::vector<Segment> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        Eigen::VectorXd a = draw(), b = draw();
        if (a != b) out.emplace_back(std::move(a), std::move(b));
    }
    return out;
}

Verdict classify(double min_second_difference, double min_midpoint_margin) {
    const bool has_sd = !std::isnan(min_second_difference);
    if (min_midpoint_margin < kViolation || (has_sd && min_second_difference < kViolation))
        return Verdict::NotConvex;
    if (min_midpoint_margin > kStrictMargin && (!has_sd || min_second_difference > kStrictSecondDifference))
        return Verdict::StrictlyConvex;
    return Verdict::Convex;
}

ConvexityReport probe_segments(const VecFn& f, const std::vector<Segment>& segments) {
    ConvexityReport r;
    r.samples = static_cast<int>(segments.size());
    r.min_second_difference = std::numeric_limits<double>::quiet_NaN();
    r.min_midpoint_margin = std::numeric_limits<double>::infinity();
    for (const auto& [p1, p2] : segments) {
        double m;
        try {
            m = midpoint_probe(f, p1, p2);
        } catch (const ProbeError& e) {
            r.failures.push_back({e.witness(), std::numeric_limits<double>::quiet_NaN(), e.what()});
            r.verdict = Verdict::NotConvex;
            continue;
        }
        r.min_midpoint_margin = std::min(r.min_midpoint_margin, m);
        if (m < kViolation)
            r.failures.push_back({concat(p1, p2), m, "violation"});
        else if (m <= kStrictMargin)
            r.failures.push_back({concat(p1, p2), m, "inconclusive"});
    }
    if (segments.empty()) r.min_midpoint_margin = 0.0;
    const Verdict v = classify(r.min_second_difference, r.min_midpoint_margin);
    if (r.verdict != Verdict::NotConvex) r.verdict = v;
    return r;
}

}  // namespace shearlab::harness
