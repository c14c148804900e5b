#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "shearlab/hyp_core.hpp"

using namespace shearlab::hyp;

namespace {

std::mt19937_64 rng(20240611);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

UhpPoint random_point() { return {uniform(-3, 3), std::exp(uniform(-2, 2))}; }

MobiusMap random_map() {
    while (true) {
        const double a = uniform(-2, 2), b = uniform(-2, 2), c = uniform(-2, 2), d = uniform(-2, 2);
        if (a * d - b * c > 0.1) return {a, b, c, d};
    }
}

// Golden-section minimum of a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi, double* arg = nullptr) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if (arg) *arg = 0.5 * (a + b);
    return f(0.5 * (a + b));
}

double cosh_dist_formula(const UhpPoint& p, const UhpPoint& q) {
    return 1.0 + ((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)) / (2.0 * p.y * q.y);
}

}  // namespace

TEST(Dist, ClosedFormValues) {
    const UhpPoint p(0.3, 0.7);
    EXPECT_EQ(dist(p, p), 0.0);
    EXPECT_NEAR(dist({0, 1}, {0, std::exp(1.0)}), 1.0, 1e-15);
    EXPECT_NEAR(dist({0, 1}, {1, 1}), std::acosh(1.5), 1e-15);
    EXPECT_NEAR(dist({0, 1}, {1, 1}), 0.9624237, 1e-7);
}

TEST(Dist, MatchesCoshFormulaAndIsAMetric) {
    for (int i = 0; i < 500; ++i) {
        const UhpPoint p = random_point(), q = random_point(), r = random_point();
        EXPECT_NEAR(dist(p, q), std::acosh(cosh_dist_formula(p, q)), 1e-9);
        EXPECT_EQ(dist(p, q), dist(q, p));
        EXPECT_LE(dist(p, r), dist(p, q) + dist(q, r) + 1e-12);
    }
}

TEST(Mobius, IdentityAndAxisTranslation) {
    const UhpPoint p(0.4, 2.0);
    const UhpPoint q = MobiusMap::identity().apply(p);
    EXPECT_EQ(q.x, p.x);
    EXPECT_EQ(q.y, p.y);
    const double e = std::exp(1.0);
    const MobiusMap m(std::sqrt(e), 0.0, 0.0, 1.0 / std::sqrt(e));
    const UhpPoint r = m.apply(UhpPoint(0, 1));
    EXPECT_NEAR(r.x, 0.0, 1e-15);
    EXPECT_NEAR(r.y, e, 1e-14);
}

TEST(Mobius, RandomMapsAreIsometries) {
    for (int i = 0; i < 100; ++i) {
        const MobiusMap m = random_map();
        EXPECT_NEAR(m.det(), 1.0, 1e-12);
        const UhpPoint p = random_point(), q = random_point();
        EXPECT_NEAR(dist(m.apply(p), m.apply(q)), dist(p, q), 1e-10);
    }
}

TEST(Mobius, InverseAndCompositionUpToSign) {
    for (int i = 0; i < 50; ++i) {
        const MobiusMap m = random_map();
        EXPECT_TRUE((m * m.inverse()).approx_equal(MobiusMap::identity(), 1e-12));
        const MobiusMap neg(-m.a(), -m.b(), -m.c(), -m.d());
        EXPECT_TRUE(neg.approx_equal(m, 1e-15));
    }
    EXPECT_THROW(MobiusMap(0, 1, 1, 0), GeometryError);
}

TEST(Mobius, FromTriplesHitsTargets) {
    const std::array<IdealPoint, 3> src{IdealPoint(0), IdealPoint(1), IdealPoint::infinity()};
    const std::array<IdealPoint, 3> dst{IdealPoint(-2), IdealPoint(0.5), IdealPoint(4)};
    const MobiusMap m = MobiusMap::from_triples(src, dst);
    EXPECT_NEAR(m.apply(src[0]).value(), -2.0, 1e-13);
    EXPECT_NEAR(m.apply(src[1]).value(), 0.5, 1e-13);
    EXPECT_NEAR(m.apply(src[2]).value(), 4.0, 1e-13);
    const std::array<IdealPoint, 3> flipped{IdealPoint(0.5), IdealPoint(-2), IdealPoint(4)};
    EXPECT_THROW(MobiusMap::from_triples(src, flipped), GeometryError);
}

TEST(CrossRatio, HandEvaluatedValues) {
    const IdealPoint inf = IdealPoint::infinity();
    // (0 - (-1)) / (0 - 1) after the ∞ factors cancel.
    EXPECT_DOUBLE_EQ(cross_ratio(IdealPoint(0), inf, IdealPoint(-1), IdealPoint(1)), -1.0);
    // With ∞ first the normalized frame returns the fourth point itself.
    EXPECT_DOUBLE_EQ(cross_ratio(inf, IdealPoint(0), IdealPoint(1), IdealPoint(2.5)), 2.5);
    // (0 - ∞)(1 - x) / ((0 - x)(1 - ∞)) = (x - 1) / x.
    EXPECT_DOUBLE_EQ(cross_ratio(IdealPoint(0), IdealPoint(1), inf, IdealPoint(2.5)), 1.5 / 2.5);
    EXPECT_DOUBLE_EQ(cross_ratio(IdealPoint(1), IdealPoint(2), IdealPoint(3), IdealPoint(4)),
                     ((1.0 - 3.0) * (2.0 - 4.0)) / ((1.0 - 4.0) * (2.0 - 3.0)));
    EXPECT_THROW(cross_ratio(IdealPoint(0), IdealPoint(0), inf, IdealPoint(1)), GeometryError);
}

TEST(CrossRatio, InvariantUnderMobius) {
    for (int i = 0; i < 100; ++i) {
        const MobiusMap m = random_map();
        std::array<IdealPoint, 4> pts{IdealPoint(uniform(-3, -1.5)), IdealPoint(uniform(-1, 0)),
                                      IdealPoint(uniform(0.5, 1.5)), IdealPoint(uniform(2, 4))};
        const double before = cross_ratio(pts[0], pts[1], pts[2], pts[3]);
        const double after =
            cross_ratio(m.apply(pts[0]), m.apply(pts[1]), m.apply(pts[2]), m.apply(pts[3]));
        EXPECT_NEAR(after, before, 1e-10 * std::max(1.0, std::abs(before)));
    }
}

TEST(DistinguishedPoints, StandardTriangle) {
    const IdealTriangle t(IdealPoint(0), IdealPoint(1), IdealPoint::infinity());
    const auto pts = distinguished_points(t);
    EXPECT_NEAR(pts[0].x, 0.5, 1e-15);
    EXPECT_NEAR(pts[0].y, 0.5, 1e-15);
    EXPECT_NEAR(pts[1].x, 1.0, 1e-15);
    EXPECT_NEAR(pts[1].y, 1.0, 1e-15);
    EXPECT_NEAR(pts[2].x, 0.0, 1e-15);
    EXPECT_NEAR(pts[2].y, 1.0, 1e-15);
}

TEST(DistinguishedPoints, ProjectionOfCenterOracle) {
    // The symmetry center of (0, 1, ∞) is (1/2, √3/2); project it onto each
    // side by minimizing distance along the side.
    const UhpPoint center(0.5, std::sqrt(3.0) / 2.0);
    const IdealTriangle t(IdealPoint(0), IdealPoint(1), IdealPoint::infinity());
    const auto pts = distinguished_points(t);
    double u = 0.0;
    golden_min([&](double s) { return dist(center, UhpPoint(0.5 + 0.5 * std::cos(s), 0.5 * std::sin(s))); },
               0.01, 3.13, &u);
    EXPECT_NEAR(pts[0].x, 0.5 + 0.5 * std::cos(u), 1e-7);
    EXPECT_NEAR(pts[0].y, 0.5 * std::sin(u), 1e-7);
    golden_min([&](double s) { return dist(center, UhpPoint(1.0, std::exp(s))); }, -3, 3, &u);
    EXPECT_NEAR(pts[1].y, std::exp(u), 1e-7);
    golden_min([&](double s) { return dist(center, UhpPoint(0.0, std::exp(s))); }, -3, 3, &u);
    EXPECT_NEAR(pts[2].y, std::exp(u), 1e-7);
}

TEST(DistinguishedPoints, SymmetricTriangleAndEquivariance) {
    const IdealTriangle sym(IdealPoint(-1), IdealPoint(1), IdealPoint::infinity());
    const UhpPoint p = distinguished_points(sym)[0];
    EXPECT_NEAR(p.x, 0.0, 1e-15);
    EXPECT_NEAR(p.y, 1.0, 1e-15);

    const IdealTriangle t(IdealPoint(0), IdealPoint(1), IdealPoint::infinity());
    const auto base = distinguished_points(t);
    for (int i = 0; i < 100; ++i) {
        const MobiusMap m = random_map();
        const auto& v = t.vertices();
        const auto img = distinguished_points(IdealTriangle(m.apply(v[0]), m.apply(v[1]), m.apply(v[2])));
        for (int k = 0; k < 3; ++k) {
            const UhpPoint expect = m.apply(base[k]);
            EXPECT_LT(dist(img[k], expect), 1e-10);
            EXPECT_LT(distance_to_geodesic(m.apply(t.side(k)), img[k]), 1e-10);
        }
    }
}

TEST(TranslateAlong, ZeroAndAxisDilation) {
    const Geodesic axis(IdealPoint(0), IdealPoint::infinity());
    EXPECT_TRUE(translate_along(axis, 0.0).approx_equal(MobiusMap::identity(), 1e-15));
    const UhpPoint q = translate_along(axis, 1.0).apply(UhpPoint(0, 1));
    EXPECT_NEAR(q.y, std::exp(1.0), 1e-14);
    // Reversing the axis reverses the direction.
    const UhpPoint r = translate_along(axis.reversed(), 1.0).apply(UhpPoint(0, 1));
    EXPECT_NEAR(r.y, std::exp(-1.0), 1e-15);
}

TEST(TranslateAlong, DisplacementOnAxisAndFixedEnds) {
    for (int i = 0; i < 50; ++i) {
        const Geodesic g(IdealPoint(uniform(-3, 0)), IdealPoint(uniform(0.5, 3)));
        const double s = uniform(-3, 3);
        const MobiusMap m = translate_along(g, s);
        const UhpPoint p = foot_of_perpendicular(g, IdealPoint(uniform(4, 6)));
        const UhpPoint q = m.apply(p);
        EXPECT_NEAR(dist(p, q), std::abs(s), 1e-10);
        EXPECT_NEAR(signed_position(g, p, q), s, 1e-10);
        EXPECT_LT(distance_to_geodesic(g, q), 1e-10);
        EXPECT_NEAR(m.apply(g.from()).value(), g.from().value(), 1e-12);
        EXPECT_NEAR(m.apply(g.to()).value(), g.to().value(), 1e-12);
    }
}

TEST(GeodesicGap, ClosedFormAgainstNumericMinimization) {
    const Geodesic g1(IdealPoint(0), IdealPoint::infinity());
    const Geodesic g2(IdealPoint(1), IdealPoint(3));
    EXPECT_NEAR(geodesic_gap(g1, g2), std::acosh(2.0), 1e-14);
    EXPECT_NEAR(geodesic_gap(g1, g2), 1.3169579, 1e-7);
    // Nested minimization of dist over both geodesics.
    const double numeric = golden_min(
        [](double theta) {
            const UhpPoint p(2.0 + std::cos(theta), std::sin(theta));
            return golden_min([&](double u) { return dist(p, UhpPoint(0.0, std::exp(u))); }, -4, 4);
        },
        0.01, 3.13);
    EXPECT_NEAR(geodesic_gap(g1, g2), numeric, 1e-8);
}

TEST(GeodesicGap, TranslatedPerpendicularAndErrors) {
    const Geodesic unit(IdealPoint(-1), IdealPoint(1));
    const Geodesic axis(IdealPoint(0), IdealPoint::infinity());
    for (double s : {-2.0, -0.3, 0.7, 1.9}) {
        const Geodesic moved = translate_along(axis, s).apply(unit);
        EXPECT_NEAR(geodesic_gap(unit, moved), std::abs(s), 1e-12);
    }
    EXPECT_THROW(geodesic_gap(axis, Geodesic(IdealPoint(0), IdealPoint(2))), GeometryError);
    EXPECT_THROW(geodesic_gap(axis, Geodesic(IdealPoint(-1), IdealPoint(2))), GeometryError);
}

TEST(WedgeDistance, ValuesAndSymmetry) {
    EXPECT_NEAR(wedge_distance(0, 0), std::acosh(1.5), 1e-15);
    EXPECT_DOUBLE_EQ(wedge_distance(1, -1), wedge_distance(-1, 1));
    for (int i = 0; i < 500; ++i) {
        const double a = uniform(-4, 4), b = uniform(-4, 4);
        const double d = wedge_distance(a, b);
        const double direct = dist(UhpPoint(0, std::exp(a)), UhpPoint(1, std::exp(b)));
        EXPECT_NEAR(d, direct, 1e-12 * std::max(1.0, d));
        const double ea = std::exp(a), eb = std::exp(b);
        const double closed = std::acosh(1.0 + (1.0 + (ea - eb) * (ea - eb)) / (2.0 * ea * eb));
        EXPECT_NEAR(d, closed, 1e-9 * std::max(1.0, d));
    }
}

TEST(WedgeDistance, StrictMidpointConvexity) {
    for (int i = 0; i < 1000; ++i) {
        const double a1 = uniform(-5, 5), b1 = uniform(-5, 5);
        const double a2 = uniform(-5, 5), b2 = uniform(-5, 5);
        const double mid = wedge_distance(0.5 * (a1 + a2), 0.5 * (b1 + b2));
        const double margin = 0.5 * (wedge_distance(a1, b1) + wedge_distance(a2, b2)) - mid;
        EXPECT_GT(margin, 0.0) << a1 << " " << b1 << " " << a2 << " " << b2;
    }
}

TEST(WedgeDistance, HessianPositiveDefiniteAndJetMatchesDifferences) {
    const double h = 1e-4;
    // Away from this box the curvature falls below the finite-difference noise floor.
    for (int i = 0; i < 200; ++i) {
        const double a = uniform(-2, 2), b = uniform(-2, 2);
        auto f = [](double x, double y) { return wedge_distance(x, y); };
        const double faa = (f(a + h, b) - 2 * f(a, b) + f(a - h, b)) / (h * h);
        const double fbb = (f(a, b + h) - 2 * f(a, b) + f(a, b - h)) / (h * h);
        const double fab = (f(a + h, b + h) - f(a + h, b - h) - f(a - h, b + h) + f(a - h, b - h)) / (4 * h * h);
        EXPECT_GT(faa, 0.0);
        EXPECT_GT(faa * fbb - fab * fab, 0.0);

        const WedgeJet j = wedge_distance_jet(a, b);
        EXPECT_NEAR(j.da, (f(a + h, b) - f(a - h, b)) / (2 * h), 1e-6);
        EXPECT_NEAR(j.db, (f(a, b + h) - f(a, b - h)) / (2 * h), 1e-6);
        EXPECT_NEAR(j.daa, faa, 1e-5);
        EXPECT_NEAR(j.dbb, fbb, 1e-5);
        EXPECT_NEAR(j.dab, fab, 1e-5);
    }
}
