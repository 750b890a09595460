#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "perthull/geometry.hpp"
#include "perthull/hull.hpp"
#include "perthull/rng.hpp"

using namespace perthull;

namespace {

PointCloud random_cloud(int d, int n, RngStream& rng, double spread = 1.0) {
    PointCloud cloud(d);
    for (int i = 0; i < n; ++i) {
        Vec p(d);
        for (int j = 0; j < d; ++j) p[j] = spread * (2.0 * rng.next_double() - 1.0);
        cloud.add(p);
    }
    return cloud;
}

}  // namespace

TEST_CASE("squares and simplices") {
    PointCloud sq(2);
    sq.add({0, 0});
    sq.add({1, 0});
    sq.add({0, 1});
    sq.add({1, 1});
    const HullComplex h = convex_hull(sq);
    CHECK(h.face_counts()[0] == 4);
    CHECK(h.face_counts()[1] == 4);
    for (int i = 0; i < 4; ++i) CHECK(h.is_vertex(i));

    PointCloud tet(3);
    tet.add({0, 0, 0});
    tet.add({1, 0, 0});
    tet.add({0, 1, 0});
    tet.add({0, 0, 1});
    const HullComplex ht = convex_hull(tet);
    CHECK(ht.face_counts()[0] == 4);
    CHECK(ht.face_counts()[1] == 6);
    CHECK(ht.face_counts()[2] == 4);
}

TEST_CASE("simplicial relations on sphere points in d=3") {
    RngStream rng(101);
    PointCloud cloud(3);
    for (int i = 0; i < 100; ++i) cloud.add(sample_uniform_sphere(3, rng));
    const FaceCounts f = convex_hull(cloud).face_counts();
    CHECK(f[0] == 100);
    CHECK(f[1] == 3 * f[0] - 6);
    CHECK(f[2] == 2 * f[0] - 4);
}

TEST_CASE("euler relation for d=2..6") {
    RngStream rng(55);
    for (int d = 2; d <= 6; ++d) {
        const PointCloud cloud = random_cloud(d, 40 + 10 * d, rng);
        const FaceCounts f = convex_hull(cloud).face_counts();
        long long euler = 0;
        for (int k = 0; k < d; ++k) euler += (k % 2 ? -1 : 1) * f[k];
        CHECK(euler == 1 + (d % 2 ? 1 : -1));
    }
}

TEST_CASE("degenerate inputs raise") {
    PointCloud flat(3);  // all points on the z=0 plane
    RngStream rng(9);
    for (int i = 0; i < 20; ++i)
        flat.add({rng.next_double(), rng.next_double(), 0.0});
    CHECK_THROWS_AS(convex_hull(flat), DegeneracyError);

    PointCloud few(3);
    few.add({0, 0, 0});
    few.add({1, 0, 0});
    few.add({0, 1, 0});
    CHECK_THROWS_AS(convex_hull(few), DegeneracyError);

    PointCloud same(2);
    for (int i = 0; i < 5; ++i) same.add({1.0, 2.0});
    CHECK_THROWS_AS(convex_hull(same), DegeneracyError);
}

TEST_CASE("point on a facet classifies as non-extreme") {
    PointCloud tri(2);
    tri.add({0, 0});
    tri.add({1, 0});
    tri.add({0, 1});
    tri.add({0.5, 0.5});  // on the hypotenuse
    const HullComplex h = convex_hull(tri);
    CHECK_FALSE(h.is_vertex(3));
    CHECK(h.face_counts()[0] == 3);
}

TEST_CASE("monotone chain oracle agreement on 1000 planar clouds") {
    RngStream rng(333);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_double() * 197);
        PointCloud cloud(2);
        const int style = trial % 3;
        for (int i = 0; i < n; ++i) {
            Vec p(2);
            if (style == 0) {
                p[0] = rng.next_double();
                p[1] = rng.next_double();
            } else if (style == 1) {
                p[0] = rng.next_gaussian();
                p[1] = rng.next_gaussian();
            } else {
                const Vec u = sample_uniform_sphere(2, rng);
                const double r = 1.0 + 0.05 * rng.next_double();
                p[0] = r * u[0];
                p[1] = r * u[1];
            }
            cloud.add(p);
        }
        std::vector<int> expected = oracle::monotone_chain_vertices(cloud);
        if (expected.size() < 3) continue;  // collinear tiny cloud
        HullComplex h;
        try {
            h = convex_hull(cloud);
        } catch (const DegeneracyError&) {
            continue;  // near-collinear input refused; oracle has no band
        }
        CHECK(h.vertices() == expected);
        CHECK(h.face_counts()[1] == static_cast<long long>(expected.size()));
    }
}

TEST_CASE("is_extreme agrees with the membership oracle") {
    RngStream rng(77);
    for (int trial = 0; trial < 120; ++trial) {
        const int d = trial % 2 ? 3 : 2;
        const PointCloud cloud = random_cloud(d, 8, rng);
        HullComplex h;
        try {
            h = convex_hull(cloud);
        } catch (const DegeneracyError&) {
            continue;
        }
        for (int i = 0; i < cloud.size(); ++i)
            CHECK(h.is_vertex(i) == !oracle::in_hull_of_others(cloud, i));
    }
    PointCloud tri(2);
    tri.add({0, 0});
    tri.add({3, 0});
    tri.add({0, 3});
    tri.add({1, 1});  // centroid
    CHECK_FALSE(is_extreme(3, tri));
    CHECK(is_extreme(0, tri));
}

TEST_CASE("xi scores: examples and the sum identity") {
    PointCloud tri(2);
    tri.add({0, 0});
    tri.add({2, 0});
    tri.add({0, 2});
    tri.add({0.5, 0.5});
    const HullComplex h = convex_hull(tri);
    CHECK(h.xi_score(0, 1) == doctest::Approx(1.0));  // 2 edges x 1/2
    CHECK(h.xi_score(3, 0) == 0.0);
    CHECK(h.xi_score(3, 1) == 0.0);

    RngStream rng(1234);
    for (int d = 2; d <= 5; ++d) {
        const PointCloud cloud = random_cloud(d, 30, rng);
        const HullComplex hull = convex_hull(cloud);
        const FaceCounts f = hull.face_counts();
        for (int k = 0; k < d; ++k) {
            double sum = 0.0;
            for (int i = 0; i < cloud.size(); ++i) sum += hull.xi_score(i, k);
            CHECK(sum == doctest::Approx(static_cast<double>(f[k])).epsilon(1e-12));
        }
        // is_extreme(i) iff xi_0(i) = 1.
        for (int i = 0; i < cloud.size(); ++i)
            CHECK((hull.xi_score(i, 0) == 1.0) == hull.is_vertex(i));
    }
}

TEST_CASE("hull invariance under scaling and rotation") {
    RngStream rng(2718);
    const PointCloud cloud = random_cloud(3, 60, rng);
    const HullComplex base = convex_hull(cloud);

    const double c = std::cos(0.7), s = std::sin(0.7);
    PointCloud moved(3);
    for (int i = 0; i < cloud.size(); ++i) {
        const Vec p = cloud.point(i);
        moved.add({3.5 * (c * p[0] - s * p[1]), 3.5 * (s * p[0] + c * p[1]), 3.5 * p[2]});
    }
    const HullComplex rotated = convex_hull(moved);
    CHECK(rotated.vertices() == base.vertices());
    for (int k = 0; k < 3; ++k) CHECK(rotated.face_counts()[k] == base.face_counts()[k]);
}

TEST_CASE("lower hull envelope examples") {
    PointCloud lifted(2);
    lifted.add({-1.0, 0.5});
    lifted.add({0.0, 1.0});
    lifted.add({1.0, 0.5});
    const LowerHull lh = lower_hull_envelope(lifted);
    CHECK(lh.vertices() == std::vector<int>{0, 2});
    CHECK(lh.envelope(Vec{0.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(lh.envelope(Vec{2.0}), OutOfWindowError);

    PointCloud convexpos(2);
    convexpos.add({-1.0, 0.5});
    convexpos.add({0.0, 0.25});
    convexpos.add({1.0, 0.5});
    const LowerHull lh2 = lower_hull_envelope(convexpos);
    CHECK(lh2.vertices() == std::vector<int>{0, 1, 2});
}

TEST_CASE("lower hull vertex set matches the affine-minorant oracle in the plane") {
    RngStream rng(424242);
    for (int trial = 0; trial < 60; ++trial) {
        PointCloud lifted(3);
        RescaledCloud rc;  // reuse the grain oracle on zero-curvature lifts
        rc.d = 3;
        for (int i = 0; i < 20; ++i) {
            const double x = 4.0 * rng.next_double() - 2.0;
            const double y = 4.0 * rng.next_double() - 2.0;
            const double z = 2.0 * rng.next_double();
            lifted.add({x, y, z});
            RescaledPoint w;
            w.v = Vec{x, y};
            w.h = z - 0.5 * w.v.norm2();  // lift_of recovers exactly z
            rc.points.push_back(w);
        }
        LowerHull lh;
        try {
            lh = lower_hull_envelope(lifted);
        } catch (const DegeneracyError&) {
            continue;
        }
        for (int i = 0; i < 20; ++i)
            CHECK(lh.is_vertex(i) == oracle::grain_extremal(rc, i));
    }
}
