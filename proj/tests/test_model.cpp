#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "perthull/geometry.hpp"
#include "perthull/hull.hpp"
#include "perthull/model.hpp"
#include "perthull/quadrature.hpp"
#include "perthull/stats.hpp"

using namespace perthull;

TEST_CASE("binomial cloud basics") {
    ModelParams p;
    p.d = 2;
    p.alpha = -10.0;
    p.scale = 100;
    p.kind = ModelKind::Binomial;
    RngStream rng(1);
    const PointCloud cloud = sample_binomial_cloud(p, rng);
    CHECK(cloud.size() == 100);
    // The perturbation radius 1e-20 sits far below the rounding of the norm
    // itself, so allow a few ulps on top.
    const double radius = std::pow(100.0, -10.0);
    for (int i = 0; i < cloud.size(); ++i)
        CHECK(std::fabs(cloud.point(i).norm() - 1.0) <= radius + 8.0 * 2.22e-16);

    ModelParams frac = p;
    frac.scale = 100.5;
    CHECK_THROWS_AS(sample_binomial_cloud(frac, rng), DomainError);

    ModelParams wrong = p;
    wrong.kind = ModelKind::Poisson;
    CHECK_THROWS_AS(sample_binomial_cloud(wrong, rng), DomainError);
}

TEST_CASE("perturbed radius stays in the annulus") {
    ModelParams p;
    p.d = 3;
    p.alpha = 0.5;
    p.scale = 400;
    p.kind = ModelKind::Binomial;
    RngStream rng(2);
    const PointCloud cloud = sample_binomial_cloud(p, rng);
    const double noise = std::pow(400.0, 0.5);
    for (int i = 0; i < cloud.size(); ++i) {
        CHECK(cloud.point(i).norm() <= 1.0 + noise + 1e-12);
        CHECK(cloud.point(i).norm() >= std::max(0.0, 1.0 - noise) - 1e-12);
    }
}

TEST_CASE("binomial mean norm against the quadrature oracle") {
    // |U + e| with U on the unit circle and e uniform in the unit disk:
    // E = (1/pi) int_0^1 int_0^{2pi} sqrt(1 + r^2 + 2 r cos t) r dt dr.
    const double expected =
        integrate(
            [](double r) {
                return r / std::numbers::pi *
                       integrate(
                           [r](double t) {
                               return std::sqrt(1.0 + r * r + 2.0 * r * std::cos(t));
                           },
                           0.0, 2.0 * std::numbers::pi, 1e-11, 1e-11)
                           .value;
            },
            0.0, 1.0, 1e-10, 1e-10)
            .value;

    ModelParams p;
    p.d = 2;
    p.alpha = 0.0;
    p.scale = 10000;
    p.kind = ModelKind::Binomial;
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    for (int rep = 0; rep < 50; ++rep) {
        RngStream rng = RngStream::derive(2025, rep, 1);
        const PointCloud cloud = sample_binomial_cloud(p, rng);
        for (int i = 0; i < cloud.size(); ++i) {
            const double r = cloud.point(i).norm();
            sum += r;
            sum2 += r * r;
            ++count;
        }
    }
    const double mean = sum / count;
    const double var = sum2 / count - mean * mean;
    CHECK(std::fabs(mean - expected) < 4.0 * std::sqrt(var / count));
}

TEST_CASE("poisson count moments") {
    ModelParams p;
    p.d = 2;
    p.alpha = 0.0;
    p.scale = 1000;
    p.kind = ModelKind::Poisson;
    double sum = 0.0, sum2 = 0.0;
    const int reps = 10000;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng = RngStream::derive(7, rep, 2);
        const double n = static_cast<double>(sample_poisson_cloud(p, rng).size());
        sum += n;
        sum2 += n * n;
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    CHECK(std::fabs(mean - 1000.0) < 4.0 * std::sqrt(1000.0 / reps));
    // Var of the sample variance of Poisson(1000) ~ 2 lambda^2 / R.
    CHECK(std::fabs(var - 1000.0) < 4.0 * 1000.0 * std::sqrt(2.0 / reps) + 4.0);
}

TEST_CASE("poisson cloud support and empty clouds") {
    ModelParams p;
    p.d = 3;
    p.alpha = -5.0;
    p.scale = 50;
    p.kind = ModelKind::Poisson;
    RngStream rng(3);
    const PointCloud cloud = sample_poisson_cloud(p, rng);
    const double noise = std::pow(50.0, -5.0);
    for (int i = 0; i < cloud.size(); ++i)
        CHECK(std::fabs(cloud.point(i).norm() - 1.0) <= noise + 8.0 * 2.22e-16);

    // lambda = 1 can produce an empty cloud; it is returned as-is.
    ModelParams tiny = p;
    tiny.scale = 1;
    bool saw_empty = false;
    for (int rep = 0; rep < 50 && !saw_empty; ++rep) {
        RngStream r2 = RngStream::derive(4, rep, 3);
        saw_empty = sample_poisson_cloud(tiny, r2).empty();
    }
    CHECK(saw_empty);
}

TEST_CASE("determinism: identical params and seed give identical clouds") {
    ModelParams p;
    p.d = 4;
    p.alpha = 0.3;
    p.scale = 500;
    p.kind = ModelKind::Poisson;
    RngStream a(42), b(42);
    const PointCloud ca = sample_poisson_cloud(p, a);
    const PointCloud cb = sample_poisson_cloud(p, b);
    REQUIRE(ca.size() == cb.size());
    for (int i = 0; i < ca.size(); ++i)
        for (int j = 0; j < 4; ++j) CHECK(ca.row(i)[j] == cb.row(i)[j]);
}

TEST_CASE("rotation invariance of f_0 statistics") {
    ModelParams p;
    p.d = 2;
    p.alpha = 0.0;
    p.scale = 2000;
    p.kind = ModelKind::Binomial;
    const double c = std::cos(1.1), s = std::sin(1.1);
    RunningMoments plain, rotated;
    for (int rep = 0; rep < 40; ++rep) {
        RngStream rng = RngStream::derive(99, rep, 4);
        const PointCloud cloud = sample_binomial_cloud(p, rng);
        plain.add(static_cast<double>(convex_hull(cloud).face_counts()[0]));
        PointCloud rot(2);
        for (int i = 0; i < cloud.size(); ++i) {
            const Vec q = cloud.point(i);
            rot.add({c * q[0] - s * q[1], s * q[0] + c * q[1]});
        }
        rotated.add(static_cast<double>(convex_hull(rot).face_counts()[0]));
    }
    const double se = std::sqrt(plain.variance() / plain.count +
                                rotated.variance() / rotated.count);
    CHECK(std::fabs(plain.mean - rotated.mean) < 4.0 * se);
}

TEST_CASE("deep subcritical noise keeps every point extreme") {
    ModelParams p;
    p.d = 2;
    p.alpha = -3.0;  // well below -2/(d-1) = -2
    p.scale = 1500;
    p.kind = ModelKind::Binomial;
    long extreme = 0, total = 0;
    for (int rep = 0; rep < 10; ++rep) {
        RngStream rng = RngStream::derive(123, rep, 5);
        const PointCloud cloud = sample_binomial_cloud(p, rng);
        extreme += convex_hull(cloud).face_counts()[0];
        total += cloud.size();
    }
    CHECK(static_cast<double>(extreme) / total >= 0.99);
}

TEST_CASE("cloud CSV round trip") {
    ModelParams p;
    p.d = 3;
    p.alpha = -0.25;
    p.scale = 40;
    p.kind = ModelKind::Poisson;
    p.seed = 77;
    RngStream rng(77);
    const PointCloud cloud = sample_poisson_cloud(p, rng);

    std::stringstream ss;
    write_cloud_csv(ss, cloud);
    const std::string first_line = ss.str().substr(0, ss.str().find('\n'));
    CHECK(first_line == "dim,alpha,scale,kind,seed");

    const PointCloud back = read_cloud_csv(ss);
    REQUIRE(back.size() == cloud.size());
    CHECK(back.dim() == 3);
    CHECK(back.meta->kind == "poisson");
    CHECK(back.meta->alpha == -0.25);
    CHECK(back.meta->seed == 77);
    for (int i = 0; i < cloud.size(); ++i)
        for (int j = 0; j < 3; ++j) CHECK(back.row(i)[j] == cloud.row(i)[j]);
}
