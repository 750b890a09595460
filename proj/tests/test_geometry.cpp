#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "perthull/error.hpp"
#include "perthull/geometry.hpp"
#include "perthull/quadrature.hpp"
#include "perthull/rng.hpp"

using namespace perthull;

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(unit_ball_volume(0), DomainError);

    // kappa_d = kappa_{d-1} B(1/2, (d+1)/2).
    for (int d = 2; d <= 8; ++d) {
        const double b = std::exp(std::lgamma(0.5) + std::lgamma(0.5 * (d + 1)) -
                                  std::lgamma(0.5 * d + 1.0));
        CHECK(unit_ball_volume(d) ==
              doctest::Approx(unit_ball_volume(d - 1) * b).epsilon(1e-12));
    }
}

TEST_CASE("sphere sampling: norm, symmetry, second moment") {
    RngStream rng(2024);
    const int n = 100000;
    double sum[3] = {0, 0, 0};
    double sum_z2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec u = sample_uniform_sphere(3, rng);
        CHECK(std::fabs(u.norm() - 1.0) < 1e-12);
        for (int j = 0; j < 3; ++j) sum[j] += u[j];
        sum_z2 += u[2] * u[2];
    }
    // Coordinate means within 4 sigma of 0 (per-coordinate sd is 1/sqrt(3)).
    const double se = std::sqrt(1.0 / 3.0 / n);
    for (double s : sum) CHECK(std::fabs(s / n) < 4.0 * se);

    // E z^2 against direct integration of cos^2 over the sphere measure.
    const double num = integrate([](double t) { return std::cos(t) * std::cos(t) * std::sin(t); },
                                 0.0, std::numbers::pi).value;
    const double den = integrate([](double t) { return std::sin(t); }, 0.0, std::numbers::pi).value;
    const double expected = num / den;
    CHECK(expected == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    const double se_z2 = std::sqrt(4.0 / 45.0 / n);  // Var cos^2 = 4/45 on S^2
    CHECK(std::fabs(sum_z2 / n - expected) < 4.0 * se_z2);

    CHECK_THROWS_AS(sample_uniform_sphere(1, rng), DomainError);
}

TEST_CASE("sphere sampling: d=2 norm and octant chi-square") {
    RngStream rng(7);
    const int n = 100000;
    int octant[8] = {0};
    for (int i = 0; i < n; ++i) {
        const Vec u2 = sample_uniform_sphere(2, rng);
        CHECK(std::fabs(u2.norm2() - 1.0) < 1e-12);
        const Vec u = sample_uniform_sphere(3, rng);
        const int o = (u[0] > 0) | ((u[1] > 0) << 1) | ((u[2] > 0) << 2);
        ++octant[o];
    }
    double chi2 = 0.0;
    for (int c : octant) {
        const double e = n / 8.0;
        chi2 += (c - e) * (c - e) / e;
    }
    CHECK(chi2 < 24.32);  // chi^2_7 quantile at level 1e-3
}

TEST_CASE("ball sampling: support, area ratio, radial moment") {
    RngStream rng(11);
    const int n = 100000;
    int inner = 0;
    double sum_norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec x = sample_uniform_ball(2, 1.0, rng);
        CHECK(x.norm() <= 1.0 + 1e-12);
        if (x.norm() <= std::numbers::sqrt2 / 2.0) ++inner;
        sum_norm += x.norm();
    }
    // Area ratio 1/2, 4 sigma binomial band.
    CHECK(std::fabs(inner / static_cast<double>(n) - 0.5) < 4.0 * std::sqrt(0.25 / n));
    // E|x| from the radial density 2r on [0,1].
    const double expected = integrate([](double r) { return r * 2.0 * r; }, 0.0, 1.0).value;
    CHECK(expected == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const double var = 0.5 - 4.0 / 9.0;
    CHECK(std::fabs(sum_norm / n - expected) < 4.0 * std::sqrt(var / n));

    for (int i = 0; i < 1000; ++i)
        CHECK(sample_uniform_ball(3, 2.0, rng).norm() <= 2.0 + 1e-12);
    CHECK_THROWS_AS(sample_uniform_ball(2, 0.0, rng), DomainError);
    CHECK_THROWS_AS(sample_uniform_ball(2, -1.0, rng), DomainError);
}

TEST_CASE("exponential map examples") {
    // v = 0 -> north pole.
    const Vec u0 = exp_map(Vec::zero(2));
    CHECK(u0[0] == 0.0);
    CHECK(u0[1] == 0.0);
    CHECK(u0[2] == 1.0);

    // Quarter great circle in d=3.
    const Vec q = exp_map(Vec{std::numbers::pi / 2.0, 0.0});
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::fabs(q[1]) < 1e-15);
    CHECK(std::fabs(q[2]) < 1e-15);

    // Geodesic distance is |v|.
    RngStream rng(3);
    for (int i = 0; i < 100; ++i) {
        Vec v = sample_uniform_sphere(2, rng);
        v *= 0.7;
        const Vec u = exp_map(v);
        CHECK(std::fabs(std::acos(u[2]) - 0.7) < 1e-12);
        CHECK(std::fabs(u.norm() - 1.0) < 1e-12);
    }

    Vec too_far{3.2, 0.0};
    CHECK_THROWS_AS(exp_map(too_far), DomainError);
    Vec antipode{0.0, 0.0, -1.0};
    CHECK_THROWS_AS(inv_exp_map(antipode), SingularityError);
    Vec not_unit{0.5, 0.0, 0.0};
    CHECK_THROWS_AS(inv_exp_map(not_unit), DomainError);
}

TEST_CASE("exp map round trip over the injectivity region") {
    RngStream rng(5);
    for (int d = 2; d <= 8; ++d) {
        for (int i = 0; i < 400; ++i) {
            Vec v = d - 1 == 1 ? Vec{2.0 * rng.next_double() - 1.0}
                               : sample_uniform_sphere(d - 1, rng);
            v *= rng.next_double() * (std::numbers::pi - 1e-6);
            const Vec back = inv_exp_map(exp_map(v));
            CHECK((back - v).norm() < 1e-10);
        }
    }
}
