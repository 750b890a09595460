#include "perthull/geometry.hpp"

#include <cmath>
#include <numbers>

#include "perthull/error.hpp"

namespace perthull {

double unit_ball_volume(int d) {
    if (d < 1) throw DomainError("unit_ball_volume: dimension must be >= 1");
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(int d) { return d * unit_ball_volume(d); }

Vec sample_uniform_sphere(int d, RngStream& rng) {
    if (d < 2) throw DomainError("sample_uniform_sphere: dimension must be >= 2");
    Vec v(d);
    double n2;
    do {
        for (int i = 0; i < d; ++i) v[i] = rng.next_gaussian();
        n2 = v.norm2();
    } while (n2 == 0.0);
    v *= 1.0 / std::sqrt(n2);
    return v;
}

Vec sample_uniform_ball(int d, double radius, RngStream& rng) {
    if (d < 1) throw DomainError("sample_uniform_ball: dimension must be >= 1");
    if (!(radius > 0.0)) throw DomainError("sample_uniform_ball: radius must be > 0");
    if (d == 1) {
        Vec v(1);
        v[0] = radius * (2.0 * rng.next_double() - 1.0);
        return v;
    }
    Vec v = sample_uniform_sphere(d, rng);
    v *= radius * std::pow(rng.next_double_pos(), 1.0 / d);
    return v;
}

Vec exp_map(const Vec& v) {
    const int d = v.dim() + 1;
    const double r = v.norm();
    if (r > std::numbers::pi * (1.0 + 1e-12))
        throw DomainError("exp_map: |v| exceeds the injectivity radius pi");
    Vec u(d);
    // sin(r)/r with its r -> 0 series to avoid 0/0.
    const double sinc = r < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r;
    for (int i = 0; i + 1 < d; ++i) u[i] = sinc * v[i];
    u[d - 1] = std::cos(r);
    return u;
}

Vec inv_exp_map(const Vec& u) {
    const int d = u.dim();
    if (d < 2) throw DomainError("inv_exp_map: dimension must be >= 2");
    const double n = u.norm();
    if (!(std::fabs(n - 1.0) <= 1e-9))
        throw DomainError("inv_exp_map: input is not on the unit sphere");
    double s2 = 0.0;
    for (int i = 0; i + 1 < d; ++i) s2 += u[i] * u[i];
    const double s = std::sqrt(s2);
    if (s == 0.0 && u[d - 1] < 0.0)
        throw SingularityError("inv_exp_map: antipode of the north pole");
    Vec v(d - 1);
    if (s == 0.0) return v;  // north pole itself
    // atan2 keeps full precision near both poles, unlike acos of the height.
    const double theta = std::atan2(s, u[d - 1] / n);
    const double f = theta / s;
    for (int i = 0; i + 1 < d; ++i) v[i] = f * u[i];
    return v;
}

}  // namespace perthull
