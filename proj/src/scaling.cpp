#include "perthull/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perthull/error.hpp"
#include "perthull/geometry.hpp"
#include "perthull/quadrature.hpp"

namespace perthull {

namespace {

constexpr double kBoundarySnap = 1e-12;

double kappa(int d) { return unit_ball_volume(d); }

// log(1 + scale^alpha), stable when scale^alpha overflows.
double log1p_noise(double alpha, double scale) {
    const double t = alpha * std::log(scale);
    return t > 36.0 ? t : std::log1p(std::exp(t));
}

double mid_regime_prefactor(int d) {
    return std::pow(std::pow(2.0, 0.5 * (d - 1)) * kappa(d - 1) / (d * kappa(d) * kappa(d)),
                    1.0 / (2.0 * d));
}

RegimeParams from_regime(int d, double alpha, Regime r) {
    RegimeParams p;
    p.d = d;
    p.alpha = alpha;
    p.regime = r;
    switch (r) {
        case Regime::Super: p.beta = 1.0 / (d + 1); break;
        case Regime::CritHi: p.beta = (2.0 + alpha * (d - 1)) / (4.0 * d); break;
        case Regime::Pos: p.beta = (2.0 + alpha * (d - 1)) / (4.0 * d); break;
        case Regime::Zero: p.beta = 1.0 / (2.0 * d); break;
        case Regime::Neg: p.beta = (2.0 - alpha * (d + 1)) / (4.0 * d); break;
        case Regime::CritLo: p.beta = 1.0 / (d - 1); break;
        case Regime::Sub: p.beta = 1.0 / (d - 1); break;
    }
    return p;
}

}  // namespace

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::Super: return "SUPER";
        case Regime::CritHi: return "CRIT_HI";
        case Regime::Pos: return "POS";
        case Regime::Zero: return "ZERO";
        case Regime::Neg: return "NEG";
        case Regime::CritLo: return "CRIT_LO";
        case Regime::Sub: return "SUB";
    }
    return "?";
}

RegimeParams classify(int d, double alpha) {
    if (d < 2 || d > kMaxDim) throw DomainError("classify: dimension must be in [2, 8]");
    const double hi = 2.0 / (d + 1);
    const double lo = -2.0 / (d - 1);
    Regime r;
    if (std::fabs(alpha - hi) <= kBoundarySnap) r = Regime::CritHi;
    else if (std::fabs(alpha - lo) <= kBoundarySnap) r = Regime::CritLo;
    else if (std::fabs(alpha) <= kBoundarySnap) r = Regime::Zero;
    else if (alpha > hi) r = Regime::Super;
    else if (alpha > 0.0) r = Regime::Pos;
    else if (alpha > lo) r = Regime::Neg;
    else r = Regime::Sub;
    // Snapped boundary values evaluate the boundary formulas exactly.
    double a = alpha;
    if (r == Regime::CritHi) a = hi;
    else if (r == Regime::CritLo) a = lo;
    else if (r == Regime::Zero) a = 0.0;
    return from_regime(d, a, r);
}

RegimeParams classify_rational(int d, long long num, long long den) {
    if (d < 2 || d > kMaxDim) throw DomainError("classify_rational: dimension out of range");
    if (den == 0) throw DomainError("classify_rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const double alpha = static_cast<double>(num) / static_cast<double>(den);
    Regime r;
    if (num * static_cast<long long>(d + 1) == 2 * den) r = Regime::CritHi;
    else if (num * static_cast<long long>(d - 1) == -2 * den) r = Regime::CritLo;
    else if (num == 0) r = Regime::Zero;
    else if (num * static_cast<long long>(d + 1) > 2 * den) r = Regime::Super;
    else if (num > 0) r = Regime::Pos;
    else if (num * static_cast<long long>(d - 1) > -2 * den) r = Regime::Neg;
    else r = Regime::Sub;
    return from_regime(d, alpha, r);
}

double scale_factor_u(int d, double alpha, double scale) {
    if (!(scale >= 1.0)) throw DomainError("scale_factor_u: scale must be >= 1");
    const RegimeParams rp = classify(d, alpha);
    switch (rp.regime) {
        case Regime::Super:
        case Regime::CritHi:
            return std::pow(kappa(d), -1.0 / (d + 1)) * std::pow(scale, 1.0 / (d + 1));
        case Regime::Pos:
        case Regime::Neg:
            return mid_regime_prefactor(d) * std::pow(scale, rp.beta);
        case Regime::Zero:
            return std::numbers::sqrt2 * mid_regime_prefactor(d) *
                   std::pow(scale, 1.0 / (2.0 * d));
        case Regime::CritLo:
            return std::pow(kappa(d), -1.0 / (d + 1)) * std::pow(scale, 1.0 / (d - 1));
        case Regime::Sub:
            return std::pow(d * kappa(d), -1.0 / (d - 1)) * std::pow(scale, 1.0 / (d - 1));
    }
    throw DomainError("scale_factor_u: unreachable");
}

ScaleContext make_scale_context(int d, double alpha, double scale) {
    ScaleContext ctx;
    ctx.regime = classify(d, alpha);
    ctx.scale = scale;
    ctx.noise_radius = std::pow(scale, ctx.regime.alpha);
    ctx.u = scale_factor_u(d, alpha, scale);
    const double u2 = ctx.u * ctx.u;
    ctx.h_max = ctx.regime.regime == Regime::Sub
                    ? 2.0 * ctx.noise_radius * u2 / (1.0 + ctx.noise_radius)
                    : u2;
    return ctx;
}

RescaledPoint forward_transform(const Vec& x, const ScaleContext& ctx) {
    const int d = ctx.regime.d;
    if (x.dim() != d) throw DomainError("forward_transform: dimension mismatch");
    const double r = x.norm();
    const double outer = 1.0 + ctx.noise_radius;
    if (!(r > 0.0) || r > outer * (1.0 + 1e-12))
        throw DomainError("forward_transform: |x| outside (0, 1+scale^alpha]");
    Vec dir = x;
    dir *= 1.0 / r;
    RescaledPoint w;
    w.v = inv_exp_map(dir);
    w.v *= ctx.u;
    w.h = std::max(0.0, ctx.u * ctx.u * (1.0 - r / outer));
    return w;
}

Vec inverse_transform(const RescaledPoint& w, const ScaleContext& ctx) {
    const int d = ctx.regime.d;
    if (w.v.dim() != d - 1) throw DomainError("inverse_transform: dimension mismatch");
    const double u = ctx.u;
    if (w.v.norm() > u * std::numbers::pi * (1.0 + 1e-12) || w.h < 0.0 ||
        w.h > ctx.h_max * (1.0 + 1e-12))
        throw DomainError("inverse_transform: point outside the rescaled window");
    Vec tangent = w.v;
    tangent *= 1.0 / u;
    Vec dir = exp_map(tangent);
    const double r = (1.0 + ctx.noise_radius) * (1.0 - w.h / (u * u));
    dir *= r;
    return dir;
}

double cap_s1(int d, double h) {
    if (d < 2 || d > kMaxDim) throw DomainError("cap_s1: dimension out of range");
    if (h <= 0.0) return 0.0;
    if (h >= 2.0) return 1.0;
    if (d == 2) return std::acos(1.0 - h) / std::numbers::pi;  // arc length
    if (d == 3) return 0.5 * h;
    const double phi = std::acos(1.0 - h);
    const QuadResult q = integrate(
        [d](double theta) { return std::pow(std::sin(theta), d - 2); }, 0.0, phi, 1e-12,
        1e-12);
    return (d - 1) * kappa(d - 1) / (d * kappa(d)) * q.value;
}

double cap_s2(int d, double h) {
    if (d < 2 || d > kMaxDim) throw DomainError("cap_s2: dimension out of range");
    if (h <= 0.0 || h >= 2.0) return 0.0;
    return kappa(d - 1) / (d * kappa(d)) * std::pow(h * (2.0 - h), 0.5 * (d - 1));
}

double g_clamp(const ScaleContext& ctx, double h) {
    const double u2 = ctx.u * ctx.u;
    if (h < 0.0 || h >= u2) throw DomainError("g_clamp: h outside [0, u^2)");
    const double t = h / u2;
    const double raw =
        (ctx.noise_radius * t - 0.5 * (1.0 + ctx.noise_radius) * t * t) / (1.0 - t);
    return std::clamp(raw, 0.0, 2.0);
}

double phi_density(const ScaleContext& ctx, double h) {
    const int d = ctx.regime.d;
    const double u2 = ctx.u * ctx.u;
    if (h < 0.0 || h > ctx.h_max * (1.0 + 1e-12))
        throw DomainError("phi_density: h outside [0, h_max]");
    h = std::min(h, ctx.h_max);
    if (h >= u2) return 0.0;  // closure of the window at u^2
    const double g = g_clamp(ctx, h);
    if (g <= 0.0) return 0.0;
    // Prefactor in log space; alpha far from zero makes it over/underflow as a
    // plain product.
    const double log_pref = std::log(ctx.scale) + d * log1p_noise(ctx.regime.alpha, ctx.scale) -
                            (d + 1) * std::log(ctx.u) - std::log(kappa(d)) -
                            d * ctx.regime.alpha * std::log(ctx.scale);
    double log_s1;
    if (g < 1e-8) {
        // Small-cap equivalence keeps the log finite when s1 underflows.
        log_s1 = std::log(kappa(d - 1) / (d * kappa(d))) + 0.5 * (d - 1) * std::log(2.0 * g);
    } else {
        log_s1 = std::log(cap_s1(d, g));
    }
    const double log_radial = (d - 1) * std::log1p(-h / u2);
    return std::exp(log_pref + log_s1 + log_radial);
}

std::vector<double> phi_breakpoints(const ScaleContext& ctx) {
    std::vector<double> cuts;
    const double u2 = ctx.u * ctx.u;
    const double noise = ctx.noise_radius;
    // Zero of the numerator of g (support end for alpha < 0).
    const double h_zero = 2.0 * noise * u2 / (1.0 + noise);
    if (h_zero > 0.0 && h_zero < ctx.h_max) cuts.push_back(h_zero);
    // Crossings of g = 2, where s1 saturates.
    const double a = 0.5 * (1.0 + noise) / (u2 * u2);
    const double b = -(noise + 2.0) / u2;
    const double c = 2.0;
    const double disc = b * b - 4.0 * a * c;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        for (double root : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
            if (root > 0.0 && root < ctx.h_max) cuts.push_back(root);
    }
    return cuts;
}

double phi_total_mass(const ScaleContext& ctx) {
    const QuadResult q = integrate_with_breakpoints(
        [&ctx](double h) { return phi_density(ctx, h); }, 0.0, ctx.h_max,
        phi_breakpoints(ctx), 0.0, 1e-9);
    return q.value;
}

double mu_density(const ScaleContext& ctx, const Vec& v, double h) {
    const int d = ctx.regime.d;
    if (v.dim() != d - 1) throw DomainError("mu_density: spatial dimension mismatch");
    const double t = v.norm() / ctx.u;
    if (t > std::numbers::pi * (1.0 + 1e-12))
        throw DomainError("mu_density: |v| outside the window");
    double factor = 1.0;
    if (d > 2) {
        const double sinc = t < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
        factor = std::pow(sinc, d - 2);
    }
    return factor * phi_density(ctx, h);
}

double mu_total_mass(const ScaleContext& ctx) {
    const int d = ctx.regime.d;
    const double rmax = ctx.u * std::numbers::pi;
    const double surface = (d - 1) * kappa(d - 1);  // total angle of R^{d-1}
    const auto inner = [&](double h) {
        const QuadResult qr = integrate(
            [&](double r) {
                Vec v(d - 1);
                v[0] = r;
                return mu_density(ctx, v, h) * std::pow(r, d - 2);
            },
            0.0, rmax, 0.0, 1e-8);
        return surface * qr.value;
    };
    const QuadResult q = integrate_with_breakpoints(inner, 0.0, ctx.h_max,
                                                    phi_breakpoints(ctx), 0.0, 1e-7);
    return q.value;
}

bool nu_is_point_mass(int d, double alpha) {
    return classify(d, alpha).regime == Regime::Sub;
}

double nu_limit_pdf(int d, double alpha, double h) {
    const RegimeParams rp = classify(d, alpha);
    if (h < 0.0) return 0.0;
    switch (rp.regime) {
        case Regime::Super: return 1.0;
        case Regime::CritHi: return cap_s1(d, std::pow(kappa(d), 2.0 / (d + 1)) * h);
        case Regime::Pos:
        case Regime::Zero:
        case Regime::Neg: return std::pow(h, 0.5 * (d - 1));
        case Regime::CritLo: return cap_s2(d, std::pow(kappa(d), 2.0 / (d + 1)) * h);
        case Regime::Sub:
            return h == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    throw DomainError("nu_limit_pdf: unreachable");
}

double nu_mass(int d, double alpha, double a, double b) {
    const RegimeParams rp = classify(d, alpha);
    if (b <= a) return 0.0;
    a = std::max(a, 0.0);
    switch (rp.regime) {
        case Regime::Super: return std::max(0.0, b - a);
        case Regime::Pos:
        case Regime::Zero:
        case Regime::Neg: {
            const double p = 0.5 * (d + 1);
            return (std::pow(b, p) - std::pow(a, p)) / p;
        }
        case Regime::CritHi:
        case Regime::CritLo: {
            const double support_end = 2.0 * std::pow(kappa(d), -2.0 / (d + 1));
            const double hi = rp.regime == Regime::CritLo ? std::min(b, support_end) : b;
            if (hi <= a) return 0.0;
            std::vector<double> cuts{support_end};
            const QuadResult q = integrate_with_breakpoints(
                [d, alpha](double h) { return nu_limit_pdf(d, alpha, h); }, a, hi, cuts,
                0.0, 1e-10);
            return q.value;
        }
        case Regime::Sub: return a <= 0.0 ? 1.0 : 0.0;
    }
    throw DomainError("nu_mass: unreachable");
}

double sample_nu(int d, double alpha, double h_cap, RngStream& rng) {
    if (!(h_cap > 0.0)) throw DomainError("sample_nu: h_cap must be > 0");
    const RegimeParams rp = classify(d, alpha);
    switch (rp.regime) {
        case Regime::Sub: return 0.0;
        case Regime::Super: return h_cap * rng.next_double();
        case Regime::Pos:
        case Regime::Zero:
        case Regime::Neg:
            return h_cap * std::pow(rng.next_double_pos(), 2.0 / (d + 1));
        case Regime::CritHi:
        case Regime::CritLo: {
            const double k23 = std::pow(kappa(d), 2.0 / (d + 1));
            double cap = h_cap;
            if (rp.regime == Regime::CritLo)
                cap = std::min(cap, 2.0 / k23);
            // Rejection from the dominating power-law envelope M h^{(d-1)/2},
            // with M from arccos(1-x) <= 2 sqrt(2x).
            const double base = kappa(d - 1) / (d * kappa(d));
            const double m = rp.regime == Regime::CritHi
                                 ? base * std::pow(8.0 * k23, 0.5 * (d - 1))
                                 : base * std::pow(2.0 * k23, 0.5 * (d - 1));
            for (int it = 0; it < 100000; ++it) {
                const double h = cap * std::pow(rng.next_double_pos(), 2.0 / (d + 1));
                const double envelope = m * std::pow(h, 0.5 * (d - 1));
                if (rng.next_double() * envelope <= nu_limit_pdf(d, alpha, h)) return h;
            }
            throw DomainError("sample_nu: rejection sampler failed to accept");
        }
    }
    throw DomainError("sample_nu: unreachable");
}

double beta_normalization_residual(int d, double kappa_perturbation) {
    const double kd = kappa(d) + kappa_perturbation;
    const double kd1 = kappa(d - 1);
    const double a = 0.5 * (d + 1);
    const double log_beta = 2.0 * std::lgamma(a) - std::lgamma(2.0 * a);
    const double value = std::pow(2.0, d) * kd1 / kd * std::exp(log_beta);
    return std::fabs(value - 1.0);
}

}  // namespace perthull
