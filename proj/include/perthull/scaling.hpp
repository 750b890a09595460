// Regime classification, scaling exponents and factors, the parabolic
// rescaling transform, spherical cap functions, the finite-scale height
// density and the limit intensities.
#pragma once

#include <string>
#include <vector>

#include "perthull/rng.hpp"
#include "perthull/vec.hpp"

namespace perthull {

// The seven alpha-intervals.  Boundaries sit at 2/(d+1), 0 and -2/(d-1).
enum class Regime { Super, CritHi, Pos, Zero, Neg, CritLo, Sub };

std::string to_string(Regime regime);

struct RegimeParams {
    int d = 2;
    double alpha = 0.0;
    Regime regime = Regime::Zero;
    double beta = 0.0;
};

// Float alpha within 1e-12 of a boundary snaps to the boundary regime.
RegimeParams classify(int d, double alpha);

// Exact classification for alpha supplied as a rational num/den.
RegimeParams classify_rational(int d, long long num, long long den);

// Scaling factor u_{lambda,alpha} including all constant prefactors.
double scale_factor_u(int d, double alpha, double scale);

struct ScaleContext {
    RegimeParams regime;
    double scale = 1.0;         // lambda (or n)
    double noise_radius = 1.0;  // scale^alpha
    double u = 1.0;
    double h_max = 1.0;         // height range of the rescaled window
};

ScaleContext make_scale_context(int d, double alpha, double scale);

struct RescaledPoint {
    Vec v;          // spatial coordinate in R^{d-1}
    double h = 0.0; // height
};

// x in B_d(0, 1+scale^alpha) minus the radial axis through -u0 maps to
// (u exp^{-1}(x/|x|), u^2 (1 - |x|/(1+scale^alpha))).
RescaledPoint forward_transform(const Vec& x, const ScaleContext& ctx);
Vec inverse_transform(const RescaledPoint& w, const ScaleContext& ctx);

// Normalized surface area of the cap of S^{d-1} below height h (measured from
// the bottom of the sphere): 0 below h=0, 1 above h=2.
double cap_s1(int d, double h);

// Normalized surface area of the sphere slice at height h; 0 outside [0, 2].
double cap_s2(int d, double h);

// Cap-height argument g_{lambda,alpha}(h) clamped to [0, 2]; h in [0, u^2).
double g_clamp(const ScaleContext& ctx, double h);

// Height density of the rescaled intensity measure on [0, h_max].
double phi_density(const ScaleContext& ctx, double h);

// Numeric integral of phi over its support (mass identity target
// scale / (d kappa_d u^{d-1})).
double phi_total_mass(const ScaleContext& ctx);

// Full rescaled intensity density at (v, h): angular Jacobian factor x phi.
double mu_density(const ScaleContext& ctx, const Vec& v, double h);

// Iterated cubature of mu over the whole window; equals scale in the limit of
// exact integration.
double mu_total_mass(const ScaleContext& ctx);

// Limit height intensity (Table column nu).  For the point-mass regime the
// density reads 0 away from h=0; query nu_is_point_mass to branch.
bool nu_is_point_mass(int d, double alpha);
double nu_limit_pdf(int d, double alpha, double h);

// nu-mass of [a, b] (the point mass counts when a <= 0 <= b).
double nu_mass(int d, double alpha, double a, double b);

// Draw from nu restricted to [0, h_cap] and normalized.
double sample_nu(int d, double alpha, double h_cap, RngStream& rng);

// |2^d kappa_{d-1}/kappa_d * B((d+1)/2,(d+1)/2) - 1|; the optional
// perturbation of kappa_d is a negative-control hook for `verify`.
double beta_normalization_residual(int d, double kappa_perturbation = 0.0);

// Interior kinks of phi, exposed so integrators can split there.
std::vector<double> phi_breakpoints(const ScaleContext& ctx);

}  // namespace perthull
