// Elementary d-dimensional geometry: unit-ball volumes, sphere/ball sampling
// and the spherical exponential map at the north pole.
#pragma once

#include "perthull/rng.hpp"
#include "perthull/vec.hpp"

namespace perthull {

// Volume kappa_d of the unit ball in R^d.
double unit_ball_volume(int d);

// Surface area of the unit sphere S^{d-1}, i.e. d * kappa_d.
double unit_sphere_area(int d);

// Uniform point on S^{d-1} (normalized Gaussian vector), d >= 2.
Vec sample_uniform_sphere(int d, RngStream& rng);

// Uniform point in B_d(0, radius); d >= 1 so spatial windows of the rescaled
// space (dimension d-1) can reuse it.
Vec sample_uniform_ball(int d, double radius, RngStream& rng);

// Exponential map at u0 = (0,...,0,1): v in the tangent plane R^{d-1}
// (|v| <= pi) to the point of S^{d-1} at geodesic distance |v| from u0.
Vec exp_map(const Vec& v);

// Inverse of exp_map on the sphere minus the antipode of u0.
Vec inv_exp_map(const Vec& u);

}  // namespace perthull
