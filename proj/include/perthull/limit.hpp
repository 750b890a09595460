// The limit Poisson processes on windows, parabolic thinning to the extremal
// set, the festoon boundary, limit scores and the Monte Carlo estimators for
// the one- and two-point limit quantities.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perthull/hull.hpp"
#include "perthull/rng.hpp"
#include "perthull/scaling.hpp"

namespace perthull {

struct RescaledCloud {
    int d = 2;                        // ambient model dimension; spatial dim is d-1
    std::vector<RescaledPoint> points;
    double window_radius = 0.0;       // spatial L
    double window_height = 0.0;       // height cap H
    // Source bookkeeping: a limit sample carries alpha; a transformed model
    // cloud carries its ScaleContext.
    double alpha = 0.0;
    std::optional<ScaleContext> source_ctx;

    int size() const { return static_cast<int>(points.size()); }
};

// Poisson sample of the limit process on B_{d-1}(0,L) x [0,H].  The point-mass
// regime puts unit spatial intensity at height exactly 0.
RescaledCloud sample_limit_process(int d, double alpha, double L, double H, RngStream& rng);

// Transform of a model cloud into the rescaled window, dropping points with
// |v| > L or h > H.
RescaledCloud transform_cloud(const PointCloud& cloud, const ScaleContext& ctx, double L,
                              double H);

// Festoon analysis of one cloud: extremal set, lower-hull face structure of
// the lifted points, envelope.
class FestoonSample {
public:
    const RescaledCloud& cloud() const { return cloud_; }
    const std::vector<int>& ext() const { return ext_; }
    bool is_ext(int i) const { return is_ext_[static_cast<size_t>(i)]; }

    // Festoon boundary height over spatial point v (OutOfWindowError outside
    // the hull of the spatial projections).
    double boundary(const Vec& v) const;

    // Number of k-faces of the festoon containing point i, and the score.
    long long face_count_at(int i, int k) const;
    double xi(int i, int k) const;
    // Total number of k-faces of the lifted lower hull.
    long long total_faces(int k) const;

    // Distance of point i to the spatial sampling boundary, for edge flagging.
    bool trusted(int i, double stabilization_radius) const;

private:
    friend FestoonSample analyze_festoon(const RescaledCloud&);
    RescaledCloud cloud_;
    std::vector<int> ext_;
    std::vector<char> is_ext_;
    std::optional<LowerHull> lower_;           // absent for tiny clouds
    std::vector<std::array<int64_t, kMaxDim>> tiny_counts_;
    std::array<long long, kMaxDim> tiny_totals_{};
};

FestoonSample analyze_festoon(const RescaledCloud& cloud);

// Indices of extremal points (survivors of the parabolic thinning).
std::vector<int> extremal_thinning(const RescaledCloud& cloud);

// Festoon boundary height at v for the given cloud.
double festoon_boundary(const RescaledCloud& cloud, const Vec& v);

// Limit score of one point of the cloud.
double xi_infinity(const RescaledCloud& cloud, int index, int k);

// Quasi- and limit paraboloid grains.
struct ParabolicGrain {
    Vec apex_v;       // in R^{d-1}
    double apex_h = 0.0;
    bool up = true;   // direction of the solid
    std::optional<ScaleContext> ctx;  // finite-scale grain when set, limit otherwise
};

bool quasi_grain_contains(const ParabolicGrain& grain, const RescaledPoint& w);

// Window policy of the estimators (spatial radius from the grain diameter
// bound, height cap from the exponential tails), doubled once for the
// sensitivity report.
struct EstimatorOptions {
    int replications = 2000;
    int threads = 1;
    double eps_target = 1e-3;     // tail mass target; H = 4 log(1/eps)
    double window_scale = 1.0;    // multiplies both L and H
    std::optional<double> override_L;
    std::optional<double> override_H;
    bool sensitivity = true;      // re-run once with doubled window
    uint64_t seed = 0x51ab1e5eedull;
};

struct Estimate {
    double value = 0.0;
    double stderr_value = 0.0;
    long replications = 0;
    bool wide_error = false;          // budget too small for a stable value
    double sensitivity_shift = 0.0;   // |estimate - doubled-window estimate|
};

// Monte Carlo E xi_k at an inserted point (0, h) under the limit process.
Estimate estimate_limit_score_mean(int d, double alpha, int k, double h,
                                   const EstimatorOptions& opts);

// Two-point correlation c^xi(w1, w2) by mutual insertion minus the product of
// independent singles.
Estimate estimate_two_point(int d, double alpha, int k, const RescaledPoint& w1,
                            const RescaledPoint& w2, const EstimatorOptions& opts);

// Limit variance sigma^2(xi_k): second-moment integral plus the two-point
// integral over the limit intensity, truncated via the exponential decay.
struct SigmaSqOptions {
    EstimatorOptions mc;
    int height_nodes = 6;    // quadrature nodes per height integral
    int radial_nodes = 6;    // nodes for the spatial integral
    double radial_cap = 8.0;
    double height_cap = 8.0;
};
Estimate estimate_sigma_sq(int d, double alpha, int k, const SigmaSqOptions& opts);

// RHS of the expectation asymptotics: integral of E xi_k((0,h)) against nu.
struct LimitConstantOptions {
    EstimatorOptions mc;
    int nodes = 16;
    double height_cap = 16.0;
    int threads = 1;
};
Estimate estimate_limit_constant(int d, double alpha, int k,
                                 const LimitConstantOptions& opts);

}  // namespace perthull
