#include "perthull/limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perthull/geometry.hpp"
#include "perthull/parallel.hpp"
#include "perthull/stats.hpp"

namespace perthull {

namespace {

// Binomial coefficient for the tiny-cloud face counts (n <= 8).
long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

PointCloud lift_cloud(const RescaledCloud& cloud) {
    PointCloud lifted(cloud.d);
    lifted.reserve(cloud.size());
    for (const RescaledPoint& w : cloud.points) {
        Vec p(cloud.d);
        for (int j = 0; j + 1 < cloud.d; ++j) p[j] = w.v[j];
        p[cloud.d - 1] = w.h + 0.5 * w.v.norm2();
        lifted.add(p);
    }
    return lifted;
}

// Spatial affine independence check for clouds too small to span a
// full-dimensional lifted hull.
void require_affinely_independent(const RescaledCloud& cloud) {
    const int n = cloud.size();
    if (n <= 1) return;
    std::vector<Vec> basis;
    double scale = 0.0;
    for (int i = 1; i < n; ++i)
        scale = std::max(scale, (cloud.points[i].v - cloud.points[0].v).norm());
    if (!(scale > 0.0))
        throw DegeneracyError("festoon: coincident spatial projections");
    for (int i = 1; i < n; ++i) {
        Vec r = cloud.points[i].v - cloud.points[0].v;
        for (const Vec& b : basis) r -= dot(r, b) * b;
        const double rn = r.norm();
        if (rn <= kPredicateBand * scale)
            throw DegeneracyError("festoon: degenerate tiny cloud");
        basis.push_back(r * (1.0 / rn));
    }
}

}  // namespace

RescaledCloud sample_limit_process(int d, double alpha, double L, double H,
                                   RngStream& rng) {
    if (!(L > 0.0) || !(H > 0.0))
        throw DomainError("sample_limit_process: window must be positive");
    RescaledCloud cloud;
    cloud.d = d;
    cloud.alpha = alpha;
    cloud.window_radius = L;
    cloud.window_height = H;
    const double spatial_volume = unit_ball_volume(d - 1) * std::pow(L, d - 1);
    const double mean = spatial_volume * nu_mass(d, alpha, 0.0, H);
    const long long n = rng.next_poisson(mean);
    const bool point_mass = nu_is_point_mass(d, alpha);
    cloud.points.reserve(static_cast<size_t>(n));
    for (long long i = 0; i < n; ++i) {
        RescaledPoint w;
        w.v = sample_uniform_ball(d - 1, L, rng);
        w.h = point_mass ? 0.0 : sample_nu(d, alpha, H, rng);
        cloud.points.push_back(w);
    }
    return cloud;
}

RescaledCloud transform_cloud(const PointCloud& cloud, const ScaleContext& ctx, double L,
                              double H) {
    RescaledCloud out;
    out.d = cloud.dim();
    out.alpha = ctx.regime.alpha;
    out.window_radius = L;
    out.window_height = H;
    out.source_ctx = ctx;
    for (int i = 0; i < cloud.size(); ++i) {
        RescaledPoint w;
        try {
            w = forward_transform(cloud.point(i), ctx);
        } catch (const SingularityError&) {
            continue;  // antipodal direction: maximal |v|, never in a window
        }
        if (w.v.norm() <= L && w.h <= H) out.points.push_back(w);
    }
    return out;
}

FestoonSample analyze_festoon(const RescaledCloud& cloud) {
    if (cloud.size() == 0) throw DomainError("analyze_festoon: empty cloud");
    FestoonSample fs;
    fs.cloud_ = cloud;
    const int d = cloud.d;
    const int n = cloud.size();
    if (n <= d) {
        // Too few points for a full-dimensional lifted hull: with affinely
        // independent projections every point supports an empty grain.
        require_affinely_independent(cloud);
        fs.is_ext_.assign(static_cast<size_t>(n), 1);
        for (int i = 0; i < n; ++i) fs.ext_.push_back(i);
        fs.tiny_counts_.assign(static_cast<size_t>(n), {});
        for (int k = 0; k < d; ++k) {
            fs.tiny_totals_[static_cast<size_t>(k)] = binom(n, k + 1);
            for (int i = 0; i < n; ++i)
                fs.tiny_counts_[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                    binom(n - 1, k);
        }
        return fs;
    }
    fs.lower_ = lower_hull_envelope(lift_cloud(cloud));
    fs.is_ext_.assign(static_cast<size_t>(n), 0);
    for (int idx : fs.lower_->vertices()) {
        fs.is_ext_[static_cast<size_t>(idx)] = 1;
        fs.ext_.push_back(idx);
    }
    return fs;
}

double FestoonSample::boundary(const Vec& v) const {
    if (!lower_)
        throw OutOfWindowError("festoon boundary: cloud spans no spatial window");
    return lower_->envelope(v) - 0.5 * v.norm2();
}

long long FestoonSample::face_count_at(int i, int k) const {
    if (k < 0 || k >= cloud_.d) throw DomainError("face_count_at: k out of range");
    if (lower_) return lower_->incident_faces(i, k);
    return tiny_counts_[static_cast<size_t>(i)][static_cast<size_t>(k)];
}

double FestoonSample::xi(int i, int k) const {
    return static_cast<double>(face_count_at(i, k)) / (k + 1);
}

long long FestoonSample::total_faces(int k) const {
    if (k < 0 || k >= cloud_.d) throw DomainError("total_faces: k out of range");
    if (lower_) return lower_->face_count(k);
    return tiny_totals_[static_cast<size_t>(k)];
}

bool FestoonSample::trusted(int i, double stabilization_radius) const {
    return cloud_.window_radius - cloud_.points[static_cast<size_t>(i)].v.norm() >=
           stabilization_radius;
}

std::vector<int> extremal_thinning(const RescaledCloud& cloud) {
    return analyze_festoon(cloud).ext();
}

double festoon_boundary(const RescaledCloud& cloud, const Vec& v) {
    return analyze_festoon(cloud).boundary(v);
}

double xi_infinity(const RescaledCloud& cloud, int index, int k) {
    return analyze_festoon(cloud).xi(index, k);
}

bool quasi_grain_contains(const ParabolicGrain& grain, const RescaledPoint& w) {
    if (w.v.dim() != grain.apex_v.dim())
        throw DomainError("quasi_grain_contains: dimension mismatch");
    if (!grain.ctx) {
        const double q = 0.5 * (w.v - grain.apex_v).norm2();
        return grain.up ? w.h >= grain.apex_h + q : w.h <= grain.apex_h - q;
    }
    const ScaleContext& ctx = *grain.ctx;
    const double u = ctx.u;
    if (w.v.norm() > u * std::numbers::pi * (1.0 + 1e-12) ||
        grain.apex_v.norm() > u * std::numbers::pi * (1.0 + 1e-12))
        throw DomainError("quasi_grain_contains: |v| outside the window");
    Vec a = w.v;
    a *= 1.0 / u;
    Vec b = grain.apex_v;
    b *= 1.0 / u;
    const double cos_e = std::clamp(dot(exp_map(a), exp_map(b)), -1.0, 1.0);
    const double u2 = u * u;
    if (grain.up) return w.h >= u2 * (1.0 - cos_e) + grain.apex_h * cos_e;
    return w.h * cos_e <= grain.apex_h - u2 * (1.0 - cos_e);
}

namespace {

double nu_mode_proxy(int d, double alpha) {
    switch (classify(d, alpha).regime) {
        case Regime::Super: return 1.0;
        case Regime::CritHi: return 2.0 * std::pow(unit_ball_volume(d), -2.0 / (d + 1));
        case Regime::Pos:
        case Regime::Zero:
        case Regime::Neg: return 4.0;
        case Regime::CritLo: return std::pow(unit_ball_volume(d), -2.0 / (d + 1));
        case Regime::Sub: return 0.0;
    }
    return 1.0;
}

struct Window {
    double L;
    double H;
};

Window estimator_window(int d, double alpha, double max_h, const EstimatorOptions& opts) {
    Window w;
    w.H = opts.override_H.value_or(
        std::max(4.0 * std::log(1.0 / opts.eps_target), max_h));
    w.L = opts.override_L.value_or(
        std::max(8.0, 4.0 * std::sqrt(2.0 * (max_h + nu_mode_proxy(d, alpha)))));
    w.L *= opts.window_scale;
    w.H *= opts.window_scale;
    return w;
}

// Mean of per-replication values of xi at inserted points, with an optional
// transform of the score vector (identity, square, product...).
struct McRun {
    double mean = 0.0;
    double se = 0.0;
    long ok = 0;
    long failed = 0;
};

template <typename ValueFn>
McRun run_insertion_mc(int d, double alpha, const std::vector<RescaledPoint>& inserts,
                       const Window& win, int reps, int threads, uint64_t seed,
                       uint64_t tag, ValueFn&& value_of) {
    std::vector<double> values(static_cast<size_t>(reps));
    std::vector<char> ok(static_cast<size_t>(reps), 0);
    parallel_for_index(reps, threads, [&](int rep) {
        RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(rep), tag);
        RescaledCloud cloud = sample_limit_process(d, alpha, win.L, win.H, rng);
        const int base = cloud.size();
        for (const RescaledPoint& w : inserts) cloud.points.push_back(w);
        try {
            const FestoonSample fs = analyze_festoon(cloud);
            values[static_cast<size_t>(rep)] = value_of(fs, base);
            ok[static_cast<size_t>(rep)] = 1;
        } catch (const DegeneracyError&) {
            ok[static_cast<size_t>(rep)] = 0;
        }
    });
    McRun out;
    RunningMoments acc;
    for (int rep = 0; rep < reps; ++rep) {
        if (ok[static_cast<size_t>(rep)]) {
            acc.add(values[static_cast<size_t>(rep)]);
        } else {
            ++out.failed;
        }
    }
    out.ok = acc.count;
    out.mean = acc.mean;
    out.se = acc.stderr_mean();
    return out;
}

}  // namespace

Estimate estimate_limit_score_mean(int d, double alpha, int k, double h,
                                   const EstimatorOptions& opts) {
    if (h < 0.0) throw DomainError("estimate_limit_score_mean: h must be >= 0");
    if (k < 0 || k >= d) throw DomainError("estimate_limit_score_mean: k out of range");
    const Window win = estimator_window(d, alpha, h, opts);
    std::vector<RescaledPoint> ins{{Vec::zero(d - 1), h}};
    const McRun run = run_insertion_mc(
        d, alpha, ins, win, opts.replications, opts.threads, opts.seed, 0xA1,
        [k](const FestoonSample& fs, int base) { return fs.xi(base, k); });
    Estimate est;
    est.value = run.mean;
    est.stderr_value = run.se;
    est.replications = run.ok;
    est.wide_error = run.ok < 30 || run.se > 0.1 * std::max(std::fabs(run.mean), 0.1);
    if (opts.sensitivity) {
        EstimatorOptions doubled = opts;
        doubled.sensitivity = false;
        doubled.window_scale = opts.window_scale * 2.0;
        doubled.replications = std::max(30, opts.replications / 4);
        const Estimate wide = estimate_limit_score_mean(d, alpha, k, h, doubled);
        est.sensitivity_shift = std::fabs(wide.value - est.value);
    }
    return est;
}

Estimate estimate_two_point(int d, double alpha, int k, const RescaledPoint& w1,
                            const RescaledPoint& w2, const EstimatorOptions& opts) {
    if (k < 0 || k >= d) throw DomainError("estimate_two_point: k out of range");
    const double reach = std::max(w1.v.norm(), w2.v.norm());
    const double hmax = std::max(w1.h, w2.h);
    EstimatorOptions local = opts;
    Window win = estimator_window(d, alpha, hmax, local);
    win.L += reach;

    std::vector<RescaledPoint> both{w1, w2};
    const McRun mutual = run_insertion_mc(
        d, alpha, both, win, opts.replications, opts.threads, opts.seed, 0xB1,
        [k](const FestoonSample& fs, int base) {
            return fs.xi(base, k) * fs.xi(base + 1, k);
        });
    std::vector<RescaledPoint> first{w1};
    const McRun single1 = run_insertion_mc(
        d, alpha, first, win, opts.replications, opts.threads, opts.seed, 0xB2,
        [k](const FestoonSample& fs, int base) { return fs.xi(base, k); });
    std::vector<RescaledPoint> second{w2};
    const McRun single2 = run_insertion_mc(
        d, alpha, second, win, opts.replications, opts.threads, opts.seed, 0xB3,
        [k](const FestoonSample& fs, int base) { return fs.xi(base, k); });

    Estimate est;
    est.value = mutual.mean - single1.mean * single2.mean;
    est.stderr_value = std::sqrt(mutual.se * mutual.se +
                                 single2.mean * single2.mean * single1.se * single1.se +
                                 single1.mean * single1.mean * single2.se * single2.se);
    est.replications = mutual.ok;
    est.wide_error = mutual.ok < 30;
    return est;
}

namespace {

// Gauss-Legendre nodes/weights on [0,1], n in a small table (4..32 by powers).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton on Legendre polynomials.
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[static_cast<size_t>(i)] = 0.5 * (1.0 - t);
        w[static_cast<size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace

Estimate estimate_limit_constant(int d, double alpha, int k,
                                 const LimitConstantOptions& opts) {
    EstimatorOptions mc = opts.mc;
    mc.sensitivity = false;
    mc.threads = opts.threads;
    if (nu_is_point_mass(d, alpha)) {
        Estimate e = estimate_limit_score_mean(d, alpha, k, 0.0, mc);
        return e;
    }
    // Substitute h = t^2 so the h^{(d-1)/2} family loses its root singularity.
    std::vector<double> xs, ws;
    gauss_legendre(opts.nodes, xs, ws);
    const double tmax = std::sqrt(opts.height_cap);
    double value = 0.0, var = 0.0;
    double value_doubled = 0.0;
    for (int i = 0; i < opts.nodes; ++i) {
        const double t = tmax * xs[static_cast<size_t>(i)];
        const double h = t * t;
        const double weight =
            tmax * ws[static_cast<size_t>(i)] * 2.0 * t * nu_limit_pdf(d, alpha, h);
        EstimatorOptions node_mc = mc;
        node_mc.seed = mc.seed ^ (0xC0DE + static_cast<uint64_t>(i) * 0x9E37u);
        const Estimate e = estimate_limit_score_mean(d, alpha, k, h, node_mc);
        value += weight * e.value;
        var += weight * weight * e.stderr_value * e.stderr_value;

        EstimatorOptions wide_mc = node_mc;
        wide_mc.window_scale = 2.0;
        wide_mc.replications = std::max(30, node_mc.replications / 8);
        const Estimate ew = estimate_limit_score_mean(d, alpha, k, h, wide_mc);
        value_doubled += weight * ew.value;
    }
    Estimate est;
    est.value = value;
    est.stderr_value = std::sqrt(var);
    est.replications = static_cast<long>(opts.nodes) * mc.replications;
    est.sensitivity_shift = std::fabs(value_doubled - value);
    est.wide_error = est.stderr_value > 0.1 * std::max(std::fabs(value), 0.1);
    return est;
}

Estimate estimate_sigma_sq(int d, double alpha, int k, const SigmaSqOptions& opts) {
    EstimatorOptions mc = opts.mc;
    mc.sensitivity = false;
    const double surface = (d - 1) * unit_ball_volume(d - 1);  // angle of R^{d-1}

    std::vector<double> xs, ws;
    gauss_legendre(opts.radial_nodes, xs, ws);

    if (nu_is_point_mass(d, alpha)) {
        // Simplified form: E xi((0,0))^2 plus the spatial integral of the
        // two-point correlation along the zero-height plane.
        const Window win = estimator_window(d, alpha, 0.0, mc);
        std::vector<RescaledPoint> ins{{Vec::zero(d - 1), 0.0}};
        const McRun sq = run_insertion_mc(
            d, alpha, ins, win, mc.replications, mc.threads, mc.seed, 0xD1,
            [k](const FestoonSample& fs, int base) {
                const double x = fs.xi(base, k);
                return x * x;
            });
        double value = sq.mean;
        double var = sq.se * sq.se;
        for (int j = 0; j < opts.radial_nodes; ++j) {
            const double r = opts.radial_cap * xs[static_cast<size_t>(j)];
            const double weight = opts.radial_cap * ws[static_cast<size_t>(j)] * surface *
                                  std::pow(r, d - 2);
            Vec v1 = Vec::zero(d - 1);
            v1[0] = r;
            EstimatorOptions node_mc = mc;
            node_mc.seed = mc.seed ^ (0xD2D2 + static_cast<uint64_t>(j));
            const Estimate c = estimate_two_point(d, alpha, k, {Vec::zero(d - 1), 0.0},
                                                  {v1, 0.0}, node_mc);
            value += weight * c.value;
            var += weight * weight * c.stderr_value * c.stderr_value;
        }
        Estimate est;
        est.value = value;
        est.stderr_value = std::sqrt(var);
        est.replications = sq.ok;
        return est;
    }

    std::vector<double> hx, hw;
    gauss_legendre(opts.height_nodes, hx, hw);
    const double tmax = std::sqrt(opts.height_cap);

    // First term: second moment integrated against nu.
    double value = 0.0, var = 0.0;
    for (int i = 0; i < opts.height_nodes; ++i) {
        const double t = tmax * hx[static_cast<size_t>(i)];
        const double h = t * t;
        const double weight =
            tmax * hw[static_cast<size_t>(i)] * 2.0 * t * nu_limit_pdf(d, alpha, h);
        const Window win = estimator_window(d, alpha, h, mc);
        std::vector<RescaledPoint> ins{{Vec::zero(d - 1), h}};
        McRun sq = run_insertion_mc(
            d, alpha, ins, win, mc.replications, mc.threads,
            mc.seed ^ (0xE1 + static_cast<uint64_t>(i)), 0xD3,
            [k](const FestoonSample& fs, int base) {
                const double x = fs.xi(base, k);
                return x * x;
            });
        value += weight * sq.mean;
        var += weight * weight * sq.se * sq.se;
    }

    // Second term: triple integral of the two-point correlation.
    for (int i = 0; i < opts.height_nodes; ++i) {
        const double t0 = tmax * hx[static_cast<size_t>(i)];
        const double h0 = t0 * t0;
        const double w0 =
            tmax * hw[static_cast<size_t>(i)] * 2.0 * t0 * nu_limit_pdf(d, alpha, h0);
        for (int l = 0; l < opts.height_nodes; ++l) {
            const double t1 = tmax * hx[static_cast<size_t>(l)];
            const double h1 = t1 * t1;
            const double w1 =
                tmax * hw[static_cast<size_t>(l)] * 2.0 * t1 * nu_limit_pdf(d, alpha, h1);
            for (int j = 0; j < opts.radial_nodes; ++j) {
                const double r = opts.radial_cap * xs[static_cast<size_t>(j)];
                const double wr = opts.radial_cap * ws[static_cast<size_t>(j)] * surface *
                                  std::pow(r, d - 2);
                Vec v1 = Vec::zero(d - 1);
                v1[0] = r;
                EstimatorOptions node_mc = mc;
                node_mc.seed =
                    mc.seed ^ (0xF00 + static_cast<uint64_t>((i * 37 + l) * 101 + j));
                const Estimate c = estimate_two_point(d, alpha, k, {Vec::zero(d - 1), h0},
                                                      {v1, h1}, node_mc);
                const double weight = w0 * w1 * wr;
                value += weight * c.value;
                var += weight * weight * c.stderr_value * c.stderr_value;
            }
        }
    }
    Estimate est;
    est.value = value;
    est.stderr_value = std::sqrt(var);
    est.replications = static_cast<long>(mc.replications);
    return est;
}

}  // namespace perthull
