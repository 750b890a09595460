#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "perthull/experiments.hpp"
#include "perthull/geometry.hpp"

using namespace perthull;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = 0.0;
    spec.kind = ModelKind::Poisson;
    spec.scales = {300.0, 900.0};
    spec.ks = {0, 1};
    spec.replications = 24;
    spec.threads = 2;
    return spec;
}

}  // namespace

TEST_CASE("spec validation") {
    ExperimentSpec spec = small_spec();
    spec.scales = {500.0, 500.0};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = small_spec();
    spec.replications = 1;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = small_spec();
    spec.ks = {5};
    CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("moment report invariants") {
    const MomentReport report = run_moment_experiment(small_spec());
    REQUIRE(report.cells.size() == 4);
    for (const MomentCell& cell : report.cells) {
        CHECK(cell.variance >= 0.0);
        CHECK(cell.rescaled_mean > 0.0);
        CHECK(std::isfinite(cell.rescaled_mean));
        if (cell.k == 0) CHECK(cell.mean >= 3.0);
        CHECK(cell.reps_failed <= cell.reps_ok / 100 + 1);
        CHECK(cell.se_mean ==
              doctest::Approx(std::sqrt(cell.variance / cell.reps_ok)).epsilon(1e-12));
    }
    // In d=2 every sample has f_1 = f_0.
    for (size_t si = 0; si < 2; ++si)
        for (size_t r = 0; r < report.samples[si][0].size(); ++r)
            CHECK(report.samples[si][0][r] == report.samples[si][1][r]);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
    ExperimentSpec spec = small_spec();
    const std::string a = moment_report_json(run_moment_experiment(spec));
    const std::string b = moment_report_json(run_moment_experiment(spec));
    CHECK(a == b);
    spec.threads = 1;
    const std::string c = moment_report_json(run_moment_experiment(spec));
    CHECK(a == c);
    const std::string csv = moment_report_csv(run_moment_experiment(spec));
    CHECK(csv.find("scale,k,reps_ok") == 0);
}

TEST_CASE("rescale factor equals lambda exactly in the point-mass regime") {
    for (int d = 2; d <= 8; ++d) {
        const double alpha = -2.0 / (d - 1) - 1.0;
        for (double lambda : {1e3, 1e5, 1e7}) {
            const ScaleContext ctx = make_scale_context(d, alpha, lambda);
            const double rescale = d * unit_ball_volume(d) * std::pow(ctx.u, d - 1);
            CHECK(std::fabs(rescale / lambda - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("scaling slope: domain errors and the flat worst-case ladder") {
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = -10.0;
    spec.kind = ModelKind::Binomial;
    spec.scales = {128, 256, 512, 1024, 2048, 4096, 8192, 16384};
    spec.ks = {0};
    spec.replications = 6;
    spec.threads = 2;
    const MomentReport report = run_moment_experiment(spec);
    const SlopeReport slope = scaling_slope(report, 0);
    CHECK(slope.full.slope == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(slope.headline.slope == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(slope.curvature) < 1e-6);

    ExperimentSpec shallow = spec;
    shallow.scales = {128, 256, 512, 1024};
    CHECK_THROWS_AS(scaling_slope(run_moment_experiment(shallow), 0), DomainError);
    ExperimentSpec narrow = spec;
    narrow.scales = {128, 160, 200, 240, 280};
    CHECK_THROWS_AS(scaling_slope(run_moment_experiment(narrow), 0), DomainError);
}

TEST_CASE("height distribution: KS columns and the point-mass diagnostics") {
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = 0.0;
    spec.kind = ModelKind::Poisson;
    spec.scales = {3000.0, 30000.0};
    spec.replications = 12;
    spec.threads = 2;
    spec.window_height = 4.0;
    const auto rows = height_distribution_test(spec);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.pooled_count > 100);
        CHECK(r.ks > 0.0);
        CHECK(r.ks < 0.5);
    }

    ExperimentSpec sub = spec;
    sub.alpha = -5.0;
    sub.scales = {2000.0, 20000.0};
    const auto sub_rows = height_distribution_test(sub);
    for (const auto& r : sub_rows) {
        // All transformed heights live far below any fixed threshold.
        CHECK(r.sub_fraction_above_fixed == 0.0);
        CHECK(r.sub_fraction_above_half <= 1.0);
    }
}

TEST_CASE("boundary profile medians are finite and small at high scale") {
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = -5.0;
    spec.kind = ModelKind::Poisson;
    spec.scales = {2000.0, 20000.0};
    spec.replications = 10;
    spec.threads = 2;
    std::vector<Vec> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(Vec{-1.5 + 0.3 * i});
    const auto rows = boundary_profile_compare(spec, grid);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.reps_failed <= 1);
        CHECK(r.median >= 0.0);
        CHECK(r.median < 1.0);
    }
    CHECK(rows[1].median < rows[0].median);
}

TEST_CASE("exact agreement at spatial coordinates of extreme points") {
    // Both surfaces pass through the transformed extreme points.
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = -5.0;
    spec.kind = ModelKind::Poisson;
    spec.scales = {3000.0};
    spec.replications = 2;
    spec.threads = 1;
    const ScaleContext ctx = make_scale_context(2, -5.0, 3000.0);
    RngStream rng = RngStream::derive(spec.master_seed, 0, 0x99);
    ModelParams params;
    params.d = 2;
    params.alpha = -5.0;
    params.scale = 3000.0;
    params.kind = ModelKind::Poisson;
    const PointCloud cloud = sample_poisson_cloud(params, rng);
    const HullComplex hull = convex_hull(cloud);
    const RescaledCloud rc =
        transform_cloud(cloud, ctx, 6.0, ctx.h_max + 1e-13 * ctx.u * ctx.u);
    const FestoonSample fs = analyze_festoon(rc);
    int checked = 0;
    for (int i = 0; i < rc.size() && checked < 10; ++i) {
        if (!fs.is_ext(i)) continue;
        if (rc.points[static_cast<size_t>(i)].v.norm() > 2.0) continue;
        const Vec v = rc.points[static_cast<size_t>(i)].v;
        Vec tangent = v;
        tangent *= 1.0 / ctx.u;
        const double t = hull_support_along(hull, exp_map(tangent));
        const double h_hull = ctx.u * ctx.u * (1.0 - t / (1.0 + ctx.noise_radius));
        CHECK(h_hull == doctest::Approx(fs.boundary(v)).epsilon(1e-6));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("clt diagnostics flag small samples and demand budget") {
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = 0.0;
    spec.kind = ModelKind::Poisson;
    spec.scales = {20.0};
    spec.replications = 600;
    spec.threads = 2;
    const auto rows = clt_diagnostics(spec, 0);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].looks_normal);  // lambda = 20: discrete, skewed

    spec.replications = 100;
    CHECK_THROWS_AS(clt_diagnostics(spec, 0), DomainError);
}

TEST_CASE("extreme point pattern: intensities near 1 in the point-mass regime") {
    ExperimentSpec spec;
    spec.d = 2;
    spec.alpha = -5.0;
    spec.kind = ModelKind::Poisson;
    spec.scales = {5000.0, 50000.0};
    spec.replications = 20;
    spec.threads = 2;
    const auto rows = extreme_point_pattern_compare(spec, 6, 3.0, 1.0);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.limit_ext_intensity == doctest::Approx(1.0).epsilon(0.15));
        CHECK(r.tv_distance >= 0.0);
        CHECK(r.tv_distance <= 1.0);
    }
    // The transformed model's extreme intensity approaches 1 as well.
    CHECK(rows[1].model_ext_intensity == doctest::Approx(1.0).epsilon(0.15));
    // Marginal counts are translation-homogeneous within noise.
    const auto& boxes = rows[1].model_boxes;
    double total = 0.0;
    for (double b : boxes) total += b;
    for (double b : boxes) {
        const double expect = total / boxes.size();
        CHECK(std::fabs(b - expect) < 5.0 * std::sqrt(expect) + 5.0);
    }
}
