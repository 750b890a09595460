// Replication-level statistics: moments of f_k across scales, scaling-slope
// regressions, distributional comparisons against the limit process, boundary
// convergence profiles and CLT diagnostics.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perthull/limit.hpp"
#include "perthull/model.hpp"
#include "perthull/stats.hpp"

namespace perthull {

inline constexpr uint64_t kDefaultSeed = 0x7e57ab1eull;

struct ExperimentSpec {
    int d = 2;
    double alpha = 0.0;
    ModelKind kind = ModelKind::Poisson;
    std::vector<double> scales;  // strictly increasing
    std::vector<int> ks{0};
    int replications = 50;
    uint64_t master_seed = kDefaultSeed;
    int threads = 1;
    double window_height = 4.0;  // height cap of distributional comparisons

    void validate() const;
};

struct MomentCell {
    double scale = 0.0;
    int k = 0;
    long reps_ok = 0;
    long reps_failed = 0;
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
    double rescale = 1.0;  // d kappa_d u^{d-1}
    double rescaled_mean = 0.0;
    double rescaled_variance = 0.0;
};

struct MomentReport {
    ExperimentSpec spec;
    std::vector<MomentCell> cells;                    // scale-major, k-minor
    std::vector<std::vector<std::vector<double>>> samples;  // [scale][k][rep]

    const MomentCell& cell(size_t scale_idx, size_t k_idx) const;
};

MomentReport run_moment_experiment(const ExperimentSpec& spec);

struct SlopeReport {
    int k = 0;
    OlsFit full;      // OLS over every scale of the ladder
    OlsFit headline;  // three largest scales
    double curvature = 0.0;  // quadratic coefficient over all scales
};

// Requires >= 5 scales spanning >= 2 decades.
SlopeReport scaling_slope(const MomentReport& report, int k);

struct HeightKsRow {
    double scale = 0.0;
    double ks = 0.0;
    long pooled_count = 0;
    bool wide_error = false;
    // Point-mass regime diagnostics instead of a KS value:
    double sub_fraction_above_half = 0.0;   // literal h > (1+eps) h_max/2 tail
    double sub_fraction_above_fixed = 0.0;  // h > 0.01, the vanishing diagnostic
};

// Empirical in-window height law of forward-transformed clouds against the
// normalized limit intensity, pooled over replications; |v| <= u/4 to stay
// where the angular Jacobian is near 1.
std::vector<HeightKsRow> height_distribution_test(const ExperimentSpec& spec);

struct BoundaryRow {
    double scale = 0.0;
    std::vector<double> sup_distances;  // one per successful replication
    long reps_failed = 0;
    double median = 0.0;
};

// Rescaled hull boundary heights over a spatial grid against the festoon of
// the transformed cloud; returns the distribution of sup-grid distances.
std::vector<BoundaryRow> boundary_profile_compare(const ExperimentSpec& spec,
                                                  const std::vector<Vec>& grid,
                                                  double keep_margin = 8.0);

struct CltRow {
    double scale = 0.0;
    int k = 0;
    long reps = 0;
    double ks_stat = 0.0;
    double ks_pvalue = 0.0;
    ShapeStats shape;
    bool looks_normal = false;
};

// Requires replications >= 500.
std::vector<CltRow> clt_diagnostics(const ExperimentSpec& spec, int k);

struct PatternRow {
    double scale = 0.0;
    double tv_distance = 0.0;        // between normalized box-count vectors
    double model_ext_intensity = 0.0;  // extreme points per unit spatial volume
    double limit_ext_intensity = 0.0;
    std::vector<double> model_boxes;
    std::vector<double> limit_boxes;
};

// Box-count comparison of transformed model extreme points against Ext of
// matched limit-process samples on the same window.
std::vector<PatternRow> extreme_point_pattern_compare(const ExperimentSpec& spec,
                                                      int boxes_per_axis, double L,
                                                      double H);

// Pure serializers; the CLI owns all file I/O.
std::string moment_report_json(const MomentReport& report);
std::string moment_report_csv(const MomentReport& report);

}  // namespace perthull
