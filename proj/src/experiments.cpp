#include "perthull/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "perthull/geometry.hpp"
#include "perthull/hull.hpp"
#include "perthull/parallel.hpp"

namespace perthull {

void ExperimentSpec::validate() const {
    if (d < 2 || d > kMaxDim) throw DomainError("ExperimentSpec: d out of range");
    if (scales.empty()) throw DomainError("ExperimentSpec: no scales");
    for (size_t i = 0; i + 1 < scales.size(); ++i)
        if (!(scales[i] < scales[i + 1]))
            throw DomainError("ExperimentSpec: scales must be strictly increasing");
    if (replications < 2) throw DomainError("ExperimentSpec: need >= 2 replications");
    if (ks.empty()) throw DomainError("ExperimentSpec: no k values");
    for (int k : ks)
        if (k < 0 || k >= d) throw DomainError("ExperimentSpec: k out of range");
}

const MomentCell& MomentReport::cell(size_t scale_idx, size_t k_idx) const {
    return cells.at(scale_idx * spec.ks.size() + k_idx);
}

namespace {

ModelParams params_for(const ExperimentSpec& spec, double scale) {
    ModelParams p;
    p.d = spec.d;
    p.alpha = spec.alpha;
    p.scale = scale;
    p.kind = spec.kind;
    p.seed = spec.master_seed;
    return p;
}

uint64_t scale_tag(size_t scale_idx, uint64_t purpose) {
    return (static_cast<uint64_t>(scale_idx) << 32) | purpose;
}

}  // namespace

MomentReport run_moment_experiment(const ExperimentSpec& spec) {
    spec.validate();
    MomentReport report;
    report.spec = spec;
    const size_t nk = spec.ks.size();
    report.samples.assign(spec.scales.size(), {});

    for (size_t si = 0; si < spec.scales.size(); ++si) {
        const double scale = spec.scales[si];
        const ModelParams params = params_for(spec, scale);
        const ScaleContext ctx = make_scale_context(spec.d, spec.alpha, scale);
        const double rescale = spec.d * unit_ball_volume(spec.d) *
                               std::pow(ctx.u, spec.d - 1);

        const int R = spec.replications;
        std::vector<std::array<double, kMaxDim>> fk(static_cast<size_t>(R));
        std::vector<char> ok(static_cast<size_t>(R), 0);
        parallel_for_index(R, spec.threads, [&](int rep) {
            RngStream rng = RngStream::derive(spec.master_seed,
                                              static_cast<uint64_t>(rep),
                                              scale_tag(si, 0x11));
            const PointCloud cloud = sample_cloud(params, rng);
            try {
                const HullComplex hull = convex_hull(cloud);
                const FaceCounts counts = hull.face_counts();
                for (size_t ki = 0; ki < nk; ++ki)
                    fk[static_cast<size_t>(rep)][ki] =
                        static_cast<double>(counts[spec.ks[ki]]);
                ok[static_cast<size_t>(rep)] = 1;
            } catch (const DegeneracyError&) {
                ok[static_cast<size_t>(rep)] = 0;
            }
        });

        report.samples[si].assign(nk, {});
        for (size_t ki = 0; ki < nk; ++ki) {
            RunningMoments acc;
            for (int rep = 0; rep < R; ++rep) {
                if (!ok[static_cast<size_t>(rep)]) continue;
                const double v = fk[static_cast<size_t>(rep)][ki];
                acc.add(v);
                report.samples[si][ki].push_back(v);
            }
            MomentCell cell;
            cell.scale = scale;
            cell.k = spec.ks[ki];
            cell.reps_ok = acc.count;
            cell.reps_failed = (R - static_cast<int>(acc.count));
            cell.mean = acc.mean;
            cell.variance = acc.variance();
            cell.se_mean = acc.stderr_mean();
            cell.se_variance =
                acc.count > 2 ? cell.variance * std::sqrt(2.0 / (acc.count - 1.0)) : 0.0;
            cell.rescale = rescale;
            cell.rescaled_mean = cell.mean / rescale;
            cell.rescaled_variance = cell.variance / rescale;
            report.cells.push_back(cell);
        }
    }
    return report;
}

SlopeReport scaling_slope(const MomentReport& report, int k) {
    const auto& spec = report.spec;
    if (spec.scales.size() < 5)
        throw DomainError("scaling_slope: need at least 5 scales");
    if (!(spec.scales.back() / spec.scales.front() >= 100.0))
        throw DomainError("scaling_slope: scales must span at least two decades");
    size_t ki = 0;
    while (ki < spec.ks.size() && spec.ks[ki] != k) ++ki;
    if (ki == spec.ks.size()) throw DomainError("scaling_slope: k not in the report");

    std::vector<double> xs, ys;
    for (size_t si = 0; si < spec.scales.size(); ++si) {
        const MomentCell& cell = report.cell(si, ki);
        if (!(cell.mean > 0.0)) throw DomainError("scaling_slope: nonpositive mean f_k");
        xs.push_back(std::log(cell.scale));
        ys.push_back(std::log(cell.mean));
    }
    SlopeReport out;
    out.k = k;
    out.full = ols_fit(xs, ys);
    const size_t n = xs.size();
    out.headline = ols_fit({xs[n - 3], xs[n - 2], xs[n - 1]},
                           {ys[n - 3], ys[n - 2], ys[n - 1]});

    // Quadratic coefficient over all scales as a finite-size transient probe.
    double sx = 0.0;
    for (double x : xs) sx += x;
    const double mx = sx / static_cast<double>(n);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, sy = 0.0, sxy = 0.0, sx2y = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double cx = xs[i] - mx;
        s2 += cx * cx;
        s3 += cx * cx * cx;
        s4 += cx * cx * cx * cx;
        sy += ys[i];
        sxy += cx * ys[i];
        sx2y += cx * cx * ys[i];
    }
    // Normal equations of y ~ a + b cx + c cx^2 on the centered abscissae.
    double m[3][4] = {{static_cast<double>(n), 0.0, s2, sy},
                      {0.0, s2, s3, sxy},
                      {s2, s3, s4, sx2y}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        std::swap(m[piv], m[col]);
        if (m[col][col] == 0.0) return out;
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    out.curvature = m[2][3] / m[2][2];
    return out;
}

std::vector<HeightKsRow> height_distribution_test(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<HeightKsRow> rows;
    const bool sub = nu_is_point_mass(spec.d, spec.alpha);
    for (size_t si = 0; si < spec.scales.size(); ++si) {
        const double scale = spec.scales[si];
        const ScaleContext ctx = make_scale_context(spec.d, spec.alpha, scale);
        const double L = ctx.u / 4.0;
        const double H = sub ? ctx.h_max : spec.window_height;
        const ModelParams params = params_for(spec, scale);

        const int R = spec.replications;
        std::vector<std::vector<double>> heights(static_cast<size_t>(R));
        parallel_for_index(R, spec.threads, [&](int rep) {
            RngStream rng = RngStream::derive(spec.master_seed,
                                              static_cast<uint64_t>(rep),
                                              scale_tag(si, 0x21));
            const PointCloud cloud = sample_cloud(params, rng);
            const RescaledCloud rc = transform_cloud(cloud, ctx, L, H);
            for (const RescaledPoint& w : rc.points)
                heights[static_cast<size_t>(rep)].push_back(w.h);
        });
        std::vector<double> pooled;
        for (const auto& hs : heights) pooled.insert(pooled.end(), hs.begin(), hs.end());

        HeightKsRow row;
        row.scale = scale;
        row.pooled_count = static_cast<long>(pooled.size());
        row.wide_error = pooled.size() < 100;
        if (sub) {
            const double eps = 0.1;
            long above_half = 0, above_fixed = 0;
            for (double h : pooled) {
                if (h > 0.5 * (1.0 + eps) * ctx.h_max) ++above_half;
                if (h > 0.01) ++above_fixed;
            }
            const double n = std::max<double>(1.0, static_cast<double>(pooled.size()));
            row.sub_fraction_above_half = above_half / n;
            row.sub_fraction_above_fixed = above_fixed / n;
        } else if (!pooled.empty()) {
            const double total = nu_mass(spec.d, spec.alpha, 0.0, H);
            row.ks = ks_statistic(pooled, [&](double h) {
                return nu_mass(spec.d, spec.alpha, 0.0, std::clamp(h, 0.0, H)) / total;
            });
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BoundaryRow> boundary_profile_compare(const ExperimentSpec& spec,
                                                  const std::vector<Vec>& grid,
                                                  double keep_margin) {
    spec.validate();
    if (grid.empty()) throw DomainError("boundary_profile_compare: empty grid");
    double grid_reach = 0.0;
    for (const Vec& v : grid) grid_reach = std::max(grid_reach, v.norm());

    std::vector<BoundaryRow> rows;
    for (size_t si = 0; si < spec.scales.size(); ++si) {
        const double scale = spec.scales[si];
        const ScaleContext ctx = make_scale_context(spec.d, spec.alpha, scale);
        const double L_keep = grid_reach + keep_margin;
        // Keep the whole height range; the slack absorbs the u^2-scaled
        // rounding of transformed heights, which can exceed a tiny h_max.
        const double H_keep = ctx.h_max + 1e-13 * ctx.u * ctx.u;
        const ModelParams params = params_for(spec, scale);

        const int R = spec.replications;
        std::vector<double> sup(static_cast<size_t>(R), 0.0);
        std::vector<char> ok(static_cast<size_t>(R), 0);
        parallel_for_index(R, spec.threads, [&](int rep) {
            RngStream rng = RngStream::derive(spec.master_seed,
                                              static_cast<uint64_t>(rep),
                                              scale_tag(si, 0x31));
            const PointCloud cloud = sample_cloud(params, rng);
            try {
                const HullComplex hull = convex_hull(cloud);
                const RescaledCloud rc = transform_cloud(cloud, ctx, L_keep, H_keep);
                const FestoonSample fs = analyze_festoon(rc);
                double worst = 0.0;
                for (const Vec& v : grid) {
                    Vec tangent = v;
                    tangent *= 1.0 / ctx.u;
                    const Vec dir = exp_map(tangent);
                    const double t = hull_support_along(hull, dir);
                    const double h_hull =
                        ctx.u * ctx.u * (1.0 - t / (1.0 + ctx.noise_radius));
                    worst = std::max(worst, std::fabs(h_hull - fs.boundary(v)));
                }
                sup[static_cast<size_t>(rep)] = worst;
                ok[static_cast<size_t>(rep)] = 1;
            } catch (const DegeneracyError&) {
            } catch (const OutOfWindowError&) {
            }
        });

        BoundaryRow row;
        row.scale = scale;
        for (int rep = 0; rep < R; ++rep) {
            if (ok[static_cast<size_t>(rep)])
                row.sup_distances.push_back(sup[static_cast<size_t>(rep)]);
            else
                ++row.reps_failed;
        }
        if (!row.sup_distances.empty()) {
            std::vector<double> sorted = row.sup_distances;
            std::sort(sorted.begin(), sorted.end());
            const size_t m = sorted.size();
            row.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CltRow> clt_diagnostics(const ExperimentSpec& spec, int k) {
    if (spec.replications < 500)
        throw DomainError("clt_diagnostics: need >= 500 replications");
    MomentReport report = run_moment_experiment(spec);
    size_t ki = 0;
    while (ki < spec.ks.size() && spec.ks[ki] != k) ++ki;
    if (ki == spec.ks.size()) throw DomainError("clt_diagnostics: k not in the spec");

    std::vector<CltRow> rows;
    for (size_t si = 0; si < spec.scales.size(); ++si) {
        const auto& sample = report.samples[si][ki];
        const MomentCell& cell = report.cell(si, ki);
        CltRow row;
        row.scale = spec.scales[si];
        row.k = k;
        row.reps = static_cast<long>(sample.size());
        const double sd = std::sqrt(cell.variance);
        std::vector<double> standardized;
        standardized.reserve(sample.size());
        for (double x : sample) standardized.push_back((x - cell.mean) / sd);
        row.ks_stat = ks_statistic(standardized, normal_cdf);
        row.ks_pvalue = ks_pvalue(standardized.size(), row.ks_stat);
        row.shape = shape_statistics(standardized);
        row.looks_normal = row.ks_pvalue > 0.01 && std::fabs(row.shape.skewness) <= 0.2 &&
                           std::fabs(row.shape.excess_kurtosis) <= 0.5;
        rows.push_back(row);
    }
    return rows;
}

std::vector<PatternRow> extreme_point_pattern_compare(const ExperimentSpec& spec,
                                                      int boxes_per_axis, double L,
                                                      double H) {
    spec.validate();
    if (boxes_per_axis < 1) throw DomainError("pattern_compare: need >= 1 box per axis");
    const int sdim = spec.d - 1;
    long long total_boxes = 1;
    for (int j = 0; j < sdim; ++j) total_boxes *= boxes_per_axis;
    const double cube_volume = std::pow(2.0 * L, sdim);

    auto box_of = [&](const Vec& v) -> long long {
        long long idx = 0;
        for (int j = 0; j < sdim; ++j) {
            if (std::fabs(v[j]) > L) return -1;
            int b = static_cast<int>((v[j] + L) / (2.0 * L) * boxes_per_axis);
            b = std::clamp(b, 0, boxes_per_axis - 1);
            idx = idx * boxes_per_axis + b;
        }
        return idx;
    };

    std::vector<PatternRow> rows;
    for (size_t si = 0; si < spec.scales.size(); ++si) {
        const double scale = spec.scales[si];
        const ScaleContext ctx = make_scale_context(spec.d, spec.alpha, scale);
        const ModelParams params = params_for(spec, scale);
        const double ball_radius = L * std::sqrt(static_cast<double>(sdim));

        const int R = spec.replications;
        std::vector<std::vector<long long>> model_counts(static_cast<size_t>(R)),
            limit_counts(static_cast<size_t>(R));
        parallel_for_index(R, spec.threads, [&](int rep) {
            std::vector<long long> mc(static_cast<size_t>(total_boxes), 0);
            std::vector<long long> lc(static_cast<size_t>(total_boxes), 0);
            RngStream rng = RngStream::derive(spec.master_seed,
                                              static_cast<uint64_t>(rep),
                                              scale_tag(si, 0x41));
            const PointCloud cloud = sample_cloud(params, rng);
            try {
                const HullComplex hull = convex_hull(cloud);
                for (int idx : hull.vertices()) {
                    RescaledPoint w;
                    try {
                        w = forward_transform(cloud.point(idx), ctx);
                    } catch (const SingularityError&) {
                        continue;
                    }
                    const long long b = box_of(w.v);
                    if (b >= 0 && w.h <= H) ++mc[static_cast<size_t>(b)];
                }
            } catch (const DegeneracyError&) {
            }
            RngStream lrng = RngStream::derive(spec.master_seed,
                                               static_cast<uint64_t>(rep),
                                               scale_tag(si, 0x42));
            const RescaledCloud limit =
                sample_limit_process(spec.d, spec.alpha, ball_radius, H, lrng);
            if (limit.size() > 0) {
                const FestoonSample fs = analyze_festoon(limit);
                for (int idx : fs.ext()) {
                    const long long b = box_of(limit.points[static_cast<size_t>(idx)].v);
                    if (b >= 0) ++lc[static_cast<size_t>(b)];
                }
            }
            model_counts[static_cast<size_t>(rep)] = std::move(mc);
            limit_counts[static_cast<size_t>(rep)] = std::move(lc);
        });

        PatternRow row;
        row.scale = scale;
        row.model_boxes.assign(static_cast<size_t>(total_boxes), 0.0);
        row.limit_boxes.assign(static_cast<size_t>(total_boxes), 0.0);
        double mtot = 0.0, ltot = 0.0;
        for (int rep = 0; rep < R; ++rep) {
            for (long long b = 0; b < total_boxes; ++b) {
                row.model_boxes[static_cast<size_t>(b)] +=
                    static_cast<double>(model_counts[static_cast<size_t>(rep)][static_cast<size_t>(b)]);
                row.limit_boxes[static_cast<size_t>(b)] +=
                    static_cast<double>(limit_counts[static_cast<size_t>(rep)][static_cast<size_t>(b)]);
            }
        }
        for (long long b = 0; b < total_boxes; ++b) {
            mtot += row.model_boxes[static_cast<size_t>(b)];
            ltot += row.limit_boxes[static_cast<size_t>(b)];
        }
        row.model_ext_intensity = mtot / (R * cube_volume);
        row.limit_ext_intensity = ltot / (R * cube_volume);
        double tv = 0.0;
        for (long long b = 0; b < total_boxes; ++b) {
            const double p = mtot > 0 ? row.model_boxes[static_cast<size_t>(b)] / mtot : 0.0;
            const double q = ltot > 0 ? row.limit_boxes[static_cast<size_t>(b)] / ltot : 0.0;
            tv += std::fabs(p - q);
        }
        row.tv_distance = 0.5 * tv;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string moment_report_json(const MomentReport& report) {
    nlohmann::json root;
    const auto& spec = report.spec;
    root["spec"] = {{"d", spec.d},
                    {"alpha", spec.alpha},
                    {"kind", to_string(spec.kind)},
                    {"scales", spec.scales},
                    {"ks", spec.ks},
                    {"replications", spec.replications},
                    {"master_seed", spec.master_seed},
                    {"window_height", spec.window_height}};
    nlohmann::json by_scale = nlohmann::json::object();
    for (size_t si = 0; si < spec.scales.size(); ++si) {
        nlohmann::json by_k = nlohmann::json::object();
        for (size_t ki = 0; ki < spec.ks.size(); ++ki) {
            const MomentCell& c = report.cell(si, ki);
            by_k[std::to_string(c.k)] = {
                {"reps_ok", c.reps_ok},
                {"reps_failed", c.reps_failed},
                {"mean", c.mean},
                {"variance", c.variance},
                {"se_mean", c.se_mean},
                {"se_variance", c.se_variance},
                {"rescale", c.rescale},
                {"rescaled_mean", c.rescaled_mean},
                {"rescaled_variance", c.rescaled_variance}};
        }
        by_scale[num17(spec.scales[si])] = std::move(by_k);
    }
    root["moments"] = std::move(by_scale);
    return root.dump(2) + "\n";
}

std::string moment_report_csv(const MomentReport& report) {
    std::string out =
        "scale,k,reps_ok,reps_failed,mean,variance,se_mean,se_variance,rescale,"
        "rescaled_mean,rescaled_variance\n";
    for (const MomentCell& c : report.cells) {
        out += num17(c.scale) + "," + std::to_string(c.k) + "," +
               std::to_string(c.reps_ok) + "," + std::to_string(c.reps_failed) + "," +
               num17(c.mean) + "," + num17(c.variance) + "," + num17(c.se_mean) + "," +
               num17(c.se_variance) + "," + num17(c.rescale) + "," +
               num17(c.rescaled_mean) + "," + num17(c.rescaled_variance) + "\n";
    }
    return out;
}

}  // namespace perthull
