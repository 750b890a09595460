// General-dimension convex hulls (2 <= d <= 8): randomized incremental
// construction with conflict lists, face lattice enumeration, k-face counts,
// per-point scores and lower-hull envelopes.
//
// Predicates are floating point with a relative band of 1e-10 on the
// normalized determinant; inputs inside the band raise DegeneracyError rather
// than being classified either way.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "perthull/cloud.hpp"
#include "perthull/vec.hpp"

namespace perthull {

// Width of the refuse-to-guess band on normalized orientation determinants.
inline constexpr double kPredicateBand = 1e-10;

struct FaceCounts {
    int dim = 0;
    std::array<long long, kMaxDim> f{};
    long long operator[](int k) const { return f[static_cast<size_t>(k)]; }
};

class HullComplex {
public:
    int dim() const { return dim_; }
    int facet_count() const { return static_cast<int>(facet_planes_.size()); }

    // Hull vertices as sorted cloud indices.
    const std::vector<int>& vertices() const { return vertices_; }
    bool is_vertex(int cloud_index) const;

    // f_0 .. f_{d-1}.
    FaceCounts face_counts() const { return counts_; }

    // Number of k-faces containing the given cloud index (0 if not a vertex).
    long long incident_faces(int cloud_index, int k) const;

    // Score (k+1)^{-1} * incident_faces.
    double xi_score(int cloud_index, int k) const;

    // Vertex tuple (sorted cloud indices) of facet i.
    std::span<const int32_t> facet(int i) const {
        return {facet_vertices_.data() + static_cast<size_t>(i) * dim_,
                static_cast<size_t>(dim_)};
    }

    struct FacetPlane {
        Vec unit_normal;  // outward
        double offset;    // dot(n, x) <= offset inside the hull
    };
    const std::vector<FacetPlane>& facet_planes() const { return facet_planes_; }

    bool simplicial() const { return true; }

private:
    friend class HullBuilder;
    int dim_ = 0;
    std::vector<int> vertices_;                      // sorted
    std::vector<int32_t> facet_vertices_;            // facets x dim, each tuple sorted
    std::vector<FacetPlane> facet_planes_;
    FaceCounts counts_;
    std::vector<std::array<int64_t, kMaxDim>> incidence_;  // per compact vertex, per k
};

// Full face lattice of conv(cloud).  Throws DegeneracyError on inputs that are
// not full-dimensional or that sit inside the predicate band.
HullComplex convex_hull(const PointCloud& cloud);

// True iff the point is a vertex of conv(cloud).
bool is_extreme(int index, const PointCloud& cloud);

// (k+1)^{-1} x number of k-faces of conv(cloud) containing the point.
double xi_score(int index, const PointCloud& cloud, int k);

// Largest t >= 0 with t * dir inside the hull; requires the origin strictly
// inside (all facet offsets positive).
double hull_support_along(const HullComplex& hull, const Vec& dir);

// Lower convex hull of lifted points (v, z) in R^{d-1} x R, with the convex
// piecewise-linear envelope it supports.
class LowerHull {
public:
    struct Affine {
        Vec gradient;  // in R^{d-1}
        double offset;
        double value(const Vec& v) const { return dot(gradient, v) + offset; }
    };

    int dim() const { return dim_; }
    const std::vector<int>& vertices() const { return vertices_; }
    bool is_vertex(int cloud_index) const;
    long long face_count(int k) const { return counts_[static_cast<size_t>(k)]; }
    long long incident_faces(int cloud_index, int k) const;
    const std::vector<std::vector<int32_t>>& facets() const { return facet_tuples_; }

    // max over lower facets of their supporting affine functions; defined on
    // the convex hull of the spatial projections, OutOfWindowError outside.
    double envelope(const Vec& v) const;
    bool contains_spatial(const Vec& v) const;

private:
    friend LowerHull lower_hull_envelope(const PointCloud&);
    int dim_ = 0;
    std::vector<int> vertices_;
    std::vector<std::vector<int32_t>> facet_tuples_;
    std::vector<Affine> lower_;
    std::vector<Affine> upper_;
    std::array<long long, kMaxDim> counts_{};
    std::vector<std::array<int64_t, kMaxDim>> incidence_;
    std::vector<int> compact_;  // cloud index -> compact vertex id or -1
};

LowerHull lower_hull_envelope(const PointCloud& lifted);

}  // namespace perthull
