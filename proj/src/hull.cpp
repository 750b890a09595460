#include "perthull/hull.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace perthull {

namespace {

// Determinant by Gaussian elimination with partial pivoting; n <= 7.
double det_small(double m[kMaxDim][kMaxDim], int n) {
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            for (int j = c; j < n; ++j) std::swap(m[piv][j], m[c][j]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int j = c; j < n; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

struct Plane {
    Vec unit_normal;
    double offset = 0.0;
    double quality = 0.0;  // |cofactor normal| / product of edge lengths
};

// Hyperplane through d points of the cloud.  quality is the normalized
// determinant magnitude of the spanning edges; values <= kPredicateBand mean
// the simplex is too flat to trust.
Plane plane_through(const PointCloud& cloud, const int32_t* ids, int d) {
    double edges[kMaxDim][kMaxDim];
    const auto p0 = cloud.row(ids[0]);
    double edge_len_prod = 1.0;
    for (int i = 0; i + 1 < d; ++i) {
        const auto pi = cloud.row(ids[i + 1]);
        double n2 = 0.0;
        for (int j = 0; j < d; ++j) {
            edges[i][j] = pi[j] - p0[j];
            n2 += edges[i][j] * edges[i][j];
        }
        edge_len_prod *= std::sqrt(n2);
    }
    Vec normal(d);
    double minor[kMaxDim][kMaxDim];
    double sign = 1.0;
    for (int drop = 0; drop < d; ++drop) {
        for (int r = 0; r + 1 < d; ++r) {
            int cc = 0;
            for (int c = 0; c < d; ++c) {
                if (c == drop) continue;
                minor[r][cc++] = edges[r][c];
            }
        }
        normal[drop] = sign * det_small(minor, d - 1);
        sign = -sign;
    }
    const double nlen = normal.norm();
    Plane pl;
    pl.quality = edge_len_prod > 0.0 ? nlen / edge_len_prod : 0.0;
    if (pl.quality <= kPredicateBand)
        throw DegeneracyError("convex_hull: facet simplex inside the predicate band");
    normal *= 1.0 / nlen;
    pl.unit_normal = normal;
    pl.offset = 0.0;
    for (int j = 0; j < d; ++j) pl.offset += normal[j] * p0[j];
    return pl;
}

}  // namespace

class HullBuilder {
public:
    explicit HullBuilder(const PointCloud& cloud) : cloud_(cloud), d_(cloud.dim()) {
        if (d_ < 2 || d_ > kMaxDim) throw DomainError("convex_hull: dimension out of range");
        if (cloud_.size() < d_ + 1)
            throw DegeneracyError("convex_hull: fewer than d+1 points");
    }

    HullComplex build() {
        pick_initial_simplex();
        build_simplex_facets();
        assign_initial_conflicts();
        const int n = cloud_.size();
        for (int i = 0; i < n; ++i) {
            if (in_simplex_[i] || conflict_of_[i] < 0) continue;
            insert_point(i);
        }
        return finalize();
    }

private:
    struct BFacet {
        std::array<int32_t, kMaxDim> v{};   // sorted vertex ids
        std::array<int32_t, kMaxDim> nb{};  // nb[i]: neighbor across ridge omitting v[i]
        Plane plane;
        std::vector<int32_t> outside;
        uint32_t epoch = 0;
        uint8_t state = 0;  // with current epoch: 1 visible, 2 hidden
        bool alive = false;
    };

    // Signed normalized-determinant test of point p against facet f.
    double side(const BFacet& f, int p) const {
        const auto pt = cloud_.row(p);
        const auto a = cloud_.row(f.v[0]);
        double dot_no = 0.0, dist2 = 0.0;
        for (int j = 0; j < d_; ++j) {
            dot_no += f.plane.unit_normal[j] * pt[j];
            const double dj = pt[j] - a[j];
            dist2 += dj * dj;
        }
        const double dist = std::sqrt(dist2);
        return (dot_no - f.plane.offset) * f.plane.quality / dist;  // NaN if coincident
    }

    // Points inside the band (on or numerically indistinguishable from the
    // facet hyperplane) classify as not visible, so they end up non-extreme.
    // Structural predicates (initial simplex, facet creation) still refuse
    // band-level inputs outright.
    bool visible_from(const BFacet& f, int p) const { return side(f, p) > kPredicateBand; }

    void pick_initial_simplex() {
        const int n = cloud_.size();
        simplex_.clear();
        simplex_.push_back(0);
        // Farthest point from p0.
        double best = -1.0;
        int besti = -1;
        for (int i = 1; i < n; ++i) {
            const double dd = (cloud_.point(i) - cloud_.point(0)).norm2();
            if (dd > best) {
                best = dd;
                besti = i;
            }
        }
        spread_ = std::sqrt(best);
        if (!(spread_ > 0.0)) throw DegeneracyError("convex_hull: all points coincide");
        simplex_.push_back(besti);

        // Greedy orthogonal-residual maximization for the remaining d-1 picks.
        std::vector<Vec> basis;  // orthonormal
        basis.push_back((cloud_.point(besti) - cloud_.point(0)) * (1.0 / spread_));
        while (static_cast<int>(simplex_.size()) < d_ + 1) {
            double best_res = -1.0;
            int best_idx = -1;
            Vec best_vec;
            for (int i = 0; i < n; ++i) {
                if (std::find(simplex_.begin(), simplex_.end(), i) != simplex_.end()) continue;
                Vec r = cloud_.point(i) - cloud_.point(0);
                for (const Vec& b : basis) r -= dot(r, b) * b;
                const double rn = r.norm();
                if (rn > best_res) {
                    best_res = rn;
                    best_idx = i;
                    best_vec = r;
                }
            }
            if (best_idx < 0 || best_res <= kPredicateBand * spread_)
                throw DegeneracyError("convex_hull: input is not full-dimensional");
            basis.push_back(best_vec * (1.0 / best_res));
            simplex_.push_back(best_idx);
        }

        interior_ = Vec(d_);
        for (int id : simplex_) interior_ += cloud_.point(id);
        interior_ *= 1.0 / (d_ + 1);

        in_simplex_.assign(n, false);
        for (int id : simplex_) in_simplex_[id] = true;
    }

    int alloc_facet() {
        if (!free_.empty()) {
            const int id = free_.back();
            free_.pop_back();
            facets_[id] = BFacet{};
            return id;
        }
        facets_.emplace_back();
        return static_cast<int>(facets_.size()) - 1;
    }

    int make_facet(std::array<int32_t, kMaxDim> verts) {
        std::sort(verts.begin(), verts.begin() + d_);
        const int id = alloc_facet();
        BFacet& f = facets_[id];
        f.v = verts;
        f.plane = plane_through(cloud_, verts.data(), d_);
        // Orient outward: the interior point must be strictly beneath.
        double s = -f.plane.offset;
        for (int j = 0; j < d_; ++j) s += f.plane.unit_normal[j] * interior_[j];
        if (s > 0.0) {
            f.plane.unit_normal *= -1.0;
            f.plane.offset = -f.plane.offset;
            s = -s;
        }
        if (!(s < 0.0))
            throw DegeneracyError("convex_hull: interior point lies on a facet plane");
        f.alive = true;
        return id;
    }

    void build_simplex_facets() {
        // Facet i omits simplex_[i]; its neighbor across the ridge omitting
        // vertex w is the facet omitting w.
        std::vector<int> ids(d_ + 1);
        for (int i = 0; i <= d_; ++i) {
            std::array<int32_t, kMaxDim> verts{};
            int c = 0;
            for (int j = 0; j <= d_; ++j)
                if (j != i) verts[c++] = simplex_[j];
            ids[i] = make_facet(verts);
        }
        for (int i = 0; i <= d_; ++i) {
            BFacet& f = facets_[ids[i]];
            for (int s = 0; s < d_; ++s) {
                const int32_t w = f.v[s];
                int j = 0;
                while (simplex_[j] != w) ++j;
                f.nb[s] = ids[j];
            }
        }
    }

    void assign_initial_conflicts() {
        const int n = cloud_.size();
        conflict_of_.assign(n, -1);
        for (int i = 0; i < n; ++i) {
            if (in_simplex_[i]) continue;
            for (size_t fid = 0; fid < facets_.size(); ++fid) {
                if (!facets_[fid].alive) continue;
                if (visible_from(facets_[fid], i)) {
                    conflict_of_[i] = static_cast<int>(fid);
                    facets_[fid].outside.push_back(i);
                    break;
                }
            }
        }
    }

    struct HorizonRidge {
        std::array<int32_t, kMaxDim> ridge{};  // d-1 vertices
        int outer;                             // surviving facet across the ridge
        int inner;                             // dying facet that contributed it
    };

    void insert_point(int p) {
        ++epoch_;
        const int start = conflict_of_[p];
        std::vector<int> visible{start};
        facets_[start].epoch = epoch_;
        facets_[start].state = 1;
        std::vector<int> stack{start};
        std::vector<HorizonRidge> horizon;
        while (!stack.empty()) {
            const int fid = stack.back();
            stack.pop_back();
            for (int s = 0; s < d_; ++s) {
                const int g = facets_[fid].nb[s];
                BFacet& gf = facets_[g];
                if (gf.epoch != epoch_) {
                    gf.epoch = epoch_;
                    if (visible_from(gf, p)) {
                        gf.state = 1;
                        visible.push_back(g);
                        stack.push_back(g);
                    } else {
                        gf.state = 2;
                    }
                }
                if (gf.state == 2) {
                    HorizonRidge hr;
                    int c = 0;
                    for (int t = 0; t < d_; ++t)
                        if (t != s) hr.ridge[c++] = facets_[fid].v[t];
                    hr.outer = g;
                    hr.inner = fid;
                    horizon.push_back(hr);
                }
            }
        }

        // New cone of facets apexed at p, one per horizon ridge.
        struct RidgeKey {
            std::array<int32_t, kMaxDim> key{};
            int facet;
            int slot;
        };
        std::vector<RidgeKey> open_ridges;
        std::vector<int> created;
        created.reserve(horizon.size());
        for (const HorizonRidge& hr : horizon) {
            std::array<int32_t, kMaxDim> verts{};
            for (int t = 0; t + 1 < d_; ++t) verts[t] = hr.ridge[t];
            verts[d_ - 1] = p;
            const int nid = make_facet(verts);
            created.push_back(nid);
            BFacet& nf = facets_[nid];
            // Slot holding p faces the old outer facet.
            for (int s = 0; s < d_; ++s) {
                if (nf.v[s] == p) {
                    nf.nb[s] = hr.outer;
                    BFacet& of = facets_[hr.outer];
                    for (int t = 0; t < d_; ++t)
                        if (of.nb[t] == hr.inner) of.nb[t] = nid;
                } else {
                    // Ridge shared with a sibling new facet.
                    std::array<int32_t, kMaxDim> key{};
                    int c = 0;
                    for (int t = 0; t < d_; ++t)
                        if (t != s) key[c++] = nf.v[t];
                    bool wired = false;
                    for (auto& rk : open_ridges) {
                        if (rk.key == key) {
                            nf.nb[s] = rk.facet;
                            facets_[rk.facet].nb[rk.slot] = nid;
                            rk = open_ridges.back();
                            open_ridges.pop_back();
                            wired = true;
                            break;
                        }
                    }
                    if (!wired) open_ridges.push_back({key, nid, s});
                }
            }
        }
        if (!open_ridges.empty())
            throw DegeneracyError("convex_hull: inconsistent horizon");

        // Move the dead facets' conflict points onto the new cone.
        conflict_of_[p] = -1;
        for (const int fid : visible) {
            for (const int32_t q : facets_[fid].outside) {
                if (q == p || conflict_of_[q] != fid) continue;
                conflict_of_[q] = -1;
                for (const int nid : created) {
                    if (visible_from(facets_[nid], q)) {
                        conflict_of_[q] = nid;
                        facets_[nid].outside.push_back(q);
                        break;
                    }
                }
            }
        }
        for (const int fid : visible) {
            facets_[fid].alive = false;
            facets_[fid].outside = {};
            free_.push_back(fid);
        }
    }

    HullComplex finalize() {
        HullComplex hull;
        hull.dim_ = d_;
        std::vector<int> vertex_ids;
        for (const BFacet& f : facets_) {
            if (!f.alive) continue;
            for (int s = 0; s < d_; ++s) {
                hull.facet_vertices_.push_back(f.v[s]);
                vertex_ids.push_back(f.v[s]);
            }
            hull.facet_planes_.push_back({f.plane.unit_normal, f.plane.offset});
        }
        std::sort(vertex_ids.begin(), vertex_ids.end());
        vertex_ids.erase(std::unique(vertex_ids.begin(), vertex_ids.end()), vertex_ids.end());
        hull.vertices_ = std::move(vertex_ids);

        hull.counts_.dim = d_;
        hull.counts_.f[0] = static_cast<long long>(hull.vertices_.size());
        hull.counts_.f[static_cast<size_t>(d_ - 1)] =
            static_cast<long long>(hull.facet_planes_.size());
        hull.incidence_.assign(hull.vertices_.size(), {});

        auto compact = [&hull](int32_t id) {
            return static_cast<size_t>(
                std::lower_bound(hull.vertices_.begin(), hull.vertices_.end(), id) -
                hull.vertices_.begin());
        };

        const size_t nfac = hull.facet_planes_.size();
        for (size_t fi = 0; fi < nfac; ++fi) {
            const int32_t* fv = hull.facet_vertices_.data() + fi * d_;
            for (int s = 0; s < d_; ++s) {
                hull.incidence_[compact(fv[s])][static_cast<size_t>(d_ - 1)]++;
                hull.incidence_[compact(fv[s])][0] = 1;
            }
        }

        // Intermediate face ranks by downward closure of the (sorted) facet
        // tuples, deduplicated across facets.
        struct TupleHash {
            size_t operator()(const std::array<int32_t, kMaxDim>& a) const {
                uint64_t h = 1469598103934665603ull;
                for (int32_t x : a) {
                    h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
                    h *= 1099511628211ull;
                }
                return static_cast<size_t>(h);
            }
        };
        for (int k = 1; k <= d_ - 2; ++k) {
            std::unordered_set<std::array<int32_t, kMaxDim>, TupleHash> seen;
            seen.reserve(nfac * 4);
            const int m = k + 1;
            for (size_t fi = 0; fi < nfac; ++fi) {
                const int32_t* fv = hull.facet_vertices_.data() + fi * d_;
                for (uint32_t mask = 0; mask < (1u << d_); ++mask) {
                    if (std::popcount(mask) != m) continue;
                    std::array<int32_t, kMaxDim> face;
                    face.fill(-1);
                    int c = 0;
                    for (int s = 0; s < d_; ++s)
                        if (mask & (1u << s)) face[c++] = fv[s];
                    if (seen.insert(face).second) {
                        for (int t = 0; t < m; ++t)
                            hull.incidence_[compact(face[t])][static_cast<size_t>(k)]++;
                    }
                }
            }
            hull.counts_.f[static_cast<size_t>(k)] = static_cast<long long>(seen.size());
        }
        return hull;
    }

    const PointCloud& cloud_;
    const int d_;
    std::vector<int> simplex_;
    std::vector<bool> in_simplex_;
    Vec interior_;
    double spread_ = 0.0;
    std::vector<BFacet> facets_;
    std::vector<int> free_;
    std::vector<int> conflict_of_;
    uint32_t epoch_ = 0;
};


bool HullComplex::is_vertex(int cloud_index) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), cloud_index);
}

long long HullComplex::incident_faces(int cloud_index, int k) const {
    if (k < 0 || k >= dim_) throw DomainError("incident_faces: k out of range");
    const auto it = std::lower_bound(vertices_.begin(), vertices_.end(), cloud_index);
    if (it == vertices_.end() || *it != cloud_index) return 0;
    return incidence_[static_cast<size_t>(it - vertices_.begin())][static_cast<size_t>(k)];
}

double HullComplex::xi_score(int cloud_index, int k) const {
    return static_cast<double>(incident_faces(cloud_index, k)) / (k + 1);
}

HullComplex convex_hull(const PointCloud& cloud) { return HullBuilder(cloud).build(); }

bool is_extreme(int index, const PointCloud& cloud) {
    return convex_hull(cloud).is_vertex(index);
}

double xi_score(int index, const PointCloud& cloud, int k) {
    return convex_hull(cloud).xi_score(index, k);
}

double hull_support_along(const HullComplex& hull, const Vec& dir) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& fp : hull.facet_planes()) {
        if (fp.offset <= 0.0)
            throw std::logic_error("hull_support_along: origin is not interior");
        const double den = dot(fp.unit_normal, dir);
        if (den > 0.0) t = std::min(t, fp.offset / den);
    }
    if (!std::isfinite(t)) throw std::logic_error("hull_support_along: ray misses the hull");
    return t;
}

bool LowerHull::is_vertex(int cloud_index) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), cloud_index);
}

long long LowerHull::incident_faces(int cloud_index, int k) const {
    if (k < 0 || k >= dim_) throw DomainError("incident_faces: k out of range");
    const auto it = std::lower_bound(vertices_.begin(), vertices_.end(), cloud_index);
    if (it == vertices_.end() || *it != cloud_index) return 0;
    return incidence_[static_cast<size_t>(it - vertices_.begin())][static_cast<size_t>(k)];
}

double LowerHull::envelope(const Vec& v) const {
    if (!contains_spatial(v))
        throw OutOfWindowError("LowerHull::envelope: outside the spatial hull");
    double best = -std::numeric_limits<double>::infinity();
    for (const Affine& a : lower_) best = std::max(best, a.value(v));
    return best;
}

bool LowerHull::contains_spatial(const Vec& v) const {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const Affine& a : lower_) lo = std::max(lo, a.value(v));
    for (const Affine& a : upper_) hi = std::min(hi, a.value(v));
    return lo <= hi + 1e-9 * (1.0 + std::fabs(lo) + std::fabs(hi));
}

LowerHull lower_hull_envelope(const PointCloud& lifted) {
    const HullComplex hull = convex_hull(lifted);
    const int d = lifted.dim();
    LowerHull lh;
    lh.dim_ = d;

    std::vector<size_t> lower_ids;
    for (size_t fi = 0; fi < hull.facet_planes().size(); ++fi) {
        const auto& fp = hull.facet_planes()[fi];
        const double nz = fp.unit_normal[d - 1];
        if (nz < -kPredicateBand) {
            lower_ids.push_back(fi);
            LowerHull::Affine a;
            a.gradient = Vec(d - 1);
            for (int j = 0; j + 1 < d; ++j) a.gradient[j] = -fp.unit_normal[j] / nz;
            a.offset = fp.offset / nz;
            lh.lower_.push_back(a);
        } else if (nz > kPredicateBand) {
            LowerHull::Affine a;
            a.gradient = Vec(d - 1);
            for (int j = 0; j + 1 < d; ++j) a.gradient[j] = -fp.unit_normal[j] / nz;
            a.offset = fp.offset / nz;
            lh.upper_.push_back(a);
        }
        // Near-vertical facets contribute to neither envelope; absent for
        // general-position lifts.
    }
    if (lh.lower_.empty())
        throw DegeneracyError("lower_hull_envelope: no lower facets");

    std::vector<int> verts;
    for (size_t fi : lower_ids) {
        auto fv = hull.facet(static_cast<int>(fi));
        lh.facet_tuples_.emplace_back(fv.begin(), fv.end());
        for (int32_t v : fv) verts.push_back(v);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    lh.vertices_ = std::move(verts);

    lh.counts_[0] = static_cast<long long>(lh.vertices_.size());
    lh.counts_[static_cast<size_t>(d - 1)] = static_cast<long long>(lh.facet_tuples_.size());
    lh.incidence_.assign(lh.vertices_.size(), {});

    auto compact = [&lh](int32_t id) {
        return static_cast<size_t>(
            std::lower_bound(lh.vertices_.begin(), lh.vertices_.end(), id) -
            lh.vertices_.begin());
    };
    for (const auto& fv : lh.facet_tuples_) {
        for (int32_t v : fv) {
            lh.incidence_[compact(v)][static_cast<size_t>(d - 1)]++;
            lh.incidence_[compact(v)][0] = 1;
        }
    }
    struct TupleHash {
        size_t operator()(const std::array<int32_t, kMaxDim>& a) const {
            uint64_t h = 1469598103934665603ull;
            for (int32_t x : a) {
                h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
                h *= 1099511628211ull;
            }
            return static_cast<size_t>(h);
        }
    };
    for (int k = 1; k <= d - 2; ++k) {
        std::unordered_set<std::array<int32_t, kMaxDim>, TupleHash> seen;
        const int m = k + 1;
        for (const auto& fv : lh.facet_tuples_) {
            for (uint32_t mask = 0; mask < (1u << d); ++mask) {
                if (std::popcount(mask) != m) continue;
                std::array<int32_t, kMaxDim> face;
                face.fill(-1);
                int c = 0;
                for (int s = 0; s < d; ++s)
                    if (mask & (1u << s)) face[c++] = fv[static_cast<size_t>(s)];
                if (seen.insert(face).second) {
                    for (int t = 0; t < m; ++t)
                        lh.incidence_[compact(face[t])][static_cast<size_t>(k)]++;
                }
            }
        }
        lh.counts_[static_cast<size_t>(k)] = static_cast<long long>(seen.size());
    }
    return lh;
}

}  // namespace perthull
