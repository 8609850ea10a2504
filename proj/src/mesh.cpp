#include "morrey/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <unordered_map>

#include "morrey/errors.hpp"

namespace morrey {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Incremental Delaunay triangulation (walk locate + Lawson flips).
// Predicates use scaled epsilon guards; ties resolve to "no flip", which
// keeps the triangulation valid when inputs are cocircular.
// ---------------------------------------------------------------------------

struct DTri {
    int v[3];   // CCW
    int n[3];   // neighbor across edge (v[k], v[k+1]); -1 = hull
    bool alive{true};
};

class Delaunay {
  public:
    explicit Delaunay(const std::vector<Vec2>& points) : pts_(points) {
        // super-triangle far outside the data
        Vec2 lo = pts_[0], hi = pts_[0];
        for (const auto& p : pts_) {
            lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
        }
        const Vec2 c = (lo + hi) * 0.5;
        const double R = 8.0 * std::max({hi.x - lo.x, hi.y - lo.y, 1e-12}) + 1.0;
        const int s0 = add_point({c.x - 3.0 * R, c.y - R});
        const int s1 = add_point({c.x + 3.0 * R, c.y - R});
        const int s2 = add_point({c.x, c.y + 3.0 * R});
        super_ = {s0, s1, s2};
        tris_.push_back({{s0, s1, s2}, {-1, -1, -1}, true});
        for (std::size_t i = 0; i < pts_.size(); ++i) insert((int)i);
    }

    // triangles of the finished triangulation, super vertices excluded
    std::vector<std::array<int, 3>> interior_triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= (int)npts_ || t.v[1] >= (int)npts_ || t.v[2] >= (int)npts_)
                continue;
            out.push_back({t.v[0], t.v[1], t.v[2]});
        }
        return out;
    }

  private:
    const std::vector<Vec2>& pts_;
    std::vector<Vec2> extra_;  // super vertices
    std::size_t npts_{0};
    std::array<int, 3> super_{};
    std::vector<DTri> tris_;
    int last_{0};

    int add_point(Vec2 p) {
        if (npts_ == 0) npts_ = pts_.size();
        extra_.push_back(p);
        return (int)(npts_ + extra_.size() - 1);
    }
    Vec2 pt(int i) const {
        return i < (int)npts_ ? pts_[i] : extra_[i - npts_];
    }

    static double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
        return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    }
    double orient_eps(const Vec2& a, const Vec2& b, const Vec2& c) const {
        const double m = std::abs(b.x - a.x) + std::abs(b.y - a.y) +
                         std::abs(c.x - a.x) + std::abs(c.y - a.y);
        return 1e-14 * m * m;
    }

    // > 0 when d is strictly inside the circumcircle of CCW (a,b,c)
    static double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                           double* mag) {
        const double ax = a.x - d.x, ay = a.y - d.y;
        const double bx = b.x - d.x, by = b.y - d.y;
        const double cx = c.x - d.x, cy = c.y - d.y;
        const double a2 = ax * ax + ay * ay;
        const double b2 = bx * bx + by * by;
        const double c2 = cx * cx + cy * cy;
        const double t1 = a2 * (bx * cy - by * cx);
        const double t2 = b2 * (ax * cy - ay * cx);
        const double t3 = c2 * (ax * by - ay * bx);
        *mag = std::abs(t1) + std::abs(t2) + std::abs(t3);
        return t1 - t2 + t3;
    }

    int locate(const Vec2& p) const {
        int t = last_;
        if (t < 0 || t >= (int)tris_.size() || !tris_[t].alive) {
            t = -1;
            for (int i = (int)tris_.size() - 1; i >= 0; --i)
                if (tris_[i].alive) { t = i; break; }
        }
        for (int steps = 0; steps < (int)tris_.size() + 8; ++steps) {
            const DTri& tr = tris_[t];
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                const Vec2 a = pt(tr.v[e]), b = pt(tr.v[(e + 1) % 3]);
                if (orient(a, b, p) < -orient_eps(a, b, p)) {
                    if (tr.n[e] >= 0) { next = tr.n[e]; break; }
                }
            }
            if (next < 0) return t;
            t = next;
        }
        // walk failed (should not happen); exhaustive scan
        for (int i = 0; i < (int)tris_.size(); ++i) {
            if (!tris_[i].alive) continue;
            const DTri& tr = tris_[i];
            bool in = true;
            for (int e = 0; e < 3 && in; ++e) {
                const Vec2 a = pt(tr.v[e]), b = pt(tr.v[(e + 1) % 3]);
                if (orient(a, b, p) < -orient_eps(a, b, p)) in = false;
            }
            if (in) return i;
        }
        throw MeshError("delaunay: point location failed");
    }

    int neighbor_edge(int t, int n) const {
        for (int e = 0; e < 3; ++e)
            if (tris_[n].n[e] == t) return e;
        throw MeshError("delaunay: broken adjacency");
    }

    void set_neighbor(int t, int e, int n) {
        tris_[t].n[e] = n;
    }
    void relink(int old_t, int new_t, int nbr, int a, int b) {
        // neighbor nbr shared edge (a,b) with old_t; point it to new_t
        if (nbr < 0) return;
        for (int e = 0; e < 3; ++e) {
            if ((tris_[nbr].v[e] == b && tris_[nbr].v[(e + 1) % 3] == a)) {
                tris_[nbr].n[e] = new_t;
                return;
            }
        }
        (void)old_t;
        throw MeshError("delaunay: relink failed");
    }

    void insert(int ip) {
        const Vec2 p = pt(ip);
        const int t = locate(p);
        const DTri tr = tris_[t];

        // on-edge test
        int on_edge = -1;
        for (int e = 0; e < 3; ++e) {
            const Vec2 a = pt(tr.v[e]), b = pt(tr.v[(e + 1) % 3]);
            if (std::abs(orient(a, b, p)) <= orient_eps(a, b, p)) { on_edge = e; break; }
        }

        std::vector<std::pair<int, int>> check;  // (tri, edge) to legalize

        if (on_edge < 0) {
            // split t into three
            const int a = tr.v[0], b = tr.v[1], c = tr.v[2];
            const int t0 = t;
            const int t1 = (int)tris_.size();
            const int t2 = t1 + 1;
            tris_[t0] = {{a, b, ip}, {tr.n[0], t1, t2}, true};
            tris_.push_back({{b, c, ip}, {tr.n[1], t2, t0}, true});
            tris_.push_back({{c, a, ip}, {tr.n[2], t0, t1}, true});
            relink(t, t0, tr.n[0], a, b);
            relink(t, t1, tr.n[1], b, c);
            relink(t, t2, tr.n[2], c, a);
            check = {{t0, 0}, {t1, 0}, {t2, 0}};
            last_ = t0;
        } else {
            // split edge (a,b) shared by t and o
            const int e = on_edge;
            const int a = tr.v[e], b = tr.v[(e + 1) % 3], c = tr.v[(e + 2) % 3];
            const int o = tr.n[e];
            if (o < 0) {
                // border of super triangle: treat as interior split anyway
                const int t0 = t, t1 = (int)tris_.size();
                tris_[t0] = {{a, ip, c}, {-1, t1, tr.n[(e + 2) % 3]}, true};
                tris_.push_back({{ip, b, c}, {-1, tr.n[(e + 1) % 3], t0}, true});
                relink(t, t1, tr.n[(e + 1) % 3], b, c);
                relink(t, t0, tr.n[(e + 2) % 3], c, a);
                check = {{t0, 2}, {t1, 1}};
                last_ = t0;
            } else {
                const int eo = neighbor_edge(t, o);
                const DTri to = tris_[o];
                const int d = to.v[(eo + 2) % 3];
                // t = (a,b,c), o = (b,a,d); replace with 4 triangles around ip
                const int t0 = t;               // (a, ip, c)
                const int t1 = o;               // (ip, b, c)
                const int t2 = (int)tris_.size();  // (b, ip, d)
                const int t3 = t2 + 1;          // (ip, a, d)
                tris_[t0] = {{a, ip, c}, {t3, t1, tr.n[(e + 2) % 3]}, true};
                tris_[t1] = {{ip, b, c}, {t2, tr.n[(e + 1) % 3], t0}, true};
                tris_.push_back({{b, ip, d}, {t1, t3, to.n[(eo + 2) % 3]}, true});
                tris_.push_back({{ip, a, d}, {t0, to.n[(eo + 1) % 3], t2}, true});
                relink(t, t0, tr.n[(e + 2) % 3], c, a);
                relink(t, t1, tr.n[(e + 1) % 3], b, c);
                relink(o, t3, to.n[(eo + 1) % 3], to.v[(eo + 1) % 3], to.v[(eo + 2) % 3]);
                relink(o, t2, to.n[(eo + 2) % 3], to.v[(eo + 2) % 3], to.v[eo]);
                check = {{t0, 2}, {t1, 1}, {t2, 2}, {t3, 1}};
                last_ = t0;
            }
        }

        // Lawson legalization
        while (!check.empty()) {
            auto [tc, ec] = check.back();
            check.pop_back();
            if (!tris_[tc].alive) continue;
            const int oc = tris_[tc].n[ec];
            if (oc < 0) continue;
            const int eoc = neighbor_edge(tc, oc);
            const int va = tris_[tc].v[ec];
            const int vb = tris_[tc].v[(ec + 1) % 3];
            const int vc = tris_[tc].v[(ec + 2) % 3];
            const int vd = tris_[oc].v[(eoc + 2) % 3];
            double mag = 0.0;
            const double det = incircle(pt(va), pt(vb), pt(vc), pt(vd), &mag);
            if (det <= 1e-12 * mag) continue;
            // flip edge (va,vb) -> (vc,vd); quad (va, vd, vb, vc) must be convex
            if (orient(pt(va), pt(vd), pt(vc)) <= 0) continue;
            if (orient(pt(vd), pt(vb), pt(vc)) <= 0) continue;
            const int nA = tris_[tc].n[(ec + 1) % 3];   // (vb, vc)
            const int nB = tris_[tc].n[(ec + 2) % 3];   // (vc, va)
            const int nC = tris_[oc].n[(eoc + 1) % 3];  // (va, vd)
            const int nD = tris_[oc].n[(eoc + 2) % 3];  // (vd, vb)
            tris_[tc] = {{va, vd, vc}, {nC, oc, nB}, true};
            tris_[oc] = {{vd, vb, vc}, {nD, nA, tc}, true};
            relink(-1, tc, nC, va, vd);
            relink(-1, tc, nB, vc, va);
            relink(-1, oc, nD, vd, vb);
            relink(-1, oc, nA, vb, vc);
            check.push_back({tc, 0});
            check.push_back({tc, 2});
            check.push_back({oc, 0});
            check.push_back({oc, 1});
        }
    }
};

// ---------------------------------------------------------------------------
// Interior point generation
// ---------------------------------------------------------------------------

// local target spacing near the pole: h/32 floor growing linearly to h at
// radius 8h. The floor sets the innermost fan radius; the energy error of
// the cusp fan and its far-field imprint scale like sqrt(fan radius).
double grading_spacing(double r, double h) {
    return std::clamp(r / 8.0, h / 32.0, h);
}

// deterministic jitter in [-1,1]^2 from the lattice index
Vec2 hash_jitter(long i, long j) {
    std::uint64_t x = (std::uint64_t)(i * 2654435761LL) ^ ((std::uint64_t)(j * 40503LL) << 21);
    x ^= x >> 33; x *= 0xff51afd7ed558ccdULL; x ^= x >> 33; x *= 0xc4ceb9fe1a85ec53ULL; x ^= x >> 33;
    const double u = (double)(x & 0xffffffffULL) / 4294967295.0;
    const double v = (double)((x >> 32) & 0xffffffffULL) / 4294967295.0;
    return {2.0 * u - 1.0, 2.0 * v - 1.0};
}

// Pole-locked graded rings; phases alternate 0 / pi/n relative to the pole's
// polar angle so the cloud is equivariant under the dihedral symmetries. The
// outermost ring sits exactly at radius 8h so the lattice hole seam is tight.
std::vector<Vec2> pole_rings(const Vec2& pole, double h) {
    std::vector<Vec2> out;
    const double phi0 = std::atan2(pole.y, pole.x);
    std::vector<double> radii;
    double r = h / 32.0;
    while (r < 8.0 * h - 0.45 * h) {
        radii.push_back(r);
        r += grading_spacing(r, h);
    }
    radii.push_back(8.0 * h);
    for (int k = 0; k < (int)radii.size(); ++k) {
        const double rk = radii[k];
        const double s = grading_spacing(rk, h);
        const int n = std::max(6, (int)std::llround(2.0 * kPi * rk / s));
        const double phase = phi0 + ((k % 2) ? kPi / n : 0.0);
        for (int j = 0; j < n; ++j) {
            const double t = phase + 2.0 * kPi * j / n;
            out.push_back(pole + Vec2{rk * std::cos(t), rk * std::sin(t)});
        }
    }
    return out;
}

// One ring of points offset inward from the boundary polyline. Keeps the
// jittered-lattice band away from the boundary without starving it.
std::vector<Vec2> boundary_offset_layer(const std::vector<std::vector<Vec2>>& loops, double h) {
    std::vector<Vec2> out;
    const double off = 0.8 * h;
    for (const auto& loop : loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 prev = loop[(i + n - 1) % n], next = loop[(i + 1) % n];
            Vec2 tangent = next - prev;
            const double len = norm(tangent);
            if (len == 0) continue;
            const Vec2 q = loop[i] + perp(tangent) * (off / len);
            if (!loops_contain(loops, q)) continue;
            if (loops_distance(loops, q) < 0.55 * h) continue;
            bool crowded = false;
            for (const auto& kept : out) {
                if (dist(kept, q) < 0.5 * h) { crowded = true; break; }
            }
            if (!crowded) out.push_back(q);
        }
    }
    return out;
}

// Polar lattice for disk/annulus: ring counts are multiples of 8 and ring
// phases alternate 0 / pi/M, so the point set is invariant under rotations
// by pi/4 and reflections across the axes and diagonals.
std::vector<Vec2> polar_lattice(const Vec2& center, double rin, double rout, double h,
                                bool include_center) {
    std::vector<Vec2> out;
    const int J = std::max(2, (int)std::llround((rout - rin) / h));
    const double dr = (rout - rin) / J;
    if (include_center && rin == 0.0) out.push_back(center);
    for (int j = 1; j < J; ++j) {
        const double r = rin + j * dr;
        const int M = 8 * std::max(1, (int)std::llround(2.0 * kPi * r / (8.0 * dr)));
        const double phase = (j % 2) ? kPi / M : 0.0;
        for (int i = 0; i < M; ++i) {
            const double t = phase + 2.0 * kPi * i / M;
            out.push_back(center + Vec2{r * std::cos(t), r * std::sin(t)});
        }
    }
    return out;
}

// Reflection-symmetric hex lattice over the bounding box with a small
// deterministic jitter (breaks the cocircular degeneracies of the lattice).
std::vector<Vec2> hex_lattice(const Rect& bb, double h) {
    std::vector<Vec2> out;
    const double row = h * std::sqrt(3.0) / 2.0;
    const long jmin = (long)std::floor(bb.lo.y / row) - 1;
    const long jmax = (long)std::ceil(bb.hi.y / row) + 1;
    for (long j = jmin; j <= jmax; ++j) {
        const double y = j * row;
        const double off = (j & 1) ? 0.5 : 0.0;
        const long imin = (long)std::floor(bb.lo.x / h - off) - 1;
        const long imax = (long)std::ceil(bb.hi.x / h - off) + 1;
        for (long i = imin; i <= imax; ++i) {
            const Vec2 jit = hash_jitter(i, j) * (0.08 * h);
            out.push_back({(i + off) * h + jit.x, y + jit.y});
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mesh utilities
// ---------------------------------------------------------------------------

double Mesh::triangle_area(int t) const {
    const auto& tr = triangles[t];
    return 0.5 * orient2d(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double Mesh::area() const {
    double a = 0.0;
    for (int t = 0; t < (int)triangles.size(); ++t) a += triangle_area(t);
    return a;
}

double Mesh::max_edge() const {
    double m = 0.0;
    for (const auto& tr : triangles)
        for (int e = 0; e < 3; ++e)
            m = std::max(m, dist(vertices[tr[e]], vertices[tr[(e + 1) % 3]]));
    return m;
}

int Mesh::interior_count() const {
    int c = 0;
    for (auto b : boundary) c += b ? 0 : 1;
    return c;
}

// ---------------------------------------------------------------------------
// triangulate
// ---------------------------------------------------------------------------

Mesh triangulate(const DomainSpec& spec, double h, std::optional<Vec2> pole) {
    if (!(h > 0)) throw MeshError("triangulate: h must be positive");

    // neck resolution rules
    if (spec.kind == DomainKind::Bowtie && h > spec.epsilon / 3.0 * (1.0 + 1e-9))
        throw MeshResolutionError("bowtie neck unresolved: need h <= epsilon/3");
    if (spec.kind == DomainKind::Dumbbell && h > spec.delta / 3.0 * (1.0 + 1e-9))
        throw MeshResolutionError("dumbbell neck unresolved: need h <= delta/3");

    const auto loops = boundary_loops(spec, h);

    if (pole) {
        if (!contains(spec, *pole) || !loops_contain(loops, *pole))
            throw PoleTooCloseToBoundary("pole outside the domain");
        // distance measured to the sampled polyline, which sits inside curved
        // boundaries by the chord sagitta; allow for that when h is coarse
        if (loops_distance(loops, *pole) < 2.0 * h * 0.95)
            throw PoleTooCloseToBoundary("pole closer than 2h to the boundary");
    }

    // assemble the point cloud: boundary, pole, graded rings, lattice
    std::vector<Vec2> points;
    std::vector<std::uint8_t> is_boundary;
    for (const auto& loop : loops)
        for (const auto& p : loop) {
            points.push_back(p);
            is_boundary.push_back(1);
        }

    int pole_raw = -1;
    if (pole) {
        pole_raw = (int)points.size();
        points.push_back(*pole);
        is_boundary.push_back(0);
    }

    const double clear = 0.58;
    auto accept_interior = [&](const Vec2& q, double local_s) {
        if (!loops_contain(loops, q)) return false;
        return loops_distance(loops, q) >= clear * local_s;
    };

    double lattice_hole = 0.0;  // lattice points this close to the pole are dropped
    if (pole) {
        for (const auto& q : pole_rings(*pole, h)) {
            const double s = grading_spacing(dist(q, *pole), h);
            if (accept_interior(q, s)) {
                points.push_back(q);
                is_boundary.push_back(0);
            }
        }
        lattice_hole = 8.0 * h + 0.5 * h;
    }

    const bool polar = spec.kind == DomainKind::Disk || spec.kind == DomainKind::Annulus;
    std::vector<Vec2> lattice;
    if (spec.kind == DomainKind::Disk) {
        lattice = polar_lattice(spec.center, 0.0, spec.radius, h, true);
    } else if (spec.kind == DomainKind::Annulus) {
        lattice = polar_lattice({0.0, 0.0}, spec.r1, spec.r2, h, false);
    } else {
        // jittered lattices lose clearance-filtered points unpredictably near
        // the boundary; an explicit offset layer keeps that band covered
        for (const auto& q : boundary_offset_layer(loops, h)) {
            if (pole && dist(q, *pole) < lattice_hole) continue;
            points.push_back(q);
            is_boundary.push_back(0);
        }
        lattice = hex_lattice(bounding_box(spec), h);
    }
    const double lattice_clear = polar ? 0.58 * h : 1.25 * h;
    for (const auto& q : lattice) {
        if (pole && dist(q, *pole) < lattice_hole) continue;
        if (!loops_contain(loops, q)) continue;
        if (loops_distance(loops, q) < lattice_clear) continue;
        points.push_back(q);
        is_boundary.push_back(0);
    }

    // drop near-duplicates via a hash grid (generation avoids them by
    // construction; this guards the Delaunay kernel)
    {
        const double tol = 1e-9 * std::max(1.0, h);
        std::unordered_map<long long, std::vector<int>> grid;
        auto key = [&](long ix, long iy) { return ((long long)ix << 32) ^ (iy & 0xffffffffLL); };
        std::vector<Vec2> uniq;
        std::vector<std::uint8_t> uniq_b;
        int new_pole = -1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const long ix = (long)std::floor(points[i].x / (4.0 * tol));
            const long iy = (long)std::floor(points[i].y / (4.0 * tol));
            bool dup = false;
            for (long dx = -1; dx <= 1 && !dup; ++dx)
                for (long dy = -1; dy <= 1 && !dup; ++dy) {
                    auto it = grid.find(key(ix + dx, iy + dy));
                    if (it == grid.end()) continue;
                    for (int k : it->second)
                        if (dist(uniq[k], points[i]) < tol) { dup = true; break; }
                }
            if (dup) continue;
            if ((int)i == pole_raw) new_pole = (int)uniq.size();
            grid[key(ix, iy)].push_back((int)uniq.size());
            uniq.push_back(points[i]);
            uniq_b.push_back(is_boundary[i]);
        }
        points = std::move(uniq);
        is_boundary = std::move(uniq_b);
        if (pole && new_pole < 0) throw MeshError("triangulate: pole vertex lost");
        pole_raw = new_pole;
    }

    if (points.size() < 8) throw MeshResolutionError("too few points at this resolution");

    Delaunay dt(points);
    auto raw_tris = dt.interior_triangles();

    // keep triangles whose centroid lies in the polygonalized domain
    Mesh mesh;
    mesh.h = h;
    std::vector<int> vmap(points.size(), -1);
    for (const auto& tr : raw_tris) {
        const Vec2 c = (points[tr[0]] + points[tr[1]] + points[tr[2]]) * (1.0 / 3.0);
        if (!loops_contain(loops, c)) continue;
        std::array<int, 3> t2{};
        for (int k = 0; k < 3; ++k) {
            int& m = vmap[tr[k]];
            if (m < 0) {
                m = (int)mesh.vertices.size();
                mesh.vertices.push_back(points[tr[k]]);
                mesh.boundary.push_back(is_boundary[tr[k]]);
            }
            t2[k] = m;
        }
        // enforce CCW
        if (orient2d(mesh.vertices[t2[0]], mesh.vertices[t2[1]], mesh.vertices[t2[2]]) < 0)
            std::swap(t2[1], t2[2]);
        mesh.triangles.push_back(t2);
    }

    if (pole) {
        if (pole_raw < 0 || vmap[pole_raw] < 0)
            throw MeshResolutionError("pole vertex not contained in any kept triangle");
        mesh.pole_vertex = vmap[pole_raw];
        if (!(mesh.vertices[mesh.pole_vertex] == *pole))
            throw MeshError("pole vertex coordinates drifted");
    }

    // validation
    if (mesh.triangles.empty())
        throw MeshResolutionError("no triangles at this resolution");
    for (int t = 0; t < (int)mesh.triangles.size(); ++t)
        if (!(mesh.triangle_area(t) > 0))
            throw MeshError("degenerate triangle produced");
    if (mesh.interior_count() < 3)
        throw MeshResolutionError("fewer than 3 interior vertices");
    if (mesh.max_edge() > 2.0 * h + 1e-12)
        throw MeshResolutionError("edge longer than 2h: region under-resolved");

    // connectivity via union of triangle edges
    {
        std::vector<std::vector<int>> adj(mesh.vertices.size());
        for (const auto& tr : mesh.triangles)
            for (int e = 0; e < 3; ++e) {
                adj[tr[e]].push_back(tr[(e + 1) % 3]);
                adj[tr[(e + 1) % 3]].push_back(tr[e]);
            }
        std::vector<std::uint8_t> seen(mesh.vertices.size(), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        std::size_t cnt = 1;
        while (!q.empty()) {
            const int v = q.front(); q.pop();
            for (int w : adj[v])
                if (!seen[w]) { seen[w] = 1; ++cnt; q.push(w); }
        }
        if (cnt != mesh.vertices.size())
            throw MeshResolutionError("mesh disconnected: region under-resolved");
    }

    return mesh;
}

// ---------------------------------------------------------------------------
// MeshLocator
// ---------------------------------------------------------------------------

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(mesh) {
    Vec2 lo = mesh.vertices[0], hi = mesh.vertices[0];
    for (const auto& v : mesh.vertices) {
        lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
    }
    lo_ = lo;
    const int target = std::max(1, (int)std::sqrt((double)mesh.triangles.size()));
    cell_ = std::max({(hi.x - lo.x) / target, (hi.y - lo.y) / target, 1e-12});
    nx_ = std::max(1, (int)std::ceil((hi.x - lo.x) / cell_) + 1);
    ny_ = std::max(1, (int)std::ceil((hi.y - lo.y) / cell_) + 1);
    buckets_.assign((std::size_t)nx_ * ny_, {});
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        Vec2 tlo = mesh.vertices[tr[0]], thi = tlo;
        for (int k = 1; k < 3; ++k) {
            const Vec2 v = mesh.vertices[tr[k]];
            tlo.x = std::min(tlo.x, v.x); tlo.y = std::min(tlo.y, v.y);
            thi.x = std::max(thi.x, v.x); thi.y = std::max(thi.y, v.y);
        }
        const int i0 = std::clamp((int)((tlo.x - lo_.x) / cell_), 0, nx_ - 1);
        const int i1 = std::clamp((int)((thi.x - lo_.x) / cell_), 0, nx_ - 1);
        const int j0 = std::clamp((int)((tlo.y - lo_.y) / cell_), 0, ny_ - 1);
        const int j1 = std::clamp((int)((thi.y - lo_.y) / cell_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                buckets_[(std::size_t)j * nx_ + i].push_back(t);
    }
}

int MeshLocator::locate(const Vec2& p) const {
    const int i = std::clamp((int)((p.x - lo_.x) / cell_), 0, nx_ - 1);
    const int j = std::clamp((int)((p.y - lo_.y) / cell_), 0, ny_ - 1);
    for (int t : buckets_[(std::size_t)j * nx_ + i]) {
        const auto& tr = mesh_.triangles[t];
        const Vec2 a = mesh_.vertices[tr[0]], b = mesh_.vertices[tr[1]], c = mesh_.vertices[tr[2]];
        const double A = orient2d(a, b, c);
        const double w0 = orient2d(p, b, c), w1 = orient2d(a, p, c), w2 = orient2d(a, b, p);
        const double eps = -1e-12 * A;
        if (w0 >= eps && w1 >= eps && w2 >= eps) return t;
    }
    return -1;
}

double MeshLocator::interpolate(const std::vector<double>& values, const Vec2& p) const {
    int t = locate(p);
    if (t < 0) {
        // nearest triangle by min barycentric violation (boundary mismatch)
        double best = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < (int)mesh_.triangles.size(); ++c) {
            const auto& tr = mesh_.triangles[c];
            const Vec2 a = mesh_.vertices[tr[0]], b = mesh_.vertices[tr[1]], d = mesh_.vertices[tr[2]];
            const double A = orient2d(a, b, d);
            const double w = std::min({orient2d(p, b, d), orient2d(a, p, d), orient2d(a, b, p)}) / A;
            if (w > best) { best = w; t = c; }
        }
        if (t < 0) throw MeshError("interpolate: empty mesh");
    }
    const auto& tr = mesh_.triangles[t];
    const Vec2 a = mesh_.vertices[tr[0]], b = mesh_.vertices[tr[1]], c = mesh_.vertices[tr[2]];
    const double A = orient2d(a, b, c);
    double w0 = orient2d(p, b, c) / A;
    double w1 = orient2d(a, p, c) / A;
    double w2 = orient2d(a, b, p) / A;
    // clamp tiny negatives from outside evaluation
    w0 = std::max(w0, 0.0); w1 = std::max(w1, 0.0); w2 = std::max(w2, 0.0);
    const double s = w0 + w1 + w2;
    return (values[tr[0]] * w0 + values[tr[1]] * w1 + values[tr[2]] * w2) / s;
}

}  // namespace morrey
