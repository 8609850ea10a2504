#include "morrey/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "morrey/errors.hpp"

namespace morrey {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a;
}

// Deterministic symmetry validation sample: check contains(x) == contains(g x)
// on a structured grid over the bounding box. Golden-ratio offsets keep the
// samples off rational boundary lines where the in/out test is fp-arbitrary.
void validate_symmetries(const DomainSpec& spec) {
    const Rect bb = bounding_box(spec);
    const auto ops = sample_symmetry_ops(spec);
    if (ops.empty()) return;
    const int n = 48;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Vec2 p{bb.lo.x + (bb.hi.x - bb.lo.x) * (i + 0.3819660112501051) / n,
                   bb.lo.y + (bb.hi.y - bb.lo.y) * (j + 0.6180339887498949) / n};
            const bool in = contains(spec, p);
            for (const auto& op : ops) {
                if (contains(spec, op.apply(p)) != in)
                    throw DomainError("declared symmetry " + op.name() +
                                      " does not hold for " + spec.kind_name());
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

DomainSpec DomainSpec::disk(Vec2 center, double radius) {
    if (!(radius > 0)) throw DomainError("disk: radius must be positive");
    DomainSpec s;
    s.kind = DomainKind::Disk;
    s.center = center;
    s.radius = radius;
    s.convex = true;
    if (center.x == 0.0) s.symmetries.push_back(Symmetry::ReflectX1);
    if (center.y == 0.0) s.symmetries.push_back(Symmetry::ReflectX2);
    if (center.x == 0.0 && center.y == 0.0) s.symmetries.push_back(Symmetry::Rotation);
    return s;
}

DomainSpec DomainSpec::annulus(double r1, double r2) {
    if (!(0 < r1 && r1 < r2)) throw DomainError("annulus: need 0 < r1 < r2");
    DomainSpec s;
    s.kind = DomainKind::Annulus;
    s.r1 = r1;
    s.r2 = r2;
    s.convex = false;
    s.symmetries = {Symmetry::ReflectX1, Symmetry::ReflectX2, Symmetry::Rotation};
    return s;
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) throw DomainError("polygon: need at least 3 vertices");
    DomainSpec s;
    s.kind = DomainKind::Polygon;
    s.vertices = std::move(vertices);
    if (!polygon_is_ccw(s.vertices)) throw DomainError("polygon: vertices must be CCW");
    if (!polygon_is_simple(s.vertices)) throw DomainError("polygon: self-intersecting");
    s.convex = polygon_is_convex_ccw(s.vertices);
    // symmetry declarations are detected numerically for polygons
    DomainSpec probe = s;
    probe.symmetries = {Symmetry::ReflectX1};
    try { validate_symmetries(probe); s.symmetries.push_back(Symmetry::ReflectX1); } catch (const DomainError&) {}
    probe.symmetries = {Symmetry::ReflectX2};
    try { validate_symmetries(probe); s.symmetries.push_back(Symmetry::ReflectX2); } catch (const DomainError&) {}
    return s;
}

DomainSpec DomainSpec::bowtie(double epsilon) {
    if (!(epsilon > 0)) throw DomainError("bowtie: epsilon must be positive");
    DomainSpec s;
    s.kind = DomainKind::Bowtie;
    s.epsilon = epsilon;
    s.convex = false;
    s.symmetries = {Symmetry::ReflectX1, Symmetry::ReflectX2};
    return s;
}

DomainSpec DomainSpec::dumbbell(double delta) {
    if (!(delta > 0 && delta < 1)) throw DomainError("dumbbell: delta must be in (0,1)");
    DomainSpec s;
    s.kind = DomainKind::Dumbbell;
    s.delta = delta;
    s.convex = false;
    s.symmetries = {Symmetry::ReflectX1, Symmetry::ReflectX2};
    return s;
}

DomainSpec DomainSpec::polar_curve(double r0, std::vector<double> cos_coef,
                                   std::vector<double> sin_coef) {
    DomainSpec s;
    s.kind = DomainKind::PolarCurve;
    s.r0 = r0;
    s.cos_coef = std::move(cos_coef);
    s.sin_coef = std::move(sin_coef);
    s.convex = false;
    // positivity of r(theta)
    for (int i = 0; i < 4096; ++i) {
        if (polar_radius(s, 2.0 * kPi * i / 4096) <= 0)
            throw DomainError("polar_curve: r(theta) must stay positive");
    }
    if (s.sin_coef.empty()) s.symmetries.push_back(Symmetry::ReflectX2);
    bool reflect_x1 = s.sin_coef.empty();
    for (std::size_t k = 0; k < s.cos_coef.size() && reflect_x1; ++k) {
        // r(pi - t) = r(t) needs only even harmonics
        if (s.cos_coef[k] != 0.0 && (k + 1) % 2 != 0) reflect_x1 = false;
    }
    if (reflect_x1) s.symmetries.insert(s.symmetries.begin(), Symmetry::ReflectX1);
    return s;
}

DomainSpec DomainSpec::rect_union(std::vector<Rect> rects) {
    if (rects.empty()) throw DomainError("rect_union: empty");
    for (const auto& r : rects)
        if (!(r.lo.x < r.hi.x && r.lo.y < r.hi.y))
            throw DomainError("rect_union: degenerate rectangle");
    DomainSpec s;
    s.kind = DomainKind::RectUnion;
    s.rects = std::move(rects);
    s.convex = s.rects.size() == 1;
    DomainSpec probe = s;
    probe.symmetries = {Symmetry::ReflectX1};
    try { validate_symmetries(probe); s.symmetries.push_back(Symmetry::ReflectX1); } catch (const DomainError&) {}
    probe.symmetries = {Symmetry::ReflectX2};
    try { validate_symmetries(probe); s.symmetries.push_back(Symmetry::ReflectX2); } catch (const DomainError&) {}
    return s;
}

bool DomainSpec::has_symmetry(Symmetry s) const {
    return std::find(symmetries.begin(), symmetries.end(), s) != symmetries.end();
}

std::string DomainSpec::kind_name() const {
    switch (kind) {
        case DomainKind::Disk: return "disk";
        case DomainKind::Annulus: return "annulus";
        case DomainKind::Polygon: return "polygon";
        case DomainKind::Bowtie: return "bowtie";
        case DomainKind::Dumbbell: return "dumbbell";
        case DomainKind::PolarCurve: return "polar_curve";
        case DomainKind::RectUnion: return "rect_union";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Point membership and bounding boxes
// ---------------------------------------------------------------------------

double polar_radius(const DomainSpec& spec, double theta) {
    double r = spec.r0;
    for (std::size_t k = 0; k < spec.cos_coef.size(); ++k)
        r += spec.cos_coef[k] * std::cos((double)(k + 1) * theta);
    for (std::size_t k = 0; k < spec.sin_coef.size(); ++k)
        r += spec.sin_coef[k] * std::sin((double)(k + 1) * theta);
    return r;
}

bool contains(const DomainSpec& spec, const Vec2& x) {
    switch (spec.kind) {
        case DomainKind::Disk:
            return dist(x, spec.center) < spec.radius;
        case DomainKind::Annulus: {
            const double r = norm(x);
            return spec.r1 < r && r < spec.r2;
        }
        case DomainKind::Polygon:
            return point_in_polygon(spec.vertices, x);
        case DomainKind::Bowtie:
            return std::abs(x.y) < std::abs(x.x) + spec.epsilon && std::abs(x.x) < 1.0;
        case DomainKind::Dumbbell: {
            if (dist(x, {-5.0, 0.0}) < 1.0) return true;
            if (dist(x, {5.0, 0.0}) < 1.0) return true;
            return std::abs(x.x) < 5.0 && std::abs(x.y) < spec.delta;
        }
        case DomainKind::PolarCurve: {
            const double r = norm(x);
            if (r == 0.0) return polar_radius(spec, 0.0) > 0.0;
            return r < polar_radius(spec, std::atan2(x.y, x.x));
        }
        case DomainKind::RectUnion:
            for (const auto& r : spec.rects)
                if (r.contains(x)) return true;
            return false;
    }
    return false;
}

Rect bounding_box(const DomainSpec& spec) {
    switch (spec.kind) {
        case DomainKind::Disk:
            return {spec.center - Vec2{spec.radius, spec.radius},
                    spec.center + Vec2{spec.radius, spec.radius}};
        case DomainKind::Annulus:
            return {{-spec.r2, -spec.r2}, {spec.r2, spec.r2}};
        case DomainKind::Polygon: {
            Vec2 lo = spec.vertices[0], hi = spec.vertices[0];
            for (const auto& v : spec.vertices) {
                lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
                hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
            }
            return {lo, hi};
        }
        case DomainKind::Bowtie:
            return {{-1.0, -(1.0 + spec.epsilon)}, {1.0, 1.0 + spec.epsilon}};
        case DomainKind::Dumbbell:
            return {{-6.0, -1.0}, {6.0, 1.0}};
        case DomainKind::PolarCurve: {
            double rmax = 0.0;
            for (int i = 0; i < 4096; ++i)
                rmax = std::max(rmax, polar_radius(spec, 2.0 * kPi * i / 4096));
            return {{-rmax, -rmax}, {rmax, rmax}};
        }
        case DomainKind::RectUnion: {
            Vec2 lo = spec.rects[0].lo, hi = spec.rects[0].hi;
            for (const auto& r : spec.rects) {
                lo.x = std::min(lo.x, r.lo.x); lo.y = std::min(lo.y, r.lo.y);
                hi.x = std::max(hi.x, r.hi.x); hi.y = std::max(hi.y, r.hi.y);
            }
            return {lo, hi};
        }
    }
    return {{0, 0}, {0, 0}};
}

Vec2 SymmetryOp::apply(const Vec2& p) const {
    switch (kind) {
        case ReflX1: return {p.x, -p.y};   // reflection across the x1 axis
        case ReflX2: return {-p.x, p.y};   // reflection across the x2 axis
        case Rot: return rotate(p, angle);
    }
    return p;
}

std::string SymmetryOp::name() const {
    switch (kind) {
        case ReflX1: return "reflect-x1";
        case ReflX2: return "reflect-x2";
        case Rot: return "rotation(" + std::to_string(angle) + ")";
    }
    return "?";
}

std::vector<SymmetryOp> sample_symmetry_ops(const DomainSpec& spec) {
    std::vector<SymmetryOp> ops;
    for (Symmetry s : spec.symmetries) {
        switch (s) {
            case Symmetry::ReflectX1: ops.push_back({SymmetryOp::ReflX1, 0.0}); break;
            case Symmetry::ReflectX2: ops.push_back({SymmetryOp::ReflX2, 0.0}); break;
            case Symmetry::Rotation:
                ops.push_back({SymmetryOp::Rot, kPi / 4});
                ops.push_back({SymmetryOp::Rot, kPi / 2});
                break;
        }
    }
    return ops;
}

// ---------------------------------------------------------------------------
// Boundary polylines
// ---------------------------------------------------------------------------

namespace {

// Circle sampled CCW (reverse=false) or CW, count a multiple of 8 so the
// sample set is invariant under the dihedral symmetries used elsewhere.
std::vector<Vec2> circle_loop(Vec2 c, double r, double h, bool reverse) {
    int n = 8 * std::max(2, (int)std::ceil(2.0 * kPi * r / (8.0 * h)));
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n * (reverse ? -1.0 : 1.0);
        pts[i] = c + Vec2{r * std::cos(t), r * std::sin(t)};
    }
    return pts;
}

// Subdivide the closed polygon at spacing <= h, keeping corners exact.
std::vector<Vec2> subdivide_polygon(const std::vector<Vec2>& poly, double h) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const double len = dist(a, b);
        const int m = std::max(1, (int)std::ceil(len / h));
        for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * ((double)k / m));
    }
    return out;
}

std::vector<Vec2> bowtie_polygon(double eps) {
    return {{1.0, 1.0 + eps},  {0.0, eps},  {-1.0, 1.0 + eps},
            {-1.0, -(1.0 + eps)}, {0.0, -eps}, {1.0, -(1.0 + eps)}};
}

// Dumbbell outline: two unit-circle arcs joined by the corridor edges.
std::vector<Vec2> dumbbell_polygon(double delta, double h) {
    const double beta = std::asin(delta);      // arc meets y = +-delta at +-(pi - beta)
    const double xj = std::sqrt(1.0 - delta * delta);
    std::vector<Vec2> pts;
    auto arc = [&](Vec2 c, double a0, double a1) {
        const double len = (a1 - a0);  // both arcs traversed CCW, a1 > a0
        const int m = std::max(4, (int)std::ceil(len * 1.0 / h));
        for (int k = 0; k < m; ++k) {
            const double t = a0 + len * k / m;
            pts.push_back(c + Vec2{std::cos(t), std::sin(t)});
        }
    };
    auto edge = [&](Vec2 a, Vec2 b) {
        const double len = dist(a, b);
        const int m = std::max(1, (int)std::ceil(len / h));
        for (int k = 0; k < m; ++k) pts.push_back(a + (b - a) * ((double)k / m));
    };
    // top edge right->left, left ball, bottom edge left->right, right ball
    edge({5.0 - xj, delta}, {-5.0 + xj, delta});
    arc({-5.0, 0.0}, beta, 2.0 * kPi - beta);
    edge({-5.0 + xj, -delta}, {5.0 - xj, -delta});
    arc({5.0, 0.0}, -(kPi - beta), kPi - beta);
    return pts;
}

// Exact rectilinear union boundary via coordinate compression + edge tracing.
std::vector<std::vector<Vec2>> rect_union_loops(const std::vector<Rect>& rects) {
    std::vector<double> xs, ys;
    for (const auto& r : rects) {
        xs.push_back(r.lo.x); xs.push_back(r.hi.x);
        ys.push_back(r.lo.y); ys.push_back(r.hi.y);
    }
    auto uniq = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(xs); uniq(ys);
    const int nx = (int)xs.size() - 1, ny = (int)ys.size() - 1;
    auto covered = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
        const Vec2 c{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])};
        for (const auto& r : rects) if (r.contains(c)) return true;
        return false;
    };
    // Collect directed boundary edges with interior on the left.
    // Horizontal edge from (i,j) to (i+1,j) at y=ys[j]: cell above minus below.
    struct Edge { int x0, y0, x1, y1; };
    std::vector<Edge> edges;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const bool above = covered(i, j), below = covered(i, j - 1);
            if (above && !below) edges.push_back({i, j, i + 1, j});       // left->right
            else if (!above && below) edges.push_back({i + 1, j, i, j});  // right->left
        }
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const bool right = covered(i, j), left = covered(i - 1, j);
            if (left && !right) edges.push_back({i, j, i, j + 1});        // up
            else if (!left && right) edges.push_back({i, j + 1, i, j});   // down
        }
    // Chain edges into loops.
    const int W = (int)xs.size();
    auto key = [&](int x, int y) { return y * W + x; };
    std::vector<std::vector<int>> out_edges((std::size_t)W * ys.size());
    for (int e = 0; e < (int)edges.size(); ++e)
        out_edges[key(edges[e].x0, edges[e].y0)].push_back(e);
    std::vector<bool> used(edges.size(), false);
    std::vector<std::vector<Vec2>> loops;
    for (int e0 = 0; e0 < (int)edges.size(); ++e0) {
        if (used[e0]) continue;
        std::vector<Vec2> loop;
        int e = e0;
        while (!used[e]) {
            used[e] = true;
            loop.push_back({xs[edges[e].x0], ys[edges[e].y0]});
            const auto& cand = out_edges[key(edges[e].x1, edges[e].y1)];
            int next = -1;
            for (int c : cand) if (!used[c]) { next = c; break; }
            if (next < 0) break;  // loop closed
            e = next;
        }
        // merge collinear runs
        std::vector<Vec2> simp;
        const std::size_t n = loop.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 prev = loop[(k + n - 1) % n], cur = loop[k], nxt = loop[(k + 1) % n];
            if (std::abs(orient2d(prev, cur, nxt)) > 1e-12) simp.push_back(cur);
        }
        loops.push_back(std::move(simp));
    }
    return loops;
}

}  // namespace

std::vector<std::vector<Vec2>> boundary_loops(const DomainSpec& spec, double h) {
    if (!(h > 0)) throw MeshError("boundary_loops: h must be positive");
    switch (spec.kind) {
        case DomainKind::Disk:
            return {circle_loop(spec.center, spec.radius, h, false)};
        case DomainKind::Annulus:
            return {circle_loop({0, 0}, spec.r2, h, false),
                    circle_loop({0, 0}, spec.r1, h, true)};
        case DomainKind::Polygon:
            return {subdivide_polygon(spec.vertices, h)};
        case DomainKind::Bowtie:
            return {subdivide_polygon(bowtie_polygon(spec.epsilon), h)};
        case DomainKind::Dumbbell:
            return {dumbbell_polygon(spec.delta, h)};
        case DomainKind::PolarCurve: {
            // arc length estimate, then uniform-theta sampling (count mult. of 8)
            double len = 0.0;
            const int m = 4096;
            Vec2 prev{polar_radius(spec, 0.0), 0.0};
            for (int i = 1; i <= m; ++i) {
                const double t = 2.0 * kPi * i / m;
                const double r = polar_radius(spec, t);
                Vec2 p{r * std::cos(t), r * std::sin(t)};
                len += dist(prev, p);
                prev = p;
            }
            const int n = 8 * std::max(2, (int)std::ceil(len / (8.0 * h)));
            std::vector<Vec2> pts(n);
            for (int i = 0; i < n; ++i) {
                const double t = 2.0 * kPi * i / n;
                const double r = polar_radius(spec, t);
                pts[i] = {r * std::cos(t), r * std::sin(t)};
            }
            return {pts};
        }
        case DomainKind::RectUnion: {
            auto loops = rect_union_loops(spec.rects);
            std::vector<std::vector<Vec2>> out;
            for (auto& loop : loops) out.push_back(subdivide_polygon(loop, h));
            return out;
        }
    }
    return {};
}

bool loops_contain(const std::vector<std::vector<Vec2>>& loops, const Vec2& p) {
    // total winding: outer CCW loops contribute +1, CW holes -1
    int crossings = 0;
    for (const auto& loop : loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = loop[i], b = loop[(i + 1) % n];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double t = (p.y - a.y) / (b.y - a.y);
                const double xi = a.x + t * (b.x - a.x);
                if (xi > p.x) crossings += (b.y > a.y) ? 1 : -1;
            }
        }
    }
    return crossings != 0;
}

double loops_distance(const std::vector<std::vector<Vec2>>& loops, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& loop : loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = loop[i], b = loop[(i + 1) % n];
            const Vec2 ab = b - a;
            const double L2 = norm2(ab);
            double t = L2 > 0 ? dot(p - a, ab) / L2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, dist(p, a + ab * t));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Convex polygon operations
// ---------------------------------------------------------------------------

double polygon_area(const Polygon& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

bool polygon_is_ccw(const Polygon& poly) { return polygon_area(poly) > 0.0; }

bool polygon_is_convex_ccw(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (orient2d(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < -1e-12)
            return false;
    }
    return polygon_is_ccw(poly);
}

bool polygon_is_simple(const Polygon& poly) {
    const std::size_t n = poly.size();
    auto segs_intersect = [](Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        const double d1 = orient2d(c, d, a), d2 = orient2d(c, d, b);
        const double d3 = orient2d(a, b, c), d4 = orient2d(a, b, d);
        return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segs_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double t = (p.y - a.y) / (b.y - a.y);
            if (a.x + t * (b.x - a.x) > p.x) inside = !inside;
        }
    }
    return inside;
}

double support_function_polygon(const Polygon& poly, const Vec2& xi) {
    if (xi.x == 0.0 && xi.y == 0.0) throw ZeroDirection("support function: xi = 0");
    if (!polygon_is_convex_ccw(poly)) throw NotConvex("support function: polygon not convex CCW");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : poly) best = std::max(best, dot(v, xi));
    return best;
}

Polygon minkowski_combine_polygons(const Polygon& P, const Polygon& Q, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw Error("minkowski: rho must be in [0,1]");
    if (!polygon_is_convex_ccw(P) || !polygon_is_convex_ccw(Q))
        throw NotConvex("minkowski: inputs must be convex CCW");
    if (rho == 0.0) return P;
    if (rho == 1.0) return Q;

    auto scaled = [](const Polygon& poly, double s) {
        Polygon out(poly.size());
        for (std::size_t i = 0; i < poly.size(); ++i) out[i] = poly[i] * s;
        return out;
    };
    const Polygon A = scaled(P, 1.0 - rho), B = scaled(Q, rho);

    // Rotate each polygon so it starts at its lowest (then leftmost) vertex,
    // then merge the two edge fans by polar angle.
    auto start_index = [](const Polygon& poly) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < poly.size(); ++i) {
            if (poly[i].y < poly[best].y ||
                (poly[i].y == poly[best].y && poly[i].x < poly[best].x))
                best = i;
        }
        return best;
    };
    auto edge_list = [&](const Polygon& poly) {
        std::vector<Vec2> edges;
        const std::size_t n = poly.size(), s = start_index(poly);
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 e = poly[(s + k + 1) % n] - poly[(s + k) % n];
            if (norm2(e) > 0) edges.push_back(e);
        }
        return edges;
    };
    const auto ea = edge_list(A), eb = edge_list(B);
    const Vec2 start = A[start_index(A)] + B[start_index(B)];

    std::vector<Vec2> edges;
    std::size_t ia = 0, ib = 0;
    while (ia < ea.size() || ib < eb.size()) {
        Vec2 e;
        if (ia == ea.size()) e = eb[ib++];
        else if (ib == eb.size()) e = ea[ia++];
        else {
            const double c = cross(ea[ia], eb[ib]);
            if (c > 0) e = ea[ia++];
            else if (c < 0) e = eb[ib++];
            else { e = ea[ia++] + eb[ib++]; }  // parallel edges merge
        }
        edges.push_back(e);
    }
    Polygon out;
    Vec2 cur = start;
    for (std::size_t k = 0; k + 1 <= edges.size(); ++k) {
        out.push_back(cur);
        cur += edges[k];
    }
    // drop collinear vertices produced by touching parallel runs
    Polygon simp;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 prev = out[(i + n - 1) % n], curv = out[i], nxt = out[(i + 1) % n];
        if (std::abs(orient2d(prev, curv, nxt)) > 1e-14) simp.push_back(curv);
    }
    return simp;
}

// ---------------------------------------------------------------------------
// Pixel masks
// ---------------------------------------------------------------------------

long PixelMask::count() const {
    long c = 0;
    for (auto v : cells) c += v ? 1 : 0;
    return c;
}

namespace {

PixelMask make_axis_aligned_grid(Rect bb, double cell) {
    PixelMask m;
    m.cell = cell;
    // snap origin to a multiple of cell so both axes land on cell boundaries
    const long i0 = (long)std::floor(bb.lo.x / cell) - 1;
    const long j0 = (long)std::floor(bb.lo.y / cell) - 1;
    m.origin = {i0 * cell, j0 * cell};
    m.nx = (int)std::ceil((bb.hi.x - m.origin.x) / cell) + 1;
    m.ny = (int)std::ceil((bb.hi.y - m.origin.y) / cell) + 1;
    m.cells.assign((std::size_t)m.nx * m.ny, 0);
    return m;
}

}  // namespace

PixelMask rasterize(const DomainSpec& spec, double cell) {
    const Rect bb = bounding_box(spec);
    if (cell <= 0) {
        const double diag = dist(bb.lo, bb.hi);
        cell = diag / 256.0;
    }
    PixelMask m = make_axis_aligned_grid(bb, cell);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            if (contains(spec, m.center(i, j))) m.set(i, j, true);
    return m;
}

PixelMask rasterize_polygon(const Polygon& poly, double cell, double pad) {
    Vec2 lo = poly[0], hi = poly[0];
    for (const auto& v : poly) {
        lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
    }
    PixelMask m = make_axis_aligned_grid({lo - Vec2{pad, pad}, hi + Vec2{pad, pad}}, cell);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            if (point_in_polygon(poly, m.center(i, j))) m.set(i, j, true);
    return m;
}

PixelMask steiner_symmetrize_mask(const PixelMask& mask, Axis axis) {
    PixelMask out = mask;
    std::fill(out.cells.begin(), out.cells.end(), 0);
    // For Axis::X1, sections are columns (fixed i) and the centering line is
    // x2 = 0; for Axis::X2 the roles of i and j swap.
    const bool col = (axis == Axis::X1);
    const int nsec = col ? mask.nx : mask.ny;
    const int nlen = col ? mask.ny : mask.nx;
    const double sec_origin = col ? mask.origin.y : mask.origin.x;
    // index (in cells, possibly fractional) of the axis line within a section
    const double axis_pos = (0.0 - sec_origin) / mask.cell - 0.5;
    for (int s = 0; s < nsec; ++s) {
        int m = 0;
        for (int k = 0; k < nlen; ++k)
            if (col ? mask.at(s, k) : mask.at(k, s)) ++m;
        if (m == 0) continue;
        // fill positions nearest the axis first (ties toward lower index)
        std::vector<int> order(nlen);
        for (int k = 0; k < nlen; ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(a - axis_pos) < std::abs(b - axis_pos);
        });
        for (int t = 0; t < m && t < nlen; ++t) {
            const int k = order[t];
            if (col) out.set(s, k, true); else out.set(k, s, true);
        }
    }
    return out;
}

bool mask_equal(const PixelMask& a, const PixelMask& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.cell != b.cell ||
        !(a.origin == b.origin))
        return false;
    return a.cells == b.cells;
}

bool mask_is_convex(const PixelMask& mask, double slack_cells) {
    std::vector<Vec2> pts;
    for (int j = 0; j < mask.ny; ++j)
        for (int i = 0; i < mask.nx; ++i)
            if (mask.at(i, j)) pts.push_back(mask.center(i, j));
    if (pts.size() <= 1) return true;
    if (pts.size() == 2)
        return dist(pts[0], pts[1]) <= (1.0 + slack_cells) * mask.cell * 1.5;
    // Andrew monotone chain hull
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient2d(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (k >= lower && orient2d(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    if (hull.size() < 3) {
        // collinear set: occupied centers must be contiguous along the line
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            if (dist(pts[i], pts[i + 1]) > (1.0 + slack_cells) * mask.cell * 1.5) return false;
        return true;
    }
    const double margin = slack_cells * mask.cell;
    for (int j = 0; j < mask.ny; ++j) {
        for (int i = 0; i < mask.nx; ++i) {
            if (mask.at(i, j)) continue;
            const Vec2 p = mask.center(i, j);
            // depth = min signed distance to hull edges (positive inside)
            double depth = std::numeric_limits<double>::infinity();
            for (std::size_t e = 0; e < hull.size(); ++e) {
                const Vec2 a = hull[e], b = hull[(e + 1) % hull.size()];
                const double len = dist(a, b);
                if (len == 0) continue;
                depth = std::min(depth, orient2d(a, b, p) / len);
            }
            if (depth > margin) return false;
        }
    }
    return true;
}

}  // namespace morrey
