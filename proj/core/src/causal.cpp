#include "manyminds/causal.hpp"

#include <algorithm>
#include <cmath>

namespace mm::causal {

char relation_code(Relation r) {
    switch (r) {
        case Relation::Past: return 'P';
        case Relation::Spacelike: return 'S';
        case Relation::Future: return 'F';
        case Relation::Mixed: return 'M';
    }
    return '?';
}

Relation relation_from_code(char c) {
    switch (c) {
        case 'P': return Relation::Past;
        case 'S': case '.': return Relation::Spacelike;
        case 'F': return Relation::Future;
        case 'M': return Relation::Mixed;
    }
    throw std::invalid_argument(std::string("unknown relation code '") + c + "'");
}

Relation reverse(Relation r) {
    if (r == Relation::Past) return Relation::Future;
    if (r == Relation::Future) return Relation::Past;
    return r;
}

Region Region::box(Event lo, Event hi) {
    if (lo.size() != hi.size()) throw DimensionMismatchError("box corners differ in dimension");
    if (lo.size() < 2) throw std::invalid_argument("spacetime dimension must be at least 2");
    for (int i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("box corners must be ordered componentwise");
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            throw std::invalid_argument("box extents must be finite");
    }
    Region r;
    r.kind = Kind::Box;
    r.lo = std::move(lo);
    r.hi = std::move(hi);
    return r;
}

Region Region::ball(Event center, double radius) {
    if (center.size() < 2) throw std::invalid_argument("spacetime dimension must be at least 2");
    if (!(radius >= 0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be finite and nonnegative");
    for (int i = 0; i < center.size(); ++i)
        if (!std::isfinite(center[i])) throw std::invalid_argument("ball center must be finite");
    Region r;
    r.kind = Kind::Ball;
    r.center = std::move(center);
    r.radius = radius;
    return r;
}

int Region::dimension() const {
    return kind == Kind::Box ? static_cast<int>(lo.size()) : static_cast<int>(center.size());
}

Event Region::centroid() const {
    return kind == Kind::Box ? Event(0.5 * (lo + hi)) : center;
}

void Region::bounds(Event& out_lo, Event& out_hi) const {
    if (kind == Kind::Box) {
        out_lo = lo;
        out_hi = hi;
    } else {
        out_lo = center.array() - radius;
        out_hi = center.array() + radius;
    }
}

bool Region::contains(const Event& p) const {
    if (p.size() != dimension()) return false;
    if (kind == Kind::Box) {
        for (int i = 0; i < p.size(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
    return (p - center).norm() <= radius;
}

Event Region::sample(const std::vector<double>& u) const {
    const int d = dimension();
    if (static_cast<int>(u.size()) < d + 1) throw std::invalid_argument("not enough uniform draws");
    Event p(d);
    if (kind == Kind::Box) {
        for (int i = 0; i < d; ++i) p[i] = lo[i] + u[i] * (hi[i] - lo[i]);
        return p;
    }
    // Gaussian direction via Box-Muller on the uniform draws, then a radial
    // draw scaled for uniform volume density.
    Event g(d);
    for (int i = 0; i < d; ++i) {
        double u1 = std::max(u[i], 1e-12);
        double u2 = u[(i + 1) % d];
        g[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    double norm = g.norm();
    if (norm < 1e-12) return center;
    double rad = radius * std::pow(std::max(u[d], 1e-15), 1.0 / d);
    return center + (rad / norm) * g;
}

bool regions_overlap(const Region& a, const Region& b) {
    if (a.dimension() != b.dimension()) throw DimensionMismatchError("regions differ in dimension");
    const int d = a.dimension();
    if (a.kind == Region::Kind::Box && b.kind == Region::Kind::Box) {
        for (int i = 0; i < d; ++i)
            if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
        return true;
    }
    if (a.kind == Region::Kind::Ball && b.kind == Region::Kind::Ball)
        return (a.center - b.center).norm() <= a.radius + b.radius;
    const Region& box = (a.kind == Region::Kind::Box) ? a : b;
    const Region& ball = (a.kind == Region::Kind::Box) ? b : a;
    double dist2 = 0;
    for (int i = 0; i < d; ++i) {
        double c = ball.center[i];
        double nearest = std::clamp(c, box.lo[i], box.hi[i]);
        dist2 += (c - nearest) * (c - nearest);
    }
    return std::sqrt(dist2) <= ball.radius;
}

namespace {

// The set of displacements {b - a : a in A, b in B} for box/ball regions is a
// box Minkowski-summed with a Euclidean ball; relations reduce to extremal
// statistics of that difference hull.
struct DifferenceHull {
    Event lo, hi;   // box component, per coordinate
    double radius;  // ball component
};

DifferenceHull difference_hull(const Region& a, const Region& b) {
    DifferenceHull h;
    h.radius = 0;
    Event alo, ahi, blo, bhi;
    if (a.kind == Region::Kind::Ball) {
        alo = a.center; ahi = a.center;
        h.radius += a.radius;
    } else {
        alo = a.lo; ahi = a.hi;
    }
    if (b.kind == Region::Kind::Ball) {
        blo = b.center; bhi = b.center;
        h.radius += b.radius;
    } else {
        blo = b.lo; bhi = b.hi;
    }
    h.lo = blo - ahi;
    h.hi = bhi - alo;
    return h;
}

struct HullStats {
    double t_min, t_max, t_maxabs;
    double s_min, s_max; // min/max spatial norm over the box component
};

HullStats hull_stats(const DifferenceHull& h) {
    HullStats s;
    s.t_min = h.lo[0];
    s.t_max = h.hi[0];
    s.t_maxabs = std::max(std::abs(h.lo[0]), std::abs(h.hi[0]));
    double min2 = 0, max2 = 0;
    for (int i = 1; i < h.lo.size(); ++i) {
        double gap = std::max({h.lo[i], -h.hi[i], 0.0});
        min2 += gap * gap;
        double m = std::max(std::abs(h.lo[i]), std::abs(h.hi[i]));
        max2 += m * m;
    }
    s.s_min = std::sqrt(min2);
    s.s_max = std::sqrt(max2);
    return s;
}

const double kSqrt2 = std::sqrt(2.0);

} // namespace

RelationMargins relation_margins(const Region& a, const Region& b) {
    if (a.dimension() != b.dimension()) throw DimensionMismatchError("regions differ in dimension");
    DifferenceHull h = difference_hull(a, b);
    HullStats s = hull_stats(h);
    const double R = h.radius;

    RelationMargins m;
    m.min_dt = s.t_min - R;
    m.min_dt_minus_dist = s.t_min - s.s_max - kSqrt2 * R;
    // min over the hull of (|dx| - |dt|); the ball component trades time
    // against space optimally at a 1:1 split, giving the sqrt(2) factor when
    // the spatial gap is large and a residual chord term otherwise.
    double q = s.s_min;
    double psi = (q >= R / kSqrt2) ? (q - kSqrt2 * R) : -std::sqrt(std::max(R * R - q * q, 0.0));
    m.spacelike_margin = psi - s.t_maxabs;
    return m;
}

Relation causal_relation(const Region& a, const Region& b) {
    RelationMargins ab = relation_margins(a, b);
    if (ab.min_dt > 0 && ab.min_dt_minus_dist >= 0) return Relation::Past;
    RelationMargins ba = relation_margins(b, a);
    if (ba.min_dt > 0 && ba.min_dt_minus_dist >= 0) return Relation::Future;
    if (ab.spacelike_margin > 0) return Relation::Spacelike;
    return Relation::Mixed;
}

Docket::Docket(std::vector<std::vector<Relation>> rel) : rel_(std::move(rel)) {
    const std::size_t m = rel_.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (rel_[i].size() != m) throw std::invalid_argument("docket relation matrix must be square");
        rel_[i][i] = Relation::Spacelike;
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            if (rel_[i][j] == Relation::Mixed || rel_[j][i] == Relation::Mixed)
                throw MixedRelationError(i, j);
            if (rel_[j][i] != reverse(rel_[i][j]))
                throw std::invalid_argument("docket relation matrix breaks antisymmetry");
        }
    ascending_ = true;
    for (std::size_t i = 0; i < m && ascending_; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (rel_[i][j] == Relation::Future) { ascending_ = false; break; }
}

std::strong_ordering Docket::operator<=>(const Docket& other) const {
    if (auto c = rel_.size() <=> other.rel_.size(); c != 0) return c;
    for (std::size_t i = 0; i < rel_.size(); ++i)
        for (std::size_t j = 0; j < rel_.size(); ++j)
            if (auto c = static_cast<int>(rel_[i][j]) <=> static_cast<int>(other.rel_[i][j]); c != 0)
                return c;
    return std::strong_ordering::equal;
}

Docket docket_of(const std::vector<Region>& regions) {
    const std::size_t m = regions.size();
    if (m == 0) throw std::invalid_argument("a docket needs at least one region");
    std::vector<std::vector<Relation>> rel(m, std::vector<Relation>(m, Relation::Spacelike));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            Relation r = causal_relation(regions[i], regions[j]);
            if (r == Relation::Mixed) throw MixedRelationError(i, j);
            rel[i][j] = r;
            rel[j][i] = reverse(r);
        }
    return Docket(std::move(rel));
}

Docket docket_permute(const Docket& d, const std::vector<std::size_t>& pi) {
    const std::size_t m = d.size();
    if (pi.size() != m) throw std::invalid_argument("permutation size does not match docket");
    std::vector<bool> seen(m, false);
    for (std::size_t v : pi) {
        if (v >= m || seen[v]) throw std::invalid_argument("not a permutation");
        seen[v] = true;
    }
    std::vector<std::vector<Relation>> rel(m, std::vector<Relation>(m, Relation::Spacelike));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            rel[i][j] = d.at(pi[i], pi[j]);
    return Docket(std::move(rel));
}

} // namespace mm::causal
