#include "tlnum/calculus.hpp"
#include "tlnum/geometry.hpp"
#include "tlnum/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace tln {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist2(const Point& a, const Point& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

double point_segment(const Point& p, const Segment& s) {
    double vx = s.b[0] - s.a[0], vy = s.b[1] - s.a[1];
    double wx = p[0] - s.a[0], wy = p[1] - s.a[1];
    double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
    Point q{s.a[0] + t * vx, s.a[1] + t * vy, 0};
    return dist2(p, q);
}

double point_box(const Point& p, const Point& lo, const Point& hi, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double g = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

bool segment_hits_box(const Segment& s, const Point& lo, const Point& hi) {
    double t0 = 0.0, t1 = 1.0;
    for (int i = 0; i < 2; ++i) {
        double p = s.b[i] - s.a[i];
        if (p == 0.0) {
            if (s.a[i] < lo[i] || s.a[i] > hi[i]) return false;
            continue;
        }
        double ta = (lo[i] - s.a[i]) / p, tb = (hi[i] - s.a[i]) / p;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

double segment_box(const Segment& s, const Point& lo, const Point& hi) {
    if (segment_hits_box(s, lo, hi)) return 0.0;
    double r = std::min(point_box(s.a, lo, hi, 2), point_box(s.b, lo, hi, 2));
    const Point corners[4] = {{lo[0], lo[1], 0}, {hi[0], lo[1], 0}, {lo[0], hi[1], 0}, {hi[0], hi[1], 0}};
    for (const auto& c : corners) r = std::min(r, point_segment(c, s));
    return r;
}

}

Domain Domain::interval(double a, double b) {
    if (!(b > a)) fail(ErrorKind::InvalidDomain, "interval must have a < b");
    Domain d;
    d.kind_ = Kind::Points1d;
    d.name_ = "interval";
    d.d_ = 1;
    d.lo_ = {a, 0, 0};
    d.hi_ = {b, 0, 0};
    d.points1d_ = {a, b};
    return d;
}

Domain Domain::square() {
    return polygon("square", {{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}}, {});
}

Domain Domain::lshape() {
    return polygon("lshape", {{{0, 0, 0}, {1, 0, 0}, {1, 0.5, 0}, {0.5, 0.5, 0}, {0.5, 1, 0}, {0, 1, 0}}}, {});
}

Domain Domain::disc(int sides) {
    std::vector<Point> loop;
    const double pi = std::acos(-1.0);
    for (int i = 0; i < sides; ++i) {
        double t = 2 * pi * i / sides;
        loop.push_back({0.5 + 0.5 * std::cos(t), 0.5 + 0.5 * std::sin(t), 0});
    }
    Domain d = polygon("disc", {loop}, {});
    d.lo_ = {0, 0, 0};
    d.hi_ = {1, 1, 0};
    return d;
}

Domain Domain::slit_square(double depth) {
    if (!(depth > 0 && depth < 1)) fail(ErrorKind::InvalidDomain, "slit depth must lie in (0,1)");
    return polygon("slit", {{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}}, {{{0.5, 0, 0}, {0.5, depth, 0}}});
}

Domain Domain::polygon(std::string name, std::vector<std::vector<Point>> loops, std::vector<Segment> slits) {
    Domain d;
    d.kind_ = Kind::Polygon;
    d.name_ = std::move(name);
    d.d_ = 2;
    d.loops_ = std::move(loops);
    d.lo_ = {kInf, kInf, 0};
    d.hi_ = {-kInf, -kInf, 0};
    for (const auto& loop : d.loops_) {
        if (loop.size() < 3) fail(ErrorKind::InvalidDomain, "polygon loop needs at least three vertices");
        for (std::size_t i = 0; i < loop.size(); ++i) {
            d.segments_.push_back({loop[i], loop[(i + 1) % loop.size()]});
            for (int k = 0; k < 2; ++k) {
                d.lo_[k] = std::min(d.lo_[k], loop[i][k]);
                d.hi_[k] = std::max(d.hi_[k], loop[i][k]);
            }
        }
    }
    d.n_loop_segments_ = d.segments_.size();
    for (const auto& s : slits) d.segments_.push_back(s);
    if (d.segments_.empty() || !(d.measure() > 0)) fail(ErrorKind::InvalidDomain, "domain '" + d.name_ + "' has empty interior");
    return d;
}

Domain Domain::from_sdf(std::string name, const SampledFunction& sdf) {
    if (sdf.arity != 1) fail(ErrorKind::InvalidDomain, "sdf samples must be scalar");
    Domain d;
    d.kind_ = Kind::Sdf;
    d.name_ = std::move(name);
    d.d_ = sdf.grid.d;
    d.lo_ = sdf.grid.lo;
    d.hi_ = sdf.grid.hi();
    d.sdf_grid_ = sdf.grid;
    d.sdf_values_.resize(sdf.size());
    bool any = false;
    for (std::size_t i = 0; i < sdf.size(); ++i) {
        d.sdf_values_[i] = sdf.has(i) ? sdf.at(i) : -kInf;
        any = any || d.sdf_values_[i] > 0;
    }
    if (!any) fail(ErrorKind::InvalidDomain, "sdf domain '" + d.name_ + "' has empty interior");
    return d;
}

Domain Domain::by_name(const std::string& name) {
    if (name == "interval") return interval();
    if (name == "square") return square();
    if (name == "lshape" || name == "L-shape") return lshape();
    if (name == "disc") return disc();
    if (name == "slit" || name == "slit-square") return slit_square();
    return from_sdf(name, read_sampled(name));
}

Domain Domain::image(const Domain& base, const MapFamily& f, int refine) {
    if (f.dim() != base.d_) fail(ErrorKind::Config, "map dimension does not match the domain");
    auto snap = [](Domain& d) {
        for (int i = 0; i < d.d_; ++i) {
            d.lo_[i] = std::floor(d.lo_[i] * 64.0) / 64.0;
            d.hi_[i] = std::ceil(d.hi_[i] * 64.0) / 64.0;
        }
    };
    if (base.kind_ == Kind::Points1d) {
        Point a = f.forward({base.points1d_.front(), 0, 0});
        Point b = f.forward({base.points1d_.back(), 0, 0});
        Domain d = interval(std::min(a[0], b[0]), std::max(a[0], b[0]));
        d.name_ = base.name_ + "@" + f.name();
        snap(d);
        return d;
    }
    if (base.kind_ != Kind::Polygon) fail(ErrorKind::Capability, "image of an sdf domain is not supported");
    auto subdivide = [&](const Point& a, const Point& b, bool include_end, std::vector<Point>& out) {
        for (int k = 0; k < refine + (include_end ? 1 : 0); ++k) {
            double t = static_cast<double>(k) / refine;
            out.push_back(f.forward({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), 0}));
        }
    };
    std::vector<std::vector<Point>> loops;
    for (const auto& loop : base.loops_) {
        std::vector<Point> out;
        for (std::size_t i = 0; i < loop.size(); ++i) subdivide(loop[i], loop[(i + 1) % loop.size()], false, out);
        loops.push_back(std::move(out));
    }
    std::vector<Segment> slits;
    for (std::size_t s = base.n_loop_segments_; s < base.segments_.size(); ++s) {
        std::vector<Point> pts;
        subdivide(base.segments_[s].a, base.segments_[s].b, true, pts);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) slits.push_back({pts[i], pts[i + 1]});
    }
    Domain d = polygon(base.name_ + "@" + f.name(), std::move(loops), std::move(slits));
    snap(d);
    return d;
}

double Domain::sdf_at(const Point& x) const {
    // Bilinear (or linear) interpolation between cell centers; outside the grid counts as exterior.
    const Grid& g = sdf_grid_;
    Index base{0, 0, 0};
    double w[kMaxDim] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) {
        double u = (x[i] - g.lo[i]) / g.h - 0.5;
        if (u < -0.5 || u > g.n[i] - 0.5) return -kInf;
        int b = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(0, g.n[i] - 2));
        base[i] = b;
        w[i] = g.n[i] > 1 ? std::clamp(u - b, 0.0, 1.0) : 0.0;
    }
    double acc = 0.0;
    const int corners = 1 << d_;
    for (int m = 0; m < corners; ++m) {
        Index c = base;
        double wt = 1.0;
        for (int i = 0; i < d_; ++i) {
            int bit = (m >> i) & 1;
            c[i] += bit;
            if (c[i] >= g.n[i]) c[i] = g.n[i] - 1;
            wt *= bit ? w[i] : 1.0 - w[i];
        }
        if (wt == 0.0) continue;
        double v = sdf_values_[g.index(c)];
        if (!std::isfinite(v)) return -kInf;
        acc += wt * v;
    }
    return acc;
}

bool Domain::contains(const Point& x) const {
    switch (kind_) {
    case Kind::Points1d:
        return x[0] > points1d_.front() && x[0] < points1d_.back();
    case Kind::Sdf:
        return sdf_at(x) > 0;
    case Kind::Polygon: {
        if (boundary_distance(x) <= 1e-13) return false;
        bool in = false;
        for (std::size_t i = 0; i < n_loop_segments_; ++i) {
            const auto& s = segments_[i];
            if ((s.a[1] > x[1]) != (s.b[1] > x[1])) {
                double xc = s.a[0] + (x[1] - s.a[1]) * (s.b[0] - s.a[0]) / (s.b[1] - s.a[1]);
                if (x[0] < xc) in = !in;
            }
        }
        return in;
    }
    }
    return false;
}

double Domain::boundary_distance(const Point& x) const {
    switch (kind_) {
    case Kind::Points1d: {
        double r = kInf;
        for (double p : points1d_) r = std::min(r, std::abs(x[0] - p));
        return r;
    }
    case Kind::Sdf:
        return std::abs(sdf_at(x));
    case Kind::Polygon: {
        double r = kInf;
        for (const auto& s : segments_) r = std::min(r, point_segment(x, s));
        return r;
    }
    }
    return kInf;
}

BoxClass Domain::classify_box(const Point& lo, const Point& hi, double& dist) const {
    Point c{};
    for (int i = 0; i < d_; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    switch (kind_) {
    case Kind::Points1d: {
        dist = kInf;
        for (double p : points1d_) {
            if (p >= lo[0] && p <= hi[0]) {
                dist = 0.0;
                return BoxClass::Straddle;
            }
            dist = std::min(dist, std::max(lo[0] - p, p - hi[0]));
        }
        return contains(c) ? BoxClass::Inside : BoxClass::Outside;
    }
    case Kind::Polygon: {
        dist = kInf;
        for (const auto& s : segments_) {
            dist = std::min(dist, segment_box(s, lo, hi));
            if (dist == 0.0) return BoxClass::Straddle;
        }
        return contains(c) ? BoxClass::Inside : BoxClass::Outside;
    }
    case Kind::Sdf: {
        // 3 samples per axis: corners, edge midpoints, center.
        double mn = kInf, mx = -kInf, mabs = kInf;
        const int per = 3;
        int total = 1;
        for (int i = 0; i < d_; ++i) total *= per;
        for (int m = 0; m < total; ++m) {
            Point p{};
            int r = m;
            for (int i = 0; i < d_; ++i) {
                p[i] = lo[i] + 0.5 * (r % per) * (hi[i] - lo[i]);
                r /= per;
            }
            double v = sdf_at(p);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            mabs = std::min(mabs, std::abs(v));
        }
        if (mn > 0) {
            dist = mn;
            return BoxClass::Inside;
        }
        if (mx < 0) {
            dist = std::isfinite(mabs) ? mabs : kInf;
            return BoxClass::Outside;
        }
        dist = 0.0;
        return BoxClass::Straddle;
    }
    }
    dist = 0.0;
    return BoxClass::Straddle;
}

double Domain::diameter() const {
    switch (kind_) {
    case Kind::Points1d:
        return points1d_.back() - points1d_.front();
    case Kind::Sdf: {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
        return std::sqrt(s);
    }
    case Kind::Polygon: {
        double r = 0.0;
        for (const auto& a : segments_)
            for (const auto& b : segments_) r = std::max(r, dist2(a.a, b.a));
        return r;
    }
    }
    return 0.0;
}

double Domain::measure() const {
    switch (kind_) {
    case Kind::Points1d:
        return points1d_.back() - points1d_.front();
    case Kind::Sdf: {
        double cell = std::pow(sdf_grid_.h, d_);
        double m = 0.0;
        for (double v : sdf_values_) m += v > 0 ? cell : 0.0;
        return m;
    }
    case Kind::Polygon: {
        double m = 0.0;
        for (const auto& loop : loops_) {
            double a = 0.0;
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const auto& p = loop[i];
                const auto& q = loop[(i + 1) % loop.size()];
                a += p[0] * q[1] - q[0] * p[1];
            }
            m += std::abs(a) * 0.5;
        }
        return m;
    }
    }
    return 0.0;
}

std::vector<Point> Domain::boundary_samples(double spacing) const {
    std::vector<Point> out;
    switch (kind_) {
    case Kind::Points1d:
        for (double p : points1d_) out.push_back({p, 0, 0});
        break;
    case Kind::Polygon:
        for (const auto& s : segments_) {
            double len = dist2(s.a, s.b);
            int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
            for (int k = 0; k < n; ++k) {
                double t = static_cast<double>(k) / n;
                out.push_back({s.a[0] + t * (s.b[0] - s.a[0]), s.a[1] + t * (s.b[1] - s.a[1]), 0});
            }
        }
        break;
    case Kind::Sdf: {
        for (std::size_t i = 0; i < sdf_grid_.size(); ++i)
            if (std::abs(sdf_values_[i]) < sdf_grid_.h) out.push_back(sdf_grid_.point(i));
        break;
    }
    }
    return out;
}

InsideFn Domain::inside_fn() const {
    auto self = std::make_shared<Domain>(*this);
    return [self](const Point& x) { return self->contains(x); };
}

}
