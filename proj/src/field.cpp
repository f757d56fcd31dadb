#include "tlnum/field.hpp"

#include <cmath>

namespace tln {

Grid Grid::over_box(int d, const Point& lo, const Point& hi, double h) {
    if (d < 1 || d > kMaxDim) fail(ErrorKind::Capability, "unsupported dimension " + std::to_string(d));
    if (!(h > 0)) fail(ErrorKind::Resolution, "grid step must be positive");
    Grid g;
    g.d = d;
    g.h = h;
    g.lo = lo;
    for (int i = 0; i < kMaxDim; ++i) {
        if (i >= d) {
            g.lo[i] = 0.0;
            g.n[i] = 1;
            continue;
        }
        double cells = (hi[i] - lo[i]) / h;
        long r = std::lround(cells);
        if (r < 1 || std::abs(cells - static_cast<double>(r)) > 1e-6)
            fail(ErrorKind::Resolution, "box extent is not a multiple of h");
        g.n[i] = static_cast<int>(r);
    }
    return g;
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n[i]);
    return s;
}

Index Grid::coords(std::size_t idx) const {
    Index c{0, 0, 0};
    for (int i = d - 1; i >= 0; --i) {
        c[i] = static_cast<int>(idx % static_cast<std::size_t>(n[i]));
        idx /= static_cast<std::size_t>(n[i]);
    }
    return c;
}

std::size_t Grid::index(const Index& c) const {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * static_cast<std::size_t>(n[i]) + static_cast<std::size_t>(c[i]);
    return idx;
}

bool Grid::valid(const Index& c) const {
    for (int i = 0; i < d; ++i)
        if (c[i] < 0 || c[i] >= n[i]) return false;
    return true;
}

Point Grid::point(std::size_t idx) const {
    Index c = coords(idx);
    Point x{0, 0, 0};
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (c[i] + 0.5) * h;
    return x;
}

Point Grid::hi() const {
    Point x{0, 0, 0};
    for (int i = 0; i < d; ++i) x[i] = lo[i] + n[i] * h;
    return x;
}

SampledFunction SampledFunction::blank(const Grid& g, int arity, std::string domain) {
    SampledFunction f;
    f.grid = g;
    f.arity = arity;
    f.values.assign(g.size() * static_cast<std::size_t>(arity), 0.0);
    f.present.assign(g.size(), 0);
    f.domain = std::move(domain);
    return f;
}

std::size_t SampledFunction::count_present() const {
    std::size_t c = 0;
    for (auto p : present) c += p != 0;
    return c;
}

double SampledFunction::magnitude(std::size_t i) const {
    if (arity == 1) return std::abs(values[i]);
    double s = 0.0;
    for (int c = 0; c < arity; ++c) s += at(i, c) * at(i, c);
    return std::sqrt(s);
}

SampledFunction sample_scalar(const Grid& g, const InsideFn& inside, const ScalarFn& fn, std::string domain) {
    SampledFunction f = SampledFunction::blank(g, 1, std::move(domain));
    for (std::size_t i = 0; i < g.size(); ++i) {
        Point x = g.point(i);
        if (!inside(x)) continue;
        f.present[i] = 1;
        f.values[i] = fn(x);
    }
    return f;
}

SampledFunction sample_vector(const Grid& g, const InsideFn& inside, int arity,
                              const std::function<void(const Point&, double*)>& fn, std::string domain) {
    SampledFunction f = SampledFunction::blank(g, arity, std::move(domain));
    for (std::size_t i = 0; i < g.size(); ++i) {
        Point x = g.point(i);
        if (!inside(x)) continue;
        f.present[i] = 1;
        fn(x, &f.values[i * arity]);
    }
    return f;
}

SampledFunction combine(double a, const SampledFunction& f, double b, const SampledFunction& g) {
    if (f.size() != g.size() || f.arity != g.arity) fail(ErrorKind::Degenerate, "combine: grid mismatch");
    SampledFunction r = SampledFunction::blank(f.grid, f.arity, f.domain);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f.has(i) || !g.has(i)) continue;
        r.present[i] = 1;
        for (int c = 0; c < f.arity; ++c) r.at(i, c) = a * f.at(i, c) + b * g.at(i, c);
    }
    return r;
}

SampledFunction scaled(const SampledFunction& f, double c) {
    SampledFunction r = f;
    for (auto& v : r.values) v *= c;
    return r;
}

}
