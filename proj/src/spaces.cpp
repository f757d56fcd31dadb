#include "tlnum/spaces.hpp"
#include "tlnum/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tln {

int NormSpec::k() const { return static_cast<int>(std::floor(s)); }

double NormSpec::sigma() const { return s - std::floor(s); }

void NormSpec::validate(int d) const {
    auto bad = [&](const std::string& why) { fail(ErrorKind::Spec, "invalid norm spec (" + describe() + "): " + why); };
    if (!(s > 0) || !std::isfinite(s)) bad("s must be positive");
    if (std::abs(s - std::round(s)) < 1e-12) bad("s must not be an integer");
    if (!(p >= 1) || !std::isfinite(p)) bad("p must lie in [1, inf)");
    if (!(q >= 1)) bad("q must lie in [1, inf]");
    if (!(u >= 1)) bad("u must lie in [1, inf]");
    if (!(rho > 0) || rho > 1) bad("rho must lie in (0, 1]");
    const double du = std::isinf(u) ? 0.0 : d / u;
    if (!(sigma() > d / std::min(p, q) - du)) bad("sigma must exceed d/min(p,q) - d/u");
    if (k() > kMaxFdOrder) fail(ErrorKind::Capability, "smoothness above " + std::to_string(kMaxFdOrder + 1) + " is not supported");
}

std::string NormSpec::describe() const {
    std::ostringstream o;
    o << "s=" << s << " p=" << p << " q=" << q << " u=" << u << " rho=" << rho;
    return o.str();
}

double lp_norm(const SampledFunction& f, double p) {
    if (!(p >= 1)) fail(ErrorKind::Spec, "p must lie in [1, inf]");
    if (f.count_present() == 0) fail(ErrorKind::Degenerate, "L^p norm of an empty sample set");
    const std::size_t n = f.size();
    if (std::isinf(p)) return parallel_max(n, [&](std::size_t i) { return f.has(i) ? f.magnitude(i) : 0.0; });
    const double cell = std::pow(f.grid.h, f.grid.d);
    double acc = parallel_sum(n, [&](std::size_t i) {
        if (!f.has(i)) return 0.0;
        double m = f.magnitude(i);
        return p == 1.0 ? m : p == 2.0 ? m * m : std::pow(m, p);
    });
    return std::pow(acc * cell, 1.0 / p);
}

double wkp_norm(const SampledFunction& f, int k, double p) {
    if (k < 0) fail(ErrorKind::Spec, "negative derivative order");
    double total = 0.0;
    for (int j = 0; j <= k; ++j) total += lp_norm(finite_diff(f, j), p);
    return total;
}

namespace {

double point_gap(const SampledFunction& g, std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (int c = 0; c < g.arity; ++c) {
        double e = g.at(a, c) - g.at(b, c);
        acc += e * e;
    }
    return acc;
}

double distance2(const Point& x, const Point& y, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
    return acc;
}

}

double holder_seminorm(const SampledFunction& f, double s, std::uint64_t seed) {
    if (!(s > 0) || std::abs(s - std::round(s)) < 1e-12) fail(ErrorKind::Spec, "Hölder index must be positive and non-integer");
    const int k = static_cast<int>(std::floor(s));
    const double sigma = s - k;
    SampledFunction g = finite_diff(f, k);
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.has(i)) pts.push_back(i);
    if (pts.size() < 2) fail(ErrorKind::Degenerate, "Hölder seminorm needs at least two samples");
    const int d = g.grid.d;
    auto ratio = [&](std::size_t a, std::size_t b) {
        double r2 = distance2(g.grid.point(a), g.grid.point(b), d);
        if (r2 == 0.0) return 0.0;
        return std::sqrt(point_gap(g, a, b)) / std::pow(r2, 0.5 * sigma);
    };
    const std::size_t n = pts.size();
    if (n < 10000)
        return parallel_max(n, [&](std::size_t i) {
            double best = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, ratio(pts[i], pts[j]));
            return best;
        }, 16);

    // Seeded uniform pairs plus every dyadic axis offset.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    double best = 0.0;
    for (int t = 0; t < 1000000; ++t) best = std::max(best, ratio(pts[pick(rng)], pts[pick(rng)]));
    const Grid& gr = g.grid;
    best = std::max(best, parallel_max(n, [&](std::size_t i) {
        double b = 0.0;
        Index c = gr.coords(pts[i]);
        for (int a = 0; a < d; ++a)
            for (int off = 1; off < gr.n[a]; off *= 2) {
                Index e = c;
                e[a] += off;
                if (!gr.valid(e)) break;
                std::size_t j = gr.index(e);
                if (g.has(j)) b = std::max(b, ratio(pts[i], j));
            }
        return b;
    }));
    return best;
}

int tl_levels(double h, double rho) {
    int m = 0;
    while (rho * std::ldexp(1.0, -m) >= 4.0 * h * (1.0 - 1e-12)) ++m;
    return m;
}

double tl_seminorm(const SampledFunction& gradk, const NormSpec& spec, const TlOptions& opts) {
    const Grid& g = gradk.grid;
    const int d = g.d;
    spec.validate(d);
    const int levels = tl_levels(g.h, spec.rho);
    if (levels < 2)
        fail(ErrorKind::Resolution, "grid spacing " + std::to_string(g.h) + " leaves fewer than two t-levels below rho = " +
                                        std::to_string(spec.rho));
    if (gradk.count_present() == 0) fail(ErrorKind::Degenerate, "seminorm of an empty sample set");
    const int budget = opts.ball_budget > 0 ? opts.ball_budget : (d == 1 ? 4096 : 1024);

    // Per level: lattice offsets inside the ball, on a stride chosen to respect the budget.
    struct Level {
        double t;
        std::vector<std::array<int, kMaxDim>> offsets;
        std::vector<std::ptrdiff_t> flat;
    };
    std::array<std::ptrdiff_t, kMaxDim> stride{0, 0, 0};
    {
        Index z{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            Index e = z;
            e[a] = 1;
            stride[a] = static_cast<std::ptrdiff_t>(g.index(e)) - static_cast<std::ptrdiff_t>(g.index(z));
        }
    }
    std::vector<Level> lv;
    for (int m = 0; m < levels; ++m) {
        Level L;
        L.t = spec.rho * std::ldexp(1.0, -m);
        const int r = static_cast<int>(std::floor(L.t / g.h + 1e-9));
        const double full = std::pow(2.0 * r + 1.0, d);
        int step = 1;
        while (full / std::pow(step, d) > budget) ++step;
        const int rs = r / step;
        Index o{0, 0, 0};
        for (int a = 0; a < d; ++a) o[a] = -rs;
        for (;;) {
            double len2 = 0.0;
            for (int a = 0; a < d; ++a) len2 += static_cast<double>(o[a]) * o[a] * step * step;
            if (len2 * g.h * g.h <= L.t * L.t * (1.0 + 1e-12)) {
                std::array<int, kMaxDim> off{0, 0, 0};
                std::ptrdiff_t fl = 0;
                for (int a = 0; a < d; ++a) {
                    off[a] = o[a] * step;
                    fl += off[a] * stride[a];
                }
                L.offsets.push_back(off);
                L.flat.push_back(fl);
            }
            int a = 0;
            for (; a < d; ++a) {
                if (++o[a] <= rs) break;
                o[a] = -rs;
            }
            if (a == d) break;
        }
        lv.push_back(std::move(L));
    }

    const double sigma = spec.sigma();
    const double p = spec.p, q = spec.q, u = spec.u;
    const bool qinf = std::isinf(q), uinf = std::isinf(u);
    const double ln2 = std::log(2.0);
    const std::size_t n = g.size();
    const int arity = gradk.arity;

    double acc = parallel_sum(n, [&](std::size_t x) {
        if (!gradk.has(x)) return 0.0;
        const Index c = g.coords(x);
        double inner = 0.0;
        for (const Level& L : lv) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = 0; j < L.offsets.size(); ++j) {
                bool ok = true;
                for (int a = 0; a < d && ok; ++a) {
                    int v = c[a] + L.offsets[j][a];
                    ok = v >= 0 && v < g.n[a];
                }
                if (!ok) continue;
                const std::size_t y = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + L.flat[j]);
                if (!gradk.present[y]) continue;
                ++count;
                double sq = 0.0;
                for (int cc = 0; cc < arity; ++cc) {
                    double e = gradk.values[x * arity + cc] - gradk.values[y * arity + cc];
                    sq += e * e;
                }
                if (uinf) sum = std::max(sum, sq);
                else if (u == 2.0) sum += sq;
                else if (u == 1.0) sum += std::sqrt(sq);
                else sum += std::pow(sq, 0.5 * u);
            }
            // Average of |G(x) - G(y)|^u, then to the power 1/u.
            double mean = uinf ? std::sqrt(sum) : std::pow(sum / static_cast<double>(count), 1.0 / u);
            if (qinf) inner = std::max(inner, mean / std::pow(L.t, sigma));
            else inner += ln2 * std::pow(mean / std::pow(L.t, sigma), q);
        }
        return qinf ? std::pow(inner, p) : std::pow(inner, p / q);
    }, 64);
    return std::pow(acc * std::pow(g.h, d), 1.0 / p);
}

TlValue tl_norm(const SampledFunction& f, const NormSpec& spec, const TlOptions& opts) {
    spec.validate(f.grid.d);
    TlValue v;
    v.wkp = wkp_norm(f, spec.k(), spec.p);
    v.seminorm = tl_seminorm(finite_diff(f, spec.k()), spec, opts);
    v.total = v.wkp + v.seminorm;
    return v;
}

SampledFunction resample_through_map(const SampledFunction& g, const MapFamily& f, const Grid& grid,
                                     const InsideFn& inside, std::string domain) {
    if (f.dim() != g.grid.d || grid.d != g.grid.d) fail(ErrorKind::Config, "map, grid and sample dimensions differ");
    const int d = grid.d;
    const Grid& src = g.grid;
    SampledFunction out = SampledFunction::blank(grid, g.arity, std::move(domain));
    std::size_t filled = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.point(i);
        if (!inside(x)) continue;
        const Point y = f.forward(x);
        // Lower corner of the interpolation cell and fractional weights.
        Index base{0, 0, 0};
        double w[kMaxDim] = {0, 0, 0};
        for (int a = 0; a < d; ++a) {
            double r = (y[a] - src.lo[a]) / src.h - 0.5;
            double fl = std::floor(r);
            base[a] = static_cast<int>(fl);
            w[a] = r - fl;
            if (w[a] > 1.0 - 1e-12) {
                base[a] += 1;
                w[a] = 0.0;
            } else if (w[a] < 1e-12) {
                w[a] = 0.0;
            }
        }
        bool ok = true;
        std::vector<double> val(static_cast<std::size_t>(g.arity), 0.0);
        for (int corner = 0; corner < (1 << d) && ok; ++corner) {
            double weight = 1.0;
            Index c = base;
            for (int a = 0; a < d; ++a) {
                bool up = (corner >> a) & 1;
                weight *= up ? w[a] : 1.0 - w[a];
                c[a] += up ? 1 : 0;
            }
            if (weight == 0.0) continue;
            if (!src.valid(c) || !g.has(src.index(c))) {
                ok = false;
                break;
            }
            const std::size_t j = src.index(c);
            for (int cc = 0; cc < g.arity; ++cc) val[static_cast<std::size_t>(cc)] += weight * g.at(j, cc);
        }
        if (!ok) continue;
        out.present[i] = 1;
        for (int cc = 0; cc < g.arity; ++cc) out.at(i, cc) = val[static_cast<std::size_t>(cc)];
        ++filled;
    }
    if (filled == 0) fail(ErrorKind::Coverage, "no grid point has complete interpolation support");
    return out;
}

}
