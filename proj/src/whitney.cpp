#include "tlnum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace tln {

Point DyadicCube::lo() const {
    Point p{};
    for (int i = 0; i < d; ++i) p[i] = center[i] - 0.5 * side;
    return p;
}

Point DyadicCube::hi() const {
    Point p{};
    for (int i = 0; i < d; ++i) p[i] = center[i] + 0.5 * side;
    return p;
}

double box_distance(const DyadicCube& q, const DyadicCube& s) {
    double acc = 0.0;
    for (int i = 0; i < q.d; ++i) {
        double gap = std::abs(q.center[i] - s.center[i]) - 0.5 * (q.side + s.side);
        if (gap > 0) acc += gap * gap;
    }
    return std::sqrt(acc);
}

double long_distance(const DyadicCube& q, const DyadicCube& s) {
    return q.side + s.side + box_distance(q, s);
}

bool touching(const DyadicCube& q, const DyadicCube& s) {
    // Exact on the common dyadic lattice.
    const int g = std::max(q.gen, s.gen);
    for (int i = 0; i < q.d; ++i) {
        std::int64_t qlo = static_cast<std::int64_t>(q.idx[i]) << (g - q.gen);
        std::int64_t qhi = static_cast<std::int64_t>(q.idx[i] + 1) << (g - q.gen);
        std::int64_t slo = static_cast<std::int64_t>(s.idx[i]) << (g - s.gen);
        std::int64_t shi = static_cast<std::int64_t>(s.idx[i] + 1) << (g - s.gen);
        if (qlo > shi || slo > qhi) return false;
    }
    return true;
}

DyadicCube WhitneyCovering::make_cube(int gen, const Index& idx) const {
    DyadicCube c;
    c.gen = gen;
    c.idx = idx;
    c.d = dim;
    c.side = root_side * std::ldexp(1.0, -gen);
    for (int i = 0; i < dim; ++i) c.center[i] = root_lo[i] + (idx[i] + 0.5) * c.side;
    return c;
}

int WhitneyCovering::find(int gen, const Index& idx) const {
    auto it = lookup_.find({gen, idx});
    return it == lookup_.end() ? -1 : it->second;
}

void WhitneyCovering::rebuild_lookup() {
    lookup_.clear();
    for (std::size_t i = 0; i < cubes.size(); ++i) lookup_[{cubes[i].gen, cubes[i].idx}] = static_cast<int>(i);
}

std::vector<int> WhitneyCovering::members(Family f) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < cubes.size(); ++i)
        if (flags[i] & f) out.push_back(static_cast<int>(i));
    return out;
}

std::string WhitneyCovering::hash() const {
    // FNV-1a over generation, lattice coordinates, and family flags.
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](std::int64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= static_cast<std::uint64_t>((v >> (8 * b)) & 0xff);
            h *= 0x100000001b3ull;
        }
    };
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        mix(cubes[i].gen);
        for (int k = 0; k < dim; ++k) mix(cubes[i].idx[k]);
        mix(flags[i]);
        mix(partner[i]);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double boundary_long_distance(const Domain& domain, const DyadicCube& q) {
    double dist = 0.0;
    domain.classify_box(q.lo(), q.hi(), dist);
    return q.side + dist;
}

namespace {

void link_neighbors(WhitneyCovering& cov) {
    const int d = cov.dim;
    cov.neighbors.assign(cov.cubes.size(), {});
    for (std::size_t a = 0; a < cov.cubes.size(); ++a) {
        const DyadicCube& q = cov.cubes[a];
        const bool interior = cov.flags[a] & W0;
        for (int g = std::max(0, q.gen - 3); g <= std::min(cov.max_gen, q.gen + 3); ++g) {
            // Lattice range at generation g that can touch q.
            Index lo{0, 0, 0}, hi{0, 0, 0};
            for (int i = 0; i < d; ++i) {
                if (g >= q.gen) {
                    lo[i] = (q.idx[i] << (g - q.gen)) - 1;
                    hi[i] = ((q.idx[i] + 1) << (g - q.gen));
                } else {
                    lo[i] = (q.idx[i] >> (q.gen - g)) - 1;
                    hi[i] = (q.idx[i] >> (q.gen - g)) + 1;
                }
            }
            Index c = lo;
            for (;;) {
                bool boundary_cell = g <= q.gen;
                for (int i = 0; i < d && !boundary_cell; ++i) boundary_cell = c[i] == lo[i] || c[i] == hi[i];
                if (boundary_cell) {
                    int b = cov.find(g, c);
                    if (b >= 0 && static_cast<std::size_t>(b) != a && ((cov.flags[static_cast<std::size_t>(b)] & W0) != 0) == interior &&
                        touching(q, cov.cubes[static_cast<std::size_t>(b)]))
                        cov.neighbors[a].push_back(b);
                }
                int i = 0;
                for (; i < d; ++i) {
                    if (++c[i] <= hi[i]) break;
                    c[i] = lo[i];
                }
                if (i == d) break;
            }
        }
        std::sort(cov.neighbors[a].begin(), cov.neighbors[a].end());
    }
}

void assign_partners(WhitneyCovering& cov) {
    cov.partner.assign(cov.cubes.size(), -1);
    cov.dropped = 0;
    // W1 cubes bucketed per generation in blocks of 64 lattice cells (D <= 50 l keeps offsets below 50 cells).
    const int block = 64;
    std::unordered_map<CubeKey, std::vector<int>, CubeKeyHash> buckets;
    auto bucket_of = [&](const DyadicCube& c) {
        CubeKey k{c.gen, {0, 0, 0}};
        for (int i = 0; i < cov.dim; ++i) k.idx[i] = static_cast<int>(std::floor(static_cast<double>(c.idx[i]) / block));
        return k;
    };
    for (std::size_t i = 0; i < cov.cubes.size(); ++i)
        if (cov.flags[i] & W1) buckets[bucket_of(cov.cubes[i])].push_back(static_cast<int>(i));

    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        if (!(cov.flags[i] & W3)) continue;
        const DyadicCube& q = cov.cubes[i];
        CubeKey center = bucket_of(q);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        Index off{-1, -1, -1};
        for (;;) {
            CubeKey k = center;
            for (int a = 0; a < cov.dim; ++a) k.idx[a] += off[a];
            auto it = buckets.find(k);
            if (it != buckets.end())
                for (int s : it->second) {
                    const DyadicCube& c = cov.cubes[static_cast<std::size_t>(s)];
                    double dd = long_distance(q, c);
                    if (dd > cov.sym_c * q.side) continue;
                    if (dd < best_d || (dd == best_d && c.idx < cov.cubes[static_cast<std::size_t>(best)].idx)) {
                        best = s;
                        best_d = dd;
                    }
                }
            int a = 0;
            for (; a < cov.dim; ++a) {
                if (++off[a] <= 1) break;
                off[a] = -1;
            }
            if (a == cov.dim) break;
        }
        cov.partner[i] = best;
        if (best < 0) ++cov.dropped;
    }
}

}

WhitneyCovering build_whitney(const Domain& domain, double cw, int max_gen, const WhitneyOptions& opts) {
    if (!(cw > 0)) fail(ErrorKind::InfeasibleConstant, "Whitney constant must be positive");
    if (max_gen < 1 || max_gen > 24) fail(ErrorKind::Capability, "max_generation must lie in 1..24");
    const int d = domain.dim();
    if (!(domain.measure() > 0)) fail(ErrorKind::InvalidDomain, "domain '" + domain.name() + "' has empty interior");

    WhitneyCovering cov;
    cov.dim = d;
    cov.cw = cw;
    cov.max_gen = max_gen;
    cov.domain = domain.name();
    cov.delta = domain.diameter();
    cov.ell0 = opts.ell0 > 0 ? opts.ell0 : cov.delta / 100.0;
    cov.c0 = opts.c0;
    cov.sym_c = opts.sym_c;
    // Root box: the domain box widened by half its side on every face.
    double side = 0.0;
    for (int i = 0; i < d; ++i) side = std::max(side, domain.hi()[i] - domain.lo()[i]);
    cov.root_side = 2.0 * side;
    for (int i = 0; i < d; ++i) cov.root_lo[i] = domain.lo()[i] - 0.5 * side;

    struct Pending {
        int gen;
        Index idx;
    };
    std::vector<Pending> stack{{0, {0, 0, 0}}};
    double interior_volume = 0.0;
    while (!stack.empty()) {
        Pending p = stack.back();
        stack.pop_back();
        DyadicCube c = cov.make_cube(p.gen, p.idx);
        double dist = 0.0;
        BoxClass cls = domain.classify_box(c.lo(), c.hi(), dist);
        const bool admissible = cls != BoxClass::Straddle && dist > 0.0 && c.side + dist >= cw * c.side;
        const bool wanted = cls == BoxClass::Inside || opts.exterior;
        if (admissible && p.gen > 0) {
            if (wanted) {
                cov.cubes.push_back(c);
                cov.flags.push_back(cls == BoxClass::Inside ? W0 : W2);
                if (cls == BoxClass::Inside) interior_volume += std::pow(c.side, d);
            }
            continue;
        }
        if (cls == BoxClass::Outside && !opts.exterior) continue;
        if (p.gen >= max_gen) continue;
        const int nchild = 1 << d;
        for (int m = nchild - 1; m >= 0; --m) {
            Index ci{0, 0, 0};
            for (int i = 0; i < d; ++i) ci[i] = 2 * p.idx[i] + ((m >> i) & 1);
            stack.push_back({p.gen + 1, ci});
        }
    }

    // Deterministic order: generation, then lattice coordinates.
    std::vector<std::size_t> order(cov.cubes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = cov.cubes[a];
        const auto& y = cov.cubes[b];
        if (x.gen != y.gen) return x.gen < y.gen;
        return x.idx < y.idx;
    });
    std::vector<DyadicCube> cubes;
    std::vector<std::uint8_t> flags;
    for (auto i : order) {
        cubes.push_back(cov.cubes[i]);
        flags.push_back(cov.flags[i]);
    }
    cov.cubes = std::move(cubes);
    cov.flags = std::move(flags);
    cov.uncovered_measure = std::max(0.0, domain.measure() - interior_volume);

    bool any_interior = false;
    for (auto f : cov.flags) any_interior = any_interior || (f & W0);
    if (!any_interior)
        fail(ErrorKind::InfeasibleConstant, "no interior cube satisfies C_W = " + std::to_string(cw) +
                                                " above generation " + std::to_string(max_gen));

    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        const DyadicCube& q = cov.cubes[i];
        double D = boundary_long_distance(domain, q);
        if (D < cw * q.side || D > 4.0 * cw * q.side) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "cube gen=%d idx=(%d,%d) violates C_W l <= D <= 4 C_W l (D/l = %.4f)", q.gen,
                          q.idx[0], q.idx[1], D / q.side);
            fail(ErrorKind::InfeasibleConstant, buf);
        }
    }

    cov.rebuild_lookup();
    link_neighbors(cov);
    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        const double l = cov.cubes[i].side;
        if ((cov.flags[i] & W0) && l <= cov.c0 * cov.ell0) cov.flags[i] |= W1;
        if ((cov.flags[i] & W2) && l < 10.0 * cov.ell0) cov.flags[i] |= W3;
    }
    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        if (!(cov.flags[i] & W3)) continue;
        bool all = true;
        for (int n : cov.neighbors[i]) all = all && (cov.flags[static_cast<std::size_t>(n)] & W3);
        if (all) cov.flags[i] |= W4;
    }
    assign_partners(cov);
    return cov;
}

}
