#include "tlnum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

namespace tln {

namespace {

double point_distance(const Point& a, const Point& b, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

// Farthest point of q from x.
double far_corner(const DyadicCube& q, const Point& x) {
    double acc = 0.0;
    for (int i = 0; i < q.d; ++i) {
        double e = std::abs(q.center[i] - x[i]) + 0.5 * q.side;
        acc += e * e;
    }
    return std::sqrt(acc);
}

std::vector<int> shortest_path(const WhitneyCovering& cov, int q, int s, double theta) {
    const std::size_t n = cov.cubes.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[static_cast<std::size_t>(q)] = std::pow(cov.cubes[static_cast<std::size_t>(q)].side, theta);
    heap.push({dist[static_cast<std::size_t>(q)], q});
    while (!heap.empty()) {
        auto [dv, v] = heap.top();
        heap.pop();
        if (dv > dist[static_cast<std::size_t>(v)]) continue;
        if (v == s) break;
        for (int w : cov.neighbors[static_cast<std::size_t>(v)]) {
            double nd = dv + std::pow(cov.cubes[static_cast<std::size_t>(w)].side, theta);
            if (nd < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = nd;
                prev[static_cast<std::size_t>(w)] = v;
                heap.push({nd, w});
            }
        }
    }
    if (!std::isfinite(dist[static_cast<std::size_t>(s)])) return {};
    std::vector<int> path;
    for (int v = s; v >= 0; v = prev[static_cast<std::size_t>(v)]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

void check_interior(const WhitneyCovering& cov, int q) {
    if (q < 0 || static_cast<std::size_t>(q) >= cov.cubes.size()) fail(ErrorKind::Lookup, "cube index outside the covering");
    if (!cov.is(q, W0)) fail(ErrorKind::Lookup, "chain endpoints must be interior cubes");
}

}

Chain certify_chain(const WhitneyCovering& cov, std::vector<int> cubes) {
    if (cubes.empty()) fail(ErrorKind::Lookup, "empty chain");
    Chain c;
    c.cubes = std::move(cubes);
    const std::size_t m = c.cubes.size();
    auto cube = [&](std::size_t i) -> const DyadicCube& { return cov.cubes[static_cast<std::size_t>(c.cubes[i])]; };
    for (std::size_t i = 0; i < m; ++i) c.length += cube(i).side;
    if (m == 1) {
        c.eps = c.eps_length = c.eps_growth = 2.0;
        return c;
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const auto& nb = cov.neighbors[static_cast<std::size_t>(c.cubes[i])];
        if (!std::binary_search(nb.begin(), nb.end(), c.cubes[i + 1]))
            fail(ErrorKind::Lookup, "consecutive chain cubes are not neighbors");
    }
    c.eps_length = long_distance(cube(0), cube(m - 1)) / c.length;

    std::vector<double> prefix(m), suffix(m);
    for (std::size_t i = 0; i < m; ++i) {
        double r = cube(i).side / long_distance(cube(0), cube(i));
        prefix[i] = i == 0 ? r : std::min(prefix[i - 1], r);
    }
    for (std::size_t i = m; i-- > 0;) {
        double r = cube(i).side / long_distance(cube(i), cube(m - 1));
        suffix[i] = i == m - 1 ? r : std::min(suffix[i + 1], r);
    }
    c.eps_growth = -1.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        double g = std::min(prefix[j], suffix[j]);
        if (g > c.eps_growth) {
            c.eps_growth = g;
            c.central = static_cast<int>(j);
        }
    }
    c.eps = std::min(c.eps_length, c.eps_growth);
    return c;
}

std::optional<Chain> find_chain(const WhitneyCovering& cov, int q, int s) {
    check_interior(cov, q);
    check_interior(cov, s);
    if (q == s) return certify_chain(cov, {q});
    std::optional<Chain> best;
    for (double theta : {1.0, 0.5, 0.0}) {
        auto path = shortest_path(cov, q, s, theta);
        if (path.empty()) return std::nullopt;
        Chain c = certify_chain(cov, std::move(path));
        if (!best || c.eps > best->eps) best = std::move(c);
    }
    return best;
}

CubeIndex::CubeIndex(const WhitneyCovering& cov, Family family) : cov_(&cov) {
    bucket_ = cov.root_side / (cov.dim == 1 ? 1024.0 : cov.dim == 2 ? 64.0 : 16.0);
    for (int i : cov.members(family)) {
        const DyadicCube& c = cov.cubes[static_cast<std::size_t>(i)];
        CubeKey k{0, {0, 0, 0}};
        for (int a = 0; a < cov.dim; ++a) k.idx[a] = static_cast<int>(std::floor((c.center[a] - cov.root_lo[a]) / bucket_));
        buckets_[k].push_back(i);
    }
}

std::vector<int> CubeIndex::near(const Point& x, double r) const {
    const int d = cov_->dim;
    Index lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        lo[a] = static_cast<int>(std::floor((x[a] - r - cov_->root_lo[a]) / bucket_));
        hi[a] = static_cast<int>(std::floor((x[a] + r - cov_->root_lo[a]) / bucket_));
    }
    std::vector<int> out;
    Index c = lo;
    for (;;) {
        auto it = buckets_.find({0, c});
        if (it != buckets_.end())
            for (int i : it->second)
                if (point_distance(cov_->cubes[static_cast<std::size_t>(i)].center, x, d) <= r) out.push_back(i);
        int a = 0;
        for (; a < d; ++a) {
            if (++c[a] <= hi[a]) break;
            c[a] = lo[a];
        }
        if (a == d) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool cube_in_ball(const DyadicCube& q, const Point& x, double r) { return far_corner(q, x) <= r * (1.0 + 1e-12); }

Shadow shadow_of(const WhitneyCovering& cov, const CubeIndex& index, int p, double rho) {
    Shadow sh;
    sh.anchor = p;
    sh.rho = rho;
    const DyadicCube& anchor = cov.cubes[static_cast<std::size_t>(p)];
    const double r = rho * anchor.side;
    const bool interior = cov.is(p, W0);
    for (int i : index.near(anchor.center, r))
        if (cov.is(i, W0) == interior && cube_in_ball(cov.cubes[static_cast<std::size_t>(i)], anchor.center, r))
            sh.members.push_back(i);
    return sh;
}

double shadow_rho(const WhitneyCovering& cov, const std::vector<Chain>& chains) {
    // Q1 in SH(P) for P up to the central cube; every chain cube in SH(central).
    double rho = 1.0;
    for (const Chain& c : chains) {
        const DyadicCube& first = cov.cubes[static_cast<std::size_t>(c.cubes.front())];
        const DyadicCube& central = cov.cubes[static_cast<std::size_t>(c.cubes[static_cast<std::size_t>(c.central)])];
        for (std::size_t j = 0; j < c.cubes.size(); ++j) {
            const DyadicCube& p = cov.cubes[static_cast<std::size_t>(c.cubes[j])];
            if (j <= static_cast<std::size_t>(c.central)) rho = std::max(rho, far_corner(first, p.center) / p.side);
            rho = std::max(rho, far_corner(p, central.center) / central.side);
        }
    }
    return rho;
}

ShadowSums shadow_sums(const WhitneyCovering& cov, double rho, double s) {
    CubeIndex index(cov, W0);
    const auto interior = cov.members(W0);
    std::vector<double> inverse(cov.cubes.size(), 0.0);
    ShadowSums out;
    for (int l : interior) {
        const DyadicCube& L = cov.cubes[static_cast<std::size_t>(l)];
        Shadow sh = shadow_of(cov, index, l, rho);
        double vol = 0.0;
        for (int q : sh.members) {
            const double lq = cov.cubes[static_cast<std::size_t>(q)].side;
            inverse[static_cast<std::size_t>(q)] += std::pow(L.side, -s);
            vol += std::pow(lq, cov.dim);
        }
        out.sum_volume = std::max(out.sum_volume, vol / std::pow(L.side, cov.dim));
    }
    for (int q : interior) {
        const double lq = cov.cubes[static_cast<std::size_t>(q)].side;
        out.sum_inverse = std::max(out.sum_inverse, std::pow(lq, s) * inverse[static_cast<std::size_t>(q)]);
    }
    return out;
}

CorkscrewReport check_corkscrew(const Domain& domain, const WhitneyCovering& cov, const std::vector<double>& radii,
                                const std::vector<Point>& boundary_points) {
    (void)domain;
    CubeIndex index(cov, W0);
    CorkscrewReport rep;
    rep.eps_empirical = std::numeric_limits<double>::infinity();
    for (double r : radii) rep.delta = std::max(rep.delta, r);
    for (const Point& x : boundary_points) {
        for (double r : radii) {
            ++rep.samples;
            double best = 0.0;
            for (int i : index.near(x, r)) {
                const DyadicCube& q = cov.cubes[static_cast<std::size_t>(i)];
                if (q.side > best && cube_in_ball(q, x, r)) best = q.side;
            }
            if (best == 0.0) {
                if (rep.failures++ == 0 || rep.eps_empirical > 0.0) {
                    rep.worst_point = x;
                    rep.worst_radius = r;
                }
                rep.eps_empirical = 0.0;
                continue;
            }
            if (best / r < rep.eps_empirical) {
                rep.eps_empirical = best / r;
                rep.worst_point = x;
                rep.worst_radius = r;
            }
        }
    }
    if (rep.samples == 0) rep.eps_empirical = 0.0;
    return rep;
}

std::vector<std::pair<int, int>> sample_pairs(const WhitneyCovering& cov, int n, double delta, std::uint64_t seed) {
    const auto interior = cov.members(W0);
    std::vector<std::pair<int, int>> out;
    if (interior.empty() || n <= 0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    CubeIndex index(cov, W0);
    const int uniform = n / 2;
    int attempts = 0;
    while (static_cast<int>(out.size()) < uniform && attempts++ < 100 * n) {
        int q = interior[pick(rng)], s = interior[pick(rng)];
        if (long_distance(cov.cubes[static_cast<std::size_t>(q)], cov.cubes[static_cast<std::size_t>(s)]) <= delta)
            out.emplace_back(q, s);
    }
    attempts = 0;
    while (static_cast<int>(out.size()) < n && attempts++ < 100 * n) {
        int q = interior[pick(rng)];
        const DyadicCube& Q = cov.cubes[static_cast<std::size_t>(q)];
        std::vector<int> cand;
        for (int s : index.near(Q.center, 16.0 * Q.side)) {
            const DyadicCube& S = cov.cubes[static_cast<std::size_t>(s)];
            double D = long_distance(Q, S);
            if (s != q && D <= 16.0 * Q.side && D <= delta) cand.push_back(s);
        }
        if (cand.empty()) continue;
        std::uniform_int_distribution<std::size_t> pc(0, cand.size() - 1);
        out.emplace_back(q, cand[pc(rng)]);
    }
    return out;
}

UniformityReport check_uniformity(const WhitneyCovering& cov, const std::vector<std::pair<int, int>>& pairs, double delta) {
    UniformityReport rep;
    rep.eps_empirical = std::numeric_limits<double>::infinity();
    for (auto [q, s] : pairs) {
        const double D = long_distance(cov.cubes[static_cast<std::size_t>(q)], cov.cubes[static_cast<std::size_t>(s)]);
        if (D > delta) continue;
        ++rep.pairs;
        auto chain = find_chain(cov, q, s);
        if (!chain) {
            if (rep.disconnected++ == 0) {
                rep.worst_q = q;
                rep.worst_s = s;
            }
            rep.eps_empirical = 0.0;
            continue;
        }
        if (chain->eps < rep.eps_empirical) {
            rep.eps_empirical = chain->eps;
            if (rep.disconnected == 0) {
                rep.worst_q = q;
                rep.worst_s = s;
            }
        }
        rep.chains.push_back(std::move(*chain));
    }
    if (rep.pairs == 0) rep.eps_empirical = 0.0;
    return rep;
}

}
