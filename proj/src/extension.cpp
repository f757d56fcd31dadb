#include "tlnum/extension.hpp"
#include "tlnum/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace tln {

// ____________________________________________________________________________
// Bumps

BumpPartition::BumpPartition(const WhitneyCovering& cov) : cov_(&cov) {}

double BumpPartition::profile(double r) {
    if (r <= kBumpPlateau) return 1.0;
    if (r >= kBumpDilation) return 0.0;
    // C^3 septic smoothstep.
    double u = (kBumpDilation - r) / (kBumpDilation - kBumpPlateau);
    return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

double BumpPartition::raw(int q, const Point& x) const {
    const DyadicCube& c = cov_->cubes[static_cast<std::size_t>(q)];
    double v = 1.0;
    for (int a = 0; a < c.d && v > 0.0; ++a) v *= profile(std::abs(x[a] - c.center[a]) / (0.5 * c.side));
    return v;
}

std::vector<int> BumpPartition::candidates(const Point& x) const {
    const int d = cov_->dim;
    std::vector<int> out;
    for (int g = 1; g <= cov_->max_gen; ++g) {
        const double side = cov_->root_side * std::ldexp(1.0, -g);
        Index base{0, 0, 0};
        for (int a = 0; a < d; ++a) base[a] = static_cast<int>(std::floor((x[a] - cov_->root_lo[a]) / side));
        Index off{-1, -1, -1};
        for (;;) {
            Index c = base;
            for (int a = 0; a < d; ++a) c[a] += off[a];
            int i = cov_->find(g, c);
            if (i >= 0 && cov_->is(i, W2)) out.push_back(i);
            int a = 0;
            for (; a < d; ++a) {
                if (++off[a] <= 1) break;
                off[a] = -1;
            }
            if (a == d) break;
        }
    }
    return out;
}

std::vector<std::pair<int, double>> BumpPartition::weights(const Point& x) const {
    std::vector<std::pair<int, double>> out;
    double total = 0.0;
    for (int q : candidates(x)) {
        double v = raw(q, x);
        if (v > 0.0) {
            out.emplace_back(q, v);
            total += v;
        }
    }
    for (auto& [q, v] : out) v /= total;
    return out;
}

std::vector<std::pair<int, double>> BumpPartition::require_weights(const Point& x) const {
    auto w = weights(x);
    if (w.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "no dilated exterior cube covers (%.6g, %.6g, %.6g)", x[0], x[1], x[2]);
        fail(ErrorKind::Coverage, buf);
    }
    return w;
}

double BumpPartition::psi(int q, const Point& x) const {
    for (auto [c, v] : weights(x))
        if (c == q) return v;
    return 0.0;
}

BumpPartition build_bumps(const WhitneyCovering& cov) {
    if (cov.members(W2).empty()) fail(ErrorKind::Coverage, "covering has no exterior cubes");
    return BumpPartition(cov);
}

// ____________________________________________________________________________
// Moment projection

double MomentPolynomial::eval(const Point& x) const {
    Point z{};
    for (int a = 0; a < d; ++a) z[a] = (x[a] - center[a]) / scale;
    double v = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) v += coef[i] * monomial(basis[i], z);
    return v;
}

double MomentPolynomial::derivative(const MultiIndex& b, const Point& x) const {
    Point z{};
    for (int a = 0; a < d; ++a) z[a] = (x[a] - center[a]) / scale;
    double v = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double term = coef[i];
        MultiIndex e = basis[i];
        for (int a = 0; a < d && term != 0.0; ++a)
            for (int r = 0; r < b[static_cast<std::size_t>(a)]; ++r) term *= e[static_cast<std::size_t>(a)]--;
        if (term != 0.0) v += term * monomial(e, z);
    }
    return v / std::pow(scale, order(b));
}

MomentPolynomial moment_projection(const SampledFunction& f, const DyadicCube& q, int k) {
    if (k < 0 || k > kMaxMomentOrder) fail(ErrorKind::Capability, "moment projection supports k <= 3");
    if (f.arity != 1) fail(ErrorKind::Degenerate, "moment projection expects a scalar field");
    const Grid& g = f.grid;
    const int d = g.d;
    MomentPolynomial P;
    P.k = k;
    P.d = d;
    P.center = q.center;
    P.scale = q.side;
    P.basis = indices_up_to(d, k);
    const std::size_t n = P.basis.size();

    std::vector<FdStencil> stencils;
    for (const auto& b : P.basis) stencils.push_back(fd_stencil(d, b, g.h));
    std::set<Index> taps;
    for (const auto& s : stencils) taps.insert(s.offsets.begin(), s.offsets.end());

    std::size_t need = 1;
    for (int a = 0; a < d; ++a) need *= static_cast<std::size_t>(k + 2);
    const double widened = (k + 2.5) * g.h;
    const double cap = std::max(q.side, 8.0 * widened);

    auto usable = [&](const Index& c) {
        for (const Index& o : taps) {
            Index e = c;
            for (int a = 0; a < d; ++a) e[a] += o[a];
            if (!g.valid(e) || !f.has(g.index(e))) return false;
        }
        return true;
    };

    std::vector<Index> pts;
    double side = q.side;
    for (;;) {
        pts.clear();
        Index lo{0, 0, 0}, hi{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            lo[a] = std::max(0, static_cast<int>(std::ceil((q.center[a] - 0.5 * side - g.lo[a]) / g.h - 0.5 - 1e-9)));
            hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((q.center[a] + 0.5 * side - g.lo[a]) / g.h - 0.5 + 1e-9)));
        }
        bool empty = false;
        for (int a = 0; a < d; ++a) empty = empty || lo[a] > hi[a];
        if (!empty) {
            Index c = lo;
            for (;;) {
                if (usable(c)) pts.push_back(c);
                int a = 0;
                for (; a < d; ++a) {
                    if (++c[a] <= hi[a]) break;
                    c[a] = lo[a];
                }
                if (a == d) break;
            }
        }
        if (pts.size() >= need) break;
        side = side < widened ? widened : 1.5 * side;
        if (side > cap * (1.0 + 1e-12)) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "cube gen=%d idx=(%d,%d) has %zu usable samples, %zu needed", q.gen, q.idx[0],
                          q.idx[1], pts.size(), need);
            fail(ErrorKind::Resolution, buf);
        }
    }
    P.region_side = side;
    P.samples = static_cast<int>(pts.size());

    // Rows scaled by l^|b| so every entry is O(1). High-order stencils cancel by
    // ~1/h^|b|, so the sums run in long double.
    std::vector<long double> acc_a(n * n, 0.0L), acc_r(n, 0.0L);
    for (const Index& c : pts) {
        for (std::size_t r = 0; r < n; ++r) {
            const FdStencil& s = stencils[r];
            const long double rs = std::pow(static_cast<long double>(q.side), order(P.basis[r]));
            for (std::size_t t = 0; t < s.offsets.size(); ++t) {
                Index e = c;
                for (int a = 0; a < d; ++a) e[a] += s.offsets[t][a];
                const std::size_t j = g.index(e);
                const Point y = g.point(j);
                std::array<long double, kMaxDim> z{};
                for (int a = 0; a < d; ++a) z[a] = (static_cast<long double>(y[a]) - q.center[a]) / q.side;
                const long double w = s.weights[t] * rs;
                acc_r[r] += w * f.at(j);
                for (std::size_t col = 0; col < n; ++col) {
                    long double m = 1.0L;
                    for (int a = 0; a < d; ++a)
                        for (int p = 0; p < P.basis[col][static_cast<std::size_t>(a)]; ++p) m *= z[a];
                    acc_a[r * n + col] += w * m;
                }
            }
        }
    }
    const long double npts = static_cast<long double>(pts.size());
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        rhs(static_cast<Eigen::Index>(r)) = static_cast<double>(acc_r[r] / npts);
        for (std::size_t col = 0; col < n; ++col)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = static_cast<double>(acc_a[r * n + col] / npts);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-13 * sv(0))) fail(ErrorKind::Conditioning, "moment system is singular for this sample mask");
    Eigen::VectorXd x = A.fullPivLu().solve(rhs);
    P.coef.assign(x.data(), x.data() + x.size());
    return P;
}

// ____________________________________________________________________________
// Extension operators

Grid extension_grid(const Domain& domain, double h, double ell0) {
    const int m = static_cast<int>(std::ceil(5.0 * ell0 / h - 1e-9));
    Point lo = domain.lo(), hi = domain.hi();
    for (int a = 0; a < domain.dim(); ++a) {
        lo[a] -= m * h;
        hi[a] += m * h;
    }
    return Grid::over_box(domain.dim(), lo, hi, h);
}

int extension_generations(const Domain& domain, double h) {
    double side = 0.0;
    for (int a = 0; a < domain.dim(); ++a) side = std::max(side, domain.hi()[a] - domain.lo()[a]);
    return static_cast<int>(std::ceil(std::log2(2.0 * side * 8.0 / h) - 1e-9));
}

namespace {

Extension extend_impl(const SampledFunction& f, int k, const Domain& domain, const WhitneyCovering& cov,
                      const BumpPartition& bumps, const ExtensionOptions& opts) {
    if (&bumps.covering() != &cov) fail(ErrorKind::Config, "bumps were built on a different covering");
    if (f.grid.d != cov.dim) fail(ErrorKind::Config, "function and covering dimensions differ");
    const Grid out_grid = extension_grid(domain, f.grid.h, cov.ell0);
    const int d = out_grid.d;
    Index shift{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        double s = (f.grid.lo[a] - out_grid.lo[a]) / f.grid.h;
        shift[a] = static_cast<int>(std::lround(s));
        if (std::abs(s - shift[a]) > 1e-6) fail(ErrorKind::Config, "function grid is not aligned with the domain box");
    }

    Extension ext;
    ext.values = SampledFunction::blank(out_grid, 1, domain.name() + "+collar");
    const std::size_t N = out_grid.size();
    std::vector<std::vector<std::pair<int, double>>> w(N);
    const double reach = 5.0 * cov.ell0;
    parallel_chunks(N, 512, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Index c = out_grid.coords(i);
            for (int a = 0; a < d; ++a) c[a] -= shift[a];
            if (f.grid.valid(c) && f.has(f.grid.index(c))) {
                ext.values.present[i] = 1;
                ext.values.at(i) = f.at(f.grid.index(c));
                continue;
            }
            const Point x = out_grid.point(i);
            if (domain.contains(x) || domain.boundary_distance(x) > reach) continue;
            w[i] = bumps.weights(x);
        }
    });

    // Partners actually needed.
    std::map<int, std::size_t> slot;
    std::set<int> missing;
    for (const auto& list : w)
        for (auto [q, v] : list) {
            if (!cov.is(q, W3)) continue;
            int s = cov.partner[static_cast<std::size_t>(q)];
            if (s < 0) missing.insert(q);
            else slot.emplace(s, 0);
        }
    if (!missing.empty() && !opts.allow_dropped) {
        const DyadicCube& c = cov.cubes[static_cast<std::size_t>(*missing.begin())];
        char buf[128];
        std::snprintf(buf, sizeof(buf), "exterior cube gen=%d idx=(%d,%d) has no symmetrized partner", c.gen, c.idx[0], c.idx[1]);
        fail(ErrorKind::Covering, buf);
    }
    ext.dropped_terms = static_cast<int>(missing.size());
    std::vector<int> partners;
    for (auto& [s, idx] : slot) {
        idx = partners.size();
        partners.push_back(s);
    }
    std::vector<MomentPolynomial> poly(partners.size());
    parallel_chunks(partners.size(), 16, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) poly[i] = moment_projection(f, cov.cubes[static_cast<std::size_t>(partners[i])], k);
    });

    for (std::size_t i = 0; i < N; ++i) {
        if (w[i].empty()) continue;
        const Point x = out_grid.point(i);
        double v = 0.0;
        for (auto [q, psi] : w[i]) {
            if (!cov.is(q, W3)) continue;
            int s = cov.partner[static_cast<std::size_t>(q)];
            if (s < 0) continue;
            const MomentPolynomial& P = poly[slot.at(s)];
            v += psi * (k == 0 ? P.coef[0] : P.eval(x));
        }
        ext.values.present[i] = 1;
        ext.values.at(i) = v;
        ++ext.exterior_points;
    }
    return ext;
}

}

Extension extend_lambda0(const SampledFunction& f, const Domain& domain, const WhitneyCovering& cov,
                         const BumpPartition& bumps, const ExtensionOptions& opts) {
    return extend_impl(f, 0, domain, cov, bumps, opts);
}

Extension extend_lambdak(const SampledFunction& f, int k, const Domain& domain, const WhitneyCovering& cov,
                         const BumpPartition& bumps, const ExtensionOptions& opts) {
    if (k < 0 || k > kMaxMomentOrder) fail(ErrorKind::Capability, "extension order must lie in 0..3");
    return extend_impl(f, k, domain, cov, bumps, opts);
}

}
