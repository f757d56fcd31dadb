#include "tlnum/calculus.hpp"

#include <cmath>
#include <map>

namespace tln {

namespace {

struct Tap {
    int offset;
    double weight;
};

// Second-order centered stencil for the a-th derivative, weights without the 1/h^a factor.
const std::vector<Tap>& centered(int a) {
    static const std::vector<std::vector<Tap>> table = {
        {{0, 1.0}},
        {{-1, -0.5}, {1, 0.5}},
        {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
        {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
        {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
    };
    return table[static_cast<std::size_t>(a)];
}

}

FdStencil fd_stencil(int d, const MultiIndex& a, double h) {
    FdStencil s;
    s.offsets.push_back({0, 0, 0});
    s.weights.push_back(1.0);
    for (int axis = 0; axis < d; ++axis) {
        const auto& taps = centered(a[static_cast<std::size_t>(axis)]);
        FdStencil next;
        for (std::size_t i = 0; i < s.offsets.size(); ++i)
            for (const auto& t : taps) {
                Index o = s.offsets[i];
                o[axis] += t.offset;
                next.offsets.push_back(o);
                next.weights.push_back(s.weights[i] * t.weight / std::pow(h, a[static_cast<std::size_t>(axis)]));
            }
        s = std::move(next);
    }
    return s;
}

SampledFunction finite_diff(const SampledFunction& f, int k) {
    if (f.arity != 1) fail(ErrorKind::Degenerate, "finite_diff expects a scalar field");
    if (k < 0 || k > kMaxFdOrder) fail(ErrorKind::Capability, "finite_diff supports orders 0.." + std::to_string(kMaxFdOrder));
    if (k == 0) return f;
    const Grid& g = f.grid;
    const int d = g.d;

    int ncomp = 1;
    for (int i = 0; i < k; ++i) ncomp *= d;

    // Component tuple -> multiindex; one stencil per distinct multiindex.
    std::vector<MultiIndex> comp_index(static_cast<std::size_t>(ncomp));
    std::map<MultiIndex, FdStencil> stencils;
    for (int c = 0; c < ncomp; ++c) {
        MultiIndex a(static_cast<std::size_t>(d), 0);
        int rem = c;
        for (int i = 0; i < k; ++i) {
            ++a[static_cast<std::size_t>(rem % d)];
            rem /= d;
        }
        comp_index[static_cast<std::size_t>(c)] = a;
        if (!stencils.count(a)) stencils.emplace(a, fd_stencil(d, a, g.h));
    }

    SampledFunction out = SampledFunction::blank(g, ncomp, f.domain);
    std::size_t count = 0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!f.has(idx)) continue;
        const Index c0 = g.coords(idx);
        std::map<MultiIndex, double> vals;
        bool ok = true;
        for (const auto& [a, st] : stencils) {
            double acc = 0.0;
            for (std::size_t t = 0; t < st.offsets.size() && ok; ++t) {
                Index c = c0;
                for (int i = 0; i < d; ++i) c[i] += st.offsets[t][i];
                if (!g.valid(c)) { ok = false; break; }
                std::size_t j = g.index(c);
                if (!f.has(j)) { ok = false; break; }
                acc += st.weights[t] * f.at(j);
            }
            if (!ok) break;
            vals[a] = acc;
        }
        if (!ok) continue;
        out.present[idx] = 1;
        ++count;
        for (int c = 0; c < ncomp; ++c) out.at(idx, c) = vals[comp_index[static_cast<std::size_t>(c)]];
    }
    if (count == 0) fail(ErrorKind::Resolution, "finite_diff: no grid point has a full order-" + std::to_string(k) + " stencil");
    return out;
}

SampledFunction delta_h(const SampledFunction& g, const Index& offset) {
    const Grid& grid = g.grid;
    SampledFunction out = SampledFunction::blank(grid, g.arity, g.domain);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        if (!g.has(idx)) continue;
        Index c = grid.coords(idx);
        for (int i = 0; i < grid.d; ++i) c[i] += offset[i];
        if (!grid.valid(c)) continue;
        std::size_t j = grid.index(c);
        if (!g.has(j)) continue;
        out.present[idx] = 1;
        for (int a = 0; a < g.arity; ++a) out.at(idx, a) = g.at(j, a) - g.at(idx, a);
    }
    return out;
}

}
