#include "tlnum/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <tuple>

namespace tln {

int order(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

std::int64_t factorial(const MultiIndex& a) {
    std::int64_t r = 1;
    for (int v : a)
        for (int i = 2; i <= v; ++i) r *= i;
    return r;
}

bool leq(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

MultiIndex unit_index(int d, int i) {
    MultiIndex e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(i)] = 1;
    return e;
}

double monomial(const MultiIndex& a, const Point& x) {
    double r = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < a[i]; ++k) r *= x[i];
    return r;
}

static void fill_order(int d, int pos, int left, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == d - 1) {
        cur[static_cast<std::size_t>(pos)] = left;
        out.push_back(cur);
        return;
    }
    for (int v = left; v >= 0; --v) {
        cur[static_cast<std::size_t>(pos)] = v;
        fill_order(d, pos + 1, left - v, cur, out);
    }
}

std::vector<MultiIndex> indices_of_order(int d, int n) {
    std::vector<MultiIndex> out;
    if (d <= 0 || n < 0) return out;
    MultiIndex cur(static_cast<std::size_t>(d), 0);
    fill_order(d, 0, n, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MultiIndex> indices_up_to(int d, int n) {
    std::vector<MultiIndex> out;
    for (int k = 0; k <= n; ++k) {
        auto layer = indices_of_order(d, k);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

std::vector<int> m_vector(const MultiIndex& ibar) {
    std::vector<int> m;
    for (std::size_t j = 0; j < ibar.size(); ++j)
        for (int c = 0; c < ibar[j]; ++c) m.push_back(static_cast<int>(j) + 1);
    return m;
}

// ____________________________________________________________________________

namespace {

using Factor = std::pair<int, MultiIndex>;  // 0-based component, derivative
using FaaKey = std::pair<MultiIndex, std::vector<Factor>>;

std::map<FaaKey, std::int64_t> faa_differentiate(const std::map<FaaKey, std::int64_t>& in, int d, int D, int axis) {
    std::map<FaaKey, std::int64_t> out;
    auto add = [&](MultiIndex outer, std::vector<Factor> factors, std::int64_t c) {
        std::sort(factors.begin(), factors.end());
        out[{std::move(outer), std::move(factors)}] += c;
    };
    for (const auto& [key, c] : in) {
        const auto& [outer, factors] = key;
        for (int j = 0; j < D; ++j) {
            MultiIndex o = outer;
            ++o[static_cast<std::size_t>(j)];
            auto f = factors;
            f.emplace_back(j, unit_index(d, axis));
            add(std::move(o), std::move(f), c);
        }
        for (std::size_t k = 0; k < factors.size(); ++k) {
            auto f = factors;
            ++f[k].second[static_cast<std::size_t>(axis)];
            add(outer, std::move(f), c);
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second == 0) it = out.erase(it);
        else ++it;
    }
    return out;
}

std::vector<FaaTerm> generate_faa(const MultiIndex& kbar, int d, int D) {
    std::map<FaaKey, std::int64_t> terms;
    terms[{MultiIndex(static_cast<std::size_t>(D), 0), {}}] = 1;
    for (int axis = 0; axis < d; ++axis)
        for (int r = 0; r < kbar[static_cast<std::size_t>(axis)]; ++r) terms = faa_differentiate(terms, d, D, axis);
    std::vector<FaaTerm> out;
    out.reserve(terms.size());
    for (const auto& [key, c] : terms) {
        FaaTerm t;
        t.constant = c;
        t.outer = key.first;
        for (const auto& [comp, a] : key.second) {
            t.inner.push_back(a);
            t.assignment.push_back(comp + 1);
        }
        out.push_back(std::move(t));
    }
    return out;
}

struct FaaCache {
    std::shared_mutex mu;
    std::map<std::tuple<MultiIndex, int, int>, std::unique_ptr<std::vector<FaaTerm>>> table;
};

FaaCache& faa_cache() {
    static FaaCache c;
    return c;
}

}

const std::vector<FaaTerm>& faa_terms(const MultiIndex& kbar, int d, int D) {
    if (d < 1 || D < 1 || static_cast<int>(kbar.size()) != d)
        fail(ErrorKind::Degenerate, "faa_terms: multiindex arity does not match d");
    for (int v : kbar)
        if (v < 0) fail(ErrorKind::Degenerate, "faa_terms: negative multiindex entry");
    if (order(kbar) > kMaxFaaOrder)
        fail(ErrorKind::Capability, "faa_terms: order " + std::to_string(order(kbar)) + " exceeds " +
                                        std::to_string(kMaxFaaOrder));
    auto key = std::make_tuple(kbar, d, D);
    auto& cache = faa_cache();
    {
        std::shared_lock lk(cache.mu);
        auto it = cache.table.find(key);
        if (it != cache.table.end()) return *it->second;
    }
    auto terms = std::make_unique<std::vector<FaaTerm>>(generate_faa(kbar, d, D));
    std::unique_lock lk(cache.mu);
    auto [it, inserted] = cache.table.emplace(key, std::move(terms));
    return *it->second;
}

DerivTable::DerivTable(int nvars, int ncomp)
    : nvars_(nvars), ncomp_(ncomp), data_(static_cast<std::size_t>(ncomp)) {}

void DerivTable::set(int comp, const MultiIndex& a, double v) {
    if (comp < 0 || comp >= ncomp_ || static_cast<int>(a.size()) != nvars_)
        fail(ErrorKind::Lookup, "DerivTable::set out of range");
    data_[static_cast<std::size_t>(comp)][a] = v;
}

bool DerivTable::has(int comp, const MultiIndex& a) const {
    if (comp < 0 || comp >= ncomp_) return false;
    return data_[static_cast<std::size_t>(comp)].count(a) != 0;
}

double DerivTable::get(int comp, const MultiIndex& a) const {
    if (comp < 0 || comp >= ncomp_) fail(ErrorKind::IncompleteInput, "missing component " + std::to_string(comp));
    const auto& m = data_[static_cast<std::size_t>(comp)];
    auto it = m.find(a);
    if (it == m.end())
        fail(ErrorKind::IncompleteInput,
             "missing derivative of order " + std::to_string(order(a)) + " for component " + std::to_string(comp));
    return it->second;
}

double eval_chain_derivative(const DerivTable& g, const DerivTable& f, const MultiIndex& kbar) {
    const int d = f.nvars();
    const int D = f.ncomp();
    if (g.nvars() != D) fail(ErrorKind::Degenerate, "eval_chain_derivative: g must take D arguments");
    double total = 0.0;
    for (const auto& t : faa_terms(kbar, d, D)) {
        double v = static_cast<double>(t.constant) * g.get(0, t.outer);
        for (std::size_t l = 0; l < t.inner.size(); ++l) v *= f.get(t.assignment[l] - 1, t.inner[l]);
        total += v;
    }
    return total;
}

// ____________________________________________________________________________
// Cofactor expansion of (Df)^-1 and its derivatives

namespace {

struct Poly {
    // monomials in derivatives of f: sorted factor list -> coefficient
    std::map<std::vector<Factor>, std::int64_t> terms;

    void add(std::vector<Factor> f, std::int64_t c) {
        if (c == 0) return;
        std::sort(f.begin(), f.end());
        auto& v = terms[std::move(f)];
        v += c;
    }
    void prune() {
        for (auto it = terms.begin(); it != terms.end();) {
            if (it->second == 0) it = terms.erase(it);
            else ++it;
        }
    }
};

int perm_sign(const std::vector<int>& p) {
    int s = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

// det of the matrix with rows `rows` and columns `cols` of A, A(a, b) = d_b f_a.
Poly minor_det(int d, const std::vector<int>& rows, const std::vector<int>& cols) {
    Poly p;
    std::vector<int> perm(cols.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<Factor> f;
        for (std::size_t r = 0; r < rows.size(); ++r) f.emplace_back(rows[r], unit_index(d, cols[static_cast<std::size_t>(perm[r])]));
        p.add(std::move(f), perm_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return p;
}

Poly poly_derivative(const Poly& p, int axis) {
    Poly out;
    for (const auto& [factors, c] : p.terms)
        for (std::size_t k = 0; k < factors.size(); ++k) {
            auto f = factors;
            ++f[k].second[static_cast<std::size_t>(axis)];
            out.add(std::move(f), c);
        }
    out.prune();
    return out;
}

Poly poly_product(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [fa, ca] : a.terms)
        for (const auto& [fb, cb] : b.terms) {
            auto f = fa;
            f.insert(f.end(), fb.begin(), fb.end());
            out.add(std::move(f), ca * cb);
        }
    out.prune();
    return out;
}

Poly poly_scale(const Poly& a, std::int64_t c) {
    Poly out;
    for (const auto& [f, v] : a.terms) out.add(f, v * c);
    out.prune();
    return out;
}

Poly poly_sum(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [f, v] : b.terms) out.add(f, v);
    out.prune();
    return out;
}

}

std::vector<InverseTerm> inverse_derivative_expansion(const MultiIndex& alpha, int d, int i, int j) {
    if (d < 1 || d > kMaxDim) fail(ErrorKind::Capability, "inverse expansion: unsupported dimension " + std::to_string(d));
    if (static_cast<int>(alpha.size()) != d) fail(ErrorKind::Degenerate, "inverse expansion: multiindex arity");
    if (i < 0 || i >= d || j < 0 || j >= d) fail(ErrorKind::Lookup, "inverse expansion: entry out of range");
    if (order(alpha) + 1 > kMaxFaaOrder) fail(ErrorKind::Capability, "inverse expansion: order too high");

    std::vector<int> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), 0);
    const Poly det = minor_det(d, all, all);

    // adj(A)_{ij} = (-1)^{i+j} det(A without row j and column i)
    std::vector<int> rows, cols;
    for (int r = 0; r < d; ++r)
        if (r != j) rows.push_back(r);
    for (int c = 0; c < d; ++c)
        if (c != i) cols.push_back(c);
    Poly num;
    if (d == 1) num.add({}, 1);
    else num = poly_scale(minor_det(d, rows, cols), ((i + j) % 2 == 0) ? 1 : -1);

    int k = 1;
    for (int axis = 0; axis < d; ++axis)
        for (int r = 0; r < alpha[static_cast<std::size_t>(axis)]; ++r) {
            // d(N / det^k) = (dN * det - k N d(det)) / det^{k+1}
            Poly a = poly_product(poly_derivative(num, axis), det);
            Poly b = poly_scale(poly_product(num, poly_derivative(det, axis)), -k);
            num = poly_sum(a, b);
            ++k;
        }

    std::vector<InverseTerm> out;
    const int nbeta = (d - 1) * k;
    for (const auto& [factors, c] : num.terms) {
        InverseTerm t;
        t.constant = c;
        t.det_power = k;
        t.beta.assign(static_cast<std::size_t>(d * d), 0);
        int taken = 0;
        for (const auto& [comp, g] : factors) {
            if (order(g) == 1 && taken < nbeta) {
                int col = static_cast<int>(std::find(g.begin(), g.end(), 1) - g.begin());
                ++t.beta[static_cast<std::size_t>(comp * d + col)];
                ++taken;
            } else {
                t.mu.push_back(comp + 1);
                t.gamma.push_back(g);
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

static double jacobian_det(const DerivTable& f) {
    const int d = f.nvars();
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    double det = 0.0;
    do {
        double v = perm_sign(perm);
        for (int r = 0; r < d; ++r) v *= f.get(r, unit_index(d, perm[static_cast<std::size_t>(r)]));
        det += v;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

double eval_inverse_terms(const std::vector<InverseTerm>& terms, const DerivTable& f) {
    const int d = f.nvars();
    if (f.ncomp() != d) fail(ErrorKind::Degenerate, "eval_inverse_terms: f must map R^d to R^d");
    const double det = jacobian_det(f);
    if (det == 0.0) fail(ErrorKind::BiLipschitz, "singular Jacobian");
    double total = 0.0;
    for (const auto& t : terms) {
        double v = static_cast<double>(t.constant);
        for (int e = 0; e < d * d; ++e)
            for (int p = 0; p < t.beta[static_cast<std::size_t>(e)]; ++p) v *= f.get(e / d, unit_index(d, e % d));
        for (std::size_t l = 0; l < t.gamma.size(); ++l) v *= f.get(t.mu[l] - 1, t.gamma[l]);
        total += v / std::pow(det, t.det_power);
    }
    return total;
}

DerivTable inverse_map_derivatives(const DerivTable& f, int max_order) {
    const int d = f.nvars();
    if (f.ncomp() != d) fail(ErrorKind::Degenerate, "inverse_map_derivatives: f must map R^d to R^d");
    if (max_order < 1 || max_order > kMaxFaaOrder)
        fail(ErrorKind::Capability, "inverse_map_derivatives: order out of range");

    // Derivatives of g_ij = ((Df)^-1)_ij as functions of x, up to order max_order - 1.
    std::vector<DerivTable> g(static_cast<std::size_t>(d * d), DerivTable(d, 1));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (const auto& a : indices_up_to(d, max_order - 1))
                g[static_cast<std::size_t>(i * d + j)].set(0, a, eval_inverse_terms(inverse_derivative_expansion(a, d, i, j), f));

    DerivTable inv(d, d);
    for (int n = 1; n <= max_order; ++n)
        for (const auto& kappa : indices_of_order(d, n))
            for (int i = 0; i < d; ++i) {
                int j = 0;
                while (kappa[static_cast<std::size_t>(j)] == 0) ++j;
                MultiIndex rest = kappa;
                --rest[static_cast<std::size_t>(j)];
                const DerivTable& gij = g[static_cast<std::size_t>(i * d + j)];
                double v = (n == 1) ? gij.get(0, rest) : eval_chain_derivative(gij, inv, rest);
                inv.set(i, kappa, v);
            }
    return inv;
}

}
