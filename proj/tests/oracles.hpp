#pragma once

// Independent reference implementations used only by the tests.

#include "tlnum/calculus.hpp"
#include "tlnum/field.hpp"

#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using tln::MultiIndex;

// Truncated multivariate Taylor polynomial (forward-mode jet).
class Jet {
public:
    Jet(int nvars, int degree) : n_(nvars), deg_(degree) {}

    static Jet constant(int nvars, int degree, double c) {
        Jet j(nvars, degree);
        j.c_[MultiIndex(static_cast<std::size_t>(nvars), 0)] = c;
        return j;
    }
    static Jet variable(int nvars, int degree, int i, double at) {
        Jet j = constant(nvars, degree, at);
        if (degree >= 1) j.c_[tln::unit_index(nvars, i)] = 1.0;
        return j;
    }

    double coeff(const MultiIndex& a) const {
        auto it = c_.find(a);
        return it == c_.end() ? 0.0 : it->second;
    }
    // D^a of the represented function at the expansion point.
    double derivative(const MultiIndex& a) const {
        return coeff(a) * static_cast<double>(tln::factorial(a));
    }
    double value() const { return coeff(MultiIndex(static_cast<std::size_t>(n_), 0)); }

    Jet operator+(const Jet& o) const {
        Jet r = *this;
        for (const auto& [a, v] : o.c_) r.c_[a] += v;
        return r;
    }
    Jet operator-(const Jet& o) const {
        Jet r = *this;
        for (const auto& [a, v] : o.c_) r.c_[a] -= v;
        return r;
    }
    Jet operator*(double s) const {
        Jet r = *this;
        for (auto& [a, v] : r.c_) v *= s;
        return r;
    }
    Jet operator*(const Jet& o) const {
        Jet r(n_, deg_);
        for (const auto& [a, va] : c_)
            for (const auto& [b, vb] : o.c_) {
                if (tln::order(a) + tln::order(b) > deg_) continue;
                MultiIndex s = a;
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += b[i];
                r.c_[s] += va * vb;
            }
        return r;
    }

    // x^r for a jet with positive constant term.
    Jet pow(double r) const {
        const double a0 = value();
        Jet delta = *this - constant(n_, deg_, a0);
        Jet result = constant(n_, deg_, std::pow(a0, r));
        Jet term = constant(n_, deg_, 1.0);
        double fall = 1.0, fact = 1.0;
        for (int k = 1; k <= deg_; ++k) {
            term = term * delta;
            fall *= (r - (k - 1));
            fact *= k;
            result = result + term * (fall * std::pow(a0, r - k) / fact);
        }
        return result;
    }

    int nvars() const { return n_; }
    int degree() const { return deg_; }

private:
    int n_;
    int deg_;
    std::map<MultiIndex, double> c_;
};

inline Jet cbrt(const Jet& x) {
    if (x.value() >= 0) return x.pow(1.0 / 3.0);
    return (x * -1.0).pow(1.0 / 3.0) * -1.0;
}

// Dense polynomial in nvars variables with total degree <= degree.
struct Poly {
    int nvars = 1;
    std::map<MultiIndex, double> coeff;

    static Poly random(int nvars, int degree, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Poly p;
        p.nvars = nvars;
        for (const auto& a : tln::indices_up_to(nvars, degree)) p.coeff[a] = u(rng);
        return p;
    }

    double operator()(const tln::Point& x) const {
        double s = 0.0;
        for (const auto& [a, c] : coeff) s += c * tln::monomial(a, x);
        return s;
    }

    Jet operator()(const std::vector<Jet>& x) const {
        const int deg = x[0].degree();
        const int nv = x[0].nvars();
        Jet s(nv, deg);
        for (const auto& [a, c] : coeff) {
            Jet m = Jet::constant(nv, deg, c);
            for (int i = 0; i < nvars; ++i)
                for (int k = 0; k < a[static_cast<std::size_t>(i)]; ++k) m = m * x[static_cast<std::size_t>(i)];
            s = s + m;
        }
        return s;
    }
};

inline std::vector<Jet> seed_variables(const std::vector<double>& at, int degree) {
    std::vector<Jet> v;
    for (std::size_t i = 0; i < at.size(); ++i)
        v.push_back(Jet::variable(static_cast<int>(at.size()), degree, static_cast<int>(i), at[i]));
    return v;
}

// Nested-loop evaluation of the same dyadic-level seminorm, scalar 1D, finite p, q, u.
inline double brute_seminorm_1d(const tln::ScalarFn& fn, double h, double sigma, double p, double q, double u, double rho) {
    const int n = static_cast<int>(std::lround(1.0 / h));
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = fn(tln::Point{(i + 0.5) * h, 0, 0});
    double outer = 0.0;
    for (int i = 0; i < n; ++i) {
        double inner = 0.0;
        for (double t = rho; t >= 4 * h; t /= 2) {
            double sum = 0.0;
            int count = 0;
            for (int j = 0; j < n; ++j) {
                if (std::abs(i - j) * h > t * (1 + 1e-12)) continue;
                sum += std::pow(std::abs(v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)]), u);
                ++count;
            }
            inner += std::log(2.0) * std::pow(t, -sigma * q) * std::pow(sum / count, q / u);
        }
        outer += std::pow(inner, p / q) * h;
    }
    return std::pow(outer, 1.0 / p);
}

}
