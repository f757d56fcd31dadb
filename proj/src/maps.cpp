#include "tlnum/calculus.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tln {

namespace {

double falling(double m, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= (m - i);
    return r;
}

Eigen::MatrixXd to_eigen(const std::vector<double>& a, int d) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a[static_cast<std::size_t>(i * d + j)];
    return m;
}

}

MapFamily MapFamily::identity(int d) {
    return MapFamily(Kind::Identity, "identity", d, {});
}

MapFamily MapFamily::linear(int d, std::vector<double> a) {
    if (static_cast<int>(a.size()) != d * d) fail(ErrorKind::Config, "linear map needs d*d entries");
    return MapFamily(Kind::Linear, "linear", d, std::move(a));
}

MapFamily MapFamily::shear(double lambda) {
    return MapFamily(Kind::Shear, "shear", 2, {lambda});
}

MapFamily MapFamily::perturbation(double a, double b) {
    return MapFamily(Kind::Perturbation, "perturbation", 2, {a, b});
}

MapFamily MapFamily::power1d(double c, double tau) {
    return MapFamily(Kind::Power1d, "power", 1, {c, tau});
}

MapFamily MapFamily::cubic1d(double c) {
    return MapFamily(Kind::Cubic1d, "cubic", 1, {c});
}

MapFamily MapFamily::from_name(const std::string& name, const std::vector<double>& p, int d) {
    auto need = [&](std::size_t n) {
        if (p.size() != n) fail(ErrorKind::Config, "map '" + name + "' expects " + std::to_string(n) + " parameters");
    };
    if (name == "identity") return identity(d);
    if (name == "linear") return linear(d, p);
    if (name == "shear") { need(1); return shear(p[0]); }
    if (name == "perturbation") { need(2); return perturbation(p[0], p[1]); }
    if (name == "power") { need(2); return power1d(p[0], p[1]); }
    if (name == "cubic") { need(1); return cubic1d(p[0]); }
    fail(ErrorKind::Config, "unknown map family '" + name + "'");
}

Point MapFamily::forward(const Point& x) const {
    Point y = x;
    switch (kind_) {
    case Kind::Identity:
        break;
    case Kind::Linear:
        for (int i = 0; i < d_; ++i) {
            y[i] = 0.0;
            for (int j = 0; j < d_; ++j) y[i] += params_[static_cast<std::size_t>(i * d_ + j)] * x[j];
        }
        break;
    case Kind::Shear:
        y[1] = x[1] + params_[0] * x[0];
        break;
    case Kind::Perturbation: {
        double s = params_[0] * std::sin(params_[1] * x[0]) * std::sin(params_[1] * x[1]);
        y[0] = x[0] + s;
        y[1] = x[1] + s;
        break;
    }
    case Kind::Power1d:
        y[0] = x[0] + params_[0] * x[0] * std::pow(std::abs(x[0]), params_[1]);
        break;
    case Kind::Cubic1d:
        y[0] = x[0] + params_[0] * x[0] * x[0] * x[0];
        break;
    }
    return y;
}

double MapFamily::derivative(int comp, const MultiIndex& a, const Point& x) const {
    const int n = order(a);
    if (n == 0) return forward(x)[comp];
    const bool first_unit = (n == 1 && a[static_cast<std::size_t>(comp)] == 1);
    switch (kind_) {
    case Kind::Identity:
        return first_unit ? 1.0 : 0.0;
    case Kind::Linear: {
        if (n > 1) return 0.0;
        int j = static_cast<int>(std::find(a.begin(), a.end(), 1) - a.begin());
        return params_[static_cast<std::size_t>(comp * d_ + j)];
    }
    case Kind::Shear:
        if (n > 1) return 0.0;
        if (first_unit) return 1.0;
        return (comp == 1 && a[0] == 1) ? params_[0] : 0.0;
    case Kind::Perturbation: {
        const double amp = params_[0], b = params_[1];
        const double half_pi = std::acos(0.0);
        double v = amp * std::pow(b, n) * std::sin(b * x[0] + a[0] * half_pi) * std::sin(b * x[1] + a[1] * half_pi);
        return v + (first_unit ? 1.0 : 0.0);
    }
    case Kind::Power1d: {
        const double c = params_[0], tau = params_[1], m = 1.0 + tau;
        const double t = x[0];
        double v;
        if (t > 0) v = c * falling(m, n) * std::pow(t, m - n);
        else if (t < 0) v = -c * ((n % 2 == 0) ? 1.0 : -1.0) * falling(m, n) * std::pow(-t, m - n);
        else v = (m - n > 0) ? 0.0 : std::numeric_limits<double>::infinity();
        return v + (n == 1 ? 1.0 : 0.0);
    }
    case Kind::Cubic1d: {
        const double c = params_[0], t = x[0];
        switch (n) {
        case 1: return 1.0 + 3.0 * c * t * t;
        case 2: return 6.0 * c * t;
        case 3: return 6.0 * c;
        default: return 0.0;
        }
    }
    }
    return 0.0;
}

std::vector<double> MapFamily::jacobian(const Point& x) const {
    std::vector<double> j(static_cast<std::size_t>(d_ * d_));
    for (int r = 0; r < d_; ++r)
        for (int c = 0; c < d_; ++c) j[static_cast<std::size_t>(r * d_ + c)] = derivative(r, unit_index(d_, c), x);
    return j;
}

DerivTable MapFamily::derivatives(const Point& x, int max_order) const {
    DerivTable t(d_, d_);
    for (const auto& a : indices_up_to(d_, max_order))
        for (int c = 0; c < d_; ++c) t.set(c, a, derivative(c, a, x));
    return t;
}

bool MapFamily::has_closed_inverse() const {
    return kind_ == Kind::Identity || kind_ == Kind::Linear || kind_ == Kind::Shear;
}

Point MapFamily::inverse(const Point& y) const {
    switch (kind_) {
    case Kind::Identity:
        return y;
    case Kind::Shear: {
        Point x = y;
        x[1] = y[1] - params_[0] * y[0];
        return x;
    }
    case Kind::Linear: {
        Eigen::VectorXd b(d_);
        for (int i = 0; i < d_; ++i) b(i) = y[i];
        Eigen::VectorXd s = to_eigen(params_, d_).fullPivLu().solve(b);
        Point x = y;
        for (int i = 0; i < d_; ++i) x[i] = s(i);
        return x;
    }
    default:
        return newton_inverse(y, y);
    }
}

Point MapFamily::newton_inverse(const Point& y, const Point& seed) const {
    Point x = seed;
    const double tol = 1e-12;
    for (int it = 0; it < 50; ++it) {
        Point fx = forward(x);
        Eigen::VectorXd r(d_);
        double rn = 0.0;
        for (int i = 0; i < d_; ++i) {
            r(i) = fx[i] - y[i];
            rn = std::max(rn, std::abs(r(i)));
        }
        double scale = 1.0;
        for (int i = 0; i < d_; ++i) scale = std::max(scale, std::abs(y[i]));
        if (rn <= tol * scale) return x;
        Eigen::VectorXd step = to_eigen(jacobian(x), d_).fullPivLu().solve(r);
        for (int i = 0; i < d_; ++i) x[i] -= step(i);
        for (int i = 0; i < d_; ++i)
            if (!std::isfinite(x[i])) fail(ErrorKind::Convergence, "Newton inversion produced a non-finite iterate");
    }
    fail(ErrorKind::Convergence, "Newton inversion did not converge in 50 iterations");
}

double matrix_norm2(const std::vector<double>& a, int d) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a, d));
    return svd.singularValues()(0);
}

double matrix_min_singular(const std::vector<double>& a, int d) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a, d));
    return svd.singularValues()(d - 1);
}

LipschitzBounds lipschitz_bounds(const MapFamily& f, const SampledFunction& s) {
    LipschitzBounds b;
    b.min_singular = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.has(i)) continue;
        auto j = f.jacobian(s.grid.point(i));
        b.max_grad = std::max(b.max_grad, matrix_norm2(j, f.dim()));
        b.min_singular = std::min(b.min_singular, matrix_min_singular(j, f.dim()));
    }
    if (!std::isfinite(b.min_singular) || b.min_singular <= 0.0)
        fail(ErrorKind::BiLipschitz, "map '" + f.name() + "' is not bi-Lipschitz on the sample set");
    b.max_inv_grad = 1.0 / b.min_singular;
    return b;
}

}
