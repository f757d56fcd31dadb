#pragma once

#include "tlnum/common.hpp"
#include "tlnum/field.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tln {

// ____________________________________________________________________________
// Multiindices

using MultiIndex = std::vector<int>;

int order(const MultiIndex& a);
std::int64_t factorial(const MultiIndex& a);
bool leq(const MultiIndex& a, const MultiIndex& b);
MultiIndex unit_index(int d, int i);
double monomial(const MultiIndex& a, const Point& x);

// All multiindices over d slots with |a| == n, in lexicographic order.
std::vector<MultiIndex> indices_of_order(int d, int n);
// All multiindices over d slots with |a| <= n, ordered by degree then lexicographically.
std::vector<MultiIndex> indices_up_to(int d, int n);

// Non-decreasing vector with value j (1-based) repeated ibar[j-1] times.
std::vector<int> m_vector(const MultiIndex& ibar);

// ____________________________________________________________________________
// Faà di Bruno

inline constexpr int kMaxFaaOrder = 6;

struct FaaTerm {
    std::int64_t constant = 0;
    MultiIndex outer;               // derivative of g, over D slots
    std::vector<MultiIndex> inner;  // one derivative of f per factor, over d slots
    std::vector<int> assignment;    // 1-based component of f hit by each inner factor; equals m_vector(outer)
};

// Terms of D^kbar (g o f) for f: R^d -> R^D, g: R^D -> R. Cached per (kbar, d, D).
const std::vector<FaaTerm>& faa_terms(const MultiIndex& kbar, int d, int D);

// Derivatives of a (possibly vector-valued) function at one point.
class DerivTable {
public:
    DerivTable() = default;
    DerivTable(int nvars, int ncomp);

    void set(int comp, const MultiIndex& a, double v);
    double get(int comp, const MultiIndex& a) const;
    bool has(int comp, const MultiIndex& a) const;

    int nvars() const { return nvars_; }
    int ncomp() const { return ncomp_; }

private:
    int nvars_ = 0;
    int ncomp_ = 0;
    std::vector<std::map<MultiIndex, double>> data_;
};

// g: table of g at f(x) (nvars = D, one component); f: table at x (nvars = d, D components).
double eval_chain_derivative(const DerivTable& g, const DerivTable& f, const MultiIndex& kbar);

// ____________________________________________________________________________
// Inverse function derivatives

// One summand of D^alpha g_ij with g = (Df)^-1:
//   constant * prod (Df)^beta * prod_l D^{gamma_l} f_{mu_l} / det(Df)^det_power
struct InverseTerm {
    std::int64_t constant = 0;
    std::vector<int> beta;           // exponents over Df entries, entry (mu, a) at mu*d + a
    std::vector<int> mu;             // 1-based component for each gamma
    std::vector<MultiIndex> gamma;
    int det_power = 1;
};

std::vector<InverseTerm> inverse_derivative_expansion(const MultiIndex& alpha, int d, int i, int j);

// f: table of f at x with nvars = ncomp = d.
double eval_inverse_terms(const std::vector<InverseTerm>& terms, const DerivTable& f);

// Derivatives of f^-1 at y = f(x) up to max_order, built from the cofactor
// expansion for the first derivatives and the chain rule for the rest.
DerivTable inverse_map_derivatives(const DerivTable& f, int max_order);

// ____________________________________________________________________________
// Grid operators

inline constexpr int kMaxFdOrder = 4;

// Order-k derivative tensor field (d^k components, row-major over the index
// tuple) with second-order centered stencils. Points whose stencil leaves the
// sample support are absent. Only scalar inputs.
SampledFunction finite_diff(const SampledFunction& f, int k);

// Tensor-product centered stencil for D^a, weights include the 1/h^|a| factor.
struct FdStencil {
    std::vector<Index> offsets;
    std::vector<double> weights;
};
FdStencil fd_stencil(int d, const MultiIndex& a, double h);

// g(x + off) - g(x), offset in grid steps.
SampledFunction delta_h(const SampledFunction& g, const std::array<int, kMaxDim>& offset);

// ____________________________________________________________________________
// Map families

class MapFamily {
public:
    enum class Kind { Identity, Linear, Shear, Perturbation, Power1d, Cubic1d };

    static MapFamily identity(int d);
    static MapFamily linear(int d, std::vector<double> a);   // row-major d x d
    static MapFamily shear(double lambda);                    // (x, y + lambda x)
    static MapFamily perturbation(double a, double b);        // x_i + a sin(bx) sin(by)
    static MapFamily power1d(double c, double tau);           // x + c x |x|^tau
    static MapFamily cubic1d(double c);                       // x + c x^3

    static MapFamily from_name(const std::string& name, const std::vector<double>& params, int d);

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }
    int dim() const { return d_; }
    const std::vector<double>& params() const { return params_; }

    Point forward(const Point& x) const;
    // Row-major Jacobian, entry (i, j) = d f_i / d x_j.
    std::vector<double> jacobian(const Point& x) const;
    // D^a f_comp(x); orders up to 4 (all orders for the polynomial families).
    double derivative(int comp, const MultiIndex& a, const Point& x) const;
    DerivTable derivatives(const Point& x, int max_order) const;

    bool has_closed_inverse() const;
    // Closed form where available, Newton otherwise (tol 1e-12, 50 iterations).
    Point inverse(const Point& y) const;
    Point newton_inverse(const Point& y, const Point& seed) const;

private:
    MapFamily(Kind k, std::string name, int d, std::vector<double> p)
        : kind_(k), name_(std::move(name)), d_(d), params_(std::move(p)) {}

    Kind kind_;
    std::string name_;
    int d_;
    std::vector<double> params_;
};

struct LipschitzBounds {
    double max_grad = 0.0;       // sup |Df| (operator norm)
    double max_inv_grad = 0.0;   // sup |Df^-1| = 1 / inf sigma_min
    double min_singular = 0.0;
};

// Sampled over the present points of a grid.
LipschitzBounds lipschitz_bounds(const MapFamily& f, const SampledFunction& domain_samples);

// Operator 2-norm and smallest singular value of a d x d row-major matrix.
double matrix_norm2(const std::vector<double>& a, int d);
double matrix_min_singular(const std::vector<double>& a, int d);

}
