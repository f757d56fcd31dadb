#pragma once

#include "tlnum/calculus.hpp"
#include "tlnum/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tln {

constexpr double kBumpDilation = 1.1;
constexpr double kBumpPlateau = 0.7;  // profile equals 1 up to this scaled radius
constexpr int kMaxMomentOrder = 3;

// Tensor-product bumps on the dilated exterior cubes, normalized by their local sum.
class BumpPartition {
public:
    explicit BumpPartition(const WhitneyCovering& cov);

    // r is the sup-distance to the center over half the side: 1 up to kBumpPlateau,
    // C^3 smoothstep down to 0 at kBumpDilation.
    static double profile(double r);

    double raw(int q, const Point& x) const;
    // Exterior cubes whose dilated cube contains x, with normalized weights (sum 1).
    // Empty when x is not covered.
    std::vector<std::pair<int, double>> weights(const Point& x) const;
    // As weights(), but a gap is a coverage error naming x.
    std::vector<std::pair<int, double>> require_weights(const Point& x) const;
    double psi(int q, const Point& x) const;

    const WhitneyCovering& covering() const { return *cov_; }

private:
    const WhitneyCovering* cov_;
    std::vector<int> candidates(const Point& x) const;
};

BumpPartition build_bumps(const WhitneyCovering& cov);

struct MomentPolynomial {
    int k = 0;
    int d = 1;
    Point center{};
    double scale = 1.0;               // side of the source cube
    std::vector<MultiIndex> basis;    // monomials of order <= k, in (x - center) / scale
    std::vector<double> coef;
    double region_side = 0.0;         // side of the quadrature region actually used
    int samples = 0;

    double eval(const Point& x) const;
    double derivative(const MultiIndex& b, const Point& x) const;
};

// Discrete moment matching on the grid points of Q: for every |b| <= k the
// mean of D_h^b P equals the mean of D_h^b f, both with the centered stencils
// of finite_diff. Cubes with too few usable points are widened concentrically.
MomentPolynomial moment_projection(const SampledFunction& f, const DyadicCube& q, int k);

struct ExtensionOptions {
    // Absorb W3 cubes without a partner (counted) instead of failing.
    bool allow_dropped = false;
};

struct Extension {
    SampledFunction values;   // on the widened box
    int dropped_terms = 0;    // W3 cubes skipped for lack of a partner
    int exterior_points = 0;
};

// Grid of the domain box widened by ceil(5 l0 / h) cells on every side.
Grid extension_grid(const Domain& domain, double h, double ell0);

Extension extend_lambda0(const SampledFunction& f, const Domain& domain, const WhitneyCovering& cov,
                         const BumpPartition& bumps, const ExtensionOptions& opts = {});
Extension extend_lambdak(const SampledFunction& f, int k, const Domain& domain, const WhitneyCovering& cov,
                         const BumpPartition& bumps, const ExtensionOptions& opts = {});

// Generation cap putting the finest cube side at or below h / 8.
int extension_generations(const Domain& domain, double h);

}
