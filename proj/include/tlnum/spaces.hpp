#pragma once

#include "tlnum/calculus.hpp"
#include "tlnum/field.hpp"

#include <cstdint>
#include <limits>
#include <string>

namespace tln {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// s = k + sigma; q and u may be kInfinity.
struct NormSpec {
    double s = 0.5;
    double p = 2.0;
    double q = 2.0;
    double u = 2.0;
    double rho = 1.0;

    int k() const;
    double sigma() const;
    // Throws a spec error when an index is out of range for dimension d.
    void validate(int d) const;
    std::string describe() const;
};

double lp_norm(const SampledFunction& f, double p);
// Sum over orders j <= k of || |grad^j f| ||_p.
double wkp_norm(const SampledFunction& f, int k, double p);
double holder_seminorm(const SampledFunction& f, double s, std::uint64_t seed = 1);

struct TlOptions {
    // Upper bound on ball samples per (x, t); larger balls are visited on a
    // stride-aligned sublattice. Zero picks 4096 in 1D, 1024 otherwise.
    int ball_budget = 0;
};

// Number of dyadic t-levels usable at this resolution.
int tl_levels(double h, double rho);
double tl_seminorm(const SampledFunction& gradk, const NormSpec& spec, const TlOptions& opts = {});

struct TlValue {
    double total = 0.0;
    double wkp = 0.0;
    double seminorm = 0.0;
};

TlValue tl_norm(const SampledFunction& f, const NormSpec& spec, const TlOptions& opts = {});

// g o f sampled on `grid` at the points where `inside` holds, by multilinear
// interpolation of g. Points whose interpolation stencil is incomplete are absent.
SampledFunction resample_through_map(const SampledFunction& g, const MapFamily& f, const Grid& grid,
                                     const InsideFn& inside, std::string domain);

}
