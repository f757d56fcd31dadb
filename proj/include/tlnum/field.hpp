#pragma once

#include "tlnum/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tln {

using Index = std::array<int, kMaxDim>;

// Cell-centered uniform grid: point i sits at lo + (i + 1/2) h along each axis.
struct Grid {
    int d = 1;
    Point lo{};
    double h = 0.0;
    Index n{1, 1, 1};

    // Grid over the box [lo, hi]; the extent must be an integer multiple of h.
    static Grid over_box(int d, const Point& lo, const Point& hi, double h);

    std::size_t size() const;
    Point point(std::size_t idx) const;
    Index coords(std::size_t idx) const;
    std::size_t index(const Index& c) const;
    bool valid(const Index& c) const;
    Point hi() const;
};

struct SampledFunction {
    Grid grid;
    int arity = 1;
    std::vector<double> values;         // size() * arity, row-major by point
    std::vector<std::uint8_t> present;  // size()
    std::string domain;

    static SampledFunction blank(const Grid& g, int arity, std::string domain);

    std::size_t size() const { return present.size(); }
    bool has(std::size_t i) const { return present[i] != 0; }
    double at(std::size_t i, int c = 0) const { return values[i * arity + c]; }
    double& at(std::size_t i, int c = 0) { return values[i * arity + c]; }
    std::size_t count_present() const;
    // Euclidean magnitude of the value vector at i.
    double magnitude(std::size_t i) const;
};

using ScalarFn = std::function<double(const Point&)>;
using InsideFn = std::function<bool(const Point&)>;

SampledFunction sample_scalar(const Grid& g, const InsideFn& inside, const ScalarFn& fn, std::string domain);
SampledFunction sample_vector(const Grid& g, const InsideFn& inside, int arity,
                              const std::function<void(const Point&, double*)>& fn, std::string domain);

// Pointwise linear combination a f + b g over the common support.
SampledFunction combine(double a, const SampledFunction& f, double b, const SampledFunction& g);
SampledFunction scaled(const SampledFunction& f, double c);

}
