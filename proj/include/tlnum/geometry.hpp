#pragma once

#include "tlnum/common.hpp"
#include "tlnum/field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tln {

class MapFamily;

// ____________________________________________________________________________
// Domains

struct Segment {
    Point a{}, b{};
};

enum class BoxClass { Inside, Outside, Straddle };

class Domain {
public:
    static Domain interval(double a = 0.0, double b = 1.0);
    static Domain square();
    static Domain lshape();                    // unit square minus [1/2,1) x [1/2,1)
    static Domain disc(int sides = 64);        // inscribed polygon of the disc at (1/2,1/2), radius 1/2
    static Domain slit_square(double depth = 0.5);  // unit square minus {1/2} x (0, depth]
    // Closed polygonal loops (even-odd rule) plus two-sided slit segments.
    static Domain polygon(std::string name, std::vector<std::vector<Point>> loops, std::vector<Segment> slits);
    // Signed distance samples, positive inside.
    static Domain from_sdf(std::string name, const SampledFunction& sdf);
    // Built-in by name, or an sdf file path.
    static Domain by_name(const std::string& name);
    // f(base) for a bi-Lipschitz map, boundary edges subdivided `refine` times before mapping.
    static Domain image(const Domain& base, const MapFamily& f, int refine = 64);

    int dim() const { return d_; }
    const std::string& name() const { return name_; }
    const Point& lo() const { return lo_; }
    const Point& hi() const { return hi_; }

    bool contains(const Point& x) const;
    double boundary_distance(const Point& x) const;
    // Classifies a closed box against the open set; dist is the box-to-boundary distance
    // (zero when the box meets the boundary).
    BoxClass classify_box(const Point& lo, const Point& hi, double& dist) const;

    double diameter() const;
    double measure() const;
    // Points on the boundary with roughly the given spacing.
    std::vector<Point> boundary_samples(double spacing) const;

    Grid grid(double h) const { return Grid::over_box(d_, lo_, hi_, h); }
    InsideFn inside_fn() const;

private:
    enum class Kind { Points1d, Polygon, Sdf };
    Kind kind_ = Kind::Polygon;
    std::string name_;
    int d_ = 2;
    Point lo_{}, hi_{};
    std::vector<double> points1d_;  // boundary points, sorted
    std::vector<std::vector<Point>> loops_;
    std::vector<Segment> segments_;  // all boundary segments (loop edges and slits)
    std::size_t n_loop_segments_ = 0;
    std::vector<double> sdf_values_;
    Grid sdf_grid_;

    double sdf_at(const Point& x) const;
};

// ____________________________________________________________________________
// Dyadic cubes

struct DyadicCube {
    int gen = 0;
    Index idx{0, 0, 0};
    double side = 0.0;
    Point center{};
    int d = 2;

    Point lo() const;
    Point hi() const;
};

double box_distance(const DyadicCube& q, const DyadicCube& s);
double long_distance(const DyadicCube& q, const DyadicCube& s);
// Two cubes' closures intersect.
bool touching(const DyadicCube& q, const DyadicCube& s);

enum Family : std::uint8_t {
    W0 = 1,   // interior
    W1 = 2,   // interior, side <= c0 * l0
    W2 = 4,   // exterior
    W3 = 8,   // exterior, side < 10 * l0
    W4 = 16,  // W3 with every neighbor in W3
};

struct WhitneyOptions {
    double ell0 = -1.0;   // <= 0 selects diameter / 100
    double c0 = 10.0;
    double sym_c = 50.0;
    bool exterior = true;
};

struct CubeKey {
    int gen;
    Index idx;
    bool operator==(const CubeKey& o) const { return gen == o.gen && idx == o.idx; }
};

struct CubeKeyHash {
    std::size_t operator()(const CubeKey& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.gen) * 0x9E3779B97F4A7C15ull;
        for (int v : k.idx) h = (h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v))) * 0x100000001B3ull;
        return static_cast<std::size_t>(h);
    }
};

class WhitneyCovering {
public:
    int dim = 2;
    Point root_lo{};
    double root_side = 1.0;
    double cw = 3.0;
    int max_gen = 0;
    double delta = 1.0;
    double ell0 = 0.01;
    double c0 = 10.0;
    double sym_c = 50.0;
    std::string domain;

    std::vector<DyadicCube> cubes;
    std::vector<std::uint8_t> flags;
    std::vector<int> partner;                  // symmetrized cube for W3 members, -1 otherwise
    std::vector<std::vector<int>> neighbors;   // same-side adjacency
    double uncovered_measure = 0.0;            // |Omega| minus the interior cube volume
    int dropped = 0;                           // W3 cubes without a partner

    bool is(int i, Family f) const { return (flags[static_cast<std::size_t>(i)] & f) != 0; }
    int find(int gen, const Index& idx) const;
    DyadicCube make_cube(int gen, const Index& idx) const;
    std::vector<int> members(Family f) const;
    // Hex digest of the cube list and families.
    std::string hash() const;

    void rebuild_lookup();

private:
    std::unordered_map<CubeKey, int, CubeKeyHash> lookup_;
};

WhitneyCovering build_whitney(const Domain& domain, double cw, int max_gen, const WhitneyOptions& opts = {});

// Cube D(Q, boundary) for the sandwich check: side + distance to the boundary.
double boundary_long_distance(const Domain& domain, const DyadicCube& q);

// ____________________________________________________________________________
// Chains, shadows, and the empirical domain constants

struct Chain {
    std::vector<int> cubes;
    int central = 0;           // position of the central cube in `cubes`
    double eps = 0.0;          // min of the two components below
    double eps_length = 0.0;
    double eps_growth = 0.0;
    double length = 0.0;
};

std::optional<Chain> find_chain(const WhitneyCovering& cov, int q, int s);
// Certifies a given chain (consecutive cubes must be neighbors).
Chain certify_chain(const WhitneyCovering& cov, std::vector<int> cubes);

// Center-bucketed lookup over one family of cubes.
class CubeIndex {
public:
    CubeIndex(const WhitneyCovering& cov, Family family);
    // Cubes of the family whose center lies within r of x.
    std::vector<int> near(const Point& x, double r) const;

private:
    const WhitneyCovering* cov_;
    double bucket_;
    std::unordered_map<CubeKey, std::vector<int>, CubeKeyHash> buckets_;
};

struct Shadow {
    int anchor = -1;
    double rho = 1.0;
    std::vector<int> members;
};

// Cubes on the anchor's side of the boundary contained in B(x_P, rho l(P)).
Shadow shadow_of(const WhitneyCovering& cov, const CubeIndex& index, int p, double rho);
bool cube_in_ball(const DyadicCube& q, const Point& x, double r);

// Smallest rho for which both shadow properties hold on the given chains.
double shadow_rho(const WhitneyCovering& cov, const std::vector<Chain>& chains);

struct ShadowSums {
    double sum_inverse = 0.0;  // max_Q l(Q)^s sum_{L: Q in SH(L)} l(L)^-s
    double sum_volume = 0.0;   // max_Q l(Q)^-d sum_{S in SH(Q)} l(S)^d
};

ShadowSums shadow_sums(const WhitneyCovering& cov, double rho, double s);

struct CorkscrewReport {
    double eps_empirical = 0.0;
    double delta = 0.0;
    Point worst_point{};
    double worst_radius = 0.0;
    int failures = 0;
    int samples = 0;
};

CorkscrewReport check_corkscrew(const Domain& domain, const WhitneyCovering& cov, const std::vector<double>& radii,
                                const std::vector<Point>& boundary_points);

struct UniformityReport {
    double eps_empirical = 0.0;
    int worst_q = -1, worst_s = -1;
    int disconnected = 0;
    int pairs = 0;
    std::vector<Chain> chains;
};

// Seeded pair sample over interior cubes with D(Q,S) <= delta: half uniform, half local (D <= 16 l(Q)).
std::vector<std::pair<int, int>> sample_pairs(const WhitneyCovering& cov, int n, double delta, std::uint64_t seed);
UniformityReport check_uniformity(const WhitneyCovering& cov, const std::vector<std::pair<int, int>>& pairs, double delta);

}
