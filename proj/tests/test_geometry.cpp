#include "tlnum/geometry.hpp"
#include "tlnum/io.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace tln;

namespace {

DyadicCube unit_cube_at(double x, double y) {
    DyadicCube c;
    c.d = 2;
    c.side = 1.0;
    c.center = {x, y, 0.0};
    return c;
}

// Distance between boxes by brute force over sampled boundary points.
double brute_box_distance(const DyadicCube& a, const DyadicCube& b) {
    double best = 1e300;
    const int n = 40;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k)
                for (int l = 0; l <= n; ++l) {
                    double ax = a.lo()[0] + a.side * i / n, ay = a.lo()[1] + a.side * j / n;
                    double bx = b.lo()[0] + b.side * k / n, by = b.lo()[1] + b.side * l / n;
                    best = std::min(best, std::hypot(ax - bx, ay - by));
                }
    return best;
}

void check_sandwich(const Domain& dom, const WhitneyCovering& cov) {
    for (const auto& q : cov.cubes) {
        double D = boundary_long_distance(dom, q);
        REQUIRE(D >= cov.cw * q.side);
        REQUIRE(D <= 4.0 * cov.cw * q.side);
    }
}

}

TEST_CASE("long distance closed form") {
    DyadicCube a = unit_cube_at(0, 0);
    CHECK(long_distance(a, a) == doctest::Approx(2.0));
    CHECK(long_distance(a, unit_cube_at(1, 0)) == doctest::Approx(2.0));
    DyadicCube far = unit_cube_at(10, 0);
    CHECK(long_distance(a, far) == doctest::Approx(2.0 + 9.0));
    DyadicCube diag = unit_cube_at(3, 4);
    CHECK(box_distance(a, diag) == doctest::Approx(brute_box_distance(a, diag)).epsilon(1e-9));
    CHECK(long_distance(a, diag) == doctest::Approx(long_distance(diag, a)));
}

TEST_CASE("interval covering accumulates toward both endpoints") {
    Domain dom = Domain::interval();
    auto cov = build_whitney(dom, 1.0, 14, {.exterior = false});
    check_sandwich(dom, cov);
    std::map<int, int> per_gen;
    int finest = 0;
    for (const auto& q : cov.cubes) {
        ++per_gen[q.gen];
        finest = std::max(finest, q.gen);
    }
    // Brute-force dyadic scan: cubes of each generation with side + dist >= side and inside.
    for (int m = 3; m < finest; ++m) {
        CHECK(per_gen[m] <= 4);
        CHECK(per_gen[m] >= 2);
    }
    CHECK(cov.uncovered_measure < 1e-3);
    CHECK(cov.uncovered_measure >= 0.0);
}

TEST_CASE("sandwich holds on the built-in domains") {
    for (const char* name : {"interval", "square", "lshape", "slit"}) {
        Domain dom = Domain::by_name(name);
        auto cov = build_whitney(dom, 3.0, dom.dim() == 1 ? 16 : 8);
        check_sandwich(dom, cov);
        // Neighbor side ratio within [1/2, 2].
        for (std::size_t i = 0; i < cov.cubes.size(); ++i)
            for (int n : cov.neighbors[i]) {
                double r = cov.cubes[static_cast<std::size_t>(n)].side / cov.cubes[i].side;
                CHECK(r >= 0.5);
                CHECK(r <= 2.0);
            }
    }
}

TEST_CASE("neighbor lists match brute force") {
    Domain dom = Domain::lshape();
    auto cov = build_whitney(dom, 3.0, 7);
    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        std::vector<int> want;
        for (std::size_t j = 0; j < cov.cubes.size(); ++j)
            if (j != i && cov.is(static_cast<int>(j), W0) == cov.is(static_cast<int>(i), W0) &&
                touching(cov.cubes[i], cov.cubes[j]))
                want.push_back(static_cast<int>(j));
        REQUIRE(cov.neighbors[i] == want);
    }
}

TEST_CASE("families and symmetrization") {
    Domain dom = Domain::square();
    auto cov = build_whitney(dom, 3.0, 9, {.ell0 = 1.0 / 64});
    std::map<int, int> overlap;
    int w3 = 0;
    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        const auto& q = cov.cubes[i];
        if (cov.is(static_cast<int>(i), W1)) {
            CHECK(cov.is(static_cast<int>(i), W0));
            CHECK(q.side <= 10.0 / 64);
        }
        if (!cov.is(static_cast<int>(i), W3)) {
            CHECK(cov.partner[i] == -1);
            continue;
        }
        ++w3;
        CHECK(q.side < 10.0 / 64);
        int s = cov.partner[i];
        if (s < 0) continue;
        const auto& S = cov.cubes[static_cast<std::size_t>(s)];
        CHECK(S.side == q.side);
        CHECK(cov.is(s, W1));
        CHECK(long_distance(q, S) <= 50.0 * q.side);
        ++overlap[s];
    }
    CHECK(w3 > 0);
    CHECK(cov.dropped == 0);
    int worst = 0;
    for (auto [s, n] : overlap) worst = std::max(worst, n);
    // Overlap stays put under refinement.
    std::map<int, int> finer;
    auto cov2 = build_whitney(dom, 3.0, 10, {.ell0 = 1.0 / 64});
    for (int s : cov2.partner)
        if (s >= 0) ++finer[s];
    int worst2 = 0;
    for (auto [s, n] : finer) worst2 = std::max(worst2, n);
    CHECK(worst2 == worst);
    CHECK(worst <= 64);
    CHECK(cov.hash() == build_whitney(dom, 3.0, 9, {.ell0 = 1.0 / 64}).hash());
}

TEST_CASE("covering errors") {
    CHECK_THROWS_AS(build_whitney(Domain::square(), 1000.0, 4), Error);
    try {
        build_whitney(Domain::square(), 1000.0, 4);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InfeasibleConstant);
    }
    CHECK_THROWS_AS(build_whitney(Domain::square(), -1.0, 4), Error);
}

TEST_CASE("trivial chains") {
    Domain dom = Domain::square();
    auto cov = build_whitney(dom, 3.0, 7);
    auto interior = cov.members(W0);
    auto self = find_chain(cov, interior[0], interior[0]);
    REQUIRE(self);
    CHECK(self->eps == doctest::Approx(2.0));
    int tested = 0;
    for (int q : interior)
        for (int s : cov.neighbors[static_cast<std::size_t>(q)])
            if (cov.cubes[static_cast<std::size_t>(s)].side == cov.cubes[static_cast<std::size_t>(q)].side && tested < 20) {
                Chain c = certify_chain(cov, {q, s});
                CHECK(c.eps_length == doctest::Approx(1.0));
                CHECK(c.length == doctest::Approx(2.0 * cov.cubes[static_cast<std::size_t>(q)].side));
                ++tested;
            }
    CHECK(tested > 0);
    int exterior = cov.members(W2)[0];
    CHECK_THROWS_AS(find_chain(cov, exterior, interior[0]), Error);
}

TEST_CASE("chains across the slit detour around the tip") {
    auto across = [](const Domain& dom) {
        auto cov = build_whitney(dom, 3.0, 8);
        // Side-2^-7 cubes a few sides left and right of x = 1/2, low in the square.
        int q = -1, s = -1;
        for (int i : cov.members(W0)) {
            const auto& c = cov.cubes[static_cast<std::size_t>(i)];
            if (c.center[1] < 0.2 || c.center[1] > 0.3) continue;
            if (c.center[0] < 0.5 && c.center[0] > 0.45 && (q < 0 || c.center[0] > cov.cubes[static_cast<std::size_t>(q)].center[0])) q = i;
            if (c.center[0] > 0.5 && c.center[0] < 0.55 && (s < 0 || c.center[0] < cov.cubes[static_cast<std::size_t>(s)].center[0])) s = i;
        }
        REQUIRE(q >= 0);
        REQUIRE(s >= 0);
        auto c = find_chain(cov, q, s);
        REQUIRE(c);
        // Every chain cube is inside the domain and consecutive ones touch.
        for (std::size_t j = 0; j + 1 < c->cubes.size(); ++j)
            CHECK(touching(cov.cubes[static_cast<std::size_t>(c->cubes[j])], cov.cubes[static_cast<std::size_t>(c->cubes[j + 1])]));
        return *c;
    };
    Chain slit = across(Domain::slit_square());
    Chain full = across(Domain::square());
    CHECK(slit.eps * 4.0 < full.eps);
    CHECK(slit.length > 0.5);
}

TEST_CASE("shadows") {
    Domain dom = Domain::square();
    auto cov = build_whitney(dom, 3.0, 7);
    CubeIndex index(cov, W0);
    for (int p : cov.members(W0)) {
        Shadow sh = shadow_of(cov, index, p, std::sqrt(2.0));
        CHECK(std::binary_search(sh.members.begin(), sh.members.end(), p));
    }
    // Exact membership against a full scan.
    auto interior = cov.members(W0);
    for (std::size_t k = 0; k < interior.size(); k += 7) {
        int p = interior[k];
        const auto& P = cov.cubes[static_cast<std::size_t>(p)];
        Shadow sh = shadow_of(cov, index, p, 5.0);
        std::vector<int> want;
        for (int q : interior) {
            const auto& Q = cov.cubes[static_cast<std::size_t>(q)];
            double far = 0.0;
            for (int cx = 0; cx < 2; ++cx)
                for (int cy = 0; cy < 2; ++cy)
                    far = std::max(far, std::hypot(Q.lo()[0] + cx * Q.side - P.center[0], Q.lo()[1] + cy * Q.side - P.center[1]));
            if (far <= 5.0 * P.side) want.push_back(q);
            if (box_distance(P, Q) > 5.0 * P.side + std::sqrt(2.0) * P.side) CHECK(far > 5.0 * P.side);
        }
        CHECK(sh.members == want);
    }
}

TEST_CASE("shadow sums stay bounded under refinement") {
    Domain dom = Domain::square();
    auto a = shadow_sums(build_whitney(dom, 3.0, 7), 4.0, 1.0);
    auto b = shadow_sums(build_whitney(dom, 3.0, 8), 4.0, 1.0);
    CHECK(a.sum_inverse > 0);
    CHECK(b.sum_inverse / a.sum_inverse < 2.0);
    CHECK(b.sum_volume / a.sum_volume < 2.0);
    CHECK(a.sum_volume >= 1.0);
}

TEST_CASE("corkscrew on the square and the slit square") {
    for (const char* name : {"square", "slit"}) {
        Domain dom = Domain::by_name(name);
        auto cov = build_whitney(dom, 3.0, 8);
        auto pts = dom.boundary_samples(1.0 / 32);
        auto rep = check_corkscrew(dom, cov, {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}, pts);
        CHECK(rep.failures == 0);
        CHECK(rep.eps_empirical > 0.01);
        CHECK(rep.eps_empirical <= 1.0);
    }
}

TEST_CASE("uniformity sample") {
    Domain dom = Domain::square();
    auto cov = build_whitney(dom, 3.0, 7);
    auto pairs = sample_pairs(cov, 40, cov.delta, 7);
    CHECK(pairs.size() == 40);
    CHECK(pairs == sample_pairs(cov, 40, cov.delta, 7));
    auto rep = check_uniformity(cov, pairs, cov.delta);
    CHECK(rep.disconnected == 0);
    CHECK(rep.eps_empirical > 0.02);
    double rho = shadow_rho(cov, rep.chains);
    CHECK(rho > 1.0);
    CHECK(std::isfinite(rho));
}

TEST_CASE("base64 and sampled-function round trip") {
    auto enc = [](std::string s) { return base64_encode(std::vector<unsigned char>(s.begin(), s.end())); };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foobar") == "Zm9vYmFy");
    for (std::string s : {"", "f", "fo", "foo", "foob", "fooba", "foobar"}) {
        auto back = base64_decode(enc(s));
        CHECK(std::string(back.begin(), back.end()) == s);
    }
    Domain dom = Domain::lshape();
    Grid g = dom.grid(1.0 / 16);
    auto f = sample_scalar(g, dom.inside_fn(), [](const Point& x) { return std::sin(3 * x[0]) + x[1] / 3; }, dom.name());
    auto back = sampled_from_json(sampled_to_json(f));
    CHECK(back.values == f.values);
    CHECK(back.present == f.present);
    CHECK(back.grid.n == f.grid.n);
    CHECK_THROWS_AS(base64_decode("@@@@"), Error);
}
