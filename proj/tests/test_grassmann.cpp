#include <numbers>
#include <random>

#include "doctest.h"
#include "fdgff/grassmann.hpp"

using namespace fdgff;

namespace {
const double pi4 = 4.0 * std::numbers::pi;
}

TEST_CASE("algebra: nilpotency, anticommutativity, even elements commute") {
    auto x0 = PolyD::xi(0, 0);
    auto t0 = PolyD::theta(0, 0);
    CHECK((x0 * x0).is_zero());
    CHECK((x0 * t0 + t0 * x0).is_zero());
    auto a = PolyD::xi(0, 0) * PolyD::theta(0, 0);
    auto b = PolyD::xi(1, 0) * PolyD::theta(1, 0);
    CHECK((a * b - b * a).is_zero());
    // associativity and bilinearity on a random triple
    auto p = PolyD::xi(0, 0) + PolyD::theta(2, 1) * cplx(0.5, 1.0);
    auto q = PolyD::theta(0, 0) - PolyD::xi(1, 1);
    auto r = PolyD::xi(2, 0) * PolyD::theta(0, 1) + PolyD::scalar(2.0);
    auto lhs = (p * q) * r;
    auto rhs = p * (q * r);
    CHECK((lhs - rhs).is_zero());
}

TEST_CASE("support tracking") {
    auto p = PolyD::xi(0, 0) * PolyD::theta(3, -2) + PolyD::scalar(1.0);
    auto s = p.support();
    REQUIRE(s.size() == 2);
    CHECK(s[0] == std::pair<int, int>(0, 0));
    CHECK(s[1] == std::pair<int, int>(3, -2));
    CHECK(p.support_radius() == 3);
}

TEST_CASE("correlation: normalization, two-point and Wick determinant") {
    auto dom = domain_square(12);
    DirichletGreen g(dom);
    CorrelationEngine eng(g);

    CHECK(eng.value(PolyD::scalar(1.0)) == cplx(1.0));

    Vertex z{3, 4}, w{7, 6};
    auto two = PolyD::generator(gen_xi(z.x, z.y), 1.0) * PolyD::generator(gen_theta(w.x, w.y), 1.0);
    CHECK(std::abs(eng.value(two) - pi4 * g(z, w)) < 1e-12);

    Vertex z2{5, 8}, w2{4, 2};
    auto four = PolyD::generator(gen_xi(z.x, z.y), 1.0) *
                PolyD::generator(gen_theta(w.x, w.y), 1.0) *
                PolyD::generator(gen_xi(z2.x, z2.y), 1.0) *
                PolyD::generator(gen_theta(w2.x, w2.y), 1.0);
    cplx expect = pi4 * pi4 * (g(z, w) * g(z2, w2) - g(z, w2) * g(z2, w));
    CHECK(std::abs(eng.value(four) - expect) < 1e-10);

    // unbalanced monomial vanishes
    auto unbal = PolyD::generator(gen_xi(z.x, z.y), 1.0) *
                 PolyD::generator(gen_xi(z2.x, z2.y), 1.0) *
                 PolyD::generator(gen_theta(w.x, w.y), 1.0);
    CHECK(eng.value(unbal) == cplx(0.0));
}

TEST_CASE("boundary insertions give exactly zero") {
    auto dom = domain_square(8);
    DirichletGreen g(dom);
    auto p = PolyD::xi(0, 0) * PolyD::theta(1, 0);  // relative to insertion site
    // evaluated at z = (0,3): xi lands on the boundary x=0
    cplx v = correlation(g, {{p, Vertex{0, 3}}, {PolyD::xi(3, 3) * PolyD::theta(4, 4), Vertex{0, 0}}});
    CHECK(v == cplx(0.0));
}

TEST_CASE("insertions outside the domain evaluate to zero") {
    auto dom = domain_square(8);
    DirichletGreen g(dom);
    auto p = PolyD::xi(-5, 0) * PolyD::theta(0, 0) + PolyD::scalar(1.0);
    // xi(-5,0) translated by (2,2) leaves the domain: only the scalar survives
    cplx v = correlation(g, {{p, Vertex{2, 2}}});
    CHECK(v == cplx(1.0));
}

TEST_CASE("sign coherence under canonical reordering") {
    auto dom = domain_square(14);
    DirichletGreen g(dom);
    CorrelationEngine eng(g);
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        // random balanced word, built forward and reversed
        int n = 1 + int(rng() % 4);
        std::vector<PolyD> factors;
        for (int i = 0; i < n; ++i) {
            int zx = 2 + int(rng() % 9), zy = 2 + int(rng() % 9);
            int wx = 2 + int(rng() % 9), wy = 2 + int(rng() % 9);
            factors.push_back(PolyD::generator(gen_xi(zx, zy), 1.0));
            factors.push_back(PolyD::generator(gen_theta(wx, wy), 1.0));
        }
        PolyD fwd = PolyD::scalar(1.0), rev = PolyD::scalar(1.0);
        for (auto& f : factors) fwd = fwd * f;
        for (auto it = factors.rbegin(); it != factors.rend(); ++it) rev = rev * (*it);
        // reversing a word of length L flips sign by (-1)^{L(L-1)/2}
        int len = 2 * n;
        int sign = ((len * (len - 1) / 2) % 2) ? -1 : 1;
        cplx a = eng.value(fwd), b = eng.value(rev);
        CHECK(std::abs(a - double(sign) * b) < 1e-10);
    }
}

TEST_CASE("dissipation correlation: direct expansion vs bijection formula") {
    auto dom = domain_square(10);
    DirichletGreen g(dom);

    // no pairs, one x: <xi(x)theta(x) + c> = 4 pi G(x,x) + c
    Vertex x{4, 5};
    cplx v = correlation_with_dissipation(g, {}, {x}, 0.7);
    CHECK(std::abs(v - (pi4 * g(x, x) + 0.7)) < 1e-12);

    // one pair, one x, c = 0: bijection sum equals the Wick determinant
    Vertex z{2, 2}, w{6, 3};
    cplx v2 = correlation_with_dissipation(g, {{z, w}}, {x}, 0.0);
    cplx det = pi4 * pi4 * (g(z, w) * g(x, x) - g(z, x) * g(x, w));
    CHECK(std::abs(v2 - det) < 1e-10);

    // two x's, c = 1: against independent determinant expansion
    Vertex x2{7, 7};
    cplx v3 = correlation_with_dissipation(g, {}, {x, x2}, 1.0);
    cplx g1 = pi4 * g(x, x), g2 = pi4 * g(x2, x2);
    cplx g12 = pi4 * g(x, x2), g21 = pi4 * g(x2, x);
    CHECK(std::abs(v3 - ((1.0 + g1) * (1.0 + g2) - g12 * g21)) < 1e-10);

    // three pairs + two x's stress the internal consistency assertion
    CHECK_NOTHROW(correlation_with_dissipation(
        g, {{Vertex{2, 3}, Vertex{3, 6}}, {Vertex{5, 2}, Vertex{2, 6}}}, {Vertex{7, 4}, Vertex{4, 7}},
        cplx(0.3, -0.2)));
}

TEST_CASE("degree cap guards runaway expansions") {
    auto dom = domain_square(8);
    DirichletGreen g(dom);
    CorrelationEngine eng(g, 4);
    PolyD p = PolyD::scalar(1.0);
    for (int i = 1; i <= 3; ++i)
        p = p * PolyD::generator(gen_xi(i, 1), 1.0) * PolyD::generator(gen_theta(i, 2), 1.0);
    CHECK_THROWS_AS(eng.value(p), GrassmannError);
}

TEST_CASE("exact coefficient ring round trip") {
    PolyX p = PolyX::generator(gen_xi(0, 0), PiRat::pi(-1)) *
              PolyX::generator(gen_theta(1, 0), PiRat(Rational(1, 2)));
    PolyD d = p.convert<cplx>();
    REQUIRE(d.size() == 1);
    for (auto& [m, c] : d.terms())
        CHECK(std::abs(c - cplx(0.5 / std::numbers::pi)) < 1e-16);
}
