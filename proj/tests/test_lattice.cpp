#include <random>

#include "doctest.h"
#include "fdgff/lattice.hpp"

using namespace fdgff;

namespace {

LatticeFunction<cplx> random_function(int radius_q, SubMask mask, uint64_t seed) {
    LatticeFunction<cplx> f(radius_q, mask);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int x = -radius_q; x <= radius_q; ++x)
        for (int y = -radius_q; y <= radius_q; ++y) {
            QPoint p{x, y};
            Sub s;
            try {
                s = classify_point(p);
            } catch (const LatticeError&) {
                continue;
            }
            if (mask.has(s)) f.set(p, {u(rng), u(rng)});
        }
    return f;
}

LatticeFunction<cplx> embedding(int radius_q, SubMask mask) {
    LatticeFunction<cplx> f(radius_q, mask);
    for (int x = -radius_q; x <= radius_q; ++x)
        for (int y = -radius_q; y <= radius_q; ++y) {
            QPoint p{x, y};
            Sub s;
            try {
                s = classify_point(p);
            } catch (const LatticeError&) {
                continue;
            }
            if (mask.has(s)) f.set(p, p.embed());
        }
    return f;
}

}  // namespace

TEST_CASE("sublattice classification") {
    CHECK(classify_point({0, 0}) == Sub::primary);
    CHECK(classify_point({4, -8}) == Sub::primary);
    CHECK(classify_point({2, 2}) == Sub::dual);
    CHECK(classify_point({2, 0}) == Sub::medial_h);
    CHECK(classify_point({0, 2}) == Sub::medial_v);
    CHECK(classify_point({1, 1}) == Sub::corner);
    CHECK(classify_point({-1, 3}) == Sub::corner);
    CHECK_THROWS_AS(classify_point({1, 0}), LatticeError);
    CHECK_THROWS_AS(classify_point({1, 2}), LatticeError);
}

TEST_CASE("lookups outside window or sublattice throw") {
    LatticeFunction<cplx> f(4, SubMask::of({Sub::primary}));
    f.set({0, 0}, 1.0);
    f.set({4, 0}, 2.0);
    CHECK(f.at({4, 0}) == cplx(2.0));
    CHECK_THROWS_AS(f.at({8, 0}), LatticeError);   // outside window
    CHECK_THROWS_AS(f.at({2, 2}), LatticeError);   // off declared sublattice
    CHECK_THROWS_AS(f.set({2, 0}, 0.0), LatticeError);
}

TEST_CASE("laplacian of constants vanishes; derivative of the embedding") {
    auto ones = random_function(16, SubMask::diamond_medial(), 1).map([](cplx) { return cplx(1.0); });
    auto lap = apply_operator(DiffOp::laplacian, ones);
    for (auto& [p, v] : lap.values()) CHECK(std::abs(v) == 0.0);

    auto id = embedding(16, SubMask::diamond_medial());
    auto d = apply_operator(DiffOp::d, id);
    auto dbar = apply_operator(DiffOp::dbar, id);
    CHECK(d.values().size() > 0);
    for (auto& [p, v] : d.values()) CHECK(std::abs(v - 1.0) < 1e-15);
    for (auto& [p, v] : dbar.values()) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("factorisation d dbar = laplacian/4 on random data") {
    auto f = random_function(20, SubMask::diamond_medial(), 7);
    auto a = apply_operator(DiffOp::d, apply_operator(DiffOp::dbar, f));
    auto b = apply_operator(DiffOp::dbar, apply_operator(DiffOp::d, f));
    auto lap = apply_operator(DiffOp::laplacian, f);
    int checked = 0;
    for (auto& [p, v] : a.values()) {
        if (!lap.has(p) || !b.has(p)) continue;
        CHECK(std::abs(v - b.at(p)) < 1e-13);
        CHECK(std::abs(v - 0.25 * lap.at(p)) < 1e-13);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("factorisation is exact in rational mode") {
    LatticeFunction<GaussianRational> f(12, SubMask::diamond_medial());
    std::mt19937_64 rng(11);
    for (int x = -12; x <= 12; ++x)
        for (int y = -12; y <= 12; ++y) {
            QPoint p{x, y};
            Sub s;
            try {
                s = classify_point(p);
            } catch (const LatticeError&) {
                continue;
            }
            if (!f.domains().has(s)) continue;
            f.set(p, GaussianRational(Rational((long long)(rng() % 19) - 9, 1 + (long long)(rng() % 7)),
                                      Rational((long long)(rng() % 19) - 9, 1 + (long long)(rng() % 7))));
        }
    auto a = apply_operator(DiffOp::d, apply_operator(DiffOp::dbar, f));
    auto lap = apply_operator(DiffOp::laplacian, f);
    int checked = 0;
    for (auto& [p, v] : a.values()) {
        if (!lap.has(p)) continue;
        CHECK(v == lap.at(p) * GaussianRational(Rational(1, 4)));
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("mixed factorisation: d dbar_star = laplacian/2 on primary, 0 on dual") {
    auto f = random_function(20, SubMask::of({Sub::primary}), 3);
    auto mixed = apply_operator(DiffOp::d, apply_operator(DiffOp::dbar_star, f));
    auto lap = apply_operator(DiffOp::laplacian, f);
    int on_primary = 0, on_dual = 0;
    for (auto& [p, v] : mixed.values()) {
        Sub s = classify_point(p);
        if (s == Sub::primary) {
            if (!lap.has(p)) continue;
            CHECK(std::abs(v - 0.5 * lap.at(p)) < 1e-13);
            ++on_primary;
        } else if (s == Sub::dual) {
            CHECK(std::abs(v) < 1e-14);
            ++on_dual;
        }
    }
    CHECK(on_primary > 50);
    CHECK(on_dual > 50);
}

TEST_CASE("square contour geometry") {
    auto c = CornerContour::square({0, 0}, 5);
    CHECK(c.positively_oriented());
    CHECK(c.steps() == 4 * 5 + 0);  // perimeter 8k/2 steps = 4k? sanity below
    // each side has k steps of length 1/2 where side length is 2k quarters
    CHECK(c.steps() == 20);
    auto di = c.interior(SubMask::diamond());
    auto mi = c.interior(SubMask::medial());
    // |x|,|y| <= 1 lattice units: 9 primary + 4 dual; 12 medial
    CHECK(di.size() == 13);
    CHECK(mi.size() == 12);
    CHECK_THROWS_AS(CornerContour({{1, 1}, {3, 1}, {3, 3}}), LatticeError);
}

TEST_CASE("contour integral of constants telescopes to zero") {
    auto f = embedding(8, SubMask::diamond()).map([](cplx) { return cplx(1.0); });
    auto g = embedding(8, SubMask::medial()).map([](cplx) { return cplx(1.0); });
    auto c = CornerContour::square({0, 0}, 5);
    CHECK(std::abs(contour_integrate(f, g, c)) < 1e-15);
    CHECK(std::abs(contour_integrate(f, g, c, true)) < 1e-15);
}

TEST_CASE("discrete Stokes formula on random data") {
    std::mt19937_64 seeds(2024);
    for (int rep = 0; rep < 100; ++rep) {
        auto f = random_function(14, SubMask::diamond(), seeds());
        auto g = random_function(14, SubMask::medial(), seeds());
        int k = 1 + 2 * (int)(seeds() % 5);
        auto gamma = CornerContour::square({0, 0}, k);
        cplx lhs = contour_integrate(f, g, gamma);
        auto dbar_g = apply_operator(DiffOp::dbar, g);
        auto dbar_f = apply_operator(DiffOp::dbar, f);
        cplx rhs = 0.0;
        for (QPoint p : gamma.interior(SubMask::diamond())) rhs += cplx(0, 1) * f.at(p) * dbar_g.at(p);
        for (QPoint p : gamma.interior(SubMask::medial())) rhs += cplx(0, 1) * dbar_f.at(p) * g.at(p);
        CHECK(std::abs(lhs - rhs) < 1e-12);

        // conjugated differential variant
        cplx lhs2 = contour_integrate(f, g, gamma, true);
        auto d_g = apply_operator(DiffOp::d, g);
        auto d_f = apply_operator(DiffOp::d, f);
        cplx rhs2 = 0.0;
        for (QPoint p : gamma.interior(SubMask::diamond())) rhs2 -= cplx(0, 1) * f.at(p) * d_g.at(p);
        for (QPoint p : gamma.interior(SubMask::medial())) rhs2 -= cplx(0, 1) * d_f.at(p) * g.at(p);
        CHECK(std::abs(lhs2 - rhs2) < 1e-12);
    }
}

TEST_CASE("Stokes formula is exact in rational mode") {
    std::mt19937_64 rng(5);
    auto rand_rat = [&]() {
        return GaussianRational(Rational((long long)(rng() % 13) - 6, 1 + (long long)(rng() % 5)),
                                Rational((long long)(rng() % 13) - 6, 1 + (long long)(rng() % 5)));
    };
    LatticeFunction<GaussianRational> f(10, SubMask::diamond());
    LatticeFunction<GaussianRational> g(10, SubMask::medial());
    for (int x = -10; x <= 10; ++x)
        for (int y = -10; y <= 10; ++y) {
            QPoint p{x, y};
            Sub s;
            try {
                s = classify_point(p);
            } catch (const LatticeError&) {
                continue;
            }
            if (f.domains().has(s)) f.set(p, rand_rat());
            if (g.domains().has(s)) g.set(p, rand_rat());
        }
    auto gamma = CornerContour::square({0, 0}, 5);
    GaussianRational lhs;
    for (size_t j = 0; j < gamma.steps(); ++j) {
        auto st = gamma.step(j);
        lhs += scalar_from_halfstep<GaussianRational>(st.weight) * f.at(st.diamond) * g.at(st.medial);
    }
    auto dbar_g = apply_operator(DiffOp::dbar, g);
    auto dbar_f = apply_operator(DiffOp::dbar, f);
    GaussianRational rhs;
    for (QPoint p : gamma.interior(SubMask::diamond())) rhs += (f.at(p) * dbar_g.at(p)).mul_i();
    for (QPoint p : gamma.interior(SubMask::medial())) rhs += (dbar_f.at(p) * g.at(p)).mul_i();
    CHECK(lhs == rhs);
}

TEST_CASE("contour deformation invariance for discrete holomorphic integrands") {
    // f = embedding (holomorphic: dbar f = 0), g = 1.
    auto f = embedding(16, SubMask::diamond());
    auto g = embedding(16, SubMask::medial()).map([](cplx) { return cplx(1.0); });
    auto inner = CornerContour::square({0, 0}, 5);
    auto outer = CornerContour::square({0, 0}, 11);
    cplx a = contour_integrate(f, g, inner);
    cplx b = contour_integrate(f, g, outer);
    CHECK(std::abs(a - b) < 1e-13);
}
