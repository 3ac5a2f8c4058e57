#include <numbers>

#include "doctest.h"
#include "fdgff/monomials.hpp"

using namespace fdgff;

namespace {
MonomialCache& MC() { return MonomialCache::instance(); }
}

TEST_CASE("u^[0] is 1 everywhere; u^[1] is the embedding") {
    auto m0 = MC().get(0, 6);
    for (auto& [p, v] : m0->values.values()) CHECK(v == cplx(1.0));
    auto m1 = MC().get(1, 6);
    for (auto& [p, v] : m1->values.values()) CHECK(std::abs(v - p.embed()) < 1e-14);
}

TEST_CASE("positive monomials: 0^[k] = 0 and square-grid symmetries") {
    for (int k = 2; k <= 5; ++k) {
        auto m = MC().get(k, 6);
        CHECK(std::abs(m->values.at({0, 0})) == 0.0);
        CHECK(m->exact_ok);
        // (i u)^[k] = i^k u^[k] on a few sample points
        cplx ik = std::pow(cplx(0, 1), k);
        for (QPoint p : {QPoint{4, 0}, QPoint{2, 2}, QPoint{2, 0}, QPoint{4, 4}, QPoint{6, 2}}) {
            CHECK(std::abs(m->values.at(p.rot90()) - ik * m->values.at(p)) < 1e-12);
            CHECK(std::abs(m->values.at(p.conj()) - std::conj(m->values.at(p))) < 1e-12);
        }
    }
    // (i u)^[2] = -u^[2] spot check
    auto m2 = MC().get(2, 6);
    CHECK(std::abs(m2->values.at(QPoint{4, 4}.rot90()) + m2->values.at({4, 4})) < 1e-13);
}

TEST_CASE("u^[-1] approaches 1/u on the real axis") {
    auto m = MC().get(-1, 40);
    double prev_err = 1e9;
    for (int R : {10, 20, 40}) {
        cplx v = m->values.at(QPoint::from_lattice(R, 0));
        double err = std::abs(v - cplx(1.0 / R));
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-4);
}

TEST_CASE("residue table of u^[-1] matches the printed values") {
    auto tab = MC().dbar_residue_table(-1);
    CHECK(std::abs(tab.at({0, 0}) - 0.5) < 1e-9);
    for (QPoint p : {QPoint{2, 0}, QPoint{-2, 0}, QPoint{0, 2}, QPoint{0, -2}})
        CHECK(std::abs(tab.at(p) - 0.25) < 1e-9);
    for (QPoint p : {QPoint{2, 2}, QPoint{-2, 2}, QPoint{2, -2}, QPoint{-2, -2}})
        CHECK(std::abs(tab.at(p) - 0.125) < 1e-9);
    // nothing else in the support
    CHECK(tab.values().size() == 9);
}

TEST_CASE("residue table of u^[-2] matches the printed values") {
    auto tab = MC().dbar_residue_table(-2);
    auto expect = [&](int qx, int qy, cplx v) {
        INFO("point (", qx, ",", qy, ")");
        CHECK(std::abs(tab.at({qx, qy}) - v) < 1e-9);
    };
    const cplx i(0, 1);
    // medial ring
    expect(2, 0, 0.25);
    expect(-2, 0, -0.25);
    expect(0, 2, -i * 0.25);
    expect(0, -2, i * 0.25);
    // dual ring
    expect(2, 2, (1.0 - i) / 8.0);
    expect(-2, 2, -(1.0 + i) / 8.0);
    expect(-2, -2, -(1.0 - i) / 8.0);
    expect(2, -2, (1.0 + i) / 8.0);
    // primary ring at distance 1
    expect(4, 0, 0.125);
    expect(-4, 0, -0.125);
    expect(0, 4, -i * 0.125);
    expect(0, -4, i * 0.125);
    // outer medial values at distance ~1.1
    expect(4, 2, 1.0 / 16);
    expect(4, -2, 1.0 / 16);
    expect(-4, 2, -1.0 / 16);
    expect(-4, -2, -1.0 / 16);
    expect(2, 4, -i / 16.0);
    expect(-2, 4, -i / 16.0);
    expect(2, -4, i / 16.0);
    expect(-2, -4, i / 16.0);
    // support is contained in distance 2 of the origin
    for (auto& [p, v] : tab.values()) CHECK(p.linf() <= 8);
    // the center value is 0 (recorded as such or pruned)
    if (tab.has({0, 0})) CHECK(std::abs(tab.at({0, 0})) < 1e-9);
}

TEST_CASE("residue pairing is the Kronecker delta for n,m in [-4,4]") {
    for (int n = -4; n <= 4; ++n)
        for (int m = -4; m <= 4; ++m) {
            cplx v = MC().residue_pairing(n, m, 8);
            double target = (n + m + 1 == 0) ? 1.0 : 0.0;
            INFO("(n,m) = (", n, ",", m, ")");
            CHECK(std::abs(v - target) < 1e-9);
        }
}

TEST_CASE("recursion consistency: dbar u^[-k-1] = -(1/4k) lap u^[-k] on the failure support") {
    for (int k = 1; k <= 3; ++k) {
        auto tab = MC().dbar_residue_table(-k - 1);
        auto mk = MC().get(-k, 10);
        auto lap = apply_operator(DiffOp::laplacian, mk->values);
        for (auto& [p, v] : tab.values()) {
            cplx lhs = v * 2.0 * std::numbers::pi;  // dbar value
            cplx rhs = -lap.at(p) / (4.0 * k);
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
}

TEST_CASE("positive monomials vanish on a growing neighbourhood of the origin") {
    int prev_vr = -1;
    for (int n = 1; n <= 6; ++n) {
        auto m = MC().get(n, 6);
        CHECK(m->vanish_radius_q >= prev_vr);
        prev_vr = m->vanish_radius_q;
    }
    CHECK(prev_vr >= 4);  // u^[6] vanishes at least on |p| <= 1
}

TEST_CASE("contour independence of the residue pairing") {
    cplx a = MC().residue_pairing(0, -1, 5);
    cplx b = MC().residue_pairing(0, -1, 9);
    CHECK(std::abs(a - b) < 1e-10);
    CHECK(std::abs(a - 1.0) < 1e-10);
}
