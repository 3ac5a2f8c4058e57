#pragma once

#include "linear_fields.hpp"

namespace fdgff {

enum class Sector : uint8_t { holomorphic = 0, antiholomorphic = 1 };
enum class ModeSpecies : uint8_t { chi = 0, eta = 1 };  // chi acts via xi, eta via theta

// Index of a current-mode operator X_k, H_k, Xbar_k, Hbar_k.
struct ModeIndex {
    ModeSpecies species;
    Sector sector;
    int k;
};

namespace detail {

// Vanishing radius (lattice units, floor) of u^[|k|]; 0 for k <= 0.
inline int vanish_radius_lattice(int k) {
    if (k <= 0) return 0;
    auto m = MonomialCache::instance().get(k, std::max(4, 2 * k));
    return std::max(0, m->vanish_radius_q / 4);
}

}  // namespace detail

// Contour radius rule for mode integrals: support radius of the operand plus
// the vanishing radius of the monomial of matching order plus a margin of 2.
inline int mode_contour_radius(int supp_radius, int k) {
    return supp_radius + detail::vanish_radius_lattice(std::abs(k)) + 2;
}

// The primary-lattice current at a medial point as a linear polynomial:
// d*_sharp xi / theta with the -i (holomorphic) or +i (antiholomorphic)
// factor on vertical edges.
template <typename C>
LinearPoly<C> current_at(ModeSpecies species, Sector sector, QPoint medial) {
    using Ops = CoeffOps<C>;
    Species sp = (species == ModeSpecies::chi) ? Species::xi : Species::theta;
    Sub s = classify_point(medial);
    LinearPoly<C> out;
    if (s == Sub::medial_h) {
        out.add({sp, (medial.x + 2) / 4, medial.y / 4}, Ops::one());
        out.add({sp, (medial.x - 2) / 4, medial.y / 4}, Ops::zero() - Ops::one());
    } else if (s == Sub::medial_v) {
        C c = Ops::mul_i(Ops::one());  // +i
        if (sector == Sector::holomorphic) c = Ops::zero() - c;
        out.add({sp, medial.x / 4, (medial.y + 2) / 4}, c);
        out.add({sp, medial.x / 4, (medial.y - 2) / 4}, Ops::zero() - c);
    } else {
        throw LatticeError("current evaluated off the medial lattice");
    }
    return out;
}

namespace detail {

template <typename C>
C monomial_value_as(const DiscreteMonomial& mono, QPoint p);

template <>
inline cplx monomial_value_as<cplx>(const DiscreteMonomial& mono, QPoint p) {
    return mono.values.at(p);
}
template <>
inline PiRat monomial_value_as<PiRat>(const DiscreteMonomial& mono, QPoint p) {
    if (!mono.exact_ok) throw MonomialError("exact monomial values unavailable at this order");
    return mono.exact.at(p);
}

template <typename C>
C inv_two_pi_i();

template <>
inline cplx inv_two_pi_i<cplx>() {
    return 1.0 / (2.0 * std::numbers::pi * cplx(0, 1));
}
template <>
inline PiRat inv_two_pi_i<PiRat>() {
    // 1/(2 pi i) = -(i/2) pi^-1
    return PiRat::monomial(GaussianRational(Rational(0), Rational(-1, 2)), -1);
}

}  // namespace detail

// The mode kernel: the linear polynomial
//   (1/2pi i) sum_j w_j u^[k](d_j) current(m_j)            (holomorphic)
//   -(1/2pi i) sum_j conj(w_j) conj(u^[k](d_j)) current(m_j)  (antiholomorphic)
// whose left product with P is the current-mode action.
template <typename C = cplx>
LinearPoly<C> mode_kernel(ModeIndex mode, const CornerContour& gamma) {
    using Ops = CoeffOps<C>;
    auto mono =
        MonomialCache::instance().get(mode.k, (int)(gamma.corners()[0].linf() / 4) + 3);
    LinearPoly<C> acc;
    bool anti = mode.sector == Sector::antiholomorphic;
    for (size_t j = 0; j < gamma.steps(); ++j) {
        auto st = gamma.step(j);
        C mv = detail::monomial_value_as<C>(*mono, st.diamond);
        C w = scalar_from_halfstep<C>(st.weight);
        if (anti) {
            mv = Ops::conj(mv);
            w = Ops::conj(w);
        }
        C scalar = w * mv * detail::inv_two_pi_i<C>();
        if (anti) scalar = Ops::zero() - scalar;
        if (Ops::is_zero(scalar)) continue;
        LinearPoly<C> cur = current_at<C>(mode.species, mode.sector, st.medial);
        acc += cur * scalar;
    }
    return acc;
}

// Current-mode action on a field polynomial (the polynomial route): the
// contour integral of u^[k] times the current against P, along a square
// corner contour wide enough to enclose supp P and the monomial failure set.
// A positive mode annihilates P modulo null as soon as u^[k] vanishes on and
// inside some valid contour around supp P; the minimal one has radius
// supp + 2 (the class does not depend on the contour choice).
inline bool mode_annihilates(int k, int supp_radius) {
    if (k <= 0) return false;
    int r_min = supp_radius + 2;
    auto mono = MonomialCache::instance().get(k, r_min + 3);
    return mono->vanish_radius_q >= 4 * r_min + 2;
}

template <typename C>
GrassmannPoly<C> current_mode(ModeIndex mode, const GrassmannPoly<C>& p,
                              int contour_radius_lattice = -1) {
    if (p.is_zero()) return p;
    if (mode_annihilates(mode.k, p.support_radius())) return GrassmannPoly<C>();
    int r = contour_radius_lattice > 0 ? contour_radius_lattice
                                       : mode_contour_radius(p.support_radius(), mode.k);
    auto gamma = CornerContour::square({0, 0}, 4 * r + 1);
    auto kern = mode_kernel<C>(mode, gamma);
    return kern.to_poly() * p;
}

template <typename C>
GrassmannPoly<C> current_mode(ModeSpecies sp, Sector sec, int k, const GrassmannPoly<C>& p) {
    return current_mode(ModeIndex{sp, sec, k}, p);
}

// Smallest N such that all modes of index >= N annihilate P; truncates the
// Sugawara sums.
inline int annihilation_index(const PolyD& p) {
    int supp = p.support_radius();
    for (int k = 1; k < 64; ++k)
        if (mode_annihilates(k, supp)) return k;
    throw GrassmannError("no annihilation index below 64");
}

// Sugawara Virasoro mode L_n (or Lbar_n) on a field polynomial:
//   L_n = sum_{k >= n/2} X_{n-k} H_k - sum_{k < n/2} H_k X_{n-k},
// truncated to the finitely many terms that survive annihilation.
inline PolyD sugawara_mode(int n, Sector sector, const PolyD& p) {
    if (p.is_zero()) return p;
    int N = annihilation_index(p);
    PolyD total;
    int half_up = (n >= 0) ? (n + 1) / 2 : -((-n) / 2);  // ceil(n/2)
    for (int k = half_up; k < N + 1; ++k) {
        PolyD inner = current_mode({ModeSpecies::eta, sector, k}, p);
        if (inner.is_zero()) continue;
        total += current_mode({ModeSpecies::chi, sector, n - k}, inner);
    }
    for (int k = n - N; k < half_up; ++k) {
        PolyD inner = current_mode({ModeSpecies::chi, sector, n - k}, p);
        if (inner.is_zero()) continue;
        total -= current_mode({ModeSpecies::eta, sector, k}, inner);
    }
    return total;
}

}  // namespace fdgff
