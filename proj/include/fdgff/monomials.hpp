#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "fullplane_green.hpp"
#include "lattice.hpp"

namespace fdgff {

template <>
inline GaussianBig half_value<GaussianBig>() {
    return GaussianBig(GaussianBig::Q(1, 2), GaussianBig::Q(0));
}

struct MonomialError : std::runtime_error {
    explicit MonomialError(const std::string& what) : std::runtime_error(what) {}
};

// Discrete complex monomial u^[n] on the diamond and medial lattices:
// u^[0] = 1, d u^[n] = n u^[n-1], dbar u^[n] = 0 (for n < 0: up to a finite
// failure set near the origin), square-grid symmetries, u^[n] -> u^n at
// infinity, and 0^[k] = 0 for k > 0.
struct DiscreteMonomial {
    int order = 0;
    LatticeFunction<cplx> values;   // diamond + medial window
    LatticeFunction<PiRat> exact;   // same, restricted to the exact subwindow
    bool exact_ok = false;
    // Largest K (quarter units) such that all values with linf <= K vanish;
    // -1 when the origin value itself is nonzero. Only meaningful for n > 0.
    int vanish_radius_q = -1;
};

namespace detail {

inline bool on_diamond_or_medial(QPoint p, Sub* out = nullptr) {
    Sub s;
    try {
        s = classify_point(p);
    } catch (const LatticeError&) {
        return false;
    }
    if (s == Sub::corner) return false;
    if (out) *out = s;
    return true;
}

template <typename T, typename F>
LatticeFunction<T> fill_window(int radius_q, SubMask mask, F&& f) {
    LatticeFunction<T> out(radius_q, mask);
    for (int x = -radius_q; x <= radius_q; ++x)
        for (int y = -radius_q; y <= radius_q; ++y) {
            QPoint p{x, y};
            Sub s;
            if (!on_diamond_or_medial(p, &s)) continue;
            if (mask.has(s)) out.values()[p] = f(p, s);
        }
    return out;
}

// The exact dbar-failure tables of u^[-1] (Proposition values): the diamond
// part (1/2pi) dbar of the medial restriction, and the medial part likewise.
inline LatticeFunction<GaussianRational> residue_table_m1() {
    auto tab = fill_window<GaussianRational>(8, SubMask::diamond_medial(),
                                             [](QPoint, Sub) { return GaussianRational(); });
    tab.values()[{0, 0}] = GaussianRational(Rational(1, 2));
    for (QPoint p : {QPoint{2, 0}, QPoint{-2, 0}, QPoint{0, 2}, QPoint{0, -2}})
        tab.values()[p] = GaussianRational(Rational(1, 4));
    for (QPoint p : {QPoint{2, 2}, QPoint{-2, 2}, QPoint{2, -2}, QPoint{-2, -2}})
        tab.values()[p] = GaussianRational(Rational(1, 8));
    return tab;
}

// u^[-1] as a finite Green's-function sum. Writing T for the failure table,
// each lattice component satisfies Delta u^[-1] = 8 pi (d T) on that
// component, and decay forces u^[-1](p) = -8 pi sum_q (d T)(q) G(p - q).
class NegativeOneBuilder {
  public:
    NegativeOneBuilder() {
        auto table = residue_table_m1();
        auto d_table = apply_operator(DiffOp::d, table);
        for (auto& [q, c] : d_table.values())
            if (!c.is_zero()) charges_.emplace_back(q, c);
    }

    // Components are indexed by the (x mod 4, y mod 4) class; charge q
    // contributes to p iff p - q is a multiple of 4 in both coordinates.
    cplx value(QPoint p, const FullPlaneGreen& G) const {
        cplx acc = 0.0;
        for (auto& [q, c] : charges_) {
            QPoint d = p - q;
            if (mod4(d.x) != 0 || mod4(d.y) != 0) continue;
            acc += c.to_complex() * G(d.x / 4, d.y / 4);
        }
        return -8.0 * std::numbers::pi * acc;
    }

    std::optional<PiRat> exact_value(QPoint p, const FullPlaneGreen& G) const {
        PiRat acc;
        for (auto& [q, c] : charges_) {
            QPoint d = p - q;
            if (mod4(d.x) != 0 || mod4(d.y) != 0) continue;
            auto e = G.exact(d.x / 4, d.y / 4);
            if (!e) return std::nullopt;
            // -8 pi (r + s/pi) = -8 r pi - 8 s
            PiRat term = PiRat::monomial(GaussianRational(e->r * Rational(-8)), 1) +
                         PiRat(GaussianRational(e->s * Rational(-8)));
            acc += term * PiRat(c);
        }
        return acc;
    }

  private:
    std::vector<std::pair<QPoint, GaussianRational>> charges_;
};

}  // namespace detail

// Builds and memoizes monomials; thread-unsafe by design (single-threaded
// construction per the concurrency model), values immutable once returned.
class MonomialCache {
  public:
    static MonomialCache& instance() {
        static MonomialCache c;
        return c;
    }

    // Window radius in lattice units; the builder widens as required, with
    // headroom so small radius bumps reuse the cached window.
    std::shared_ptr<const DiscreteMonomial> get(int n, int radius_lattice) {
        int need_q = 4 * std::max(radius_lattice, 4);
        auto it = cache_.find(n);
        if (it != cache_.end() && it->second->values.radius_q() >= need_q) return it->second;
        int build_q = (need_q * 3) / 2 + 16;
        auto m = std::make_shared<DiscreteMonomial>(build(n, build_q));
        cache_[n] = m;
        return m;
    }

    // (1/2pi) dbar u^[n], restricted to its numeric support.
    LatticeFunction<cplx> dbar_residue_table(int n, double prune_tol = 5e-11) {
        if (n >= 0)
            throw MonomialError("dbar residue table requested for n >= 0 (identically zero)");
        auto mono = get(n, std::max(4, (-n) + 4));
        auto df = apply_operator(DiffOp::dbar, mono->values);
        LatticeFunction<cplx> out(df.radius_q(), df.domains());
        for (auto& [p, v] : df.values()) {
            cplx t = v / (2 * std::numbers::pi);
            if (std::abs(t) > prune_tol) out.values()[p] = t;
        }
        return out;
    }

    // (1/2pi i) oint u^[n]_diamond u^[m]_medial d^sharp u over a square contour.
    cplx residue_pairing(int n, int m, int contour_radius_lattice) {
        int rq = 4 * contour_radius_lattice + 1;
        auto gamma = CornerContour::square({0, 0}, rq);
        auto fn = get(n, contour_radius_lattice + 2);
        auto fm = get(m, contour_radius_lattice + 2);
        cplx total = contour_integrate(fn->values, fm->values, gamma);
        return total / (2 * std::numbers::pi * cplx(0, 1));
    }

  private:
    DiscreteMonomial build(int n, int radius_q) {
        if (n == 0) return build_zero(radius_q);
        if (n < 0) return build_negative(n, radius_q);
        return build_positive(n, radius_q);
    }

    DiscreteMonomial build_zero(int radius_q) {
        DiscreteMonomial m;
        m.order = 0;
        m.values = detail::fill_window<cplx>(radius_q, SubMask::diamond_medial(),
                                             [](QPoint, Sub) { return cplx(1.0); });
        m.exact = detail::fill_window<PiRat>(radius_q, SubMask::diamond_medial(),
                                             [](QPoint, Sub) { return PiRat(1); });
        m.exact_ok = true;
        return m;
    }

    DiscreteMonomial build_negative(int n, int radius_q) {
        // u^[-1] directly; more negative orders by u^[n-1] = (1/n) d u^[n].
        int depth = -n - 1;
        int base_q = radius_q + 2 * depth;
        const auto& G = green(base_q / 4 + 3);
        DiscreteMonomial m;
        m.order = -1;
        m.values = detail::fill_window<cplx>(base_q, SubMask::diamond_medial(),
                                             [&](QPoint p, Sub) { return neg1_.value(p, G); });
        int exact_q = std::min(base_q, 4 * (FullPlaneGreen::exact_radius - 2));
        m.exact = detail::fill_window<PiRat>(exact_q, SubMask::diamond_medial(), [&](QPoint p, Sub) {
            auto v = neg1_.exact_value(p, G);
            return v ? *v : PiRat();
        });
        m.exact_ok = true;
        for (int k = -1; k > n; --k) {
            // d u^[k] = k u^[k-1]
            auto d = apply_operator(DiffOp::d, m.values);
            auto de = apply_operator(DiffOp::d, m.exact);
            DiscreteMonomial next;
            next.order = k - 1;
            next.values = d.map([&](cplx v) { return v / double(k); });
            next.exact = de.map([&](const PiRat& v) { return v / PiRat(Rational(k)); });
            next.exact_ok = true;
            m = std::move(next);
        }
        m.order = n;
        return m;
    }

    DiscreteMonomial build_positive(int n, int radius_q);
    template <typename T>
    DiscreteMonomial build_positive_impl(int n, int radius_q);

    const FullPlaneGreen& green(int radius_lattice) {
        if (!green_ || green_->radius() < radius_lattice)
            green_ = std::make_unique<FullPlaneGreen>(std::max(radius_lattice, 64));
        return *green_;
    }

    std::map<int, std::shared_ptr<const DiscreteMonomial>> cache_;
    std::unique_ptr<FullPlaneGreen> green_;
    detail::NegativeOneBuilder neg1_;
};

// Positive monomials are pure Gaussian rationals; extract the pi^0 part.
inline GaussianRational exact_to_gaussian(const PiRat& v) {
    for (auto& [k, c] : v.terms())
        if (k != 0) throw MonomialError("positive monomial value has a pi power");
    return v.coeff(0).to_gaussian_rational();
}

namespace detail {

// Propagation of a positive-order monomial from u^[n-1] in exact rationals.
// Each lattice component (primary, dual, medial-H, medial-V) is connected by
// full steps whose increments are n u^[n-1] at the midpoints; seeds follow
// from 0^[n] = 0, the square-grid symmetries, and -- for the free constants of
// even orders -- the residue pairing against negative monomials.
template <typename T>
LatticeFunction<T> propagate_positive(int n, int radius_q, const LatticeFunction<T>& prev,
                                      const T& seed_dual, const T& seed_medial_h,
                                      const T& n_scalar) {
    using Ops = CoeffOps<T>;
    LatticeFunction<T> out(radius_q, SubMask::diamond_medial());
    T i_pow_n = Ops::one();
    for (int j = 0; j < ((n % 4) + 4) % 4; ++j) i_pow_n = Ops::mul_i(i_pow_n);

    struct SeedPoint {
        QPoint p;
        T v;
    };
    std::vector<SeedPoint> seeds;
    seeds.push_back({{0, 0}, Ops::zero()});
    seeds.push_back({{2, 2}, seed_dual});
    seeds.push_back({{2, 0}, seed_medial_h});
    {
        T mv = i_pow_n * seed_medial_h;  // value at (0, 1/2) = i * (1/2, 0)
        seeds.push_back({{0, 2}, mv});
    }
    const QPoint steps[4] = {{4, 0}, {-4, 0}, {0, 4}, {0, -4}};
    for (auto& s : seeds) {
        std::vector<QPoint> stack;
        out.values()[s.p] = s.v;
        stack.push_back(s.p);
        while (!stack.empty()) {
            QPoint p = stack.back();
            stack.pop_back();
            T pv = out.at(p);
            for (QPoint d : steps) {
                QPoint q = p + d;
                if (q.linf() > radius_q) continue;
                QPoint mid{p.x + d.x / 2, p.y + d.y / 2};
                if (!prev.has(mid)) continue;
                T inc = n_scalar * prev.at(mid);
                if (d.y != 0) inc = Ops::mul_i(inc);
                if (d.x < 0 || d.y < 0) inc = Ops::zero() - inc;
                T qv = pv + inc;
                auto it = out.values().find(q);
                if (it == out.values().end()) {
                    out.values()[q] = qv;
                    stack.push_back(q);
                }
            }
        }
    }
    return out;
}

}  // namespace detail

namespace detail {

// Vanishing-neighbourhood anchors for the free additive constants of an
// even-order monomial: u^[k] = 0 on the diamond |x| + |y| < k/2 forces the
// medial value at 1/2 to vanish for even k >= 2 and the dual value at
// (1+i)/2 for k >= 4 (the k = 0 mod 4 case, where it is free). The
// homogeneous directions are the constant 1 on horizontal edges with i^k on
// vertical ones, and the constant 1 on dual points. The residue-pairing
// battery downstream cross-validates these anchors against the negative
// monomials.
template <typename T>
void fix_free_constants(int k, LatticeFunction<T>& vals, bool fix_medial, bool fix_dual) {
    using Ops = CoeffOps<T>;
    T ik = Ops::one();
    for (int j = 0; j < ((k % 4) + 4) % 4; ++j) ik = Ops::mul_i(ik);
    if (fix_medial) {
        T a = Ops::zero() - vals.at({2, 0});
        for (auto& [p, v] : vals.values()) {
            Sub s = classify_point(p);
            if (s == Sub::medial_h) v = v + a;
            else if (s == Sub::medial_v) v = v + ik * a;
        }
    }
    if (fix_dual) {
        if (k < 4) throw MonomialError("dual constant only free for k = 0 mod 4");
        T b = Ops::zero() - vals.at({2, 2});
        for (auto& [p, v] : vals.values())
            if (classify_point(p) == Sub::dual) v = v + b;
    }
}

// Verify the defining relations of a freshly built level: dbar u^[k] = 0,
// d u^[k] = k u^[k-1], rotation and conjugation symmetries. Exact equality in
// the rational ring; small relative tolerance in doubles.
template <typename T>
void verify_positive(int order, const LatticeFunction<T>& cur, const LatticeFunction<T>& prev) {
    using Ops = CoeffOps<T>;
    auto near = [&](const T& a, const T& b, double local_scale) {
        if constexpr (std::is_same_v<T, GaussianRational> || std::is_same_v<T, GaussianBig>) {
            (void)local_scale;
            return a == b;
        } else {
            return std::abs(Ops::to_complex(a) - Ops::to_complex(b)) <=
                   1e-9 * (1.0 + local_scale);
        }
    };
    // cancellation scale of a half-step stencil at p
    auto stencil_scale = [&](QPoint p) {
        double s = 0.0;
        for (QPoint d : {QPoint{2, 0}, QPoint{-2, 0}, QPoint{0, 2}, QPoint{0, -2}})
            if (cur.has(p + d)) s += std::abs(Ops::to_complex(cur.at(p + d)));
        return s;
    };
    auto db = apply_operator(DiffOp::dbar, cur);
    for (auto& [p, v] : db.values())
        if (!near(v, Ops::zero(), stencil_scale(p)))
            throw MonomialError("dbar u^[n] != 0 for positive n");
    auto d = apply_operator(DiffOp::d, cur);
    T kk = Ops::from_int(order);
    for (auto& [p, v] : d.values()) {
        if (!prev.has(p)) continue;
        T want = kk * prev.at(p);
        if (!near(v, want, stencil_scale(p)))
            throw MonomialError("d u^[n] != n u^[n-1]");
    }
    T ik = Ops::one();
    for (int j = 0; j < ((order % 4) + 4) % 4; ++j) ik = Ops::mul_i(ik);
    for (auto& [p, v] : cur.values()) {
        double sc = std::abs(Ops::to_complex(v));
        QPoint r = p.rot90();
        if (cur.has(r) && !near(cur.at(r), ik * v, sc))
            throw MonomialError("rotation symmetry broken");
        QPoint c = p.conj();
        if (cur.has(c) && !near(cur.at(c), Ops::conj(v), sc))
            throw MonomialError("conjugation symmetry broken");
    }
}

}  // namespace detail

template <typename T>
inline DiscreteMonomial MonomialCache::build_positive_impl(int n, int radius_q) {
    using Ops = CoeffOps<T>;
    int base_q = radius_q + 2 * n + 4;
    LatticeFunction<T> prev = detail::fill_window<T>(base_q, SubMask::diamond_medial(),
                                                     [](QPoint, Sub) { return Ops::one(); });
    LatticeFunction<T> cur;
    for (int k = 1; k <= n; ++k) {
        int rq = base_q - 2 * k;
        T seed_dual = Ops::zero(), seed_mh = Ops::zero();
        bool free_mh = false, free_dual = false;
        if (k % 2 == 1) {
            if (k == 1) seed_mh = half_value<T>();
        } else {
            free_mh = true;  // free real constant on the medial pair
        }
        if (k % 4 != 0) {
            // u(1/2+i/2) (1 - i^k) = k u^[k-1](i/2)
            T ik = Ops::one();
            for (int j = 0; j < k % 4; ++j) ik = Ops::mul_i(ik);
            seed_dual = (Ops::from_int(k) * prev.at({0, 2})) / (Ops::one() - ik);
        } else {
            free_dual = true;
        }
        cur = detail::propagate_positive<T>(k, rq, prev, seed_dual, seed_mh, Ops::from_int(k));
        if (free_mh || free_dual) detail::fix_free_constants<T>(k, cur, free_mh, free_dual);
        detail::verify_positive<T>(k, cur, prev);
        prev = std::move(cur);
    }
    DiscreteMonomial m;
    m.order = n;
    m.values = prev.map([](const T& v) { return Ops::to_complex(v); });
    if constexpr (std::is_same_v<T, GaussianRational>) {
        m.exact = prev.map([](const GaussianRational& v) { return PiRat(v); });
        m.exact_ok = true;
    } else {
        m.exact_ok = false;
    }
    m.vanish_radius_q = -1;
    for (int K = 0; K <= m.values.radius_q(); ++K) {
        bool all_zero = true;
        for (auto& [p, v] : m.values.values())
            if (p.linf() <= K && std::abs(v) > 1e-12) {
                all_zero = false;
                break;
            }
        if (!all_zero) break;
        m.vanish_radius_q = K;
    }
    return m;
}

inline DiscreteMonomial MonomialCache::build_positive(int n, int radius_q) {
    try {
        return build_positive_impl<GaussianRational>(n, radius_q);
    } catch (const RationalOverflow&) {
        // High orders overflow int64 rationals. Doubles are not an option:
        // the vanishing neighbourhood is a cancellation of huge path sums and
        // must come out exactly zero. Use big-integer rationals instead.
        return build_positive_impl<GaussianBig>(n, radius_q);
    }
}

}  // namespace fdgff
