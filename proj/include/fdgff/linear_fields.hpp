#pragma once

#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "grassmann.hpp"
#include "monomials.hpp"

namespace fdgff {

// Degree-1 homogeneous field polynomial: a finitely supported map from
// generators to coefficients.
template <typename C = cplx>
class LinearPoly {
  public:
    using Ops = CoeffOps<C>;

    LinearPoly() = default;
    static LinearPoly generator(Generator g, C c) {
        LinearPoly l;
        l.add(g, c);
        return l;
    }

    void add(Generator g, const C& c) {
        if (Ops::is_zero(c)) return;
        auto [it, fresh] = coeffs_.try_emplace(g.key(), c);
        if (!fresh) {
            it->second = it->second + c;
            if (Ops::is_zero(it->second)) coeffs_.erase(it);
        }
    }

    const std::map<uint64_t, C>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    LinearPoly& operator+=(const LinearPoly& o) {
        for (auto& [k, c] : o.coeffs_) add(Generator::from_key(k), c);
        return *this;
    }
    friend LinearPoly operator+(LinearPoly a, const LinearPoly& b) { return a += b; }
    LinearPoly operator*(const C& s) const {
        LinearPoly r;
        for (auto& [k, c] : coeffs_) r.add(Generator::from_key(k), c * s);
        return r;
    }
    LinearPoly operator-() const {
        LinearPoly r;
        for (auto& [k, c] : coeffs_) r.coeffs_[k] = Ops::zero() - c;
        return r;
    }

    GrassmannPoly<C> to_poly() const {
        GrassmannPoly<C> p;
        for (auto& [k, c] : coeffs_) p.add_term(Mono{k}, c);
        return p;
    }

    static LinearPoly from_poly(const GrassmannPoly<C>& p) {
        LinearPoly l;
        for (auto& [m, c] : p.terms()) {
            if (m.size() != 1) throw GrassmannError("not a degree-1 homogeneous polynomial");
            l.add(Generator::from_key(m[0]), c);
        }
        return l;
    }

    int support_radius() const {
        int r = 0;
        for (auto& [k, c] : coeffs_) {
            Generator g = Generator::from_key(k);
            r = std::max({r, std::abs(g.x), std::abs(g.y)});
        }
        return r;
    }

    bool pure_species(Species s) const {
        for (auto& [k, c] : coeffs_)
            if (Generator::from_key(k).species != s) return false;
        return true;
    }

    template <typename D>
    LinearPoly<D> convert() const;

  private:
    std::map<uint64_t, C> coeffs_;
};

template <>
template <>
inline LinearPoly<cplx> LinearPoly<PiRat>::convert<cplx>() const {
    LinearPoly<cplx> r;
    for (auto& [k, c] : coeffs()) r.add(Generator::from_key(k), c.to_complex());
    return r;
}

// Scalar Wick contraction of generators through the full-plane Green's
// function: <xi(u), theta(v)> = 4 pi G(u - v) = -<theta(u), xi(v)>, and zero
// within a species.
template <typename C>
C wick_generators(Generator a, Generator b);

template <>
inline cplx wick_generators<cplx>(Generator a, Generator b) {
    if (a.species == b.species) return 0.0;
    double g = FullPlaneGreen::instance()(a.x - b.x, a.y - b.y);
    double v = 4.0 * std::numbers::pi * g;
    return a.species == Species::xi ? cplx(v) : cplx(-v);
}

template <>
inline PiRat wick_generators<PiRat>(Generator a, Generator b) {
    if (a.species == b.species) return PiRat();
    auto e = FullPlaneGreen::instance().exact_4pi(a.x - b.x, a.y - b.y);
    if (!e)
        throw GrassmannError("exact Wick contraction outside the exact Green window");
    return a.species == Species::xi ? *e : -*e;
}

// Bilinear extension to linear field polynomials; antisymmetric.
template <typename C>
C wick_contraction(const LinearPoly<C>& l1, const LinearPoly<C>& l2) {
    C acc = CoeffOps<C>::zero();
    for (auto& [k1, c1] : l1.coeffs())
        for (auto& [k2, c2] : l2.coeffs()) {
            C w = wick_generators<C>(Generator::from_key(k1), Generator::from_key(k2));
            if (!CoeffOps<C>::is_zero(w)) acc = acc + c1 * c2 * w;
        }
    return acc;
}

// Normal ordering of an ordered list of linear factors: the sum over partial
// pairings P with signature (-1)^P (-1)^{|P|}, contraction products and the
// ordered product of unpaired factors. Verified against the recursive
// formula :L_n ... L_1: = L_n :L_{n-1}...: + sum_i (-1)^i <L_n, L_{n-i}>
// :...without L_{n-i}...: on every call.
template <typename C>
GrassmannPoly<C> normal_order_pairings(const std::vector<LinearPoly<C>>& factors) {
    using Ops = CoeffOps<C>;
    size_t n = factors.size();
    GrassmannPoly<C> total;
    std::vector<std::pair<int, int>> pairs;
    std::vector<char> used(n, 0);
    std::vector<std::vector<C>> wick(n, std::vector<C>(n, Ops::zero()));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) wick[i][j] = wick_contraction(factors[i], factors[j]);

    auto emit = [&]() {
        // permutation (i1 j1 i2 j2 ... rest ascending) against the identity
        std::vector<int> perm;
        std::vector<int> rest;
        for (auto& [i, j] : pairs) {
            perm.push_back(i);
            perm.push_back(j);
        }
        for (size_t i = 0; i < n; ++i)
            if (!used[i]) rest.push_back((int)i);
        for (int r : rest) perm.push_back(r);
        int sign = permutation_sign(perm);
        if (pairs.size() % 2) sign = -sign;  // (-1)^{|P|}
        C coeff = Ops::from_int(sign);
        for (auto& [i, j] : pairs) coeff = coeff * wick[i][j];
        if (Ops::is_zero(coeff)) return;
        GrassmannPoly<C> prod = GrassmannPoly<C>::scalar(coeff);
        for (int r : rest) prod = prod * factors[r].to_poly();
        total += prod;
    };

    // each index is either left unpaired or paired with a later one
    std::function<void(size_t)> rec = [&](size_t pos) {
        if (pos >= n) {
            emit();
            return;
        }
        if (used[pos]) {
            rec(pos + 1);
            return;
        }
        rec(pos + 1);  // pos stays unpaired
        used[pos] = 1;
        for (size_t j = pos + 1; j < n; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            pairs.emplace_back((int)pos, (int)j);
            rec(pos + 1);
            pairs.pop_back();
            used[j] = 0;
        }
        used[pos] = 0;
    };
    rec(0);
    return total;
}

template <typename C>
GrassmannPoly<C> normal_order_recursive(const std::vector<LinearPoly<C>>& factors) {
    using Ops = CoeffOps<C>;
    if (factors.empty()) return GrassmannPoly<C>::scalar(Ops::one());
    if (factors.size() == 1) return factors[0].to_poly();
    // With F1 = L_n, F_{1+i} = L_{n-i}:
    // :F1 F2 ... Fd: = F1 :F2...Fd: + sum_{i>=1} (-1)^i <F1, F_{1+i}> :F2...^F_{1+i}...Fd:
    std::vector<LinearPoly<C>> rest(factors.begin() + 1, factors.end());
    GrassmannPoly<C> out = factors[0].to_poly() * normal_order_recursive(rest);
    for (size_t i = 1; i < factors.size(); ++i) {
        C w = wick_contraction(factors[0], factors[i]);
        if (Ops::is_zero(w)) continue;
        std::vector<LinearPoly<C>> sub;
        for (size_t j = 1; j < factors.size(); ++j)
            if (j != i) sub.push_back(factors[j]);
        if (i % 2 == 1) w = Ops::zero() - w;  // (-1)^i
        out += normal_order_recursive(sub) * w;
    }
    return out;
}

template <typename C>
GrassmannPoly<C> normal_order(const std::vector<LinearPoly<C>>& factors) {
    auto a = normal_order_pairings(factors);
    auto b = normal_order_recursive(factors);
    auto diff = a - b;
    if (!diff.is_zero()) {
        bool bad = false;
        for (auto& [m, c] : diff.terms())
            if (!CoeffOps<C>::near_zero(c, 1e-9)) bad = true;
        if (bad)
            throw GrassmannError("normal ordering definitions disagree (internal consistency)");
    }
    return a;
}

// A sum of ordered tensors of linear factors with coefficients.
template <typename C>
struct TensorExpansion {
    struct Term {
        C coeff;
        std::vector<LinearPoly<C>> factors;
    };
    std::vector<Term> terms;
};

// Preimage of P under normal ordering, by degree-descending recursion:
// Q <- tensors of P's monomials; C <- P - :Q:; recurse on C. Exact in the
// coefficient ring; normal_order(unnormal_order(P)) = P.
template <typename C>
TensorExpansion<C> unnormal_order(const GrassmannPoly<C>& p) {
    using Ops = CoeffOps<C>;
    TensorExpansion<C> out;
    GrassmannPoly<C> residual = p;
    for (int guard = 0; guard < 64 && !residual.is_zero(); ++guard) {
        GrassmannPoly<C> reordered;
        for (auto& [m, c] : residual.terms()) {
            typename TensorExpansion<C>::Term t;
            t.coeff = c;
            for (uint64_t k : m)
                t.factors.push_back(LinearPoly<C>::generator(Generator::from_key(k), Ops::one()));
            out.terms.push_back(std::move(t));
        }
        // subtract :Q_batch: and keep only the lower-degree correction
        GrassmannPoly<C> applied;
        for (auto& [m, c] : residual.terms()) {
            std::vector<LinearPoly<C>> fs;
            for (uint64_t k : m)
                fs.push_back(LinearPoly<C>::generator(Generator::from_key(k), Ops::one()));
            applied += normal_order_pairings(fs) * c;
        }
        residual = residual - applied;
    }
    if (!residual.is_zero()) throw GrassmannError("unnormal_order failed to terminate");
    return out;
}

template <typename C>
GrassmannPoly<C> normal_order(const TensorExpansion<C>& te) {
    GrassmannPoly<C> out;
    for (auto& t : te.terms) out += normal_order_pairings(t.factors) * t.coeff;
    return out;
}

}  // namespace fdgff
