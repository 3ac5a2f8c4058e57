#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dirichlet_green.hpp"
#include "pi_ring.hpp"

namespace fdgff {

struct GrassmannError : std::runtime_error {
    explicit GrassmannError(const std::string& what) : std::runtime_error(what) {}
};

enum class Species : uint8_t { xi = 0, theta = 1 };

// A Grassmann generator xi(u) or theta(u), u in Z^2. The total order is
// species-major, then lexicographic in the site; it fixes the canonical form
// of monomials.
struct Generator {
    Species species;
    int x, y;

    uint64_t key() const {
        return (uint64_t(species) << 48) | (uint64_t(uint16_t(x + 0x4000)) << 24) |
               uint64_t(uint16_t(y + 0x4000));
    }
    static Generator from_key(uint64_t k) {
        Generator g;
        g.species = Species((k >> 48) & 1);
        g.x = int((k >> 24) & 0xffff) - 0x4000;
        g.y = int(k & 0xffff) - 0x4000;
        return g;
    }
    friend bool operator==(const Generator& a, const Generator& b) { return a.key() == b.key(); }
    friend bool operator<(const Generator& a, const Generator& b) { return a.key() < b.key(); }
};

inline Generator gen_xi(int x, int y) { return {Species::xi, x, y}; }
inline Generator gen_theta(int x, int y) { return {Species::theta, x, y}; }

// Canonically ordered duplicate-free generator word.
using Mono = std::vector<uint64_t>;

struct MonoHash {
    size_t operator()(const Mono& m) const noexcept {
        uint64_t h = 1469598103934665603ULL;
        for (uint64_t k : m) {
            h ^= k;
            h *= 1099511628211ULL;
        }
        return size_t(h);
    }
};

// Merge two sorted generator words tracking the permutation sign; returns
// false when a generator repeats (the product vanishes by nilpotency).
inline bool merge_words(const Mono& a, const Mono& b, Mono& out, int& sign) {
    out.clear();
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    int s = 1;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return false;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] jumps over the remaining a-tail
            if ((a.size() - i) % 2 == 1) s = -s;
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    sign = s;
    return true;
}

// Sparse anticommutative polynomial over the generators with coefficients in
// C (default) or the exact ring Q(i)[pi, pi^-1].
template <typename C = cplx>
class GrassmannPoly {
  public:
    using Ops = CoeffOps<C>;
    using TermMap = std::unordered_map<Mono, C, MonoHash>;

    GrassmannPoly() = default;
    static GrassmannPoly scalar(C v) {
        GrassmannPoly p;
        if (!Ops::is_zero(v)) p.terms_[Mono{}] = std::move(v);
        return p;
    }
    static GrassmannPoly generator(Generator g, C coeff) {
        GrassmannPoly p;
        if (!Ops::is_zero(coeff)) p.terms_[Mono{g.key()}] = std::move(coeff);
        return p;
    }
    static GrassmannPoly xi(int x, int y) { return generator(gen_xi(x, y), Ops::one()); }
    static GrassmannPoly theta(int x, int y) { return generator(gen_theta(x, y), Ops::one()); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    void add_term(const Mono& m, const C& c) {
        if (Ops::is_zero(c)) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second = it->second + c;
            if (Ops::is_zero(it->second)) terms_.erase(it);
        }
    }

    GrassmannPoly& operator+=(const GrassmannPoly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    GrassmannPoly& operator-=(const GrassmannPoly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, Ops::zero() - c);
        return *this;
    }
    friend GrassmannPoly operator+(GrassmannPoly a, const GrassmannPoly& b) { return a += b; }
    friend GrassmannPoly operator-(GrassmannPoly a, const GrassmannPoly& b) { return a -= b; }
    GrassmannPoly operator-() const {
        GrassmannPoly r;
        for (auto& [m, c] : terms_) r.terms_[m] = Ops::zero() - c;
        return r;
    }

    GrassmannPoly operator*(const C& s) const {
        GrassmannPoly r;
        if (Ops::is_zero(s)) return r;
        for (auto& [m, c] : terms_) {
            C v = c * s;
            if (!Ops::is_zero(v)) r.terms_[m] = v;
        }
        return r;
    }

    friend GrassmannPoly operator*(const GrassmannPoly& a, const GrassmannPoly& b) {
        GrassmannPoly r;
        Mono merged;
        int sign;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                if (!merge_words(ma, mb, merged, sign)) continue;
                C v = ca * cb;
                if (sign < 0) v = CoeffOps<C>::zero() - v;
                r.add_term(merged, v);
            }
        return r;
    }

    // Union of sites appearing in any term.
    std::vector<std::pair<int, int>> support() const {
        std::set<std::pair<int, int>> s;
        for (auto& [m, c] : terms_)
            for (uint64_t k : m) {
                Generator g = Generator::from_key(k);
                s.insert({g.x, g.y});
            }
        return {s.begin(), s.end()};
    }

    int support_radius() const {
        int r = 0;
        for (auto& [m, c] : terms_)
            for (uint64_t k : m) {
                Generator g = Generator::from_key(k);
                r = std::max({r, std::abs(g.x), std::abs(g.y)});
            }
        return r;
    }

    int max_degree() const {
        size_t d = 0;
        for (auto& [m, c] : terms_) d = std::max(d, m.size());
        return (int)d;
    }

    // True when every term has the same parity of degree.
    bool is_even() const {
        for (auto& [m, c] : terms_)
            if (m.size() % 2) return false;
        return true;
    }

    template <typename D>
    GrassmannPoly<D> convert() const {
        GrassmannPoly<D> r;
        for (auto& [m, c] : terms_) r.add_term(m, coeff_convert<D>(c));
        return r;
    }

  private:
    template <typename D>
    static D coeff_convert(const C& c);

    TermMap terms_;
};

template <>
template <>
inline cplx GrassmannPoly<PiRat>::coeff_convert<cplx>(const PiRat& c) {
    return c.to_complex();
}

using PolyD = GrassmannPoly<cplx>;
using PolyX = GrassmannPoly<PiRat>;

// Discrete difference polynomials on the generator fields.
template <typename C = cplx>
GrassmannPoly<C> poly_laplacian(Species sp, int x, int y) {
    using Ops = CoeffOps<C>;
    GrassmannPoly<C> p;
    auto g = [&](int a, int b, long long coeff) {
        p += GrassmannPoly<C>::generator({sp, a, b}, Ops::from_int(coeff));
    };
    g(x + 1, y, 1);
    g(x - 1, y, 1);
    g(x, y + 1, 1);
    g(x, y - 1, 1);
    g(x, y, -4);
    return p;
}

// Gradient across the edge with midpoint (x + ex/2, y + ey/2): for the edge
// east of (x, y) pass half = (1,0) etc. Accepts the geometric Edge too.
template <typename C = cplx>
GrassmannPoly<C> poly_grad(Species sp, const Edge& e) {
    using Ops = CoeffOps<C>;
    GrassmannPoly<C> hi = GrassmannPoly<C>::generator({sp, e.b.x, e.b.y}, Ops::one());
    GrassmannPoly<C> lo = GrassmannPoly<C>::generator({sp, e.a.x, e.a.y}, Ops::one());
    return hi - lo;
}

// The evaluation map: translate every generator site by z (lattice units).
// Generators landing outside the domain kill their monomial; boundary sites
// are kept (their correlations vanish through the Green's function).
template <typename C>
GrassmannPoly<C> evaluate(const GrassmannPoly<C>& p, Vertex z, const DiscreteDomain& dom) {
    GrassmannPoly<C> out;
    Mono shifted;
    for (auto& [m, c] : p.terms()) {
        shifted.clear();
        bool dead = false;
        for (uint64_t k : m) {
            Generator g = Generator::from_key(k);
            Vertex site{z.x + g.x, z.y + g.y};
            if (!dom.contains(site)) {
                dead = true;
                break;
            }
            shifted.push_back(Generator{g.species, site.x, site.y}.key());
        }
        if (dead) continue;
        // translation preserves the site order within each species
        out.add_term(shifted, c);
    }
    return out;
}

struct Insertion {
    PolyD poly;
    Vertex site;
};

struct CorrelationValue {
    cplx value;
    size_t n_terms_evaluated = 0;
};

// fDGFF correlation of a product of evaluated polynomials: each balanced
// canonical monomial xi(a_1)..xi(a_n) theta(b_1)..theta(b_n) contributes
// (-1)^{n(n-1)/2} (4 pi)^n det[G(a_i, b_j)]; unbalanced monomials vanish, and
// any boundary site zeroes its determinant row.
class CorrelationEngine {
  public:
    CorrelationEngine(const DirichletGreen& green, int degree_cap = 16)
        : green_(&green), degree_cap_(degree_cap) {}

    const DiscreteDomain& domain() const { return green_->domain(); }

    cplx monomial_value(const Mono& m) const {
        size_t n2 = m.size();
        if (n2 % 2) return 0.0;
        size_t n = n2 / 2;
        if (n == 0) return 1.0;
        // canonical order puts all xi's first
        for (size_t i = 0; i < n; ++i)
            if (Generator::from_key(m[i]).species != Species::xi) return 0.0;
        for (size_t i = n; i < n2; ++i)
            if (Generator::from_key(m[i]).species != Species::theta) return 0.0;
        Eigen::MatrixXcd g((Eigen::Index)n, (Eigen::Index)n);
        for (size_t i = 0; i < n; ++i) {
            Generator zi = Generator::from_key(m[i]);
            for (size_t j = 0; j < n; ++j) {
                Generator wj = Generator::from_key(m[n + j]);
                g((Eigen::Index)i, (Eigen::Index)j) =
                    4.0 * std::numbers::pi * (*green_)(Vertex{zi.x, zi.y}, Vertex{wj.x, wj.y});
            }
        }
        cplx det = g.determinant();
        int swaps = int((n * (n - 1) / 2) % 2);
        return swaps ? -det : det;
    }

    cplx value(const PolyD& p) const {
        cplx acc = 0.0;
        for (auto& [m, c] : p.terms()) {
            if ((int)m.size() > degree_cap_)
                throw GrassmannError("correlation degree cap exceeded");
            if (m.size() % 2) continue;
            acc += c * monomial_value(m);
        }
        return acc;
    }

  private:
    const DirichletGreen* green_;
    int degree_cap_;
};

// Correlation of evaluated insertions.
inline cplx correlation(const DirichletGreen& green, const std::vector<Insertion>& ins,
                        int degree_cap = 16) {
    PolyD prod = PolyD::scalar(1.0);
    for (const Insertion& i : ins) prod = prod * evaluate(i.poly, i.site, green.domain());
    return CorrelationEngine(green, degree_cap).value(prod);
}

// Signature of a bijection b: {0..n-1} -> {0..n-1} given as an index array.
inline int permutation_sign(std::vector<int> perm) {
    int sign = 1;
    for (size_t i = 0; i < perm.size(); ++i)
        while (perm[i] != (int)i) {
            std::swap(perm[i], perm[perm[i]]);
            sign = -sign;
        }
    return sign;
}

// < prod xi(z_i) theta(w_i) prod (xi(x_j) theta(x_j) + c) > evaluated both by
// direct expansion and by the bijection formula; the two must agree.
inline cplx correlation_with_dissipation(const DirichletGreen& green,
                                         const std::vector<std::pair<Vertex, Vertex>>& zw_pairs,
                                         const std::vector<Vertex>& xs, cplx c,
                                         double consistency_tol = 1e-9) {
    const DiscreteDomain& dom = green.domain();
    // (a) direct expansion
    PolyD prod = PolyD::scalar(1.0);
    for (auto& [z, w] : zw_pairs) {
        PolyD f = PolyD::generator(gen_xi(z.x, z.y), 1.0) * PolyD::generator(gen_theta(w.x, w.y), 1.0);
        prod = prod * f;
    }
    for (const Vertex& x : xs) {
        PolyD f = PolyD::generator(gen_xi(x.x, x.y), 1.0) * PolyD::generator(gen_theta(x.x, x.y), 1.0) +
                  PolyD::scalar(c);
        prod = prod * f;
    }
    cplx direct = CorrelationEngine(green).value(evaluate(prod, Vertex{0, 0}, dom));

    // (b) bijections from zs+xs onto ws+xs; fixed points only on xs
    size_t n = zw_pairs.size(), k = xs.size(), N = n + k;
    std::vector<Vertex> src, dst;
    for (auto& [z, w] : zw_pairs) {
        src.push_back(z);
        dst.push_back(w);
    }
    for (const Vertex& x : xs) {
        src.push_back(x);
        dst.push_back(x);
    }
    auto two_pt = [&](Vertex a, Vertex b) { return 4.0 * std::numbers::pi * green(a, b); };
    // Each bijection contributes with the signature that makes the sum the
    // determinant of the pair matrix with +c on the fixed-point diagonal;
    // fixed points of b contribute <xi(x)theta(x)> + c.
    std::vector<int> perm(N);
    for (size_t i = 0; i < N; ++i) perm[i] = (int)i;
    cplx bij = 0.0;
    do {
        cplx term = 1.0;
        for (size_t i = 0; i < N; ++i) {
            bool is_fixed = (i >= n && perm[i] == (int)i);
            term *= two_pt(src[i], dst[perm[i]]) + (is_fixed ? c : cplx(0.0));
        }
        bij += double(permutation_sign(perm)) * term;
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (std::abs(direct - bij) > consistency_tol)
        throw GrassmannError("dissipation bijection formula disagrees with direct expansion");
    return direct;
}

}  // namespace fdgff
