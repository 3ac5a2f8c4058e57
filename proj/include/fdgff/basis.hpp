#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>

#include "modes.hpp"
#include "null_test.hpp"

namespace fdgff {

// Realized sign of the identity-field encoding 1 = (sign) chi_0 eta_0 omega.
// Determined numerically from the contour-integral action of the zero modes
// on the ground states (tested in the acceptance suite).
inline constexpr int ground_one_sign = +1;

// A canonical Fock-basis word
//   chi_{-k_r} .. chi_{-k_1} eta_{-l_s} .. eta_{-l_1}
//   chibar_{-kb_..} .. etabar_{-lb_..} omega
// with 0 <= k_1 < ... (holomorphic) and 0 < kb_1 < ... (antiholomorphic);
// index lists are stored ascending.
struct BasisWord {
    std::vector<int> chi, eta, chibar, etabar;

    friend bool operator==(const BasisWord& a, const BasisWord& b) {
        return a.chi == b.chi && a.eta == b.eta && a.chibar == b.chibar && a.etabar == b.etabar;
    }
    friend bool operator<(const BasisWord& a, const BasisWord& b) {
        if (a.chi != b.chi) return a.chi < b.chi;
        if (a.eta != b.eta) return a.eta < b.eta;
        if (a.chibar != b.chibar) return a.chibar < b.chibar;
        return a.etabar < b.etabar;
    }

    int hol_dimension() const {
        int d = 0;
        for (int k : chi) d += k;
        for (int k : eta) d += k;
        return d;
    }
    int antihol_dimension() const {
        int d = 0;
        for (int k : chibar) d += k;
        for (int k : etabar) d += k;
        return d;
    }
    int dimension() const { return hol_dimension() + antihol_dimension(); }

    size_t letters() const { return chi.size() + eta.size() + chibar.size() + etabar.size(); }
};

// Letter = one mode operator in a word.
struct Letter {
    ModeSpecies species;
    Sector sector;
    int k;  // the letter is species_{-k}

    int group() const { return int(sector) * 2 + int(species); }
};

namespace detail {

inline std::vector<Letter> word_letters(const BasisWord& w) {
    std::vector<Letter> ls;
    auto push_desc = [&](const std::vector<int>& ks, ModeSpecies sp, Sector sec) {
        for (auto it = ks.rbegin(); it != ks.rend(); ++it)
            ls.push_back({sp, sec, *it});
    };
    push_desc(w.chi, ModeSpecies::chi, Sector::holomorphic);
    push_desc(w.eta, ModeSpecies::eta, Sector::holomorphic);
    push_desc(w.chibar, ModeSpecies::chi, Sector::antiholomorphic);
    push_desc(w.etabar, ModeSpecies::eta, Sector::antiholomorphic);
    return ls;
}

inline BasisWord letters_word(const std::vector<Letter>& ls) {
    BasisWord w;
    for (const Letter& l : ls) {
        auto& v = (l.sector == Sector::holomorphic)
                      ? (l.species == ModeSpecies::chi ? w.chi : w.eta)
                      : (l.species == ModeSpecies::chi ? w.chibar : w.etabar);
        v.push_back(l.k);
    }
    std::sort(w.chi.begin(), w.chi.end());
    std::sort(w.eta.begin(), w.eta.end());
    std::sort(w.chibar.begin(), w.chibar.end());
    std::sort(w.etabar.begin(), w.etabar.end());
    return w;
}

}  // namespace detail

// Finite sum of basis words with coefficients; canonically merged.
template <typename C = cplx>
class BasisExpansion {
  public:
    using Ops = CoeffOps<C>;

    BasisExpansion() = default;
    static BasisExpansion word(BasisWord w, C coeff) {
        BasisExpansion e;
        e.add(std::move(w), std::move(coeff));
        return e;
    }
    static BasisExpansion omega() { return word(BasisWord{}, Ops::one()); }
    static BasisExpansion one() {
        BasisWord w;
        w.chi = {0};
        w.eta = {0};
        return word(std::move(w), Ops::from_int(ground_one_sign));
    }
    static BasisExpansion xi_state() {
        BasisWord w;
        w.chi = {0};
        return word(std::move(w), Ops::from_int(-1));
    }
    static BasisExpansion theta_state() {
        BasisWord w;
        w.eta = {0};
        return word(std::move(w), Ops::from_int(-1));
    }

    const std::map<BasisWord, C>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(BasisWord w, C coeff) {
        if (Ops::is_zero(coeff)) return;
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            terms_.emplace(std::move(w), std::move(coeff));
        } else {
            it->second = it->second + coeff;
            if (Ops::is_zero(it->second)) terms_.erase(it);
        }
    }

    BasisExpansion& operator+=(const BasisExpansion& o) {
        for (auto& [w, c] : o.terms_) add(w, c);
        return *this;
    }
    BasisExpansion& operator-=(const BasisExpansion& o) {
        for (auto& [w, c] : o.terms_) add(w, Ops::zero() - c);
        return *this;
    }
    friend BasisExpansion operator+(BasisExpansion a, const BasisExpansion& b) { return a += b; }
    friend BasisExpansion operator-(BasisExpansion a, const BasisExpansion& b) { return a -= b; }
    BasisExpansion operator*(const C& s) const {
        BasisExpansion r;
        for (auto& [w, c] : terms_) r.add(w, c * s);
        return r;
    }

    int max_index() const {
        int m = 0;
        for (auto& [w, c] : terms_)
            for (auto* v : {&w.chi, &w.eta, &w.chibar, &w.etabar})
                for (int k : *v) m = std::max(m, k);
        return m;
    }

    double max_abs() const {
        double m = 0;
        for (auto& [w, c] : terms_) m = std::max(m, std::abs(Ops::to_complex(c)));
        return m;
    }

    template <typename D>
    BasisExpansion<D> convert() const;

  private:
    std::map<BasisWord, C> terms_;
};

template <>
template <>
inline BasisExpansion<cplx> BasisExpansion<PiRat>::convert<cplx>() const {
    BasisExpansion<cplx> r;
    for (auto& [w, c] : terms()) r.add(w, c.to_complex());
    return r;
}

// Apply a single mode operator algebraically to a basis word: anticommute it
// through the letters using {eta_k, chi_l} = k delta_{k+l} (per sector, all
// other superbrackets zero), annihilate positive modes on omega, and insert
// nonpositive modes at their canonical slot. Antiholomorphic zero modes are
// identified with the holomorphic ones before insertion.
template <typename C>
BasisExpansion<C> apply_mode(ModeSpecies species, Sector sector, int m,
                             const BasisExpansion<C>& e) {
    using Ops = CoeffOps<C>;
    if (m == 0 && sector == Sector::antiholomorphic) sector = Sector::holomorphic;
    BasisExpansion<C> out;
    Letter op{species, sector, -m};  // would-be letter form species_{-(-m)}; op.k = -m
    for (auto& [w, c] : e.terms()) {
        auto letters = detail::word_letters(w);
        if (m > 0) {
            // contraction walk
            int sign = 1;
            for (size_t i = 0; i < letters.size(); ++i) {
                const Letter& b = letters[i];
                if (b.sector == sector && b.species != species && b.k == m) {
                    // {eta_m, chi_{-m}} = m ; {chi_m, eta_{-m}} = -m
                    long long bracket = (species == ModeSpecies::eta) ? m : -m;
                    std::vector<Letter> rest;
                    for (size_t j = 0; j < letters.size(); ++j)
                        if (j != i) rest.push_back(letters[j]);
                    C coeff = c * Ops::from_int(bracket * sign);
                    out.add(detail::letters_word(rest), coeff);
                }
                sign = -sign;
            }
            // reaching omega annihilates
        } else {
            // insertion walk: op.k = -m >= 0
            int sign = 1;
            size_t pos = 0;
            bool dup = false;
            for (; pos < letters.size(); ++pos) {
                const Letter& b = letters[pos];
                if (b.group() < op.group() || (b.group() == op.group() && b.k > op.k)) {
                    sign = -sign;
                    continue;
                }
                if (b.group() == op.group() && b.k == op.k) dup = true;
                break;
            }
            if (dup) continue;
            std::vector<Letter> ls = letters;
            ls.insert(ls.begin() + pos, op);
            out.add(detail::letters_word(ls), c * Ops::from_int(sign));
        }
    }
    return out;
}

// Sugawara Virasoro mode acting purely algebraically on a basis expansion.
template <typename C>
BasisExpansion<C> sugawara_mode(int n, Sector sector, const BasisExpansion<C>& e) {
    if (e.is_zero()) return e;
    int M = e.max_index() + std::abs(n) + 2;
    BasisExpansion<C> total;
    int half_up = (n >= 0) ? (n + 1) / 2 : -((-n) / 2);
    for (int k = half_up; k <= M; ++k) {
        auto inner = apply_mode(ModeSpecies::eta, sector, k, e);
        if (inner.is_zero()) continue;
        total += apply_mode(ModeSpecies::chi, sector, n - k, inner);
    }
    for (int k = n - M; k < half_up; ++k) {
        auto inner = apply_mode(ModeSpecies::chi, sector, n - k, e);
        if (inner.is_zero()) continue;
        total -= apply_mode(ModeSpecies::eta, sector, k, inner);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Mode representatives and decomposition of linear field polynomials
// ---------------------------------------------------------------------------

// Identity of a linear basis class: the ground fermion of a species or a
// current mode X_{-k} 1 / H_{-k} 1 (and bars).
struct LinearClass {
    enum Kind : uint8_t { ground, mode } kind;
    ModeSpecies species;
    Sector sector;  // modes only
    int k = 0;      // modes only, k >= 1

    friend bool operator<(const LinearClass& a, const LinearClass& b) {
        auto ta = std::tuple(int(a.kind), int(a.species), int(a.sector), a.k);
        auto tb = std::tuple(int(b.kind), int(b.species), int(b.sector), b.k);
        return ta < tb;
    }
};

namespace detail {

// The (1/2pi) dbar u^[-k] failure table in the requested ring.
template <typename C>
LatticeFunction<C> residue_table(int k);

template <>
inline LatticeFunction<cplx> residue_table<cplx>(int k) {
    return MonomialCache::instance().dbar_residue_table(-k);
}

template <>
inline LatticeFunction<PiRat> residue_table<PiRat>(int k) {
    auto mono = MonomialCache::instance().get(-k, std::max(4, k + 4));
    if (!mono->exact_ok) throw MonomialError("exact residue table unavailable");
    auto df = apply_operator(DiffOp::dbar, mono->exact);
    LatticeFunction<PiRat> out(df.radius_q(), df.domains());
    for (auto& [p, v] : df.values()) {
        PiRat t = v / PiRat::pi(1) / PiRat(Rational(2));
        if (!t.is_zero()) out.values()[p] = t;
    }
    return out;
}

// The residue tables of the mode representatives turn out purely rational.
template <>
inline LatticeFunction<GaussianBig> residue_table<GaussianBig>(int k) {
    auto exact = residue_table<PiRat>(k);
    LatticeFunction<GaussianBig> out(exact.radius_q(), exact.domains());
    for (auto& [p, v] : exact.values()) {
        for (auto& [g, c] : v.terms())
            if (g != 0) throw MonomialError("residue table value carries a pi power");
        out.values()[p] = v.coeff(0);
    }
    return out;
}

}  // namespace detail

// Explicit linear representative of a basis class (Example representatives):
//   X_{-k} 1 -> sum_m (1/2pi) dbar u^[-k](m) d*_sharp xi(m)   and likewise for
// the eta species; antiholomorphic weights use the conjugated monomial. The
// ground classes are xi(0) / theta(0).
template <typename C>
LinearPoly<C> class_representative_uncached(const LinearClass& cls) {
    using Ops = CoeffOps<C>;
    Species sp = (cls.species == ModeSpecies::chi) ? Species::xi : Species::theta;
    if (cls.kind == LinearClass::ground)
        return LinearPoly<C>::generator({sp, 0, 0}, Ops::one());
    auto table = detail::residue_table<C>(cls.k);
    LinearPoly<C> out;
    for (auto& [p, t] : table.values()) {
        Sub s = classify_point(p);
        if (!is_medial(s)) continue;
        C weight = t;
        if (cls.sector == Sector::antiholomorphic) {
            // weight at p is the table value at conj(p)
            weight = table.has(p.conj()) ? table.at(p.conj()) : Ops::zero();
            if (Ops::is_zero(weight)) continue;
        }
        out += current_at<C>(cls.species, cls.sector, p) * weight;
    }
    return out;
}

template <typename C>
const LinearPoly<C>& class_representative(const LinearClass& cls) {
    static std::map<LinearClass, LinearPoly<C>> cache;
    auto it = cache.find(cls);
    if (it != cache.end()) return it->second;
    return cache.emplace(cls, class_representative_uncached<C>(cls)).first->second;
}

template <typename C>
struct Decomposition {
    std::map<LinearClass, C> classes;
    // null remainder: coefficients of laplacian generators by site
    std::vector<std::tuple<Species, int, int, C>> null_part;
    // exact path only: the null coefficients are rationals with denominators
    // bounded by the determinant of the laplacian subsystem; when they do not
    // snap within the bound they are omitted and this flag is cleared
    bool null_part_exact = true;

    BasisExpansion<C> expansion() const {
        using Ops = CoeffOps<C>;
        BasisExpansion<C> e;
        for (auto& [cls, c] : classes) {
            BasisExpansion<C> base;
            if (cls.kind == LinearClass::ground)
                base = (cls.species == ModeSpecies::chi) ? BasisExpansion<C>::xi_state()
                                                         : BasisExpansion<C>::theta_state();
            else
                base = apply_mode(cls.species, cls.sector, -cls.k, BasisExpansion<C>::one());
            e += base * c;
        }
        return e;
    }
};

namespace detail {

// Snap a complex number to a Gaussian rational with bounded denominator;
// the tolerance scales with the magnitude (large coefficients carry solver
// error proportional to their size).
inline std::optional<GaussianRational> snap_gaussian(cplx v, long long max_den, double tol) {
    Rational re, im;
    if (!Rational::snap(v.real(), max_den, tol * (1.0 + std::abs(v.real())), re))
        return std::nullopt;
    if (!Rational::snap(v.imag(), max_den, tol * (1.0 + std::abs(v.imag())), im))
        return std::nullopt;
    return GaussianRational(re, im);
}

}  // namespace detail

// Mode-pairing extraction of a class coefficient of a linear polynomial, in
// the infinite-volume limit: the coefficient of X_{-k} 1 in L equals
// (1/k) <ev(H_k L)> for k >= 1 (anticommutators {H_k, X_{-k}} = k id and
// positive modes annihilating the ground states), the coefficient of
// H_{-k} 1 equals -(1/k) <ev(X_k L)>, and the large-domain evaluation of
// <ev(modes L)> reduces to a contour sum against full-plane Wick values.
struct PairedCoefficient {
    cplx value;
    double noise_floor;  // cancellation scale of the contour sum
};

inline PairedCoefficient mode_pairing_coefficient_with_noise(const LinearClass& cls,
                                                             const LinearPoly<cplx>& part) {
    if (cls.kind == LinearClass::ground) {
        // the realized zero-mode actions H_0 xi = 1 and X_0 theta = -1 both
        // reduce the ground coefficient to the plain coefficient sum:
        // c_xi = <ev(H_0 L)> = sum f, c_theta = -<ev(X_0 L)> = sum f
        cplx acc = 0.0;
        for (auto& [key, c] : part.coeffs()) acc += c;
        return {acc, 1e-14};
    }
    // pair with the opposite-species mode of index +k in the same sector
    ModeSpecies pair_species =
        (cls.species == ModeSpecies::chi) ? ModeSpecies::eta : ModeSpecies::chi;
    int r = mode_contour_radius(part.support_radius(), cls.k);
    auto gamma = CornerContour::square({0, 0}, 4 * r + 1);
    auto mono = MonomialCache::instance().get(cls.k, r + 3);
    bool anti = cls.sector == Sector::antiholomorphic;
    cplx acc = 0.0;
    double gross = 0.0;
    for (size_t j = 0; j < gamma.steps(); ++j) {
        auto st = gamma.step(j);
        cplx mv = mono->values.at(st.diamond);
        cplx w = st.weight;
        if (anti) {
            mv = std::conj(mv);
            w = std::conj(w);
        }
        if (mv == 0.0) continue;
        auto cur = current_at<cplx>(pair_species, cls.sector, st.medial);
        cplx term = w * mv * wick_contraction(cur, part);
        acc += term;
        gross += std::abs(term);
    }
    acc /= 2.0 * std::numbers::pi * cplx(0, 1);
    if (anti) acc = -acc;
    // {H_k, X_-k} = k, {X_k, H_-k} = -k
    cplx v = (pair_species == ModeSpecies::eta) ? acc / double(cls.k) : -acc / double(cls.k);
    return {v, 1e-12 * gross / double(cls.k)};
}

inline cplx mode_pairing_coefficient(const LinearClass& cls, const LinearPoly<cplx>& part) {
    return mode_pairing_coefficient_with_noise(cls, part).value;
}

namespace detail {

template <typename C>
std::optional<Decomposition<C>> try_decompose(const LinearPoly<C>& input, int K, int window,
                                              double residual_tol, bool crosscheck) {
    using Ops = CoeffOps<C>;
    Decomposition<C> result;
    for (Species sp : {Species::xi, Species::theta}) {
        LinearPoly<C> part;
        for (auto& [key, c] : input.coeffs()) {
            Generator g = Generator::from_key(key);
            if (g.species == sp) part.add(g, c);
        }
        if (part.is_zero()) continue;
        ModeSpecies ms = (sp == Species::xi) ? ModeSpecies::chi : ModeSpecies::eta;

        std::vector<LinearClass> classes;
        classes.push_back({LinearClass::ground, ms, Sector::holomorphic, 0});
        for (int k = 1; k <= K; ++k) {
            classes.push_back({LinearClass::mode, ms, Sector::holomorphic, k});
            classes.push_back({LinearClass::mode, ms, Sector::antiholomorphic, k});
        }

        // the class coefficients come from the mode-pairing functionals (the
        // solve route below recovers only the null completion -- separating
        // the two keeps the far-window system well-conditioned)
        struct ClassCoeff {
            LinearClass cls;
            cplx value;
            double noise;
        };
        std::vector<ClassCoeff> ccs;
        LinearPoly<cplx> part_d;
        for (auto& [key, c] : part.coeffs()) part_d.add(Generator::from_key(key), Ops::to_complex(c));
        for (auto& cls : classes) {
            auto pc = mode_pairing_coefficient_with_noise(cls, part_d);
            cplx v = pc.value;
            if (std::abs(v) <= std::max(1e-10, pc.noise_floor)) v = 0.0;
            ccs.push_back({cls, v, pc.noise_floor});
        }
        if (crosscheck) {
            // just beyond the cutoff the pairings must vanish
            for (int k = K + 1; k <= K + 2; ++k)
                for (Sector sec : {Sector::holomorphic, Sector::antiholomorphic}) {
                    auto pc = mode_pairing_coefficient_with_noise(
                        {LinearClass::mode, ms, sec, k}, part_d);
                    if (std::abs(pc.value) > std::max(1e-6, pc.noise_floor))
                        return std::nullopt;
                }
        }

        // null completion: solve for laplacian coefficients matching the
        // residual target site by site
        std::vector<std::pair<int, int>> null_sites;
        for (int x = -window; x <= window; ++x)
            for (int y = -window; y <= window; ++y) null_sites.push_back({x, y});
        std::vector<LinearPoly<cplx>> nulls;
        for (auto& [x, y] : null_sites)
            nulls.push_back(LinearPoly<cplx>::from_poly(poly_laplacian<cplx>(sp, x, y)));

        std::map<uint64_t, int> row_of;
        auto row = [&](uint64_t key) {
            auto [it, fresh] = row_of.try_emplace(key, (int)row_of.size());
            return it->second;
        };
        for (auto& l : nulls)
            for (auto& [key, c] : l.coeffs()) row(key);
        for (auto& cc : ccs)
            if (cc.value != 0.0)
                for (auto& [key, c] : class_representative<cplx>(cc.cls).coeffs()) row(key);
        for (auto& [key, c] : part.coeffs()) row(key);

        Eigen::MatrixXcd A =
            Eigen::MatrixXcd::Zero((Eigen::Index)row_of.size(), (Eigen::Index)nulls.size());
        for (size_t j = 0; j < nulls.size(); ++j)
            for (auto& [key, c] : nulls[j].coeffs())
                A((Eigen::Index)row_of[key], (Eigen::Index)j) = c;
        auto qr = A.colPivHouseholderQr();

        // per-grade targets: for the exact ring split the input by pi power
        // and use the snapped exact class coefficients
        struct Grade {
            int power;
            LinearPoly<cplx> target;
        };
        std::vector<Grade> grade_targets;
        std::map<LinearClass, PiRat> exact_classes;
        if constexpr (std::is_same_v<C, PiRat>) {
            std::map<int, LinearPoly<GaussianBig>> grades;
            for (auto& [key, c] : part.coeffs())
                for (auto& [g, gc] : c.terms()) grades[g].add(Generator::from_key(key), gc);
            // the pairing coefficients of each grade: snap the pairing of the
            // grade's double rendering
            for (auto& [gd, lp] : grades) {
                LinearPoly<cplx> lpd;
                for (auto& [key, c] : lp.coeffs())
                    lpd.add(Generator::from_key(key), c.to_complex());
                LinearPoly<GaussianBig> target = lp;
                for (auto& cls : classes) {
                    auto pc = mode_pairing_coefficient_with_noise(cls, lpd);
                    cplx v = pc.value;
                    if (std::abs(v) <= std::max(1e-10, pc.noise_floor)) continue;
                    auto snapped = snap_gaussian(v, 1 << 20, 1e-7);
                    if (!snapped) return std::nullopt;
                    exact_classes[cls] += PiRat::monomial(GaussianBig(*snapped), gd);
                    auto rep = class_representative<GaussianBig>(cls);
                    target += rep * (-GaussianBig(*snapped));
                }
                Grade g;
                g.power = gd;
                for (auto& [key, c] : target.coeffs())
                    g.target.add(Generator::from_key(key), c.to_complex());
                grade_targets.push_back(std::move(g));
            }
        } else {
            Grade g;
            g.power = 0;
            g.target = part_d;
            for (auto& cc : ccs) {
                if (cc.value == 0.0) continue;
                auto rep = class_representative<cplx>(cc.cls);
                g.target += rep * cplx(-cc.value);
            }
            grade_targets.push_back(std::move(g));
        }

        std::map<std::pair<int, int>, PiRat> null_by_site_exact;
        for (auto& g : grade_targets) {
            Eigen::VectorXcd b = Eigen::VectorXcd::Zero((Eigen::Index)row_of.size());
            for (auto& [key, c] : g.target.coeffs()) b((Eigen::Index)row_of.at(key)) = c;
            Eigen::VectorXcd x = qr.solve(b);
            double gross = (A.cwiseAbs() * x.cwiseAbs()).norm();
            if ((A * x - b).norm() > residual_tol * (1.0 + b.norm() + gross)) return std::nullopt;
            for (size_t j = 0; j < nulls.size(); ++j) {
                cplx v = x((Eigen::Index)j);
                if (std::abs(v) < 1e-11) continue;
                if constexpr (std::is_same_v<C, PiRat>) {
                    auto snapped = snap_gaussian(v, 1LL << 40, 1e-9);
                    if (!snapped) {
                        result.null_part_exact = false;
                        continue;
                    }
                    null_by_site_exact[null_sites[j]] +=
                        PiRat::monomial(GaussianBig(*snapped), g.power);
                } else {
                    result.null_part.emplace_back(sp, null_sites[j].first, null_sites[j].second,
                                                  C(v));
                }
            }
        }
        if constexpr (std::is_same_v<C, PiRat>) {
            for (auto& [cls, c] : exact_classes)
                if (!c.is_zero()) result.classes[cls] = c;
            for (auto& [site, c] : null_by_site_exact)
                if (!c.is_zero()) result.null_part.emplace_back(sp, site.first, site.second, c);
        } else {
            for (auto& cc : ccs)
                if (cc.value != 0.0) result.classes[cc.cls] = C(cc.value);
        }
    }
    return result;
}

}  // namespace detail

// Decompose a linear field polynomial over the basis classes
// {xi, theta, X_{-k}1, H_{-k}1, Xbar, Hbar : k <= K} plus the null span
// {lap xi(u), lap theta(u)}; the class coefficients are cross-checked against
// the mode-pairing functionals. Windows grow on failure.
template <typename C>
Decomposition<C> decompose_linear(const LinearPoly<C>& input, int max_k = -1,
                                  double residual_tol = 1e-9, bool crosscheck = true) {
    // fields with insertions in the L1-ball of radius r decompose over modes
    // of index <= 2r (plus the ground fermion)
    int rho1 = 0, rho = input.support_radius();
    for (auto& [key, c] : input.coeffs()) {
        Generator g = Generator::from_key(key);
        rho1 = std::max(rho1, std::abs(g.x) + std::abs(g.y));
    }
    int K = (max_k > 0) ? max_k : 2 * rho1 + 2;
    int window = std::max(rho, K / 2) + 2;
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto r = detail::try_decompose<C>(input, K, window, residual_tol, crosscheck);
        if (r) return *r;
        if (attempt == 1) K += 2;
        window += 3 + 2 * attempt;
    }
    throw GrassmannError("linear field not representable on the attempted windows");
}

// ---------------------------------------------------------------------------
// Reduction of arbitrary field polynomials to the Fock basis
// ---------------------------------------------------------------------------

namespace detail {

// Tensor-sorting id for a basis linear factor: ascending id order is the
// canonical factor order of the normal-ordered basis products (chi modes,
// eta modes, chibar, etabar -- each with descending k -- then the theta and
// xi ground fermions).
inline int factor_sort_id(const LinearClass& cls) {
    if (cls.kind == LinearClass::ground) {
        int rank = (cls.species == ModeSpecies::eta) ? 4 : 5;
        return (rank << 16);
    }
    int rank = int(cls.sector) * 2 + int(cls.species);
    return (rank << 16) | (0xffff - cls.k);
}

inline LinearClass factor_from_id(int id) {
    int rank = id >> 16;
    LinearClass cls;
    if (rank >= 4) {
        cls.kind = LinearClass::ground;
        cls.species = (rank == 4) ? ModeSpecies::eta : ModeSpecies::chi;
        cls.sector = Sector::holomorphic;
        cls.k = 0;
        return cls;
    }
    cls.kind = LinearClass::mode;
    cls.sector = Sector(rank / 2);
    cls.species = ModeSpecies(rank % 2);
    cls.k = 0xffff - (id & 0xffff);
    return cls;
}

struct IntVecHash {
    size_t operator()(const std::vector<int>& v) const noexcept {
        uint64_t h = 1469598103934665603ULL;
        for (int x : v) {
            h ^= uint64_t(uint32_t(x));
            h *= 1099511628211ULL;
        }
        return size_t(h);
    }
};

// Convert a sorted factor tuple into the basis expansion it produces under
// the normal-ordered-basis correspondence: the mode letters become the mode
// word, the ground content selects the ground state.
template <typename C>
BasisExpansion<C> factors_to_words(const std::vector<int>& sorted_ids, const C& coeff) {
    bool has_theta = false, has_xi = false;
    std::vector<LinearClass> modes;
    for (int id : sorted_ids) {
        LinearClass cls = factor_from_id(id);
        if (cls.kind == LinearClass::ground) {
            (cls.species == ModeSpecies::eta ? has_theta : has_xi) = true;
        } else {
            modes.push_back(cls);
        }
    }
    BasisExpansion<C> acc;
    if (has_theta && has_xi) acc = BasisExpansion<C>::omega();
    else if (has_theta) acc = BasisExpansion<C>::theta_state();
    else if (has_xi) acc = BasisExpansion<C>::xi_state();
    else acc = BasisExpansion<C>::one();
    for (auto it = modes.rbegin(); it != modes.rend(); ++it)
        acc = apply_mode(it->species, it->sector, -it->k, acc);
    return acc * coeff;
}

}  // namespace detail

// Cacheable decomposition of a single generator into basis classes.
template <typename C>
const Decomposition<C>& generator_decomposition(Generator g) {
    static std::map<uint64_t, Decomposition<C>> cache;
    auto it = cache.find(g.key());
    if (it != cache.end()) return it->second;
    auto lp = LinearPoly<C>::generator(g, CoeffOps<C>::one());
    return cache.emplace(g.key(), decompose_linear<C>(lp)).first->second;
}

// Reduce a field polynomial to the Fock basis: un-normal-order, decompose
// every tensor factor over the linear basis classes (null parts drop),
// expand multilinearly with antisymmetric factor sorting, and emit mode
// words over the ground states.
template <typename C>
BasisExpansion<C> to_basis(const GrassmannPoly<C>& p) {
    using Ops = CoeffOps<C>;
    auto te = unnormal_order(p);
    // states: sorted factor-id tuples with accumulated coefficients
    BasisExpansion<C> out;
    for (auto& term : te.terms) {
        std::unordered_map<std::vector<int>, C, detail::IntVecHash> states;
        states[{}] = term.coeff;
        for (auto& factor : term.factors) {
            // factors from unnormal_order are single generators
            if (factor.coeffs().size() != 1)
                throw GrassmannError("unexpected non-generator tensor factor");
            auto [key, fc] = *factor.coeffs().begin();
            const auto& dec = generator_decomposition<C>(Generator::from_key(key));
            std::unordered_map<std::vector<int>, C, detail::IntVecHash> next;
            for (auto& [ids, acc] : states) {
                for (auto& [cls, cc] : dec.classes) {
                    int id = detail::factor_sort_id(cls);
                    auto pos = std::lower_bound(ids.begin(), ids.end(), id);
                    if (pos != ids.end() && *pos == id) continue;  // repeated factor
                    size_t after = ids.end() - pos;
                    std::vector<int> nids;
                    nids.reserve(ids.size() + 1);
                    nids.insert(nids.end(), ids.begin(), pos);
                    nids.push_back(id);
                    nids.insert(nids.end(), pos, ids.end());
                    C v = acc * fc * cc;
                    if (after % 2) v = Ops::zero() - v;
                    auto [it, fresh] = next.try_emplace(std::move(nids), v);
                    if (!fresh) {
                        it->second = it->second + v;
                        if (Ops::is_zero(it->second)) next.erase(it);
                    }
                }
            }
            states = std::move(next);
            if (states.empty()) break;
        }
        for (auto& [ids, acc] : states) out += detail::factors_to_words<C>(ids, acc);
    }
    return out;
}

// Explicit field-polynomial representative of a basis word: the zero-mode
// letters select the ground-state representative (1 = sign * chi_0 eta_0
// omega and friends) and the k >= 1 letters act through the contour-integral
// current modes.
template <typename C = cplx>
GrassmannPoly<C> basis_word_representative(const BasisWord& w, C omega_shift = CoeffOps<C>::zero()) {
    using Ops = CoeffOps<C>;
    auto letters = detail::word_letters(w);
    int sign = 1;
    bool has_chi0 = false, has_eta0 = false;
    std::vector<Letter> active;
    // extract zero letters by anticommuting them to the right end
    for (size_t i = letters.size(); i-- > 0;) {
        const Letter& l = letters[i];
        if (l.k == 0) {
            // crossings with active (k >= 1) letters already to its right
            if (active.size() % 2) sign = -sign;
            (l.species == ModeSpecies::chi ? has_chi0 : has_eta0) = true;
        } else {
            active.insert(active.begin(), l);
        }
    }
    GrassmannPoly<C> seed;
    if (has_chi0 && has_eta0)
        seed = GrassmannPoly<C>::scalar(Ops::from_int(ground_one_sign));
    else if (has_eta0)
        seed = GrassmannPoly<C>::theta(0, 0) * Ops::from_int(-1);  // eta0 omega = -theta
    else if (has_chi0)
        seed = GrassmannPoly<C>::xi(0, 0) * Ops::from_int(-1);  // chi0 omega = -xi
    else
        seed = GrassmannPoly<C>::xi(0, 0) * GrassmannPoly<C>::theta(0, 0) * Ops::from_int(-1) +
               GrassmannPoly<C>::scalar(omega_shift);
    for (auto it = active.rbegin(); it != active.rend(); ++it)
        seed = current_mode(it->species, it->sector, -it->k, seed);
    return seed * Ops::from_int(sign);
}

// Alternative representative via normal-ordered products of the mode
// representatives (the normal-ordered-basis correspondence): small supports,
// exact coefficients.
template <typename C = cplx>
GrassmannPoly<C> basis_word_representative_ordered(const BasisWord& w) {
    using Ops = CoeffOps<C>;
    auto letters = detail::word_letters(w);
    int sign = 1;
    bool has_chi0 = false, has_eta0 = false;
    std::vector<Letter> active;
    for (size_t i = letters.size(); i-- > 0;) {
        const Letter& l = letters[i];
        if (l.k == 0) {
            if (active.size() % 2) sign = -sign;
            (l.species == ModeSpecies::chi ? has_chi0 : has_eta0) = true;
        } else {
            active.insert(active.begin(), l);
        }
    }
    std::vector<LinearPoly<C>> factors;
    for (const Letter& l : active)
        factors.push_back(
            class_representative<C>({LinearClass::mode, l.species, l.sector, l.k}));
    // the four cases of the normal-ordered-basis correspondence; the ground
    // encodings 1 = sgn chi0 eta0 omega, theta = -eta0 omega, xi = -chi0 omega
    int ground_sign = 1;
    if (has_chi0 && has_eta0) {
        // word ends chi0 eta0 omega = sgn * (1-state) -> plain T case
        ground_sign = ground_one_sign;
    } else if (has_eta0) {
        factors.push_back(LinearPoly<C>::generator(gen_theta(0, 0), Ops::one()));
        ground_sign = -1;  // eta0 omega = -theta
    } else if (has_chi0) {
        factors.push_back(LinearPoly<C>::generator(gen_xi(0, 0), Ops::one()));
        ground_sign = -1;  // chi0 omega = -xi
    } else {
        factors.push_back(LinearPoly<C>::generator(gen_theta(0, 0), Ops::one()));
        factors.push_back(LinearPoly<C>::generator(gen_xi(0, 0), Ops::one()));
    }
    return normal_order_pairings(factors) * Ops::from_int(sign * ground_sign);
}

// Representative of F - log(lambda delta) [(L0 + Lbar0) - (D + Dbar)] F for a
// single-dimension-block expansion: words over omega pick up the shifted
// ground state omega - 2 log(lambda delta) 1, sharp-dimension words are
// unchanged.
inline PolyD log_corrected(const BasisExpansion<cplx>& f, double lambda, double delta) {
    int dim = -1;
    for (auto& [w, c] : f.terms()) {
        if (dim < 0) dim = w.dimension();
        if (w.dimension() != dim)
            throw GrassmannError("log_corrected needs a single-dimension-block expansion");
    }
    double shift = -2.0 * double(ground_one_sign) * std::log(lambda * delta);
    PolyD out;
    for (auto& [w, c] : f.terms()) {
        bool pure_omega = true;
        for (auto* v : {&w.chi, &w.eta})
            for (int k : *v)
                if (k == 0) pure_omega = false;
        PolyD rep = basis_word_representative(w, pure_omega ? cplx(shift) : cplx(0.0));
        out += rep * c;
    }
    return out;
}

}  // namespace fdgff
