#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pi_ring.hpp"

namespace fdgff {

using cplx = std::complex<double>;

struct LatticeError : std::runtime_error {
    explicit LatticeError(const std::string& what) : std::runtime_error(what) {}
};

// All grid points are addressed in integer quarter-units, so each of the five
// sublattices (primary, dual, the two medial orientations, corner) has an
// exact integer representation. One lattice unit = 4 quarter-units.
struct QPoint {
    int x = 0;
    int y = 0;

    friend QPoint operator+(QPoint a, QPoint b) { return {a.x + b.x, a.y + b.y}; }
    friend QPoint operator-(QPoint a, QPoint b) { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(QPoint a, QPoint b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(QPoint a, QPoint b) { return !(a == b); }

    QPoint rot90() const { return {-y, x}; }    // multiply by i
    QPoint conj() const { return {x, -y}; }

    int linf() const { return std::max(std::abs(x), std::abs(y)); }
    cplx embed() const { return {x / 4.0, y / 4.0}; }

    static QPoint from_lattice(int lx, int ly) { return {4 * lx, 4 * ly}; }
};

struct QPointHash {
    size_t operator()(QPoint p) const noexcept {
        uint64_t k = (uint64_t)(uint32_t)p.x << 32 | (uint32_t)p.y;
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        return (size_t)k;
    }
};

enum class Sub : uint8_t {
    primary = 0,
    dual = 1,
    medial_h = 2,   // centers of horizontal edges, (Z+1/2) x Z
    medial_v = 3,   // centers of vertical edges,   Z x (Z+1/2)
    corner = 4,
};

inline bool is_diamond(Sub s) { return s == Sub::primary || s == Sub::dual; }
inline bool is_medial(Sub s) { return s == Sub::medial_h || s == Sub::medial_v; }

inline int mod4(int v) { return ((v % 4) + 4) % 4; }

inline Sub classify_point(QPoint p) {
    int mx = mod4(p.x), my = mod4(p.y);
    if (mx == 0 && my == 0) return Sub::primary;
    if (mx == 2 && my == 2) return Sub::dual;
    if (mx == 2 && my == 0) return Sub::medial_h;
    if (mx == 0 && my == 2) return Sub::medial_v;
    if (mx % 2 == 1 && my % 2 == 1) return Sub::corner;
    throw LatticeError("point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                       ")/4 lies on no sublattice");
}

// Bitmask of sublattices a LatticeFunction is defined on.
struct SubMask {
    uint8_t bits = 0;
    static SubMask of(std::initializer_list<Sub> subs) {
        SubMask m;
        for (Sub s : subs) m.bits |= uint8_t(1u << uint8_t(s));
        return m;
    }
    bool has(Sub s) const { return bits & (1u << uint8_t(s)); }
    static SubMask diamond() { return of({Sub::primary, Sub::dual}); }
    static SubMask medial() { return of({Sub::medial_h, Sub::medial_v}); }
    static SubMask diamond_medial() {
        return of({Sub::primary, Sub::dual, Sub::medial_h, Sub::medial_v});
    }
    static SubMask all() { return diamond_medial(); }
};

// A finitely-windowed map from grid points to values. Value lookups outside
// the window or off the declared sublattices throw; zero-extension is never
// silent.
template <typename T>
class LatticeFunction {
  public:
    LatticeFunction() = default;
    LatticeFunction(int window_radius_q, SubMask domains)
        : radius_q_(window_radius_q), domains_(domains) {}

    int radius_q() const { return radius_q_; }
    double radius_lattice() const { return radius_q_ / 4.0; }
    SubMask domains() const { return domains_; }

    bool in_window(QPoint p) const { return p.linf() <= radius_q_; }
    bool covers(QPoint p) const { return in_window(p) && domains_.has(classify_point(p)); }

    void set(QPoint p, T v) {
        if (!covers(p)) throw LatticeError("set outside window/sublattices");
        values_[p] = std::move(v);
    }

    const T& at(QPoint p) const {
        auto it = values_.find(p);
        if (it == values_.end()) {
            if (!covers(p))
                throw LatticeError("lattice value requested outside window or sublattice");
            throw LatticeError("lattice value missing at covered point");
        }
        return it->second;
    }

    bool has(QPoint p) const { return values_.count(p) != 0; }

    const std::unordered_map<QPoint, T, QPointHash>& values() const { return values_; }
    std::unordered_map<QPoint, T, QPointHash>& values() { return values_; }

    template <typename F>
    auto map(F&& f) const -> LatticeFunction<decltype(f(std::declval<T>()))> {
        LatticeFunction<decltype(f(std::declval<T>()))> out(radius_q_, domains_);
        for (auto& [p, v] : values_) out.values()[p] = f(v);
        return out;
    }

  private:
    int radius_q_ = 0;
    SubMask domains_;
    std::unordered_map<QPoint, T, QPointHash> values_;
};

enum class DiffOp { d, dbar, dstar, dbar_star, laplacian };

namespace detail {

// Enumerate the target sublattices of a half-step stencil output given the
// input mask: diamond inputs produce medial outputs and vice versa.
inline SubMask halfstep_target(SubMask in) {
    uint8_t bits = 0;
    if (in.has(Sub::primary) && in.has(Sub::dual)) bits |= SubMask::medial().bits;
    if (in.has(Sub::medial_h) && in.has(Sub::medial_v)) bits |= SubMask::diamond().bits;
    SubMask m;
    m.bits = bits;
    return m;
}

}  // namespace detail

template <typename T>
T half_value();

template <>
inline cplx half_value<cplx>() { return {0.5, 0.0}; }
template <>
inline GaussianRational half_value<GaussianRational>() { return GaussianRational(Rational(1, 2)); }
template <>
inline PiRat half_value<PiRat>() { return PiRat(Rational(1, 2)); }

// Pointwise discrete differential operators at unit mesh. The holomorphic and
// antiholomorphic derivatives map diamond functions to medial ones and back;
// the primary-only currents land on the medial lattice; the laplacian stays
// on its own sublattice. The output window shrinks by the stencil radius.
template <typename T>
LatticeFunction<T> apply_operator(DiffOp op, const LatticeFunction<T>& f) {
    using Ops = CoeffOps<T>;
    const QPoint E{2, 0}, W{-2, 0}, N{0, 2}, S{0, -2};
    LatticeFunction<T> out;
    switch (op) {
        case DiffOp::d:
        case DiffOp::dbar: {
            SubMask target = detail::halfstep_target(f.domains());
            if (target.bits == 0)
                throw LatticeError("derivative needs both sublattices of diamond or medial");
            int r = f.radius_q() - 2;
            if (r < 0) throw LatticeError("window too small for derivative stencil");
            out = LatticeFunction<T>(r, target);
            for (int x = -r; x <= r; ++x)
                for (int y = -r; y <= r; ++y) {
                    QPoint p{x, y};
                    Sub s;
                    try {
                        s = classify_point(p);
                    } catch (const LatticeError&) {
                        continue;
                    }
                    if (!target.has(s)) continue;
                    if (!f.has(p + E) || !f.has(p + W) || !f.has(p + N) || !f.has(p + S)) continue;
                    T dx = f.at(p + E) - f.at(p + W);
                    T dy = f.at(p + N) - f.at(p + S);
                    T idy = Ops::mul_i(dy);
                    T num = (op == DiffOp::d) ? dx - idy : dx + idy;
                    out.values()[p] = num * half_value<T>();
                }
            break;
        }
        case DiffOp::dstar:
        case DiffOp::dbar_star: {
            if (!f.domains().has(Sub::primary))
                throw LatticeError("primary-lattice derivative needs primary values");
            int r = f.radius_q() - 2;
            if (r < 0) throw LatticeError("window too small for derivative stencil");
            out = LatticeFunction<T>(r, SubMask::medial());
            for (int x = -r; x <= r; ++x)
                for (int y = -r; y <= r; ++y) {
                    QPoint p{x, y};
                    Sub s;
                    try {
                        s = classify_point(p);
                    } catch (const LatticeError&) {
                        continue;
                    }
                    if (s == Sub::medial_h) {
                        if (!f.has(p + E) || !f.has(p + W)) continue;
                        out.values()[p] = f.at(p + E) - f.at(p + W);
                    } else if (s == Sub::medial_v) {
                        if (!f.has(p + N) || !f.has(p + S)) continue;
                        T d = f.at(p + N) - f.at(p + S);
                        T id = Ops::mul_i(d);
                        out.values()[p] = (op == DiffOp::dstar) ? -id : id;
                    }
                }
            break;
        }
        case DiffOp::laplacian: {
            int r = f.radius_q() - 4;
            if (r < 0) throw LatticeError("window too small for laplacian stencil");
            out = LatticeFunction<T>(r, f.domains());
            const QPoint E4{4, 0}, W4{-4, 0}, N4{0, 4}, S4{0, -4};
            for (auto& [p, v] : f.values()) {
                if (p.linf() > r) continue;
                if (!f.has(p + E4) || !f.has(p + W4) || !f.has(p + N4) || !f.has(p + S4)) continue;
                out.values()[p] = f.at(p + E4) + f.at(p + W4) + f.at(p + N4) + f.at(p + S4) -
                                  v * CoeffOps<T>::from_int(4);
            }
            break;
        }
    }
    return out;
}

// A closed path on the corner lattice; consecutive corners are nearest
// neighbours (one coordinate changes by 1/2), first equals last, all others
// distinct. Each step determines a unique closest diamond point and medial
// point used as integrand arguments.
class CornerContour {
  public:
    explicit CornerContour(std::vector<QPoint> corners) : corners_(std::move(corners)) {
        validate();
    }

    // Axis-aligned square through the corners (cx +- k, cy +- k), k odd,
    // centered at a point with even quarter-coordinates.
    static CornerContour square(QPoint center, int quarter_radius) {
        if (quarter_radius < 1 || quarter_radius % 2 == 0)
            throw LatticeError("square contour needs odd positive quarter radius");
        if (mod4(center.x) % 2 != 0 || mod4(center.y) % 2 != 0)
            throw LatticeError("square contour center must have even quarter coordinates");
        int k = quarter_radius;
        std::vector<QPoint> cs;
        auto push_leg = [&](QPoint from, QPoint to) {
            int dx = (to.x > from.x) ? 2 : (to.x < from.x ? -2 : 0);
            int dy = (to.y > from.y) ? 2 : (to.y < from.y ? -2 : 0);
            QPoint p = from;
            while (p != to) {
                cs.push_back(p);
                p = p + QPoint{dx, dy};
            }
        };
        QPoint se{center.x + k, center.y - k}, ne{center.x + k, center.y + k},
            nw{center.x - k, center.y + k}, sw{center.x - k, center.y - k};
        push_leg(se, ne);
        push_leg(ne, nw);
        push_leg(nw, sw);
        push_leg(sw, se);
        cs.push_back(se);
        return CornerContour(std::move(cs));
    }

    const std::vector<QPoint>& corners() const { return corners_; }
    size_t steps() const { return corners_.size() - 1; }
    bool positively_oriented() const { return ccw_; }

    struct Step {
        cplx weight;     // c_j - c_{j-1} in lattice units
        QPoint diamond;  // closest diamond point
        QPoint medial;   // closest medial point
    };

    Step step(size_t j) const {
        QPoint a = corners_[j], b = corners_[j + 1];
        QPoint mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
        QPoint s1, s2;
        if (a.y == b.y) {  // horizontal step: side points above/below
            s1 = {mid.x, mid.y - 1};
            s2 = {mid.x, mid.y + 1};
        } else {  // vertical step: side points left/right
            s1 = {mid.x - 1, mid.y};
            s2 = {mid.x + 1, mid.y};
        }
        Step st;
        st.weight = cplx((b.x - a.x) / 4.0, (b.y - a.y) / 4.0);
        if (is_diamond(classify_point(s1))) {
            st.diamond = s1;
            st.medial = s2;
        } else {
            st.diamond = s2;
            st.medial = s1;
        }
        return st;
    }

    // Interior lattice points (diamond or medial) by even-odd crossing count.
    // Lattice points never lie on corner edges, so ties cannot occur.
    std::vector<QPoint> interior(SubMask which) const {
        std::vector<QPoint> pts;
        int lo_x = corners_[0].x, hi_x = lo_x, lo_y = corners_[0].y, hi_y = lo_y;
        for (auto& c : corners_) {
            lo_x = std::min(lo_x, c.x);
            hi_x = std::max(hi_x, c.x);
            lo_y = std::min(lo_y, c.y);
            hi_y = std::max(hi_y, c.y);
        }
        for (int x = lo_x + 1; x < hi_x; ++x)
            for (int y = lo_y + 1; y < hi_y; ++y) {
                if (x % 2 != 0 || y % 2 != 0) continue;  // diamond/medial have even coords
                QPoint p{x, y};
                Sub s = classify_point(p);
                if (!which.has(s)) continue;
                if (contains(p)) pts.push_back(p);
            }
        return pts;
    }

    bool contains(QPoint p) const {
        // Cast a ray upward; count crossings of horizontal corner segments.
        int crossings = 0;
        for (size_t j = 0; j + 1 < corners_.size(); ++j) {
            QPoint a = corners_[j], b = corners_[j + 1];
            if (a.y != b.y) continue;
            if (a.y <= p.y) continue;
            int xmin = std::min(a.x, b.x), xmax = std::max(a.x, b.x);
            if (p.x > xmin && p.x < xmax) ++crossings;
            // p.x == xmin/xmax impossible: corner coords are odd, p.x even
        }
        return crossings % 2 == 1;
    }

  private:
    void validate() {
        if (corners_.size() < 5) throw LatticeError("corner contour too short");
        if (corners_.front() != corners_.back())
            throw LatticeError("corner contour must be closed (open path passed)");
        double area2 = 0;
        for (size_t j = 0; j + 1 < corners_.size(); ++j) {
            QPoint a = corners_[j], b = corners_[j + 1];
            if (classify_point(a) != Sub::corner) throw LatticeError("contour point not a corner");
            int dx = b.x - a.x, dy = b.y - a.y;
            if (!((std::abs(dx) == 2 && dy == 0) || (dx == 0 && std::abs(dy) == 2)))
                throw LatticeError("consecutive corners must be nearest neighbours");
            area2 += double(a.x) * b.y - double(b.x) * a.y;
            for (size_t i = 0; i < j; ++i)
                if (corners_[i] == corners_[j] && !(i == 0 && j + 1 == corners_.size()))
                    throw LatticeError("corner contour self-intersects");
        }
        ccw_ = area2 > 0;
    }

    std::vector<QPoint> corners_;
    bool ccw_ = true;
};

// Discrete contour integral: sum_j (c_j - c_{j-1}) f(u_j^diamond) g(u_j^medial),
// or conj(c_j - c_{j-1}) weights when conjugate_differential is set.
inline cplx contour_integrate(const LatticeFunction<cplx>& f, const LatticeFunction<cplx>& g,
                              const CornerContour& gamma, bool conjugate_differential = false) {
    cplx total = 0.0;
    for (size_t j = 0; j < gamma.steps(); ++j) {
        auto st = gamma.step(j);
        cplx w = conjugate_differential ? std::conj(st.weight) : st.weight;
        total += w * f.at(st.diamond) * g.at(st.medial);
    }
    return total;
}

// Convert a contour-step weight (+-1/2 or +-i/2 in lattice units) into the
// coefficient ring.
template <typename Scalar>
Scalar scalar_from_halfstep(cplx w);

template <>
inline cplx scalar_from_halfstep<cplx>(cplx w) { return w; }
template <>
inline GaussianRational scalar_from_halfstep<GaussianRational>(cplx w) {
    auto q = [](double v) {
        long long n = (long long)std::llround(v * 2);
        return Rational(n, 2);
    };
    return {q(w.real()), q(w.imag())};
}
template <>
inline PiRat scalar_from_halfstep<PiRat>(cplx w) {
    return PiRat(scalar_from_halfstep<GaussianRational>(w));
}

// Generic variant: fd(p) gives the scalar diamond factor, gm(p) a value in any
// complex vector space (used with Grassmann-valued currents).
template <typename Scalar, typename V, typename FD, typename GM>
V contour_integrate_with(const CornerContour& gamma, FD&& fd, GM&& gm,
                         bool conjugate_differential = false) {
    V total{};
    for (size_t j = 0; j < gamma.steps(); ++j) {
        auto st = gamma.step(j);
        cplx w0 = conjugate_differential ? std::conj(st.weight) : st.weight;
        Scalar w = scalar_from_halfstep<Scalar>(w0);
        total += gm(st.medial) * (w * fd(st.diamond));
    }
    return total;
}

}  // namespace fdgff
