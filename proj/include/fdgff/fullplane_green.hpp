#pragma once

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lattice.hpp"
#include "rational.hpp"

namespace fdgff {

// Full-plane square-grid Green's function G: Z^2 -> R with
//   lap G(u) = -delta_{u,0},  G(0) = 0,
//   G(u) = -(1/2pi) log|u| - C/(2pi) + O(|u|^-2),  C = gamma_EM + (3/2) log 2.
//
// Values are computed two ways and cross-checked in tests:
//  * a one-dimensional integral representation of the potential kernel,
//    evaluated by composite Gauss-Legendre quadrature (any radius, double);
//  * the exact diagonal formula a(n,n) = (4/pi) sum 1/(2j-1) propagated by
//    the defining equation in rational arithmetic, giving G(u) = r + s/pi
//    with r, s rational (bounded radius, exact).

inline constexpr double euler_mascheroni = 0.5772156649015328606;

inline double fullplane_green_constant() {
    return euler_mascheroni + 1.5 * std::log(2.0);
}

namespace detail {

// Potential kernel a(m,n), a = -4G: Delta a = 4 delta_0, a(0)=0.
// a(m,n) = (2/pi) Int_0^pi [1 - exp(-|n| w(t)) cos(m t)] / sinh w(t) dt
// with cosh w = 2 - cos t. The exponential index is placed on the larger
// coordinate for decay.
struct GaussLegendre {
    std::vector<double> x, w;  // nodes and weights on [-1, 1]
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

inline double potential_kernel_quadrature(int m, int n) {
    m = std::abs(m);
    n = std::abs(n);
    if (m > n) std::swap(m, n);
    if (m == 0 && n == 0) return 0.0;
    static const GaussLegendre gl(32);
    int panels = 8 + (m + n) / 4;
    double total = 0.0;
    const double pi = std::numbers::pi;
    for (int p = 0; p < panels; ++p) {
        double a = pi * p / panels, b = pi * (p + 1) / panels;
        double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (size_t i = 0; i < gl.x.size(); ++i) {
            double t = c + h * gl.x[i];
            double v = 2.0 * std::sin(0.5 * t) * std::sin(0.5 * t);  // 1 - cos t
            double sh = std::sqrt(v * (v + 2.0));                    // sinh w
            double w = std::log1p(v + sh);                           // w >= 0
            double integrand;
            if (t < 1e-8) {
                integrand = n;  // limit of [1 - e^{-n w} cos(m t)] / sinh w
            } else {
                integrand = (1.0 - std::exp(-n * w) * std::cos(m * t)) / sh;
            }
            total += h * gl.w[i] * integrand;
        }
    }
    return 2.0 * total / pi;
}

}  // namespace detail

// Exact value G(u) = r + s/pi. Valid within a bounded radius (int64 rationals).
struct ExactGreenValue {
    Rational r;  // rational part
    Rational s;  // coefficient of 1/pi
    double to_double() const { return r.to_double() + s.to_double() / std::numbers::pi; }
};

class FullPlaneGreen {
  public:
    // Beyond this radius the exact-rational octant recursion overflows int64:
    // the pure-rational and 1/pi parts grow like (3+2*sqrt(2))^R while their
    // denominators carry lcm(1,3,...,2R+1).
    static constexpr int exact_radius = 12;

    explicit FullPlaneGreen(int window_radius = 64) : radius_(window_radius) {
        values_.assign((2 * radius_ + 1) * (2 * radius_ + 1), 0.0);
        for (int x = 0; x <= radius_; ++x)
            for (int y = 0; y <= x; ++y) {
                double a = detail::potential_kernel_quadrature(x, y);
                double g = -0.25 * a;
                set_sym(x, y, g);
            }
        build_exact();
    }

    int radius() const { return radius_; }

    // G at a primary lattice point (lattice-unit integer coordinates).
    double operator()(int x, int y) const {
        if (std::max(std::abs(x), std::abs(y)) > radius_)
            throw LatticeError("full-plane Green window exceeded");
        return values_[idx(x, y)];
    }
    double at(QPoint diff_q) const {
        if (mod4(diff_q.x) != 0 || mod4(diff_q.y) != 0)
            throw LatticeError("full-plane Green argument must be primary");
        return (*this)(diff_q.x / 4, diff_q.y / 4);
    }

    // Exact G within exact_radius; nullopt beyond it.
    std::optional<ExactGreenValue> exact(int x, int y) const {
        x = std::abs(x);
        y = std::abs(y);
        if (x < y) std::swap(x, y);
        if (x > exact_radius) return std::nullopt;
        return exact_[x * (exact_radius + 1) + y];
    }

    // 4*pi*G(u) as an exact element of Q[pi, pi^-1]; used by Wick contractions.
    std::optional<PiRat> exact_4pi(int x, int y) const {
        auto e = exact(x, y);
        if (!e) return std::nullopt;
        return PiRat::monomial(GaussianRational(e->r * Rational(4)), 1) +
               PiRat(GaussianRational(e->s * Rational(4)));
    }

    static const FullPlaneGreen& instance() {
        static FullPlaneGreen g(64);
        return g;
    }

  private:
    size_t idx(int x, int y) const {
        return size_t(x + radius_) * (2 * radius_ + 1) + size_t(y + radius_);
    }
    void set_sym(int x, int y, double v) {
        std::array<std::pair<int, int>, 8> images{{{x, y},
                                                   {y, x},
                                                   {-x, y},
                                                   {y, -x},
                                                   {x, -y},
                                                   {-y, x},
                                                   {-x, -y},
                                                   {-y, -x}}};
        for (auto [a, b] : images)
            if (std::max(std::abs(a), std::abs(b)) <= radius_) values_[idx(a, b)] = v;
    }

    // McCrea-Whipple propagation of the potential kernel in exact rationals:
    // a(0,0)=0, a(1,0)=1, a(n,n) = (4/pi) sum_{j<=n} 1/(2j-1),
    // a(n+1,n) = 2a(n,n) - a(n,n-1), and Delta a = 0 off the origin fills the
    // octant. Forward instability is irrelevant in exact arithmetic.
    void build_exact() {
        int R = exact_radius;
        std::vector<std::array<Rational, 2>> a((R + 2) * (R + 2));
        auto at = [&](int x, int y) -> std::array<Rational, 2>& {
            if (x < y) std::swap(x, y);
            return a[size_t(x) * (R + 2) + size_t(y)];
        };
        at(0, 0) = {Rational(0), Rational(0)};
        Rational diag_s(0);
        for (int n = 1; n <= R + 1; ++n) {
            diag_s += Rational(4, 2 * n - 1);
            at(n, n) = {Rational(0), diag_s};
        }
        at(1, 0) = {Rational(1), Rational(0)};
        for (int n = 1; n <= R; ++n) {
            // a(n+1, n) = 2 a(n,n) - a(n, n-1)
            at(n + 1, n) = {Rational(2) * at(n, n)[0] - at(n, n - 1)[0],
                            Rational(2) * at(n, n)[1] - at(n, n - 1)[1]};
        }
        for (int x = 1; x <= R; ++x)
            for (int y = x - 1; y >= 0; --y) {
                // Delta a = 0 at (x, y): solve for a(x+1, y).
                auto& c = at(x, y);
                auto& w = at(x - 1, y);
                auto& n = at(x, y + 1);
                auto& s = (y > 0) ? at(x, y - 1) : at(x, 1);
                at(x + 1, y) = {Rational(4) * c[0] - w[0] - n[0] - s[0],
                                Rational(4) * c[1] - w[1] - n[1] - s[1]};
            }
        exact_.assign((R + 1) * (R + 1), ExactGreenValue{});
        for (int x = 0; x <= R; ++x)
            for (int y = 0; y <= x; ++y) {
                auto& v = at(x, y);
                // G = -a/4
                exact_[x * (R + 1) + y] = {-(v[0] / Rational(4)), -(v[1] / Rational(4))};
            }
    }

    int radius_;
    std::vector<double> values_;
    std::vector<ExactGreenValue> exact_;
};

}  // namespace fdgff
