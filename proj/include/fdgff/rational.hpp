#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fdgff {

struct RationalOverflow : std::runtime_error {
    RationalOverflow() : std::runtime_error("rational arithmetic overflow") {}
};

// Exact rational over int64 with __int128 intermediates. Throws on overflow
// instead of silently wrapping; callers fall back to double pipelines.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return double(num_) / double(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from_i128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from_i128(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Continued-fraction reconstruction of x as p/q with q <= max_den.
    // Returns false when no candidate lands within tol of x.
    static bool snap(double x, long long max_den, double tol, Rational& out) {
        long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
        double v = x;
        for (int it = 0; it < 64; ++it) {
            double fl = std::floor(v);
            if (fl > 9e17 || fl < -9e17) return false;
            long long a = (long long)fl;
            __int128 p2 = i128(a) * p1 + p0;
            __int128 q2 = i128(a) * q1 + q0;
            if (q2 > max_den) break;
            p0 = p1;
            q0 = q1;
            p1 = (long long)p2;
            q1 = (long long)q2;
            double rem = v - fl;
            if (rem < 1e-15) break;
            v = 1.0 / rem;
        }
        if (q1 == 0) return false;
        Rational cand(p1, q1);
        if (std::abs(cand.to_double() - x) <= tol) {
            out = cand;
            return true;
        }
        return false;
    }

  private:
    static __int128 i128(long long v) { return (__int128)v; }

    static Rational from_i128(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr __int128 lim = (__int128)INT64_MAX;
        if (n > lim || n < -lim || d > lim) throw RationalOverflow();
        Rational r;
        r.num_ = (long long)n;
        r.den_ = (long long)d;
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void normalize() { *this = from_i128((__int128)num_, (__int128)den_); }

    long long num_ = 0;
    long long den_ = 1;
};

// Gaussian rational a + b*i.
struct GaussianRational {
    Rational re, im;

    GaussianRational() = default;
    GaussianRational(Rational r) : re(r) {}
    GaussianRational(long long r) : re(r) {}
    GaussianRational(Rational r, Rational i) : re(r), im(i) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n2 = b.re * b.re + b.im * b.im;
        if (n2.is_zero()) throw std::domain_error("gaussian rational division by zero");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    GaussianRational operator-() const { return {-re, -im}; }
    GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
    GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
    GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    GaussianRational conj() const { return {re, -im}; }
    GaussianRational mul_i() const { return {-im, re}; }

    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    std::string str() const {
        if (im.is_zero()) return re.str();
        if (re.is_zero()) return im.str() + "i";
        return re.str() + (im < Rational(0) ? "" : "+") + im.str() + "i";
    }
};

// Arbitrary-precision Gaussian rational: used where products of many exact
// values overflow int64 (high-order monomials, exact basis reductions).
struct GaussianBig {
    using Q = boost::multiprecision::cpp_rational;
    Q re, im;

    GaussianBig() = default;
    GaussianBig(long long n) : re(n) {}
    GaussianBig(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}
    GaussianBig(const Rational& r) : re(Q(r.num(), r.den())) {}
    GaussianBig(const Rational& r, const Rational& i)
        : re(Q(r.num(), r.den())), im(Q(i.num(), i.den())) {}
    GaussianBig(const GaussianRational& g)
        : re(Q(g.re.num(), g.re.den())), im(Q(g.im.num(), g.im.den())) {}

    bool is_zero() const { return re == 0 && im == 0; }
    friend GaussianBig operator+(const GaussianBig& a, const GaussianBig& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianBig operator-(const GaussianBig& a, const GaussianBig& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianBig operator*(const GaussianBig& a, const GaussianBig& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianBig operator/(const GaussianBig& a, const GaussianBig& b) {
        Q n2 = b.re * b.re + b.im * b.im;
        if (n2 == 0) throw std::domain_error("gaussian rational division by zero");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    GaussianBig operator-() const { return {-re, -im}; }
    GaussianBig& operator+=(const GaussianBig& o) { return *this = *this + o; }
    GaussianBig& operator-=(const GaussianBig& o) { return *this = *this - o; }
    friend bool operator==(const GaussianBig& a, const GaussianBig& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianBig& a, const GaussianBig& b) { return !(a == b); }

    GaussianBig conj() const { return {re, -im}; }
    GaussianBig mul_i() const { return {-im, re}; }
    std::complex<double> to_complex() const {
        return {re.convert_to<double>(), im.convert_to<double>()};
    }

    // narrowing to int64 rationals; throws when out of range
    GaussianRational to_gaussian_rational() const {
        auto narrow = [](const Q& q) {
            auto n = boost::multiprecision::numerator(q);
            auto d = boost::multiprecision::denominator(q);
            if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) throw RationalOverflow();
            return Rational(n.convert_to<long long>(), d.convert_to<long long>());
        };
        return {narrow(re), narrow(im)};
    }

    std::string str() const {
        auto qs = [](const Q& q) {
            std::string s = boost::multiprecision::numerator(q).str();
            if (boost::multiprecision::denominator(q) != 1)
                s += "/" + boost::multiprecision::denominator(q).str();
            return s;
        };
        if (im == 0) return qs(re);
        if (re == 0) return qs(im) + "i";
        return qs(re) + (im < 0 ? "" : "+") + qs(im) + "i";
    }
};

}  // namespace fdgff
