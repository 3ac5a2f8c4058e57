#pragma once

#include <complex>
#include <map>
#include <numbers>

#include "rational.hpp"

namespace fdgff {

// Laurent polynomial in pi with Gaussian-rational coefficients (stored in
// arbitrary precision): sum_k c_k * pi^k. Closed under +, -, * and division
// by monomials.
class PiRat {
  public:
    PiRat() = default;
    PiRat(long long n) {
        if (n != 0) terms_[0] = GaussianBig(n);
    }
    PiRat(const Rational& r) {
        if (!r.is_zero()) terms_[0] = GaussianBig(r);
    }
    PiRat(const GaussianRational& g) {
        if (!g.is_zero()) terms_[0] = GaussianBig(g);
    }
    PiRat(const GaussianBig& g) {
        if (!g.is_zero()) terms_[0] = g;
    }

    static PiRat monomial(const GaussianBig& c, int pi_power) {
        PiRat p;
        if (!c.is_zero()) p.terms_[pi_power] = c;
        return p;
    }
    static PiRat pi(int power = 1) { return monomial(GaussianBig(1), power); }
    static PiRat imag_unit() { return monomial(GaussianBig(Rational(0), Rational(1)), 0); }

    bool is_zero() const { return terms_.empty(); }

    const std::map<int, GaussianBig>& terms() const { return terms_; }

    // Coefficient of pi^k.
    GaussianBig coeff(int k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? GaussianBig() : it->second;
    }

    friend PiRat operator+(const PiRat& a, const PiRat& b) {
        PiRat r = a;
        for (auto& [k, c] : b.terms_) r.insert(k, c);
        return r;
    }
    friend PiRat operator-(const PiRat& a, const PiRat& b) {
        PiRat r = a;
        for (auto& [k, c] : b.terms_) r.insert(k, -c);
        return r;
    }
    friend PiRat operator*(const PiRat& a, const PiRat& b) {
        PiRat r;
        for (auto& [ka, ca] : a.terms_)
            for (auto& [kb, cb] : b.terms_) r.insert(ka + kb, ca * cb);
        return r;
    }
    PiRat operator-() const {
        PiRat r;
        for (auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }
    PiRat& operator+=(const PiRat& o) { return *this = *this + o; }
    PiRat& operator-=(const PiRat& o) { return *this = *this - o; }
    PiRat& operator*=(const PiRat& o) { return *this = *this * o; }

    // Division restricted to single-term divisors.
    friend PiRat operator/(const PiRat& a, const PiRat& b) {
        if (b.terms_.size() != 1) throw std::domain_error("PiRat division needs monomial divisor");
        auto [kb, cb] = *b.terms_.begin();
        PiRat r;
        for (auto& [k, c] : a.terms_) r.insert(k - kb, c / cb);
        return r;
    }

    friend bool operator==(const PiRat& a, const PiRat& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const PiRat& a, const PiRat& b) { return !(a == b); }

    PiRat conj() const {
        PiRat r;
        for (auto& [k, c] : terms_) r.terms_[k] = c.conj();
        return r;
    }

    std::complex<double> to_complex() const {
        std::complex<double> v = 0.0;
        for (auto& [k, c] : terms_) v += c.to_complex() * std::pow(std::numbers::pi, k);
        return v;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [k, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + c.str() + ")";
            if (k == 1) s += "*pi";
            else if (k != 0) s += "*pi^" + std::to_string(k);
        }
        return s;
    }

  private:
    void insert(int k, const GaussianBig& c) {
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_[k] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    std::map<int, GaussianBig> terms_;
};

// Coefficient traits shared by the double and exact pipelines. Templates on
// the coefficient type use these helpers instead of hand-written overloads.
template <typename C>
struct CoeffOps;

template <>
struct CoeffOps<std::complex<double>> {
    using type = std::complex<double>;
    static type zero() { return {0.0, 0.0}; }
    static type one() { return {1.0, 0.0}; }
    static bool is_zero(const type& v) { return v == 0.0; }
    static bool near_zero(const type& v, double tol) { return std::abs(v) <= tol; }
    static type from_int(long long n) { return {double(n), 0.0}; }
    static type mul_i(const type& v) { return {-v.imag(), v.real()}; }
    static type conj(const type& v) { return std::conj(v); }
    static std::complex<double> to_complex(const type& v) { return v; }
};

template <>
struct CoeffOps<PiRat> {
    using type = PiRat;
    static type zero() { return PiRat(); }
    static type one() { return PiRat(1); }
    static bool is_zero(const type& v) { return v.is_zero(); }
    static bool near_zero(const type& v, double tol) { return std::abs(v.to_complex()) <= tol; }
    static type from_int(long long n) { return PiRat(n); }
    static type mul_i(const type& v) { return v * PiRat::imag_unit(); }
    static type conj(const type& v) { return v.conj(); }
    static std::complex<double> to_complex(const type& v) { return v.to_complex(); }
};

template <>
struct CoeffOps<GaussianBig> {
    using type = GaussianBig;
    static type zero() { return {}; }
    static type one() { return GaussianBig(1); }
    static bool is_zero(const type& v) { return v.is_zero(); }
    static bool near_zero(const type& v, double tol) { return std::abs(v.to_complex()) <= tol; }
    static type from_int(long long n) { return GaussianBig(n); }
    static type mul_i(const type& v) { return v.mul_i(); }
    static type conj(const type& v) { return v.conj(); }
    static std::complex<double> to_complex(const type& v) { return v.to_complex(); }
};

template <>
struct CoeffOps<GaussianRational> {
    using type = GaussianRational;
    static type zero() { return {}; }
    static type one() { return GaussianRational(1); }
    static bool is_zero(const type& v) { return v.is_zero(); }
    static bool near_zero(const type& v, double tol) { return std::abs(v.to_complex()) <= tol; }
    static type from_int(long long n) { return GaussianRational(n); }
    static type mul_i(const type& v) { return v.mul_i(); }
    static type conj(const type& v) { return v.conj(); }
    static std::complex<double> to_complex(const type& v) { return v.to_complex(); }
};

}  // namespace fdgff
