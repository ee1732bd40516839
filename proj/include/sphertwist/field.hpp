#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>

#include "sphertwist/error.hpp"

namespace sphertwist {

// The rationals, exact. Header-only backend so the whole engine stays free
// of link-time math dependencies. Deliberately a wrapper rather than the
// multiprecision type itself: the backend's heavily templated converting
// constructors interact badly with Eigen's scalar-expression overload
// probing, while a class with a fixed constructor set is safe as a matrix
// scalar.
class Rational {
    using rep_t = boost::multiprecision::cpp_rational;

public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}
    Rational(long long n) : v_(n) {}
    explicit Rational(const std::string& s) : v_(s) {}

    static Rational fraction(long long num, long long den) {
        require(den != 0, errc::usage, "zero denominator");
        Rational r;
        r.v_ = rep_t(num, den);
        return r;
    }

    bool is_zero() const { return v_ == 0; }
    std::string str() const { return v_.str(); }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        require(b.v_ != 0, errc::invariant, "division by zero in Q");
        return Rational(a.v_ / b.v_);
    }
    Rational operator-() const { return Rational(-v_); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& a) { return os << a.v_; }

private:
    explicit Rational(rep_t v) : v_(std::move(v)) {}

    rep_t v_;
};

// Prime field GF(p) with canonical representatives in [0, p).
//
// The modulus is process-wide runtime state (set once from the CLI's
// --field flag, default 32003). Matrices mixing elements of different
// moduli make no sense, and threading a modulus through every scalar
// would poison the Eigen value type, so a single global is the honest
// representation. Tests that need another prime use modulus_guard.
class Fp {
public:
    Fp() : v_(0) {}
    Fp(long long n) {
        long long p = modulus();
        long long r = n % p;
        if (r < 0) r += p;
        v_ = static_cast<std::uint32_t>(r);
    }
    Fp(int n) : Fp(static_cast<long long>(n)) {}

    static std::uint32_t modulus() { return mod_; }

    static void set_modulus(std::uint32_t p) {
        require(is_prime(p), errc::usage, "GF(p) modulus must be prime, got " + std::to_string(p));
        mod_ = p;
    }

    static bool is_prime(std::uint64_t p) {
        if (p < 2) return false;
        for (std::uint64_t q = 2; q * q <= p; ++q)
            if (p % q == 0) return false;
        return true;
    }

    std::uint32_t rep() const { return v_; }

    bool is_zero() const { return v_ == 0; }

    friend Fp operator+(Fp a, Fp b) { return from_raw((std::uint64_t(a.v_) + b.v_) % mod_); }
    friend Fp operator-(Fp a, Fp b) { return from_raw((std::uint64_t(a.v_) + mod_ - b.v_) % mod_); }
    friend Fp operator*(Fp a, Fp b) { return from_raw(std::uint64_t(a.v_) * b.v_ % mod_); }
    friend Fp operator/(Fp a, Fp b) { return a * b.inv(); }
    Fp operator-() const { return from_raw(v_ == 0 ? 0 : mod_ - v_); }

    Fp& operator+=(Fp o) { return *this = *this + o; }
    Fp& operator-=(Fp o) { return *this = *this - o; }
    Fp& operator*=(Fp o) { return *this = *this * o; }
    Fp& operator/=(Fp o) { return *this = *this / o; }

    friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
    friend bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

    // Multiplicative inverse by extended Euclid.
    Fp inv() const {
        require(v_ != 0, errc::invariant, "division by zero in GF(p)");
        std::int64_t t = 0, nt = 1, r = mod_, nr = v_;
        while (nr != 0) {
            std::int64_t q = r / nr;
            std::int64_t tmp = t - q * nt;
            t = nt;
            nt = tmp;
            tmp = r - q * nr;
            r = nr;
            nr = tmp;
        }
        if (t < 0) t += mod_;
        return from_raw(static_cast<std::uint64_t>(t));
    }

    friend std::ostream& operator<<(std::ostream& os, Fp a) { return os << a.v_; }

private:
    static Fp from_raw(std::uint64_t v) {
        Fp r;
        r.v_ = static_cast<std::uint32_t>(v);
        return r;
    }

    inline static std::uint32_t mod_ = 32003;
    std::uint32_t v_;
};

// RAII modulus switcher for tests exercising several primes.
struct modulus_guard {
    explicit modulus_guard(std::uint32_t p) : saved_(Fp::modulus()) { Fp::set_modulus(p); }
    ~modulus_guard() { Fp::set_modulus(saved_); }
    modulus_guard(const modulus_guard&) = delete;
    modulus_guard& operator=(const modulus_guard&) = delete;

private:
    std::uint32_t saved_;
};

// ---- uniform scalar helpers used by the templated core ----

inline bool is_zero(const Fp& x) { return x.is_zero(); }
inline bool is_zero(const Rational& x) { return x == 0; }

template <class K>
inline bool is_one(const K& x) {
    return x == K(1);
}

// Exact field literals: "12" everywhere, "3/7" for a quotient (over GF(p)
// the slash means multiplication by an inverse).
template <class K>
K field_from_string(const std::string& s);

template <>
inline Rational field_from_string<Rational>(const std::string& s) {
    try {
        return Rational(s);
    } catch (const std::exception&) {
        fail(errc::usage, "bad rational literal: '" + s + "'");
    }
}

template <>
inline Fp field_from_string<Fp>(const std::string& s) {
    auto parse_int = [](const std::string& t) -> long long {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(t, &pos);
        } catch (const std::exception&) {
            fail(errc::usage, "bad field literal: '" + t + "'");
        }
        require(pos == t.size() && !t.empty(), errc::usage, "bad field literal: '" + t + "'");
        return v;
    };
    auto slash = s.find('/');
    if (slash == std::string::npos) return Fp(parse_int(s));
    Fp num(parse_int(s.substr(0, slash)));
    Fp den(parse_int(s.substr(slash + 1)));
    require(!den.is_zero(), errc::usage, "zero denominator in field literal: '" + s + "'");
    return num / den;
}

inline std::string field_to_string(const Fp& x) { return std::to_string(x.rep()); }
inline std::string field_to_string(const Rational& x) { return x.str(); }

template <class K>
const char* field_name();
template <>
inline const char* field_name<Fp>() {
    return "GF(p)";
}
template <>
inline const char* field_name<Rational>() {
    return "Q";
}

} // namespace sphertwist

// Eigen scalar plumbing for GF(p). Only what dense storage, products and
// block expressions require; no norms, no comparisons by magnitude.
namespace Eigen {

template <>
struct NumTraits<sphertwist::Fp> {
    using Real = sphertwist::Fp;
    using NonInteger = sphertwist::Fp;
    using Literal = sphertwist::Fp;
    using Nested = sphertwist::Fp;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 0,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 2,
        MulCost = 4,
    };
    static inline Real epsilon() { return sphertwist::Fp(0); }
    static inline Real dummy_precision() { return sphertwist::Fp(0); }
    static inline int digits10() { return 0; }
};

template <>
struct NumTraits<sphertwist::Rational> {
    using Real = sphertwist::Rational;
    using NonInteger = sphertwist::Rational;
    using Literal = sphertwist::Rational;
    using Nested = sphertwist::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 10,
        MulCost = 20,
    };
    static inline Real epsilon() { return sphertwist::Rational(0); }
    static inline Real dummy_precision() { return sphertwist::Rational(0); }
    static inline int digits10() { return 0; }
};

} // namespace Eigen
