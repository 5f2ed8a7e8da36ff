#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace overcon {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Cplx = std::complex<double>;

// Exact complex numbers over an exact field; std::complex is only specified
// for floating types.
template <class T>
struct ExactComplex {
    T re{};
    T im{};

    ExactComplex() = default;
    ExactComplex(T r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    ExactComplex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
    ExactComplex(int r) : re(r) {}  // NOLINT(google-explicit-constructor)

    static ExactComplex unit() { return {T(0), T(1)}; }

    ExactComplex operator-() const { return {-re, -im}; }
    friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ExactComplex operator/(const ExactComplex& a, const ExactComplex& b) {
        const T den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
    ExactComplex& operator+=(const ExactComplex& o) { return *this = *this + o; }
    ExactComplex& operator-=(const ExactComplex& o) { return *this = *this - o; }
    ExactComplex& operator*=(const ExactComplex& o) { return *this = *this * o; }
    friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }
};

using GaussRational = ExactComplex<Rational>;

inline GaussRational conj(const GaussRational& z) { return {z.re, -z.im}; }

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr bool complex = false;
    static double magnitude(double x) { return std::abs(x); }
    static double to_double(double x) { return x; }
};

template <>
struct ScalarTraits<Cplx> {
    static constexpr bool exact = false;
    static constexpr bool complex = true;
    static double magnitude(const Cplx& x) { return std::abs(x); }
    static double to_double(const Cplx& x) { return x.real(); }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr bool complex = false;
    static double magnitude(const Rational& x) { return std::abs(x.convert_to<double>()); }
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
};

template <>
struct ScalarTraits<GaussRational> {
    static constexpr bool exact = true;
    static constexpr bool complex = true;
    static double magnitude(const GaussRational& x) {
        return std::hypot(x.re.convert_to<double>(), x.im.convert_to<double>());
    }
    static double to_double(const GaussRational& x) { return x.re.convert_to<double>(); }
};

template <class S>
inline constexpr bool is_exact_v = ScalarTraits<S>::exact;

template <class S>
inline constexpr bool is_complex_v = ScalarTraits<S>::complex;

template <class S>
double magnitude(const S& x) {
    return ScalarTraits<S>::magnitude(x);
}

// Zero test: exact for exact fields, |x| <= tol otherwise.
template <class S>
bool is_zero(const S& x, double tol) {
    if constexpr (is_exact_v<S>) {
        (void)tol;
        return x == S(0);
    } else {
        return magnitude(x) <= tol;
    }
}

// Converts between the four coefficient fields. Narrowing exact -> floating is
// allowed; floating -> exact converts the binary value exactly.
template <class T, class S>
T scalar_cast(const S& x) {
    if constexpr (std::is_same_v<T, S>) {
        return x;
    } else if constexpr (std::is_same_v<T, double>) {
        if constexpr (std::is_same_v<S, Cplx>) return x.real();
        else if constexpr (std::is_same_v<S, Rational>) return x.template convert_to<double>();
        else return x.re.template convert_to<double>();
    } else if constexpr (std::is_same_v<T, Cplx>) {
        if constexpr (std::is_same_v<S, double>) return Cplx(x, 0.0);
        else if constexpr (std::is_same_v<S, Rational>) return Cplx(x.template convert_to<double>(), 0.0);
        else return Cplx(x.re.template convert_to<double>(), x.im.template convert_to<double>());
    } else if constexpr (std::is_same_v<T, Rational>) {
        if constexpr (std::is_same_v<S, double>) return Rational(x);
        else if constexpr (std::is_same_v<S, Cplx>) return Rational(x.real());
        else return x.re;
    } else {
        static_assert(std::is_same_v<T, GaussRational>);
        if constexpr (std::is_same_v<S, double>) return GaussRational(Rational(x));
        else if constexpr (std::is_same_v<S, Cplx>) return GaussRational(Rational(x.real()), Rational(x.imag()));
        else return GaussRational(x);
    }
}

// Parses "p/q", integers, and plain decimals ("-0.125", "1.5e-3") exactly.
Rational parse_rational(std::string_view text);

// Parses "a", "bi", "a+bi", "a-bi", "i", "-i" with rational a, b.
GaussRational parse_gauss_rational(std::string_view text);

// Canonical "p/q" (or "p" when q = 1).
std::string to_string(const Rational& x);

// Canonical complex form, inverse of parse_gauss_rational.
std::string to_string(const GaussRational& z);

// Closest rational with denominator <= max_den (continued fractions);
// accepted only if within tol of x.
bool rationalize(double x, long max_den, double tol, Rational& out);

}  // namespace overcon
