#include "overcon/scalar.hpp"

#include <cctype>
#include <stdexcept>

namespace overcon {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Rational parse_decimal(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = s.substr(e + 1);
        bool exp_neg = false;
        if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
            exp_neg = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) throw std::invalid_argument("bad exponent");
        exponent = std::stol(std::string(exp_part));
        if (exp_neg) exponent = -exponent;
        s = s.substr(0, e);
    }
    std::string digits;
    long frac_len = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
            throw std::invalid_argument("bad decimal");
        digits = std::string(ip) + std::string(fp);
        frac_len = static_cast<long>(fp.size());
    } else {
        if (!all_digits(s)) throw std::invalid_argument("bad integer");
        digits = std::string(s);
    }
    // mpz parses a leading 0 as an octal prefix.
    auto nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    Rational value{boost::multiprecision::mpz_int(digits)};
    long scale = exponent - frac_len;
    Rational ten_pow{boost::multiprecision::pow(boost::multiprecision::mpz_int(10),
                                                static_cast<unsigned>(std::labs(scale)))};
    value = scale >= 0 ? value * ten_pow : value / ten_pow;
    return negative ? -value : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty number");
    try {
        if (auto slash = s.find('/'); slash != std::string_view::npos) {
            Rational num = parse_decimal(trim(s.substr(0, slash)));
            Rational den = parse_decimal(trim(s.substr(slash + 1)));
            if (den == 0) throw std::invalid_argument("zero denominator");
            return num / den;
        }
        return parse_decimal(s);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
    }
}

GaussRational parse_gauss_rational(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty number");
    if (s.back() != 'i') return GaussRational(parse_rational(s));
    std::string_view body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not the leading one and not part of an exponent.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [&](std::string_view im) -> Rational {
        im = trim(im);
        if (im.empty() || im == "+") return Rational(1);
        if (im == "-") return Rational(-1);
        if (im.back() == '*') im.remove_suffix(1);
        return parse_rational(im);
    };
    try {
        if (split == std::string_view::npos) return {Rational(0), imag_of(body)};
        return {parse_rational(body.substr(0, split)), imag_of(body.substr(split))};
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a Gaussian rational: '" + std::string(text) + "'");
    }
}

std::string to_string(const Rational& x) {
    return x.str();
}

std::string to_string(const GaussRational& z) {
    if (z.im == 0) return to_string(z.re);
    std::string im;
    if (z.im == 1) im = "";
    else if (z.im == -1) im = "-";
    else im = to_string(z.im);
    if (z.re == 0) return im + "i";
    std::string out = to_string(z.re);
    if (z.im > 0) out += "+";
    return out + im + "i";
}

bool rationalize(double x, long max_den, double tol, Rational& out) {
    if (!std::isfinite(x)) return false;
    // Continued-fraction convergents.
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(r);
        if (std::abs(a) > 1e15) break;
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) {
            out = Rational(h1) / Rational(k1);
            return true;
        }
        double frac = r - a;
        if (frac < 1e-300) break;
        r = 1.0 / frac;
    }
    return false;
}

}  // namespace overcon
