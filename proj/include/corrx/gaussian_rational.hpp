#pragma once
// Exact arithmetic in Q(i): Gaussian rationals built on arbitrary-precision
// rationals.  This is the coefficient field for all exact polynomial work;
// maps whose data cannot be expressed here carry an "inexact" flag and fall
// back to complex floating point.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

#include "common.hpp"

namespace corrx {

using Rat = boost::multiprecision::cpp_rational;

struct GaussQ {
  Rat re;
  Rat im;

  GaussQ() = default;
  GaussQ(long long n) : re(n) {}  // NOLINT: implicit integer embedding
  GaussQ(Rat real, Rat imag) : re(std::move(real)), im(std::move(imag)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussQ conj() const { return GaussQ(re, -im); }
  Rat norm2() const { return re * re + im * im; }

  friend GaussQ operator+(const GaussQ& a, const GaussQ& b) {
    return GaussQ(a.re + b.re, a.im + b.im);
  }
  friend GaussQ operator-(const GaussQ& a, const GaussQ& b) {
    return GaussQ(a.re - b.re, a.im - b.im);
  }
  GaussQ operator-() const { return GaussQ(-re, -im); }
  friend GaussQ operator*(const GaussQ& a, const GaussQ& b) {
    return GaussQ(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend GaussQ operator/(const GaussQ& a, const GaussQ& b) {
    Rat n2 = b.norm2();
    if (n2 == 0) throw error("GaussQ: division by zero");
    return GaussQ((a.re * b.re + a.im * b.im) / n2,
                  (a.im * b.re - a.re * b.im) / n2);
  }
  friend bool operator==(const GaussQ& a, const GaussQ& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussQ& a, const GaussQ& b) {
    return !(a == b);
  }

  std::complex<double> to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  // Canonical text form: "re", "im*i", or "re+im*i" with rationals as "p/q".
  std::string to_string() const {
    auto rat_str = [](const Rat& r) {
      std::string s = numerator(r).str();
      if (denominator(r) != 1) s += "/" + denominator(r).str();
      return s;
    };
    if (im == 0) return rat_str(re);
    std::string tail = rat_str(im) + "*i";
    if (re == 0) return tail;
    return rat_str(re) + (im > 0 ? "+" : "") + tail;
  }

  // Accepts "p/q", "p/q+r/s*i", "r/s*i", "i", "-i" and integer variants.
  static GaussQ parse(std::string_view text);
};

inline std::ostream& operator<<(std::ostream& os, const GaussQ& g) {
  return os << g.to_string();
}

namespace detail {

// One signed rational token, e.g. "-3/4"; empty or sign-only means +/-1
// (the coefficient of a bare "i").
inline Rat parse_rat_token(std::string_view tok, bool allow_bare_unit) {
  if (tok.empty() || tok == "+" || tok == "-") {
    if (!allow_bare_unit) throw error("GaussQ: empty rational token");
    return tok == "-" ? Rat(-1) : Rat(1);
  }
  for (std::size_t i = 0; i < tok.size(); ++i) {
    char c = tok[i];
    bool sign_ok = (c == '+' || c == '-') && i == 0;
    if (!sign_ok && c != '/' && !(c >= '0' && c <= '9'))
      throw error("GaussQ: bad rational token '" + std::string(tok) + "'");
  }
  std::string_view body = tok;
  if (body.front() == '+') body.remove_prefix(1);
  try {
    return Rat(std::string(body));
  } catch (const std::exception&) {
    throw error("GaussQ: bad rational token '" + std::string(tok) + "'");
  }
}

}  // namespace detail

inline GaussQ GaussQ::parse(std::string_view text) {
  if (text.empty()) throw error("GaussQ: empty input");
  std::size_t ipos = text.find('i');
  if (ipos == std::string_view::npos)
    return GaussQ(detail::parse_rat_token(text, false), Rat(0));
  if (ipos + 1 != text.size())
    throw error("GaussQ: 'i' must be final in '" + std::string(text) + "'");
  std::string_view head = text.substr(0, ipos);
  if (!head.empty() && head.back() == '*') head.remove_suffix(1);
  // Split the imaginary token off at the last top-level sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = head.size(); i-- > 1;) {
    if (head[i] == '+' || head[i] == '-') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos)
    return GaussQ(Rat(0), detail::parse_rat_token(head, true));
  std::string_view imag = head.substr(split);  // keeps the sign
  if (imag.size() == 1) imag = head[split] == '-' ? "-" : "+";
  return GaussQ(detail::parse_rat_token(head.substr(0, split), false),
                detail::parse_rat_token(imag, true));
}

}  // namespace corrx
