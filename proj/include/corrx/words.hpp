#pragma once
// Free groups of small rank: freely reduced words, cyclic words / conjugacy
// classes, the peripheral structure of punctured-sphere fundamental groups,
// ball enumeration, random words, and generator-substitution endomorphisms.
//
// Conventions, used throughout the library:
//   * a letter is a nonzero signed generator index (+k = k-th generator,
//     1-based; -k = its inverse), serialized 'a','b','c',... / 'A','B','C',...;
//   * rank r models a sphere with r+1 punctures: generator i (0-based
//     puncture index i) is a simple positive loop about puncture i, and the
//     loop about the last puncture is (g_1 g_2 ... g_r)^{-1};
//   * conjugacy classes are canonicalized as the lexicographically least
//     rotation (by serialized character) of the cyclically reduced word,
//     optionally minimized over inversion as well.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "corrx/common.hpp"

namespace corrx {

using Letter = std::int8_t;

inline Letter inv(Letter l) { return static_cast<Letter>(-l); }

inline char letter_char(Letter l) {
  if (l == 0 || l > 26 || l < -26) throw error("letter_char: bad letter");
  return l > 0 ? static_cast<char>('a' + l - 1)
               : static_cast<char>('A' - l - 1);
}

inline Letter char_letter(char c) {
  if (c >= 'a' && c <= 'z') return static_cast<Letter>(c - 'a' + 1);
  if (c >= 'A' && c <= 'Z') return static_cast<Letter>(-(c - 'A' + 1));
  throw error(std::string("char_letter: unexpected character '") + c + "'");
}

// A freely reduced word. The representation invariant (no adjacent l, l^{-1})
// is maintained by every mutator.
class Word {
 public:
  Word() = default;
  explicit Word(const std::vector<Letter>& raw) {
    for (Letter l : raw) push(l);
  }

  // Parses "abAB", "a^3(bA)^-2", "1" (identity); whitespace ignored.
  static Word parse(std::string_view s) {
    std::size_t pos = 0;
    Word w = parse_seq(s, pos, /*depth=*/0);
    if (pos != s.size()) throw error("Word::parse: unbalanced ')'");
    return w;
  }

  // Right-multiplication by one letter, with free cancellation.
  void push(Letter l) {
    if (l == 0) throw error("Word::push: zero letter");
    if (!ls_.empty() && ls_.back() == inv(l)) {
      ls_.pop_back();
    } else {
      ls_.push_back(l);
    }
  }

  // Removes the last letter (a reduced word stays reduced under truncation).
  void pop_back() {
    if (ls_.empty()) throw error("Word::pop_back: empty word");
    ls_.pop_back();
  }

  Word& operator*=(const Word& rhs) {
    for (Letter l : rhs.ls_) push(l);
    return *this;
  }
  friend Word operator*(Word lhs, const Word& rhs) {
    lhs *= rhs;
    return lhs;
  }

  Word inverse() const {
    Word out;
    out.ls_.reserve(ls_.size());
    for (auto it = ls_.rbegin(); it != ls_.rend(); ++it)
      out.ls_.push_back(inv(*it));
    return out;
  }

  Word pow(long long k) const {
    Word base = k < 0 ? inverse() : *this;
    long long n = k < 0 ? -k : k;
    Word out;
    for (long long i = 0; i < n; ++i) out *= base;
    return out;
  }

  std::size_t size() const { return ls_.size(); }
  bool empty() const { return ls_.empty(); }
  Letter operator[](std::size_t i) const { return ls_[i]; }
  const std::vector<Letter>& letters() const { return ls_; }

  // Largest generator index used (0 for the identity).
  int max_rank() const {
    int r = 0;
    for (Letter l : ls_) r = std::max(r, static_cast<int>(l < 0 ? -l : l));
    return r;
  }

  std::string str() const {
    if (ls_.empty()) return "1";
    std::string out;
    out.reserve(ls_.size());
    for (Letter l : ls_) out.push_back(letter_char(l));
    return out;
  }

  bool operator==(const Word& o) const { return ls_ == o.ls_; }
  bool operator!=(const Word& o) const { return ls_ != o.ls_; }

  // Shortlex order on serialized characters; total, used for stable output.
  bool operator<(const Word& o) const {
    if (ls_.size() != o.ls_.size()) return ls_.size() < o.ls_.size();
    for (std::size_t i = 0; i < ls_.size(); ++i) {
      char x = letter_char(ls_[i]), y = letter_char(o.ls_[i]);
      if (x != y) return x < y;
    }
    return false;
  }

 private:
  static Word parse_seq(std::string_view s, std::size_t& pos, int depth) {
    Word w;
    while (pos < s.size()) {
      char c = s[pos];
      if (c == ' ' || c == '\t' || c == '\n' || c == '1' || c == '*') {
        ++pos;
        continue;
      }
      if (c == ')') {
        if (depth == 0) throw error("Word::parse: unbalanced ')'");
        return w;
      }
      Word atom;
      if (c == '(') {
        ++pos;
        atom = parse_seq(s, pos, depth + 1);
        if (pos >= s.size() || s[pos] != ')')
          throw error("Word::parse: missing ')'");
        ++pos;
      } else {
        atom.push(char_letter(c));
        ++pos;
      }
      long long e = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        bool neg = false;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
          neg = s[pos] == '-';
          ++pos;
        }
        if (pos >= s.size() || s[pos] < '0' || s[pos] > '9')
          throw error("Word::parse: missing exponent");
        e = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
          e = e * 10 + (s[pos] - '0');
          ++pos;
        }
        if (neg) e = -e;
      }
      w *= atom.pow(e);
    }
    if (depth != 0) throw error("Word::parse: missing ')'");
    return w;
  }

  std::vector<Letter> ls_;
};

inline std::ostream& operator<<(std::ostream& os, const Word& w) {
  return os << w.str();
}

struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::string_view bytes(reinterpret_cast<const char*>(w.letters().data()),
                           w.letters().size());
    return static_cast<std::size_t>(fnv1a64(bytes));
  }
};

inline Word conj(const Word& g, const Word& w) {
  return g * w * g.inverse();
}

// Removes matching first/last letters until the word is cyclically reduced.
inline Word cyclic_reduce(const Word& w) {
  const auto& ls = w.letters();
  std::size_t lo = 0, hi = ls.size();
  while (hi - lo >= 2 && ls[lo] == inv(ls[hi - 1])) {
    ++lo;
    --hi;
  }
  Word out;
  for (std::size_t i = lo; i < hi; ++i) out.push(ls[i]);
  return out;
}

// Booth's least-rotation algorithm on the serialized characters.
inline std::size_t least_rotation_index(std::string_view s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::string d(s);
  d += s;
  std::vector<std::ptrdiff_t> f(d.size(), -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < d.size(); ++j) {
    char sj = d[j];
    std::ptrdiff_t i = f[j - k - 1];
    while (i != -1 && sj != d[k + static_cast<std::size_t>(i) + 1]) {
      if (sj < d[k + static_cast<std::size_t>(i) + 1])
        k = j - static_cast<std::size_t>(i) - 1;
      i = f[static_cast<std::size_t>(i)];
    }
    if (sj != d[k + static_cast<std::size_t>(i) + 1]) {
      if (sj < d[k]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k;
}

inline Word rotate_word(const Word& w, std::size_t r) {
  const auto& ls = w.letters();
  Word out;
  for (std::size_t i = 0; i < ls.size(); ++i)
    out.push(ls[(i + r) % ls.size()]);
  return out;
}

// A conjugacy class, canonicalized as described in the header comment.
// With minimize_inversion the class of w and of w^{-1} coincide (unoriented
// curves); without it they are distinct (oriented loops).
class ConjClass {
 public:
  ConjClass() = default;

  static ConjClass of(const Word& w, bool minimize_inversion = false) {
    Word u = cyclic_reduce(w);
    Word best = canonical_rotation(u);
    if (minimize_inversion) {
      Word alt = canonical_rotation(u.inverse());
      if (str_less(alt, best)) best = alt;
    }
    ConjClass c;
    c.rep_ = best;
    c.inv_min_ = minimize_inversion;
    return c;
  }

  const Word& rep() const { return rep_; }
  bool inversion_minimized() const { return inv_min_; }
  std::string str() const { return rep_.str(); }
  bool trivial() const { return rep_.empty(); }

  bool operator==(const ConjClass& o) const {
    return inv_min_ == o.inv_min_ && rep_ == o.rep_;
  }
  bool operator!=(const ConjClass& o) const { return !(*this == o); }
  bool operator<(const ConjClass& o) const {
    if (inv_min_ != o.inv_min_) return inv_min_ < o.inv_min_;
    return rep_ < o.rep_;
  }

 private:
  static Word canonical_rotation(const Word& u) {
    if (u.size() <= 1) return u;
    return rotate_word(u, least_rotation_index(u.str()));
  }
  static bool str_less(const Word& x, const Word& y) {
    return x.str() < y.str();  // same length here, plain lexicographic
  }

  Word rep_;
  bool inv_min_ = false;
};

inline std::ostream& operator<<(std::ostream& os, const ConjClass& c) {
  return os << c.str();
}

struct ConjClassHash {
  std::size_t operator()(const ConjClass& c) const {
    std::uint64_t h = WordHash{}(c.rep());
    return static_cast<std::size_t>(h ^ (c.inversion_minimized() ? 0x9e3779b97f4a7c15ull : 0));
  }
};

// The positive simple loop about puncture `puncture` (0 .. rank, the last
// index being the puncture at infinity).
inline Word peripheral_word(int rank, int puncture) {
  if (rank < 2 || puncture < 0 || puncture > rank)
    throw error("peripheral_word: bad rank/puncture");
  Word w;
  if (puncture < rank) {
    w.push(static_cast<Letter>(puncture + 1));
    return w;
  }
  for (int i = rank; i >= 1; --i) w.push(static_cast<Letter>(-i));
  return w;  // (g_1 ... g_r)^{-1}
}

struct PeripheralInfo {
  int puncture = 0;          // 0..rank; rank = puncture at infinity
  long long exponent = 0;    // class equals that of peripheral_word^exponent
  bool operator==(const PeripheralInfo&) const = default;
};

// Detects whether the class of w is a nonzero power of a peripheral loop.
inline std::optional<PeripheralInfo> peripheral_class(const Word& w, int rank) {
  if (rank < 2) throw error("peripheral_class: rank must be >= 2");
  Word u = cyclic_reduce(w);
  if (u.empty()) return std::nullopt;
  // Single-generator powers.
  bool uniform = true;
  for (std::size_t i = 1; i < u.size() && uniform; ++i)
    uniform = u[i] == u[0];
  if (uniform) {
    Letter l = u[0];
    int g = (l < 0 ? -l : l) - 1;
    if (g < rank)
      return PeripheralInfo{g, l > 0 ? static_cast<long long>(u.size())
                                     : -static_cast<long long>(u.size())};
    return std::nullopt;  // letters beyond the declared rank
  }
  // Powers of the loop about infinity.
  const std::size_t r = static_cast<std::size_t>(rank);
  if (u.size() % r != 0) return std::nullopt;
  const long long k = static_cast<long long>(u.size() / r);
  Word base = peripheral_word(rank, rank);
  ConjClass cu = ConjClass::of(u);
  if (cu == ConjClass::of(base.pow(k))) return PeripheralInfo{rank, k};
  if (cu == ConjClass::of(base.pow(-k))) return PeripheralInfo{rank, -k};
  return std::nullopt;
}

// |B(radius)| = 1 + sum_{j=1..radius} 2r (2r-1)^{j-1} for the free group of
// rank r.
inline std::uint64_t ball_size(int rank, int radius) {
  if (rank < 1 || radius < 0) throw error("ball_size: bad arguments");
  std::uint64_t total = 1, shell = static_cast<std::uint64_t>(2 * rank);
  for (int j = 1; j <= radius; ++j) {
    total += shell;
    shell *= static_cast<std::uint64_t>(2 * rank - 1);
  }
  return total;
}

namespace detail {
template <class F>
void ball_extend(int rank, int radius, Word& w, F& visit) {
  if (static_cast<int>(w.size()) >= radius) return;
  for (int g = 1; g <= rank; ++g) {
    for (Letter l : {static_cast<Letter>(g), static_cast<Letter>(-g)}) {
      if (!w.empty() && w.letters().back() == inv(l)) continue;
      w.push(l);  // never cancels: l's inverse was excluded above
      visit(const_cast<const Word&>(w));
      ball_extend(rank, radius, w, visit);
      w.pop_back();
    }
  }
}
}  // namespace detail

// Visits every freely reduced word of length <= radius exactly once, in a
// deterministic depth-first order (identity first; letters a, a^-1, b, ...).
template <class F>
void for_each_in_ball(int rank, int radius, F&& visit) {
  if (rank < 1 || radius < 0) throw error("for_each_in_ball: bad arguments");
  Word w;
  visit(const_cast<const Word&>(w));
  detail::ball_extend(rank, radius, w, visit);
}

// Uniformly random freely reduced word of exactly the given length.
inline Word random_reduced_word(int rank, std::size_t len,
                                std::mt19937_64& rng) {
  if (rank < 1) throw error("random_reduced_word: bad rank");
  Word w;
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Letter> pool;
    for (int g = 1; g <= rank; ++g) {
      pool.push_back(static_cast<Letter>(g));
      pool.push_back(static_cast<Letter>(-g));
    }
    if (!w.empty()) {
      Letter bad = inv(w.letters().back());
      pool.erase(std::find(pool.begin(), pool.end(), bad));
    }
    w.push(pool[bounded_draw(rng, pool.size())]);
  }
  return w;
}

// Endomorphism of a free group given by generator images; composition and
// application substitute images and freely reduce.
class Endo {
 public:
  explicit Endo(std::vector<Word> images) : images_(std::move(images)) {
    if (images_.empty()) throw error("Endo: no generator images");
  }

  static Endo identity(int rank) {
    std::vector<Word> im;
    for (int g = 1; g <= rank; ++g) {
      Word w;
      w.push(static_cast<Letter>(g));
      im.push_back(w);
    }
    return Endo(std::move(im));
  }

  int rank() const { return static_cast<int>(images_.size()); }

  const Word& image(int gen) const {  // gen is 1-based
    if (gen < 1 || gen > rank()) throw error("Endo::image: bad generator");
    return images_[static_cast<std::size_t>(gen - 1)];
  }

  Word operator()(const Word& w) const {
    Word out;
    for (Letter l : w.letters()) {
      int g = l < 0 ? -l : l;
      if (g > rank()) throw error("Endo: word uses generator beyond rank");
      const Word& im = images_[static_cast<std::size_t>(g - 1)];
      out *= (l > 0 ? im : im.inverse());
    }
    return out;
  }

  // (f.then(g))(w) == g(f(w)).
  Endo then(const Endo& next) const {
    std::vector<Word> im;
    im.reserve(images_.size());
    for (const Word& w : images_) im.push_back(next(w));
    return Endo(std::move(im));
  }

 private:
  std::vector<Word> images_;
};

}  // namespace corrx
