#pragma once

// The finite word vocabulary: time-1 and time-sqrt(2) flows of +-e_i, +-E_ij x,
// +-Sigma_{e_i,0}(x) and +-Sigma_{0,e_i}(x), their closed forms, and the
// sentence text format.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vocabflow/error.hpp"
#include "vocabflow/linalg.hpp"

namespace vocabflow {

enum class Family : std::uint8_t { Translate, LinearBasis, NegPart, PosPart };
enum class Sign : std::int8_t { Plus = 1, Minus = -1 };
enum class Tau : std::uint8_t { One, Sqrt2 };

constexpr Sign flip(Sign s) noexcept { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
constexpr double sign_value(Sign s) noexcept { return s == Sign::Plus ? 1.0 : -1.0; }
constexpr double tau_value(Tau t) noexcept { return t == Tau::One ? 1.0 : std::numbers::sqrt2; }

/// Unsigned generator of one vocabulary family. Indices are 0-based; `col`
/// equals `row` for every family except LinearBasis.
struct Basis {
  Family family = Family::Translate;
  std::uint16_t row = 0;
  std::uint16_t col = 0;

  friend bool operator==(const Basis&, const Basis&) = default;

  static Basis translate(std::size_t i) { return {Family::Translate, narrow(i), narrow(i)}; }
  static Basis linear(std::size_t i, std::size_t j) { return {Family::LinearBasis, narrow(i), narrow(j)}; }
  static Basis neg_part(std::size_t i) { return {Family::NegPart, narrow(i), narrow(i)}; }
  static Basis pos_part(std::size_t i) { return {Family::PosPart, narrow(i), narrow(i)}; }

  std::size_t max_index() const noexcept { return row > col ? row : col; }

private:
  static std::uint16_t narrow(std::size_t i) {
    if (i > 0xFFFF) throw DimensionError("index exceeds supported dimension");
    return static_cast<std::uint16_t>(i);
  }
};

/// One element of the vocabulary. Carries no ambient dimension.
struct Word {
  Basis basis;
  Sign sign = Sign::Plus;
  Tau tau = Tau::One;

  friend bool operator==(const Word&, const Word&) = default;

  double signed_time() const noexcept { return sign_value(sign) * tau_value(tau); }
};

/// Time-`time` flow of the unsigned basis generator, in place. Exact closed forms.
inline void apply_basis_flow(const Basis& g, double time, std::span<double> x) {
  double& xi = x[g.row];
  switch (g.family) {
    case Family::Translate:
      xi += time;
      break;
    case Family::LinearBasis:
      if (g.row == g.col) {
        xi *= std::exp(time);
      } else {
        // E_ij is nilpotent for i != j: exp(t E_ij) = I + t E_ij.
        xi += time * x[g.col];
      }
      break;
    case Family::NegPart:
      if (xi < 0.0) xi *= std::exp(time);
      break;
    case Family::PosPart:
      if (xi >= 0.0) xi *= std::exp(time);
      break;
  }
}

/// Right-hand side of the basis generator ODE at x (used by the integration oracle).
inline double basis_field_component(const Basis& g, std::span<const double> x) {
  const double xi = x[g.row];
  switch (g.family) {
    case Family::Translate: return 1.0;
    case Family::LinearBasis: return x[g.col];
    case Family::NegPart: return xi < 0.0 ? xi : 0.0;
    case Family::PosPart: return xi >= 0.0 ? xi : 0.0;
  }
  return 0.0;
}

inline void apply_word_inplace(const Word& w, std::span<double> x) {
  apply_basis_flow(w.basis, w.signed_time(), x);
}

inline Vector apply_word(const Word& w, Vector x) {
  if (w.basis.max_index() >= static_cast<std::size_t>(x.size())) {
    throw DimensionError("word index exceeds point dimension");
  }
  apply_word_inplace(w, std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
  return x;
}

constexpr Word inverse_word(Word w) noexcept {
  w.sign = flip(w.sign);
  return w;
}

/// Every word for ambient dimension d, each exactly once: 4d^2 + 12d words.
/// Order: families T, L, N, P; indices ascending (row-major for L); sign +,-; tau 1, sqrt2.
inline std::vector<Word> vocabulary(std::size_t d) {
  if (d == 0) throw DimensionError("vocabulary dimension must be positive");
  std::vector<Word> out;
  out.reserve(4 * d * d + 12 * d);
  auto emit = [&](Basis b) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      for (Tau t : {Tau::One, Tau::Sqrt2}) out.push_back({b, s, t});
    }
  };
  for (std::size_t i = 0; i < d; ++i) emit(Basis::translate(i));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) emit(Basis::linear(i, j));
  }
  for (std::size_t i = 0; i < d; ++i) emit(Basis::neg_part(i));
  for (std::size_t i = 0; i < d; ++i) emit(Basis::pos_part(i));
  return out;
}

/// Words composed left to right: words[0] is applied first.
struct Sentence {
  std::size_t dim = 1;
  std::vector<Word> words;

  friend bool operator==(const Sentence&, const Sentence&) = default;

  std::size_t size() const noexcept { return words.size(); }
  bool empty() const noexcept { return words.empty(); }

  void append(const Sentence& other) {
    if (other.dim != dim) throw DimensionError("cannot concatenate sentences of different dimension");
    words.insert(words.end(), other.words.begin(), other.words.end());
  }

  /// Throws DimensionError if any word index is out of range.
  void validate() const {
    if (dim == 0) throw DimensionError("sentence dimension must be positive");
    for (const Word& w : words) {
      if (w.basis.max_index() >= dim) throw DimensionError("word index exceeds sentence dimension");
    }
  }
};

inline Vector apply_sentence(const Sentence& s, Vector x) {
  if (static_cast<std::size_t>(x.size()) != s.dim) {
    throw DimensionError("point dimension " + std::to_string(x.size()) +
                         " does not match sentence dimension " + std::to_string(s.dim));
  }
  s.validate();
  std::span<double> view(x.data(), s.dim);
  for (const Word& w : s.words) apply_word_inplace(w, view);
  return x;
}

/// Evaluates a sentence with each run of consecutive words sharing a basis
/// folded into one flow of the summed signed time. Same map as apply_sentence
/// (flows of one generator form a one-parameter group); cost scales with the
/// number of runs.
class SentenceEvaluator {
public:
  explicit SentenceEvaluator(const Sentence& s) : dim_(s.dim), words_(s.size()) {
    s.validate();
    std::size_t i = 0;
    while (i < s.words.size()) {
      std::size_t k = i;
      std::int64_t ones = 0;
      std::int64_t roots = 0;
      while (k < s.words.size() && s.words[k].basis == s.words[i].basis) {
        const std::int64_t sgn = s.words[k].sign == Sign::Plus ? 1 : -1;
        (s.words[k].tau == Tau::One ? ones : roots) += sgn;
        ++k;
      }
      const double time = static_cast<double>(ones) + static_cast<double>(roots) * std::numbers::sqrt2;
      const Basis& g = s.words[i].basis;
      const bool scaling = g.family != Family::Translate && !(g.family == Family::LinearBasis && g.row != g.col);
      runs_.push_back({g, scaling ? std::exp(time) : time});
      i = k;
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t word_count() const noexcept { return words_; }
  std::size_t run_count() const noexcept { return runs_.size(); }

  void apply(std::span<double> x) const {
    for (const Run& r : runs_) {
      double& xi = x[r.basis.row];
      switch (r.basis.family) {
        case Family::Translate: xi += r.value; break;
        case Family::LinearBasis:
          if (r.basis.row == r.basis.col) xi *= r.value;
          else xi += r.value * x[r.basis.col];
          break;
        case Family::NegPart: if (xi < 0.0) xi *= r.value; break;
        case Family::PosPart: if (xi >= 0.0) xi *= r.value; break;
      }
    }
  }

  Vector operator()(Vector x) const {
    if (static_cast<std::size_t>(x.size()) != dim_) throw DimensionError("point dimension mismatch");
    apply(std::span<double>(x.data(), dim_));
    return x;
  }

private:
  struct Run {
    Basis basis;
    double value;  // translation/shear amount, or the scaling factor exp(time)
  };
  std::size_t dim_;
  std::size_t words_;
  std::vector<Run> runs_;
};

// ---------------------------------------------------------------------------
// Text format
//
//   #dim <d>
//   <F><sign><idx>@<tau> ...
//
// F in {T, L, N, P}; sign in {+, -}; idx is <i> or, for L, <i>.<j> (1-based);
// tau in {1, s} where s is sqrt(2). Later lines starting with '#' are comments.

inline char family_letter(Family f) {
  switch (f) {
    case Family::Translate: return 'T';
    case Family::LinearBasis: return 'L';
    case Family::NegPart: return 'N';
    case Family::PosPart: return 'P';
  }
  return '?';
}

inline std::string format_word(const Word& w) {
  std::string out;
  out.reserve(12);
  out.push_back(family_letter(w.basis.family));
  out.push_back(w.sign == Sign::Plus ? '+' : '-');
  out += std::to_string(w.basis.row + 1);
  if (w.basis.family == Family::LinearBasis) {
    out.push_back('.');
    out += std::to_string(w.basis.col + 1);
  }
  out.push_back('@');
  out.push_back(w.tau == Tau::One ? '1' : 's');
  return out;
}

/// Tokens per line in formatted output.
inline constexpr std::size_t kTokensPerLine = 16;

inline std::string format_sentence(const Sentence& s) {
  std::string out = "#dim " + std::to_string(s.dim);
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    out.push_back(i % kTokensPerLine == 0 ? '\n' : ' ');
    out += format_word(s.words[i]);
  }
  return out;
}

namespace detail {

inline bool parse_index(std::string_view text, std::size_t& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

inline Word parse_token(std::string_view tok, std::size_t dim, std::size_t line, std::size_t col) {
  auto fail = [&](const std::string& why) -> Word {
    throw ParseError("malformed token '" + std::string(tok) + "': " + why, line, col);
  };
  if (tok.size() < 5) return fail("too short");
  Family family;
  switch (tok[0]) {
    case 'T': family = Family::Translate; break;
    case 'L': family = Family::LinearBasis; break;
    case 'N': family = Family::NegPart; break;
    case 'P': family = Family::PosPart; break;
    default: return fail("unknown family letter");
  }
  Sign sign;
  if (tok[1] == '+') sign = Sign::Plus;
  else if (tok[1] == '-') sign = Sign::Minus;
  else return fail("expected '+' or '-'");

  const auto at = tok.find('@');
  if (at == std::string_view::npos || at + 2 != tok.size()) return fail("expected '@1' or '@s' suffix");
  Tau tau;
  if (tok[at + 1] == '1') tau = Tau::One;
  else if (tok[at + 1] == 's') tau = Tau::Sqrt2;
  else return fail("time tag must be '1' or 's'");

  const std::string_view idx = tok.substr(2, at - 2);
  std::size_t i = 0;
  std::size_t j = 0;
  if (family == Family::LinearBasis) {
    const auto dot = idx.find('.');
    if (dot == std::string_view::npos) return fail("L token needs <i>.<j>");
    if (!parse_index(idx.substr(0, dot), i) || !parse_index(idx.substr(dot + 1), j)) {
      return fail("bad index");
    }
  } else {
    if (!parse_index(idx, i)) return fail("bad index");
    j = i;
  }
  if (i < 1 || i > dim || j < 1 || j > dim) {
    throw ParseError("index out of range 1.." + std::to_string(dim) + " in '" + std::string(tok) + "'",
                     line, col);
  }
  return Word{Basis{family, static_cast<std::uint16_t>(i - 1), static_cast<std::uint16_t>(j - 1)}, sign, tau};
}

}  // namespace detail

inline Sentence parse_sentence(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos > text.size()) return false;
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || line.substr(0, 5) != "#dim ") {
    throw ParseError("missing '#dim <d>' header", 1, 1);
  }
  std::string_view dim_text = line.substr(5);
  while (!dim_text.empty() && (dim_text.back() == ' ' || dim_text.back() == '\t')) dim_text.remove_suffix(1);
  std::size_t dim = 0;
  if (!detail::parse_index(dim_text, dim) || dim == 0) {
    throw ParseError("header dimension must be a positive integer", 1, 6);
  }

  Sentence s{dim, {}};
  while (next_line(line)) {
    if (!line.empty() && line.front() == '#') continue;
    std::size_t c = 0;
    while (c < line.size()) {
      while (c < line.size() && (line[c] == ' ' || line[c] == '\t')) ++c;
      if (c >= line.size()) break;
      std::size_t e = c;
      while (e < line.size() && line[e] != ' ' && line[e] != '\t') ++e;
      s.words.push_back(detail::parse_token(line.substr(c, e - c), dim, line_no, c + 1));
      c = e;
    }
  }
  return s;
}

}  // namespace vocabflow
