#pragma once

// Realizing a flow time t as p * 1 - q * sqrt(2) with the two vocabulary times.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <vector>

#include "vocabflow/error.hpp"
#include "vocabflow/vocab.hpp"

namespace vocabflow {

struct KroneckerOptions {
  /// Require p >= 1 and q >= 1 (the textbook statement). Default allows q = 0.
  bool strict = false;
  /// Allow p and q of either sign, picking the smallest |q|.
  bool signed_pairs = false;
};

/// t ~ p - q sqrt(2); residual = p - q sqrt(2) - t.
struct KroneckerPair {
  std::int64_t p = 0;
  std::int64_t q = 0;
  double residual = 0.0;

  friend bool operator==(const KroneckerPair&, const KroneckerPair&) = default;

  std::uint64_t word_count() const noexcept {
    return static_cast<std::uint64_t>(std::llabs(p)) + static_cast<std::uint64_t>(std::llabs(q));
  }
};

inline constexpr std::int64_t kMaxKroneckerQ = 1'000'000'000;

namespace detail {

using i128 = __int128;

inline i128 floor_mod(i128 a, i128 m) {
  const i128 r = a % m;
  return r < 0 ? r + m : r;
}

/// Smallest x >= 0 with l <= (a x) mod m <= r, for 0 <= l <= r < m.
/// Euclid-style descent: if no multiple of a lands in [l, r] directly, the
/// wrap count y solves the same problem with (m mod a, a).
inline std::optional<i128> first_multiple_in(i128 a, i128 m, i128 l, i128 r) {
  a = floor_mod(a, m);
  if (l == 0) return 0;
  if (a == 0) return std::nullopt;
  const i128 k = (l + a - 1) / a;
  if (a * k <= r) return k;
  const auto y = first_multiple_in(m % a, a, floor_mod(-r, a), floor_mod(-l, a));
  if (!y) return std::nullopt;
  return (l + m * *y + a - 1) / a;
}

/// Smallest x >= 0 with (a x + b) mod m within `half` of 0 on the circle Z/m.
inline std::optional<i128> first_hit_near_zero(i128 a, i128 b, i128 m, i128 half) {
  // Target residues [m - half, m + half] (mod m) for a x, shifted by -b.
  const i128 start = floor_mod(-half - b, m);
  const i128 len = 2 * half;
  if (len >= m - 1) return 0;
  std::optional<i128> best;
  auto consider = [&](i128 lo, i128 hi) {
    const auto x = first_multiple_in(a, m, lo, hi);
    if (x && (!best || *x < *best)) best = x;
  };
  if (start + len < m) {
    consider(start, start + len);
  } else {
    consider(start, m - 1);
    consider(0, start + len - m);
  }
  return best;
}

/// Convergent P/Q of sqrt(2) with Q near 2^42 (Pell numbers).
struct Sqrt2Convergent {
  i128 num;
  i128 den;
};

inline Sqrt2Convergent sqrt2_convergent() {
  i128 p0 = 1, q0 = 1, p1 = 3, q1 = 2;
  while (q1 < (static_cast<i128>(1) << 42)) {
    const i128 p2 = 2 * p1 + p0;
    const i128 q2 = 2 * q1 + q0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  return {p1, q1};
}

inline long double kron_residual(long double t, std::int64_t p, std::int64_t q) {
  const long double sqrt2 = 1.414213562373095048801688724209698079L;
  return static_cast<long double>(p) - static_cast<long double>(q) * sqrt2 - t;
}

inline std::int64_t nearest_p(long double t, std::int64_t q) {
  const long double sqrt2 = 1.414213562373095048801688724209698079L;
  return static_cast<std::int64_t>(std::llround(t + static_cast<long double>(q) * sqrt2));
}

/// Smallest q >= q_min (q_dir = +1) or q <= -q_min (q_dir = -1) in magnitude with
/// |round(t + q sqrt2) - t - q sqrt2| < eps.
inline std::optional<std::int64_t> smallest_q(double t, double eps, std::int64_t q_min, int q_dir) {
  static const Sqrt2Convergent c = sqrt2_convergent();
  const i128 m = c.den;
  // frac(q sqrt2) ~ (q * num mod den) / den; the approximation error for
  // |q| <= 1e9 is below 1e-15 and thus far under one lattice unit.
  const i128 a = floor_mod(q_dir > 0 ? c.num : -c.num, m);
  const long double scaled_t = static_cast<long double>(t) * static_cast<long double>(m);
  const i128 b0 = floor_mod(static_cast<i128>(std::llroundl(std::fmod(scaled_t, static_cast<long double>(m)))), m);
  const i128 b = floor_mod(b0 + a * q_min, m);
  const long double scaled_eps = static_cast<long double>(eps) * static_cast<long double>(m);
  if (scaled_eps < 8.0L) throw ResourceError("tolerance below the resolution of the Kronecker search");
  const i128 half = scaled_eps >= static_cast<long double>(m) ? m : static_cast<i128>(scaled_eps) - 3;

  // Guard the lattice rounding: restart past any candidate failing the exact check.
  i128 start = 0;
  for (int guard = 0; guard < 64; ++guard) {
    const auto hit = first_hit_near_zero(a, floor_mod(b + a * start, m), m, half);
    if (!hit) return std::nullopt;
    const i128 mag = start + *hit + q_min;
    if (mag > kMaxKroneckerQ) return std::nullopt;
    const auto q = static_cast<std::int64_t>(mag) * q_dir;
    const std::int64_t p = nearest_p(t, q);
    if (std::fabs(static_cast<double>(kron_residual(t, p, q))) < eps) return q;
    start += *hit + 1;
  }
  return std::nullopt;
}

}  // namespace detail

/// Pair (p, q) with |p - q sqrt(2) - t| < eps. Deterministic: the smallest
/// admissible q, with p = round(t + q sqrt(2)) clamped to p >= 0.
inline KroneckerPair kronecker_pq(double t, double eps, const KroneckerOptions& opt = {}) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("kronecker_pq needs t > 0");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("kronecker_pq needs eps > 0");

  const std::int64_t q_min = opt.strict ? 1 : 0;
  std::optional<std::int64_t> q = detail::smallest_q(t, eps, q_min, +1);
  if (opt.signed_pairs) {
    const auto qn = detail::smallest_q(t, eps, 1, -1);
    if (qn && (!q || -*qn < *q)) q = qn;
  }
  if (!q) {
    throw ResourceError("Kronecker search exceeded q <= " + std::to_string(kMaxKroneckerQ) + " for t=" +
                        std::to_string(t) + ", eps=" + std::to_string(eps));
  }
  std::int64_t p = detail::nearest_p(t, *q);
  if (!opt.signed_pairs && p < 0) p = 0;
  const auto r = static_cast<double>(detail::kron_residual(t, p, *q));
  if (!(std::fabs(r) < eps)) {
    // Only reachable through the p >= 0 clamp, which the search already excludes.
    throw ResourceError("Kronecker pair failed its contract");
  }
  return {p, *q, r};
}

/// Words realizing the flow of sign * basis for signed time c:
/// p copies of (g, 1) followed by q copies of (-g, sqrt2), with g = sign(c) * sign * basis.
inline std::vector<Word> expand_time(Basis basis, Sign sign, double c, double eps,
                                     const KroneckerOptions& opt = {}) {
  std::vector<Word> out;
  if (c == 0.0) return out;
  const Sign g = c < 0.0 ? flip(sign) : sign;
  const KroneckerPair pq = kronecker_pq(std::fabs(c), eps, opt);
  const Sign p_sign = pq.p >= 0 ? g : flip(g);
  const Sign q_sign = pq.q >= 0 ? flip(g) : g;
  out.reserve(pq.word_count());
  for (std::int64_t k = 0; k < std::llabs(pq.p); ++k) out.push_back({basis, p_sign, Tau::One});
  for (std::int64_t k = 0; k < std::llabs(pq.q); ++k) out.push_back({basis, q_sign, Tau::Sqrt2});
  return out;
}

/// The words of expand_time reordered so every partial sum of signed times
/// stays within (-sqrt2, 1] of zero along g. All words share one generator up to
/// sign, so they commute and the composed map is unchanged; bounded partial
/// times keep scaling words clear of overflow and underflow.
inline std::vector<Word> balanced_expansion(Basis basis, Sign sign, double c, double eps,
                                            const KroneckerOptions& opt = {}) {
  std::vector<Word> out;
  if (c == 0.0) return out;
  const Sign g = c < 0.0 ? flip(sign) : sign;
  const KroneckerPair pq = kronecker_pq(std::fabs(c), eps, opt);
  const Word unit{basis, pq.p >= 0 ? g : flip(g), Tau::One};
  const Word root{basis, pq.q >= 0 ? flip(g) : g, Tau::Sqrt2};
  // Track the partial time along the unit word's direction.
  const double root_step = sign_value(root.sign) * sign_value(unit.sign) * std::numbers::sqrt2;
  std::uint64_t p_left = static_cast<std::uint64_t>(std::llabs(pq.p));
  std::uint64_t q_left = static_cast<std::uint64_t>(std::llabs(pq.q));
  out.reserve(p_left + q_left);
  double partial = 0.0;
  while (p_left + q_left > 0) {
    const bool take_unit = q_left == 0 || (p_left > 0 && (root_step < 0.0 ? partial <= 0.0 : partial >= 0.0));
    if (take_unit) {
      out.push_back(unit);
      partial += 1.0;
      --p_left;
    } else {
      out.push_back(root);
      partial += root_step;
      --q_left;
    }
  }
  return out;
}

}  // namespace vocabflow
