#pragma once

#include <cmath>
#include <stdexcept>

// Pointwise truncation family used throughout the flow solvers and the
// verification layer. All functions are odd in s and 1-Lipschitz.

namespace tvf {

/// Clamp s to [-k, k].
template <class S>
S trunc(S k, S s) {
  if (!(k > S(0))) throw std::invalid_argument("trunc: level k must be > 0");
  return s > k ? k : (s < -k ? -k : s);
}

/// Tail part: s - trunc(k, s). Zero on [-k, k].
template <class S>
S gk(S k, S s) {
  return s - trunc(k, s);
}

/// Primitive of trunc(k, .) vanishing at 0: quadratic well, linear tails.
template <class S>
S jk(S k, S s) {
  if (!(k > S(0))) throw std::invalid_argument("jk: level k must be > 0");
  const S a = std::abs(s);
  return a <= k ? s * s / S(2) : k * a - k * k / S(2);
}

template <class S>
struct SmoothTruncValue {
  S value;
  S derivative;
};

/// C^2 truncation: identity on [-(k-eps), k-eps], constant k - eps/2 beyond
/// +-k, blended in between so the derivative is the quintic smoother-step
/// falling from 1 to 0. The derivative stays within [0, 1] and the map is odd.
template <class S>
SmoothTruncValue<S> smooth_trunc(S k, S eps, S s) {
  if (!(k > S(0))) throw std::invalid_argument("smooth_trunc: level k must be > 0");
  if (!(eps > S(0)) || !(eps < k))
    throw std::invalid_argument("smooth_trunc: width eps must satisfy 0 < eps < k");
  const S sign = s < S(0) ? S(-1) : S(1);
  const S a = sign * s;
  if (a <= k - eps) return {s, S(1)};
  if (a >= k) return {sign * (k - eps / S(2)), S(0)};
  const S x = (a - (k - eps)) / eps;  // in (0, 1)
  const S x3 = x * x * x;
  const S blend = x3 * (S(10) + x * (S(-15) + S(6) * x));          // quintic step
  const S iblend = x3 * x * (S(2.5) + x * (S(-3) + x));            // its primitive
  const S value = (k - eps) + eps * (x - iblend);
  return {sign * value, S(1) - blend};
}

/// Bundles a truncation level (and optional smoothing width) after validating
/// the parameters once.
struct TruncationFamily {
  double k;
  double eps;  // 0 means "no smoothing requested"

  explicit TruncationFamily(double level, double width = 0.0) : k(level), eps(width) {
    if (!(k > 0.0)) throw std::invalid_argument("TruncationFamily: level k must be > 0");
    if (width != 0.0 && !(width > 0.0 && width < k))
      throw std::invalid_argument("TruncationFamily: width eps must satisfy 0 < eps < k");
  }

  double value(double s) const { return trunc(k, s); }
  double tail(double s) const { return gk(k, s); }
  double primitive(double s) const { return jk(k, s); }
  SmoothTruncValue<double> smooth(double s) const {
    if (eps == 0.0) throw std::logic_error("TruncationFamily: no smoothing width set");
    return smooth_trunc(k, eps, s);
  }
};

}  // namespace tvf
