#pragma once

#include <algorithm>
#include <cmath>

namespace metasymnet {

// Domain protection for /, log, sqrt, exp so evaluation stays finite on all
// finite inputs:
//   a / b    -> a / (sign(b) * max(|b|, epsilon))
//   log(u)   -> log(max(|u|, epsilon))
//   sqrt(u)  -> sqrt(|u|)
//   exp(u)   -> exp(min(u, clamp_exp))
struct EvalPolicy {
  double epsilon = 1e-6;
  double clamp_exp = 50.0;
};

// Node outputs are capped to this magnitude so deep chains of products and
// sums cannot overflow to infinity.
inline constexpr double kValueCap = 1e100;

namespace protected_ops {

inline double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

inline double safe_den(double den, const EvalPolicy& p) {
  return sign(den) * std::max(std::abs(den), p.epsilon);
}

inline double div(double num, double den, const EvalPolicy& p) { return num / safe_den(den, p); }
inline double log(double u, const EvalPolicy& p) { return std::log(std::max(std::abs(u), p.epsilon)); }
inline double sqrt(double u) { return std::sqrt(std::abs(u)); }
inline double exp(double u, const EvalPolicy& p) { return std::exp(std::min(u, p.clamp_exp)); }

// Derivatives of the protected forms. Inside the epsilon band the protected
// denominator is held fixed, matching the forward expression.
inline double div_dnum(double den, const EvalPolicy& p) { return 1.0 / safe_den(den, p); }
inline double div_dden(double num, double den, const EvalPolicy& p) {
  const double d = safe_den(den, p);
  return -num / (d * d);
}
inline double log_du(double u, const EvalPolicy& p) { return sign(u) / std::max(std::abs(u), p.epsilon); }
inline double sqrt_du(double u, const EvalPolicy& p) {
  return sign(u) / (2.0 * std::max(std::sqrt(std::abs(u)), p.epsilon));
}
inline double exp_du(double u, const EvalPolicy& p) {
  return u < p.clamp_exp ? std::exp(u) : 0.0;
}

inline double cap(double v) { return std::clamp(v, -kValueCap, kValueCap); }

}  // namespace protected_ops
}  // namespace metasymnet
