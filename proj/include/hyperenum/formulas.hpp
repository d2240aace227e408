#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "hyperenum/core.hpp"

namespace hyperenum::formulas {

struct Options {
  // exact big-rational main terms are produced whenever M(k) stays below this
  unsigned exact_max_m = 500;
};

/// The o(1) control quantities of the enumeration formulas. Reported, never
/// applied: every value carries them so the consumer can see when the
/// asymptotic hypotheses fail at the instance scale.
struct ErrorEnvelope {
  long double base_term = 0;  // r^4 kmax^3 / M
  long double rho = 0;        // t kmax^3 / M^2 + r t kmax^4 / M^3
  std::optional<long double> beta;  // three-term sum over M(k - x)
  bool base_small = true;
  bool rho_small = true;
  std::optional<bool> beta_small;

  void set_beta(long double b) {
    beta = b;
    beta_small = b < 1.0L;
  }
};

struct FormulaResult {
  long double log_value = 0;  // natural log, exponential correction included
  std::optional<BigRat> main_term_exact;
  long double correction_exponent = 0;
  ErrorEnvelope envelope;
  bool degenerate = false;
};

namespace detail {

inline long double lgamma_ld(long double x) { return std::lgamma(x); }

inline long double log_factorial(const BigInt& m) {
  return lgamma_ld(m.convert_to<long double>() + 1.0L);
}

inline long double to_ld(const BigInt& v) { return v.convert_to<long double>(); }

inline long double base_term(int r, int kmax, const BigInt& m) {
  if (m == 0) return 0;
  const long double rr = r;
  return rr * rr * rr * rr * static_cast<long double>(kmax) * kmax * kmax / to_ld(m);
}

inline long double rho_term(int r, int t, int kmax, const BigInt& m) {
  if (t == 0 || kmax == 0) return 0;
  if (m == 0) return std::numeric_limits<long double>::infinity();
  const long double mm = to_ld(m);
  const long double k3 = static_cast<long double>(kmax) * kmax * kmax;
  return t * k3 / (mm * mm) + static_cast<long double>(r) * t * k3 * kmax / (mm * mm * mm);
}

inline long double beta_term(int r, int t, int kmax, const BigInt& m_reduced) {
  if (m_reduced == 0) return std::numeric_limits<long double>::infinity();
  const long double mm = to_ld(m_reduced);
  const long double k3 = static_cast<long double>(kmax) * kmax * kmax;
  const long double rr = r;
  return rr * rr * rr * rr * k3 / mm + t * k3 / (mm * mm) + rr * t * k3 * kmax / (mm * mm * mm);
}

inline long double m2_over_m(const BigInt& m2, const BigInt& m) {
  if (m == 0) return 0;
  return to_ld(m2) / to_ld(m);
}

}  // namespace detail

/// Exact main term of the enumeration formula:
/// M! / ((M/r)! r!^{M/r} prod k_i!).
inline BigRat exact_count_main_term(const DegreeSequence& k, int r) {
  if (k.m() % r != 0) throw NonDivisible("r must divide M(k)");
  const std::uint64_t m = k.m().convert_to<std::uint64_t>();
  const std::uint64_t groups = m / static_cast<std::uint64_t>(r);
  BigInt den = factorial(groups) * ipow(factorial(static_cast<std::uint64_t>(r)), groups);
  for (int d : k.degrees()) den *= factorial(static_cast<std::uint64_t>(d));
  return BigRat(factorial(m), den);
}

/// Exact main term of the containment probability:
/// (M/r)_t r!^t prod (k_i)_{x_i} / (M)_{rt}.
inline BigRat exact_containment_main_term(const DegreeSequence& k, int r, const ForbiddenSet& x) {
  if (k.m() % r != 0) throw NonDivisible("r must divide M(k)");
  const std::uint64_t t = static_cast<std::uint64_t>(x.t());
  BigInt num = falling_factorial(k.m() / r, t) * ipow(factorial(static_cast<std::uint64_t>(r)), t);
  for (int i = 0; i < k.size(); ++i)
    num *= falling_factorial(BigInt(k[i]), static_cast<std::uint64_t>(x.degrees()[i]));
  const BigInt den = falling_factorial(k.m(), static_cast<std::uint64_t>(r) * t);
  if (den == 0) throw DegenerateDenominator("(M)_{rt} vanished");
  return BigRat(num, den);
}

/// Value of the enumeration formula for |H_r(k)|: factorial main term times
/// exp(-(r-1) M_2 / (2M)). M = 0 degenerates to the empty hypergraph, value 1.
inline FormulaResult log_count_formula(const DegreeSequence& k, int r, const Options& opt = {}) {
  if (r < 1) throw NonDivisible("r must be at least 1");
  if (k.m() % r != 0) throw NonDivisible("r must divide M(k)");
  FormulaResult out;
  out.envelope.base_term = detail::base_term(r, k.kmax(), k.m());
  out.envelope.base_small = out.envelope.base_term < 1.0L;
  if (k.m() == 0) {
    out.main_term_exact = BigRat(1);
    return out;
  }
  out.correction_exponent =
      -static_cast<long double>(r - 1) * detail::m2_over_m(k.m2(), k.m()) / 2.0L;

  const std::uint64_t groups = (k.m() / r).convert_to<std::uint64_t>();
  long double log_main = detail::log_factorial(k.m());
  log_main -= detail::lgamma_ld(static_cast<long double>(groups) + 1.0L);
  log_main -= static_cast<long double>(groups) * detail::lgamma_ld(static_cast<long double>(r) + 1.0L);
  for (int d : k.degrees()) log_main -= detail::lgamma_ld(static_cast<long double>(d) + 1.0L);
  out.log_value = log_main + out.correction_exponent;

  if (k.m() <= opt.exact_max_m) out.main_term_exact = exact_count_main_term(k, r);
  return out;
}

/// Value of the avoidance formula for |H_r(k, X)|: identical main term and correction,
/// the avoidance effect lives entirely in the rho envelope.
inline FormulaResult log_avoiding_formula(const DegreeSequence& k, int r, const ForbiddenSet& x,
                                          const Options& opt = {}) {
  FormulaResult out = log_count_formula(k, r, opt);
  out.envelope.rho = detail::rho_term(r, x.t(), k.kmax(), k.m());
  out.envelope.rho_small = out.envelope.rho < 1.0L;
  return out;
}

/// Probability that a random member of H_r(k) contains every edge of X.
inline FormulaResult containment_probability_formula(const DegreeSequence& k, int r,
                                                     const ForbiddenSet& x,
                                                     const Options& opt = {}) {
  if (r < 1) throw NonDivisible("r must be at least 1");
  if (k.m() % r != 0) throw NonDivisible("r must divide M(k)");
  const auto reduced = subtract(k, x.degrees());
  if (!reduced) throw InfeasibleContainment("x_i > k_i for some vertex");

  FormulaResult out;
  out.envelope.base_term = detail::base_term(r, k.kmax(), k.m());
  out.envelope.base_small = out.envelope.base_term < 1.0L;
  out.envelope.rho = detail::rho_term(r, x.t(), k.kmax(), k.m());
  out.envelope.rho_small = out.envelope.rho < 1.0L;
  out.envelope.set_beta(detail::beta_term(r, x.t(), k.kmax(), reduced->m()));

  if (k.m() == 0) {
    out.main_term_exact = BigRat(1);
    return out;
  }

  out.correction_exponent = static_cast<long double>(r - 1) / 2.0L *
                            (detail::m2_over_m(k.m2(), k.m()) -
                             detail::m2_over_m(reduced->m2(), reduced->m()));

  const std::uint64_t t = static_cast<std::uint64_t>(x.t());
  const std::uint64_t rt = static_cast<std::uint64_t>(r) * t;
  const long double groups = (k.m() / r).convert_to<long double>();
  const long double mm = detail::to_ld(k.m());
  long double log_main = detail::lgamma_ld(groups + 1.0L) - detail::lgamma_ld(groups - t + 1.0L);
  log_main += static_cast<long double>(t) * detail::lgamma_ld(static_cast<long double>(r) + 1.0L);
  for (int i = 0; i < k.size(); ++i) {
    log_main += detail::lgamma_ld(static_cast<long double>(k[i]) + 1.0L);
    log_main -= detail::lgamma_ld(static_cast<long double>(k[i] - x.degrees()[i]) + 1.0L);
  }
  log_main -= detail::lgamma_ld(mm + 1.0L) - detail::lgamma_ld(mm - rt + 1.0L);
  out.log_value = log_main + out.correction_exponent;

  if (k.m() <= opt.exact_max_m) out.main_term_exact = exact_containment_main_term(k, r, x);
  return out;
}

/// Expected number of perfect matchings in a random k-regular r-uniform
/// hypergraph: sqrt(r) (k ((k-1)/k)^{(r-1)(k-1)})^{n/r} e^{(r-1)/2}.
/// k = 1 is degenerate (the hypergraph is its own perfect matching).
inline FormulaResult expected_pm_formula(int n, int r, int k) {
  if (r < 1 || n % r != 0) throw NonDivisible("r must divide n");
  if (k < 1) throw InvalidDegree("k must be positive");
  FormulaResult out;
  out.envelope.base_term =
      static_cast<long double>(r) * r * r * r * k * k / static_cast<long double>(n);
  out.envelope.base_small = out.envelope.base_term < 1.0L;
  if (k == 1) {
    out.degenerate = true;
    out.main_term_exact = BigRat(1);
    return out;
  }
  const long double kk = k;
  const long double log_base =
      std::log(kk) + static_cast<long double>(r - 1) * (k - 1) * (std::log(kk - 1) - std::log(kk));
  out.correction_exponent = static_cast<long double>(r - 1) / 2.0L;
  out.log_value = 0.5L * std::log(static_cast<long double>(r)) +
                  static_cast<long double>(n) / r * log_base + out.correction_exponent;
  return out;
}

/// Expected number of loose Hamilton cycles in a random k-regular r-uniform
/// hypergraph, per the confirmed conjecture formula.
inline FormulaResult expected_hc_formula(int n, int r, int k) {
  if (r < 3) throw DegenerateCycle("loose cycles need r >= 3");
  if (n % (r - 1) != 0) throw NonDivisible("r-1 must divide n");
  if (k < 2) throw InvalidDegree("k must be at least 2");
  const long long denom = static_cast<long long>(r) * k - r - k;
  if (denom <= 0) throw DegenerateDenominator("rk - r - k must be positive");
  FormulaResult out;
  out.envelope.base_term =
      static_cast<long double>(r) * r * r * r * k * k / static_cast<long double>(n);
  out.envelope.base_small = out.envelope.base_term < 1.0L;

  const long double rd = r, kd = k;
  const long double inner_log =
      std::log(kd - 1) + std::log(rd - 1) +
      (rd - 1) * static_cast<long double>(denom) / rd *
          (std::log(rd * kd - kd - rd) - std::log(rd * kd - kd));
  out.correction_exponent = (rd - 1) * (rd * kd - rd - 2) / (2.0L * static_cast<long double>(denom));
  const long double pi = 3.14159265358979323846264338327950288L;
  out.log_value = 0.5L * (std::log(pi) - std::log(2.0L * n)) + std::log(rd - 1) +
                  static_cast<long double>(n) / (r - 1) * inner_log + out.correction_exponent;
  return out;
}

/// All envelope terms for an instance; beta only where containment is
/// feasible.
inline ErrorEnvelope error_envelope(const Instance& inst) {
  ErrorEnvelope env;
  env.base_term = detail::base_term(inst.r(), inst.k().kmax(), inst.k().m());
  env.base_small = env.base_term < 1.0L;
  env.rho = detail::rho_term(inst.r(), inst.forbidden().t(), inst.k().kmax(), inst.k().m());
  env.rho_small = env.rho < 1.0L;
  if (inst.containment_feasible()) {
    const auto reduced = subtract(inst.k(), inst.forbidden().degrees());
    env.set_beta(detail::beta_term(inst.r(), inst.forbidden().t(), inst.k().kmax(), reduced->m()));
  }
  return env;
}

}  // namespace hyperenum::formulas
