#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "hyperenum/formulas.hpp"
#include "hyperenum/oracle.hpp"
#include "support/naive.hpp"

using namespace hyperenum;

namespace {

const DegreeSequence k1_6(std::vector<int>(6, 1));
const DegreeSequence k2_6(std::vector<int>(6, 2));

bool log_close(long double a, long double b, long double rel = 1e-12L) {
  const long double scale = std::max<long double>(1.0L, std::max(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= rel * scale;
}

/// The invariant every FormulaResult must satisfy when its exact main term is
/// populated.
void check_internal_consistency(const formulas::FormulaResult& f) {
  if (!f.main_term_exact) return;
  if (*f.main_term_exact == 0) return;
  const long double recomputed = log_rational(*f.main_term_exact) + f.correction_exponent;
  CHECK(log_close(recomputed, f.log_value));
}

}  // namespace

TEST_CASE("count formula on the matching class is exact") {
  auto f = formulas::log_count_formula(k1_6, 3);
  REQUIRE(f.main_term_exact);
  CHECK(*f.main_term_exact == 10);
  CHECK(f.correction_exponent == 0.0L);
  CHECK(log_close(f.log_value, std::log(10.0L)));
  check_internal_consistency(f);

  auto single = formulas::log_count_formula(DegreeSequence({1, 1, 1}), 3);
  REQUIRE(single.main_term_exact);
  CHECK(*single.main_term_exact == 1);
  CHECK(single.log_value == 0.0L);
}

TEST_CASE("count formula on the 2-regular class") {
  auto f = formulas::log_count_formula(k2_6, 3);
  REQUIRE(f.main_term_exact);
  CHECK(*f.main_term_exact == BigRat(1925, 8));  // 240.625
  CHECK(f.correction_exponent == -1.0L);
  CHECK(log_close(f.log_value, 4.4832397050420486701L, 1e-15L));
  check_internal_consistency(f);
  CHECK(f.envelope.base_term == Catch::Approx(81.0 * 8 / 12).epsilon(1e-12));
  CHECK(!f.envelope.base_small);
}

TEST_CASE("count formula edge cases") {
  CHECK_THROWS_AS(formulas::log_count_formula(DegreeSequence({1, 1, 1, 1, 1}), 3), NonDivisible);
  auto zero = formulas::log_count_formula(DegreeSequence({0, 0, 0}), 3);
  REQUIRE(zero.main_term_exact);
  CHECK(*zero.main_term_exact == 1);
  CHECK(zero.log_value == 0.0L);
  CHECK(zero.envelope.rho == 0.0L);
}

TEST_CASE("avoiding formula only adds the rho envelope") {
  ForbiddenSet x(Hypergraph(6, 3, {Edge({0, 1, 2})}));
  auto base = formulas::log_count_formula(k1_6, 3);
  auto avoid = formulas::log_avoiding_formula(k1_6, 3, x);
  CHECK(avoid.log_value == base.log_value);
  CHECK(avoid.correction_exponent == base.correction_exponent);
  CHECK(*avoid.main_term_exact == *base.main_term_exact);
  CHECK(avoid.envelope.rho == Catch::Approx(1.0 / 24).epsilon(1e-12));  // 1/36 + 1/72
  CHECK(avoid.envelope.rho_small);

  auto none = formulas::log_avoiding_formula(k1_6, 3, ForbiddenSet::none(6, 3));
  CHECK(none.envelope.rho == 0.0L);
  CHECK(none.log_value == base.log_value);
  CHECK(none.envelope.base_term == base.envelope.base_term);
}

TEST_CASE("containment probability formula at k = 1") {
  auto f = formulas::containment_probability_formula(k1_6, 3,
                                                     ForbiddenSet(Hypergraph(6, 3, {Edge({0, 1, 2})})));
  REQUIRE(f.main_term_exact);
  CHECK(*f.main_term_exact == BigRat(1, 10));
  CHECK(f.correction_exponent == 0.0L);
  check_internal_consistency(f);

  auto f9 = formulas::containment_probability_formula(
      DegreeSequence(std::vector<int>(9, 1)), 3, ForbiddenSet(Hypergraph(9, 3, {Edge({0, 1, 2})})));
  CHECK(*f9.main_term_exact == BigRat(1, 28));

  // n = r = 3: the unique hypergraph contains the unique edge with certainty
  auto f3 = formulas::containment_probability_formula(
      DegreeSequence({1, 1, 1}), 3, ForbiddenSet(Hypergraph(3, 3, {Edge({0, 1, 2})})));
  CHECK(*f3.main_term_exact == 1);

  auto empty = formulas::containment_probability_formula(k1_6, 3, ForbiddenSet::none(6, 3));
  CHECK(*empty.main_term_exact == 1);
  CHECK(empty.correction_exponent == 0.0L);

  CHECK_THROWS_AS(formulas::containment_probability_formula(
                      k1_6, 3,
                      ForbiddenSet(Hypergraph(6, 3, {Edge({0, 1, 2}), Edge({0, 3, 4})}))),
                  InfeasibleContainment);
}

TEST_CASE("factorial consistency identity across k, x and k - x") {
  naive::InstanceGen gen(4049);
  int done = 0;
  while (done < 60) {
    const int r = gen.uniform(3, 5);
    const int n = gen.uniform(r, 9);
    DegreeSequence k = gen.degrees(n, r, 4);
    if (k.m() == 0 || k.m() > 60) continue;
    // random x <= k with sum divisible by r
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    const int tmax = gen.uniform(0, 2);
    long long budget = static_cast<long long>(tmax) * r;
    for (int pass = 0; pass < 200 && budget > 0; ++pass) {
      const int v = gen.uniform(0, n - 1);
      if (x[static_cast<std::size_t>(v)] < k[v]) {
        ++x[static_cast<std::size_t>(v)];
        --budget;
      }
    }
    if (budget != 0) continue;
    DegreeSequence xs(x);
    const long long t = tmax;

    // containment factor times count factor at k equals count factor at k - x
    const BigRat count_k = formulas::exact_count_main_term(k, r);
    auto reduced = subtract(k, xs);
    REQUIRE(reduced);
    const BigRat count_kx = formulas::exact_count_main_term(*reduced, r);

    BigInt num = falling_factorial(k.m() / r, static_cast<std::uint64_t>(t)) *
                 ipow(factorial(static_cast<std::uint64_t>(r)), static_cast<std::uint64_t>(t));
    for (int i = 0; i < n; ++i)
      num *= falling_factorial(BigInt(k[i]), static_cast<std::uint64_t>(xs[i]));
    const BigInt den = falling_factorial(k.m(), static_cast<std::uint64_t>(r) * t);
    const BigRat containment(num, den);

    CHECK(containment * count_k == count_kx);
    ++done;
  }
}

TEST_CASE("expected perfect matchings formula") {
  auto f = formulas::expected_pm_formula(6, 3, 2);
  CHECK_FALSE(f.main_term_exact);
  CHECK(f.correction_exponent == 1.0L);
  CHECK(std::exp((double)f.log_value) == Catch::Approx(1.177050559045573419).epsilon(1e-12));
  CHECK(f.envelope.base_term == Catch::Approx(81.0 * 4 / 6).epsilon(1e-12));

  auto f12 = formulas::expected_pm_formula(12, 3, 2);
  CHECK(std::exp((double)f12.log_value) == Catch::Approx(0.29426263976139335).epsilon(1e-12));

  auto degenerate = formulas::expected_pm_formula(6, 3, 1);
  CHECK(degenerate.degenerate);
  REQUIRE(degenerate.main_term_exact);
  CHECK(*degenerate.main_term_exact == 1);
  CHECK(degenerate.log_value == 0.0L);

  CHECK_THROWS_AS(formulas::expected_pm_formula(7, 3, 2), NonDivisible);
  CHECK_THROWS_AS(formulas::expected_pm_formula(6, 3, 0), InvalidDegree);
}

TEST_CASE("expected loose hamilton formula") {
  auto f = formulas::expected_hc_formula(6, 3, 2);
  CHECK(f.correction_exponent == 1.0L);  // (r-1)(rk-r-2) / (2(rk-r-k)) = 2*1/2
  CHECK(std::exp((double)f.log_value) == Catch::Approx(1.3908451973938781).epsilon(1e-12));

  auto f8 = formulas::expected_hc_formula(8, 3, 2);
  CHECK(std::exp((double)f8.log_value) == Catch::Approx(0.95601805666726790).epsilon(1e-12));

  CHECK_THROWS_AS(formulas::expected_hc_formula(7, 3, 2), NonDivisible);
  CHECK_THROWS_AS(formulas::expected_hc_formula(6, 3, 1), InvalidDegree);
}

TEST_CASE("error envelope") {
  Instance plain(k1_6, 3, ForbiddenSet::none(6, 3));
  auto env = formulas::error_envelope(plain);
  CHECK(env.rho == 0.0L);
  REQUIRE(env.beta);
  CHECK(*env.beta == Catch::Approx(81.0 / 6).margin(1e-9));  // x = 0: beta over M(k)

  Instance with_edge(k1_6, 3, ForbiddenSet(Hypergraph(6, 3, {Edge({0, 1, 2})})));
  env = formulas::error_envelope(with_edge);
  CHECK(env.rho == Catch::Approx(1.0 / 24).epsilon(1e-12));
  REQUIRE(env.beta);
  // M(k - x) = 3: 81/3 + 1/9 + 3/27
  CHECK(*env.beta == Catch::Approx(245.0 / 9).epsilon(1e-12));
  REQUIRE(env.beta_small);
  CHECK_FALSE(*env.beta_small);

  // containment-infeasible instances report no beta
  Instance infeasible(k1_6, 3,
                      ForbiddenSet(Hypergraph(6, 3, {Edge({0, 1, 2}), Edge({0, 3, 4})})));
  env = formulas::error_envelope(infeasible);
  CHECK_FALSE(env.beta.has_value());
}

TEST_CASE("log path agrees with the exact path everywhere both run") {
  naive::InstanceGen gen(88);
  for (int trial = 0; trial < 40; ++trial) {
    const int r = gen.uniform(3, 4);
    const int n = gen.uniform(r, 9);
    DegreeSequence k = gen.degrees(n, r, 4);
    auto f = formulas::log_count_formula(k, r);
    check_internal_consistency(f);
    ForbiddenSet x = gen.forbidden_within(k, r, 2);
    auto fc = formulas::containment_probability_formula(k, r, x);
    check_internal_consistency(fc);
  }
}

TEST_CASE("exactness at k = 1 degenerates to the matching count") {
  for (auto [n, r] : std::vector<std::pair<int, int>>{{6, 3}, {9, 3}, {8, 4}}) {
    auto f = formulas::log_count_formula(DegreeSequence(std::vector<int>(n, 1)), r);
    REQUIRE(f.main_term_exact);
    CHECK(*f.main_term_exact == BigRat(oracle::pm_complete(n, r)));
    CHECK(f.correction_exponent == 0.0L);
  }
}
