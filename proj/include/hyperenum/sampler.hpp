#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "hyperenum/core.hpp"
#include "hyperenum/oracle.hpp"
#include "hyperenum/rng.hpp"

namespace hyperenum::sampler {

struct Options {
  std::uint64_t max_attempts = 1'000'000;  // per uniform draw
  int threads = 1;
  std::uint64_t structure_budget = oracle::Options{}.node_budget;
};

/// One draw of the pairing model: the M labeled half-edges (k_i per vertex)
/// split into M/r unordered groups of size r.
struct PairingOutcome {
  std::vector<std::vector<int>> groups;  // point labels, canonically ordered
  bool simple = false;
  std::optional<Hypergraph> hypergraph;  // present iff simple
};

/// Uniform pairing: shuffle the M points once, cut into consecutive blocks
/// of r. Every unordered partition arises from the same number of orderings,
/// so the result is uniform over pairings.
inline PairingOutcome sample_pairing(const DegreeSequence& k, int r, Xoshiro256pp& rng) {
  if (r < 1 || k.m() % r != 0) throw NonDivisible("r must divide M(k)");
  const std::uint64_t m64 = k.m().convert_to<std::uint64_t>();
  const int m = static_cast<int>(m64);
  const int blocks = m / r;

  std::vector<int> point_vertex(static_cast<std::size_t>(m));
  {
    int p = 0;
    for (int v = 0; v < k.size(); ++v)
      for (int c = 0; c < k[v]; ++c) point_vertex[static_cast<std::size_t>(p++)] = v;
  }
  std::vector<int> points(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) points[static_cast<std::size_t>(p)] = p;
  shuffle(points, rng);

  PairingOutcome out;
  out.groups.reserve(static_cast<std::size_t>(blocks));
  std::vector<std::vector<int>> vertex_groups(static_cast<std::size_t>(blocks));
  bool loop = false;
  for (int b = 0; b < blocks; ++b) {
    std::vector<int> grp(points.begin() + static_cast<std::ptrdiff_t>(b) * r,
                         points.begin() + static_cast<std::ptrdiff_t>(b + 1) * r);
    std::sort(grp.begin(), grp.end());
    auto& vg = vertex_groups[static_cast<std::size_t>(b)];
    vg.reserve(static_cast<std::size_t>(r));
    for (int p : grp) vg.push_back(point_vertex[static_cast<std::size_t>(p)]);
    std::sort(vg.begin(), vg.end());
    for (int i = 0; i + 1 < r; ++i)
      if (vg[static_cast<std::size_t>(i)] == vg[static_cast<std::size_t>(i + 1)]) loop = true;
    out.groups.push_back(std::move(grp));
  }
  std::sort(out.groups.begin(), out.groups.end());

  bool repeated = false;
  if (!loop) {
    std::vector<std::vector<int>> sorted_vg = vertex_groups;
    std::sort(sorted_vg.begin(), sorted_vg.end());
    for (std::size_t i = 0; i + 1 < sorted_vg.size(); ++i)
      if (sorted_vg[i] == sorted_vg[i + 1]) repeated = true;
  }
  out.simple = !loop && !repeated;
  if (out.simple) {
    std::vector<Edge> edges;
    edges.reserve(vertex_groups.size());
    for (auto& vg : vertex_groups) edges.emplace_back(std::move(vg));
    out.hypergraph = Hypergraph(k.size(), r, std::move(edges));
  }
  return out;
}

/// Rejection sampling from the pairing model. Every simple hypergraph of the
/// class corresponds to exactly prod k_i! pairings, so conditioning on
/// simplicity gives the uniform distribution on H_r(k).
inline Hypergraph sample_uniform(const DegreeSequence& k, int r, Xoshiro256pp& rng,
                                 std::uint64_t max_attempts = Options{}.max_attempts,
                                 std::uint64_t* attempts_out = nullptr) {
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    PairingOutcome p = sample_pairing(k, r, rng);
    if (p.simple) {
      if (attempts_out) *attempts_out = attempt;
      return *p.hypergraph;
    }
  }
  throw AttemptsExhausted("no simple pairing within the attempt limit");
}

struct EstimateReport {
  double estimate = 0;
  double stderr_estimate = 0;
  std::uint64_t samples_accepted = 0;
  std::uint64_t samples_attempted = 0;
  double acceptance_rate = 0;
  std::uint64_t seed = 0;
};

namespace detail {

struct WorkerMoments {
  long double sum = 0;
  long double sum_sq = 0;
  std::uint64_t accepted = 0;
  std::uint64_t attempted = 0;
};

/// Run `samples` accepted draws split across workers. Worker w draws its
/// fixed share from the stream seeded with seed XOR w, and partial moments
/// are combined in worker order, so the report depends only on
/// (seed, thread count).
template <typename PerSample>
EstimateReport run_workers(const DegreeSequence& k, int r, std::uint64_t samples,
                           std::uint64_t seed, const Options& opt, PerSample per_sample) {
  const std::uint64_t workers =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(static_cast<std::uint64_t>(
                                                             std::max(opt.threads, 1)),
                                                         samples == 0 ? 1 : samples));
  std::vector<WorkerMoments> parts(workers);
  std::vector<std::exception_ptr> errors(workers);

  auto run_one = [&](std::uint64_t w) {
    try {
      Xoshiro256pp rng = Xoshiro256pp::for_worker(seed, w);
      const std::uint64_t quota = samples / workers + (w < samples % workers ? 1 : 0);
      auto& part = parts[w];
      for (std::uint64_t i = 0; i < quota; ++i) {
        std::uint64_t attempts = 0;
        Hypergraph h = sample_uniform(k, r, rng, opt.max_attempts, &attempts);
        part.attempted += attempts;
        ++part.accepted;
        const long double value = per_sample(h);
        part.sum += value;
        part.sum_sq += value * value;
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run_one, w);
    for (auto& t : pool) t.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  WorkerMoments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.accepted += p.accepted;
    total.attempted += p.attempted;
  }

  EstimateReport rep;
  rep.seed = seed;
  rep.samples_accepted = total.accepted;
  rep.samples_attempted = total.attempted;
  rep.acceptance_rate =
      total.attempted == 0 ? 0.0
                           : static_cast<double>(static_cast<long double>(total.accepted) /
                                                 static_cast<long double>(total.attempted));
  if (total.accepted > 0) {
    const long double n = total.accepted;
    const long double mean = total.sum / n;
    rep.estimate = static_cast<double>(mean);
    if (total.accepted > 1) {
      long double var = (total.sum_sq - n * mean * mean) / (n - 1);
      if (var < 0) var = 0;  // rounding
      rep.stderr_estimate = static_cast<double>(std::sqrt(var / n));
    }
  }
  return rep;
}

}  // namespace detail

/// Monte Carlo estimate of P(no edge of X), with the binomial standard error
/// sqrt(p (1-p) / samples).
inline EstimateReport estimate_avoid_probability(const DegreeSequence& k, int r,
                                                 const ForbiddenSet& x, std::uint64_t samples,
                                                 std::uint64_t seed, const Options& opt = {}) {
  EstimateReport rep = detail::run_workers(k, r, samples, seed, opt, [&](const Hypergraph& h) {
    for (const Edge& e : x.edges())
      if (h.contains(e)) return 0.0L;
    return 1.0L;
  });
  // binomial error, per the estimator contract
  if (rep.samples_accepted > 0) {
    const double p = rep.estimate;
    rep.stderr_estimate = std::sqrt(p * (1.0 - p) / static_cast<double>(rep.samples_accepted));
  }
  return rep;
}

/// Monte Carlo estimate of E(substructure count), standard error from the
/// sample variance.
inline EstimateReport estimate_expectation(const DegreeSequence& k, int r, oracle::Structure s,
                                           std::uint64_t samples, std::uint64_t seed,
                                           const Options& opt = {}) {
  return detail::run_workers(k, r, samples, seed, opt, [&](const Hypergraph& h) {
    return oracle::count_structures(h, s, opt.structure_budget)
        .convert_to<long double>();
  });
}

}  // namespace hyperenum::sampler
