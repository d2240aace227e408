#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hyperenum/core.hpp"

namespace hyperenum::oracle {

struct Options {
  std::uint64_t node_budget = 1'000'000'000;
  int threads = 1;
  bool memoize = true;  // ignored when a visitor is attached
};

struct EnumerationResult {
  BigInt count = 0;
  std::uint64_t nodes_explored = 0;
  std::chrono::duration<double> elapsed{0};
  std::optional<std::string> infeasible_reason;
};

enum class Structure { PerfectMatching, LooseHamilton };

using Visitor = std::function<void(const Hypergraph&)>;

namespace detail {

constexpr int kMaxVertices = 62;  // edges live in a 64-bit mask

inline void check_dims(const DegreeSequence& k, int r, const ForbiddenSet& x) {
  if (x.hypergraph().n() != k.size() || x.hypergraph().r() != r)
    throw Error("forbidden set dimensions do not match degree sequence");
}

/// Canonical backtracking over simple r-uniform hypergraphs with given
/// degrees: the active vertex is always the lowest-index vertex of positive
/// residual degree, every new edge must contain it, and the edges grouped
/// under one active vertex are generated in strictly increasing lexicographic
/// order. Each hypergraph in the class is reached exactly once, with its edge
/// list already in canonical order.
///
/// When counting without a visitor, subtrees are collapsed through a memo
/// table keyed on (active vertex, residual degrees): two prefixes with the
/// same key have identical completion counts because later edges can only use
/// vertices at or above the active one.
class Enumerator {
 public:
  Enumerator(const DegreeSequence& k, int r, const ForbiddenSet& x, const Options& opt,
             const Visitor* visitor)
      : n_(k.size()), r_(r), opt_(opt), visitor_(visitor) {
    res_.assign(k.degrees().begin(), k.degrees().end());
    for (const Edge& e : x.edges()) forbidden_.insert(e.mask());
  }

  EnumerationResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    EnumerationResult out;
    if (n_ > kMaxVertices) throw InstanceTooLarge("instance exceeds 62 vertices");
    if (opt_.threads > 1)
      out.count = run_parallel();
    else
      out.count = count_from(0);
    out.nodes_explored = nodes_;
    out.elapsed = std::chrono::steady_clock::now() - t0;
    return out;
  }

 private:
  using Key = std::string;

  BigInt count_from(int v) {
    while (v < n_ && res_[static_cast<std::size_t>(v)] == 0) ++v;
    if (v == n_) {
      if (visitor_) (*visitor_)(Hypergraph(n_, r_, chosen_));
      return 1;
    }
    bump_nodes();
    if (!feasible(v)) return 0;

    const bool memo_on = visitor_ == nullptr && opt_.memoize;
    Key key;
    if (memo_on) {
      key = make_key(v);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }

    const int d = res_[static_cast<std::size_t>(v)];
    res_[static_cast<std::size_t>(v)] = 0;
    BigInt total = 0;
    std::vector<int> none;
    place_batch(v, d, none, total);
    res_[static_cast<std::size_t>(v)] = d;

    if (memo_on) memo_.emplace(std::move(key), total);
    return total;
  }

  /// Choose `left` more edges through the active vertex v, each an
  /// (r-1)-subset of later positive-residual vertices, strictly above the
  /// previous subset in lex order.
  void place_batch(int v, int left, const std::vector<int>& prev, BigInt& total) {
    if (left == 0) {
      total += count_from(v + 1);
      return;
    }
    bump_nodes();
    std::vector<int> cur;
    cur.reserve(static_cast<std::size_t>(r_ - 1));
    extend_subset(v, left, prev, !prev.empty(), v + 1, cur, total);
  }

  void extend_subset(int v, int left, const std::vector<int>& prev, bool tight, int from,
                     std::vector<int>& cur, BigInt& total) {
    const int need = r_ - 1 - static_cast<int>(cur.size());
    if (need == 0) {
      if (tight && cur <= prev) return;
      if (!forbidden_.empty()) {
        std::uint64_t mask = std::uint64_t(1) << v;
        for (int w : cur) mask |= std::uint64_t(1) << w;
        if (forbidden_.count(mask)) return;
      }
      for (int w : cur) --res_[static_cast<std::size_t>(w)];
      if (visitor_) {
        std::vector<int> verts = cur;
        verts.insert(verts.begin(), v);
        chosen_.emplace_back(verts);
      }
      place_batch(v, left - 1, cur, total);
      if (visitor_) chosen_.pop_back();
      for (int w : cur) ++res_[static_cast<std::size_t>(w)];
      return;
    }
    for (int w = from; w <= n_ - need; ++w) {
      if (res_[static_cast<std::size_t>(w)] <= 0) continue;
      // keep prefixes that can still reach a subset >= prev
      bool next_tight = false;
      if (tight) {
        const int p = prev[cur.size()];
        if (w < p) continue;
        next_tight = (w == p);
      }
      cur.push_back(w);
      extend_subset(v, left, prev, next_tight, w + 1, cur, total);
      cur.pop_back();
    }
  }

  bool feasible(int v) const {
    // every edge through a vertex consumes r-1 stubs elsewhere
    long long rem = 0;
    int positive = 0;
    int big = 0;
    for (int w = v; w < n_; ++w) {
      const int d = res_[static_cast<std::size_t>(w)];
      rem += d;
      if (d > 0) ++positive;
      big = std::max(big, d);
    }
    if (positive < r_) return false;
    if (static_cast<long long>(big) * (r_ - 1) > rem - big) return false;
    return true;
  }

  Key make_key(int v) const {
    Key key;
    key.reserve(static_cast<std::size_t>(n_ - v + 1));
    key.push_back(static_cast<char>(v));
    for (int w = v; w < n_; ++w) key.push_back(static_cast<char>(res_[static_cast<std::size_t>(w)]));
    return key;
  }

  void bump_nodes() {
    if (++nodes_ > opt_.node_budget) throw InstanceTooLarge("search node budget exceeded");
  }

  /// Split the root batch across workers; each child subtree runs in a fresh
  /// enumerator so counts and per-subtree node totals do not depend on the
  /// worker count.
  BigInt run_parallel();

  friend struct ParallelHelper;

  int n_;
  int r_;
  Options opt_;
  const Visitor* visitor_;
  std::vector<int> res_;
  std::vector<Edge> chosen_;
  std::unordered_set<std::uint64_t> forbidden_;
  std::unordered_map<Key, BigInt> memo_;
  std::uint64_t nodes_ = 0;
};

struct ParallelHelper {
  /// Enumerate the root-level batch completions: each yields the residual
  /// vector after the first active vertex is saturated, plus the edges used.
  static void collect_children(Enumerator& e, int v,
                               std::vector<std::pair<std::vector<int>, std::vector<Edge>>>& out) {
    while (v < e.n_ && e.res_[static_cast<std::size_t>(v)] == 0) ++v;
    if (v == e.n_) return;
    const int d = e.res_[static_cast<std::size_t>(v)];
    e.res_[static_cast<std::size_t>(v)] = 0;
    std::vector<int> none;
    std::vector<Edge> batch;
    gather(e, v, d, none, batch, out);
    e.res_[static_cast<std::size_t>(v)] = d;
  }

  static void gather(Enumerator& e, int v, int left, const std::vector<int>& prev,
                     std::vector<Edge>& batch,
                     std::vector<std::pair<std::vector<int>, std::vector<Edge>>>& out) {
    if (left == 0) {
      out.emplace_back(e.res_, batch);
      return;
    }
    std::vector<int> cur;
    gather_subset(e, v, left, prev, !prev.empty(), v + 1, cur, batch, out);
  }

  static void gather_subset(Enumerator& e, int v, int left, const std::vector<int>& prev,
                            bool tight, int from, std::vector<int>& cur, std::vector<Edge>& batch,
                            std::vector<std::pair<std::vector<int>, std::vector<Edge>>>& out) {
    const int need = e.r_ - 1 - static_cast<int>(cur.size());
    if (need == 0) {
      if (tight && cur <= prev) return;
      std::vector<int> verts = cur;
      verts.insert(verts.begin(), v);
      Edge edge(verts);
      if (!e.forbidden_.empty() && e.forbidden_.count(edge.mask())) return;
      for (int w : cur) --e.res_[static_cast<std::size_t>(w)];
      batch.push_back(edge);
      gather(e, v, left - 1, cur, batch, out);
      batch.pop_back();
      for (int w : cur) ++e.res_[static_cast<std::size_t>(w)];
      return;
    }
    for (int w = from; w <= e.n_ - need; ++w) {
      if (e.res_[static_cast<std::size_t>(w)] <= 0) continue;
      bool next_tight = false;
      if (tight) {
        const int p = prev[cur.size()];
        if (w < p) continue;
        next_tight = (w == p);
      }
      cur.push_back(w);
      gather_subset(e, v, left, prev, next_tight, w + 1, cur, batch, out);
      cur.pop_back();
    }
  }
};

inline BigInt Enumerator::run_parallel() {
  int v0 = 0;
  while (v0 < n_ && res_[static_cast<std::size_t>(v0)] == 0) ++v0;
  if (v0 == n_) {
    if (visitor_) (*visitor_)(Hypergraph(n_, r_, {}));
    return 1;
  }
  bump_nodes();
  if (!feasible(v0)) return 0;

  std::vector<std::pair<std::vector<int>, std::vector<Edge>>> children;
  ParallelHelper::collect_children(*this, v0, children);

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(opt_.threads, 1)), children.size());
  std::vector<BigInt> counts(children.size());
  std::vector<std::uint64_t> nodes(children.size(), 0);
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> overflow{false};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= children.size()) return;
      Options child_opt = opt_;
      child_opt.threads = 1;
      DegreeSequence child_k(children[i].first);
      Enumerator sub(child_k, r_, ForbiddenSet::none(n_, r_), child_opt, nullptr);
      sub.forbidden_ = forbidden_;
      if (visitor_) {
        sub.visitor_ = visitor_;
        sub.chosen_ = children[i].second;
      }
      try {
        counts[i] = sub.count_from(v0 + 1);
        nodes[i] = sub.nodes_;
      } catch (const InstanceTooLarge&) {
        overflow.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  if (overflow.load()) throw InstanceTooLarge("search node budget exceeded");
  BigInt total = 0;
  for (std::size_t i = 0; i < children.size(); ++i) {
    total += counts[i];
    nodes_ += nodes[i];
    if (nodes_ > opt_.node_budget) throw InstanceTooLarge("search node budget exceeded");
  }
  return total;
}

}  // namespace detail

/// Exact |H_r(k, X)|. Infeasible inputs (r does not divide M, or r > n with
/// edges required) return count 0 with a structured reason rather than an
/// error, so comparison reports never crash.
inline EnumerationResult count_avoiding(const DegreeSequence& k, int r, const ForbiddenSet& x,
                                        const Options& opt = {}) {
  detail::check_dims(k, r, x);
  EnumerationResult out;
  if (r < 1) {
    out.infeasible_reason = "r must be at least 1";
    return out;
  }
  if (k.m() % r != 0) {
    out.infeasible_reason = "M(k) not divisible by r";
    return out;
  }
  if (k.m() > 0 && r > k.size()) {
    out.infeasible_reason = "r exceeds n";
    return out;
  }
  detail::Enumerator e(k, r, x, opt, nullptr);
  return e.run();
}

inline EnumerationResult count_class(const DegreeSequence& k, int r, const Options& opt = {}) {
  return count_avoiding(k, r, ForbiddenSet::none(k.size(), r), opt);
}

/// Stream every member of H_r(k, X) through the visitor, in canonical order
/// when single-threaded. With threads > 1 the visitor must be safe to call
/// concurrently.
inline EnumerationResult enumerate_avoiding(const DegreeSequence& k, int r, const ForbiddenSet& x,
                                            const Visitor& visit, const Options& opt = {}) {
  detail::check_dims(k, r, x);
  EnumerationResult out;
  if (r < 1 || k.m() % r != 0 || (k.m() > 0 && r > k.size())) {
    out.infeasible_reason = "infeasible degree sequence";
    return out;
  }
  detail::Enumerator e(k, r, x, opt, &visit);
  return e.run();
}

/// |{H in H_r(k) : X subset of H}| through the identity with H_r(k - x, X).
inline EnumerationResult count_containing(const DegreeSequence& k, int r, const ForbiddenSet& x,
                                          const Options& opt = {}) {
  detail::check_dims(k, r, x);
  const auto reduced = subtract(k, x.degrees());
  if (!reduced) {
    EnumerationResult out;
    out.infeasible_reason = "x_i > k_i for some vertex";
    return out;
  }
  return count_avoiding(*reduced, r, x, opt);
}

/// Same quantity, computed the slow way: enumerate H_r(k) and keep the
/// members containing every edge of X. Kept deliberately independent of the
/// identity route so the two can be asserted equal.
inline EnumerationResult count_containing_direct(const DegreeSequence& k, int r,
                                                 const ForbiddenSet& x, const Options& opt = {}) {
  detail::check_dims(k, r, x);
  EnumerationResult out;
  if (r < 1 || k.m() % r != 0) {
    out.infeasible_reason = "M(k) not divisible by r";
    return out;
  }
  std::atomic<std::uint64_t> hits{0};
  Visitor visit = [&](const Hypergraph& h) {
    if (h.contains_all(x.edges())) hits.fetch_add(1, std::memory_order_relaxed);
  };
  out = enumerate_avoiding(k, r, ForbiddenSet::none(k.size(), r), visit, opt);
  out.count = hits.load();
  return out;
}

/// xi = |F_i| / |F_i^c| for one candidate edge e.
inline BigRat xi_exact(const DegreeSequence& k, int r, const Edge& e, const Options& opt = {}) {
  ForbiddenSet single(Hypergraph(k.size(), r, {e}));
  const BigInt containing = count_containing(k, r, single, opt).count;
  const BigInt avoiding = count_avoiding(k, r, single, opt).count;
  if (avoiding == 0)
    throw DegenerateDenominator("every hypergraph in the class contains " + e.to_string());
  return BigRat(containing, avoiding);
}

/// Exact P(F^c) = |H_r(k, X)| / |H_r(k)|.
inline BigRat prob_avoid_exact(const DegreeSequence& k, int r, const ForbiddenSet& x,
                               const Options& opt = {}) {
  const BigInt total = count_class(k, r, opt).count;
  if (total == 0) throw EmptyClass("H_r(k) is empty");
  return BigRat(count_avoiding(k, r, x, opt).count, total);
}

namespace detail {

/// DFS over perfect matchings of H: always extend at the lowest uncovered
/// vertex.
template <typename Visit>
void pm_search(const Hypergraph& h, const std::vector<std::vector<int>>& by_vertex,
               std::uint64_t covered, std::vector<int>& picked, BigInt& count, Visit& visit,
               std::uint64_t& nodes, std::uint64_t budget) {
  const int n = h.n();
  int v = 0;
  while (v < n && (covered >> v & 1)) ++v;
  if (v == n) {
    ++count;
    visit(picked);
    return;
  }
  if (++nodes > budget) throw InstanceTooLarge("search node budget exceeded");
  for (int idx : by_vertex[static_cast<std::size_t>(v)]) {
    const std::uint64_t m = h.edge(idx).mask();
    if (m & covered) continue;
    picked.push_back(idx);
    pm_search(h, by_vertex, covered | m, picked, count, visit, nodes, budget);
    picked.pop_back();
  }
}

template <typename Visit>
BigInt count_pm_impl(const Hypergraph& h, Visit& visit, std::uint64_t budget) {
  if (h.n() > kMaxVertices) throw InstanceTooLarge("instance exceeds 62 vertices");
  if (h.n() == 0) {
    std::vector<int> empty;
    visit(empty);
    return 1;
  }
  if (h.n() % h.r() != 0) return 0;
  std::vector<std::vector<int>> by_vertex(static_cast<std::size_t>(h.n()));
  for (int i = 0; i < h.edge_count(); ++i)
    by_vertex[static_cast<std::size_t>(h.edge(i).vertices().front())].push_back(i);
  BigInt count = 0;
  std::vector<int> picked;
  std::uint64_t nodes = 0;
  pm_search(h, by_vertex, 0, picked, count, visit, nodes, budget);
  return count;
}

/// Loose-Hamilton-cycle DFS. A cycle is stored as an edge-index sequence
/// e_0 < everything else, consecutive edges meeting in exactly one vertex,
/// non-consecutive edges disjoint, all n vertices covered. The direction is
/// fixed by requiring the second edge's index below the last edge's, so each
/// qualifying edge set is counted exactly once.
template <typename Visit>
class LhcSearch {
 public:
  LhcSearch(const Hypergraph& h, Visit& visit, std::uint64_t budget)
      : h_(h), visit_(visit), budget_(budget), t_(h.n() / (h.r() - 1)) {}

  BigInt run() {
    BigInt total = 0;
    for (int first = 0; first < h_.edge_count(); ++first) {
      seq_.assign(1, first);
      const std::uint64_t m = h_.edge(first).mask();
      extend(m, m, total);
    }
    return total;
  }

 private:
  void extend(std::uint64_t used, std::uint64_t open_last, BigInt& total) {
    if (++nodes_ > budget_) throw InstanceTooLarge("search node budget exceeded");
    const int depth = static_cast<int>(seq_.size());
    const std::uint64_t first_mask = h_.edge(seq_.front()).mask();
    const bool closing = depth == t_ - 1;
    for (int idx = seq_.front() + 1; idx < h_.edge_count(); ++idx) {
      if (std::find(seq_.begin(), seq_.end(), idx) != seq_.end()) continue;
      const std::uint64_t m = h_.edge(idx).mask();
      const std::uint64_t inter = m & used;
      if (!closing) {
        // touch the previous edge in exactly one open vertex, nothing else
        if (__builtin_popcountll(inter) != 1 || !(inter & open_last)) continue;
        seq_.push_back(idx);
        extend(used | m, m & ~inter, total);
        seq_.pop_back();
      } else {
        if (idx <= seq_[1]) continue;  // canonical direction
        const std::uint64_t with_last = m & open_last;
        const std::uint64_t open_first = first_mask & ~(h_.edge(seq_[1]).mask());
        const std::uint64_t with_first = m & open_first & first_mask;
        if (__builtin_popcountll(inter) != 2) continue;
        if (__builtin_popcountll(with_last) != 1 || __builtin_popcountll(with_first) != 1)
          continue;
        if ((with_last | with_first) != inter) continue;
        if ((used | m) + 1 != (std::uint64_t(1) << h_.n())) continue;  // cover everything
        seq_.push_back(idx);
        total += 1;
        visit_(seq_);
        seq_.pop_back();
      }
    }
  }

  const Hypergraph& h_;
  Visit& visit_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  int t_;
  std::vector<int> seq_;
};

template <typename Visit>
BigInt count_lhc_impl(const Hypergraph& h, Visit& visit, std::uint64_t budget) {
  if (h.n() > kMaxVertices) throw InstanceTooLarge("instance exceeds 62 vertices");
  if (h.r() < 3) throw DegenerateCycle("loose cycles need r >= 3");
  if (h.n() % (h.r() - 1) != 0) return 0;
  const int t = h.n() / (h.r() - 1);
  if (t < 3) throw DegenerateCycle("loose Hamilton cycle needs n/(r-1) >= 3");
  if (h.edge_count() < t) return 0;
  LhcSearch<Visit> search(h, visit, budget);
  return search.run();
}

inline constexpr auto kNoVisit = [](const std::vector<int>&) {};

}  // namespace detail

inline BigInt count_perfect_matchings(const Hypergraph& h,
                                      std::uint64_t budget = Options{}.node_budget) {
  auto& sink = detail::kNoVisit;
  return detail::count_pm_impl(h, sink, budget);
}

/// Visit every perfect matching as a vector of edge indices into h.
template <typename Visit>
BigInt for_each_perfect_matching(const Hypergraph& h, Visit&& visit,
                                 std::uint64_t budget = Options{}.node_budget) {
  return detail::count_pm_impl(h, visit, budget);
}

inline BigInt count_loose_hamilton(const Hypergraph& h,
                                   std::uint64_t budget = Options{}.node_budget) {
  auto& sink = detail::kNoVisit;
  return detail::count_lhc_impl(h, sink, budget);
}

template <typename Visit>
BigInt for_each_loose_hamilton(const Hypergraph& h, Visit&& visit,
                               std::uint64_t budget = Options{}.node_budget) {
  return detail::count_lhc_impl(h, visit, budget);
}

/// n! / ((n/r)! r!^{n/r}), the perfect matchings of the complete r-uniform
/// hypergraph.
inline BigInt pm_complete(int n, int r) {
  if (r < 1 || n % r != 0) throw NonDivisible("r must divide n");
  const BigInt num = factorial(static_cast<std::uint64_t>(n));
  const BigInt den = factorial(static_cast<std::uint64_t>(n / r)) *
                     ipow(factorial(static_cast<std::uint64_t>(r)), static_cast<std::uint64_t>(n / r));
  return num / den;
}

/// (r-1) n! / (2n (r-2)!^t) with t = n/(r-1), the loose Hamilton cycles of
/// the complete r-uniform hypergraph.
inline BigInt hc_complete(int n, int r) {
  if (r < 3) throw DegenerateCycle("loose cycles need r >= 3");
  if (n % (r - 1) != 0) throw NonDivisible("r-1 must divide n");
  const int t = n / (r - 1);
  if (t < 3) throw DegenerateCycle("loose Hamilton cycle needs n/(r-1) >= 3");
  const BigInt num = BigInt(r - 1) * factorial(static_cast<std::uint64_t>(n));
  const BigInt den = BigInt(2) * n *
                     ipow(factorial(static_cast<std::uint64_t>(r - 2)), static_cast<std::uint64_t>(t));
  return num / den;
}

inline BigInt count_structures(const Hypergraph& h, Structure s,
                               std::uint64_t budget = Options{}.node_budget) {
  return s == Structure::PerfectMatching ? count_perfect_matchings(h, budget)
                                         : count_loose_hamilton(h, budget);
}

/// Exact E(Z) or E(Y): average the substructure count over the whole class.
inline BigRat expectation_exact(const DegreeSequence& k, int r, Structure s,
                                const Options& opt = {}) {
  BigInt total = 0;
  BigInt members = 0;
  Visitor visit = [&](const Hypergraph& h) {
    total += count_structures(h, s, opt.node_budget);
    ++members;
  };
  Options single = opt;
  single.threads = 1;  // ordered accumulation
  enumerate_avoiding(k, r, ForbiddenSet::none(k.size(), r), visit, single);
  if (members == 0) throw EmptyClass("H_r(k) is empty");
  return BigRat(total, members);
}

/// Same expectation through the other evaluation order:
/// sum over candidate structures X of P(X subset of H).
inline BigRat expectation_via_containment(const DegreeSequence& k, int r, Structure s,
                                          const Options& opt = {}) {
  const int n = k.size();
  const BigInt members = count_class(k, r, opt).count;
  if (members == 0) throw EmptyClass("H_r(k) is empty");
  const Hypergraph complete = Hypergraph::complete(n, r);
  BigInt weighted = 0;
  auto visit = [&](const std::vector<int>& idxs) {
    std::vector<Edge> edges;
    edges.reserve(idxs.size());
    for (int i : idxs) edges.push_back(complete.edge(i));
    ForbiddenSet x(Hypergraph(n, r, std::move(edges)));
    weighted += count_containing(k, r, x, opt).count;
  };
  if (s == Structure::PerfectMatching)
    for_each_perfect_matching(complete, visit, opt.node_budget);
  else
    for_each_loose_hamilton(complete, visit, opt.node_budget);
  return BigRat(weighted, members);
}

}  // namespace hyperenum::oracle
