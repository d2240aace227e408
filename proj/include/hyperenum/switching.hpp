#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hyperenum/core.hpp"
#include "hyperenum/oracle.hpp"

namespace hyperenum::switching {

/// The 6-tuple (z1, z2, y1, y2, f1, f2) driving a switching. f1/f2 are
/// indices into the canonical edge list of the hypergraph the tuple was
/// enumerated on; in a reverse tuple they address g1/g2.
struct SwitchTuple {
  int z1, z2, y1, y2;
  int f1, f2;

  friend bool operator==(const SwitchTuple& a, const SwitchTuple& b) {
    return a.z1 == b.z1 && a.z2 == b.z2 && a.y1 == b.y1 && a.y2 == b.y2 && a.f1 == b.f1 &&
           a.f2 == b.f2;
  }
};

enum class Case { Legal, I, IIa, IIb, III };

struct LegalityVerdict {
  Case verdict;
  std::optional<std::string> witness;  // offending vertex/edge for illegal cases

  bool legal() const { return verdict == Case::Legal; }
};

/// Outcome of applying a switching. The raw multiobject is always available
/// so a failed simplicity check can be inspected; the canonical hypergraph is
/// present only when the result is simple.
struct SwitchResult {
  MultiHypergraph raw;
  bool simple = false;
  std::optional<Hypergraph> hypergraph;
};

namespace detail {

inline int find_edge(const Hypergraph& g, const Edge& e) {
  const auto& es = g.edges();
  const auto it = std::lower_bound(es.begin(), es.end(), e);
  if (it == es.end() || !(*it == e)) return -1;
  return static_cast<int>(it - es.begin());
}

inline bool distinct4(int a, int b, int c, int d) {
  return a != b && a != c && a != d && b != c && b != d && c != d;
}

inline MultiEdge swap_vertex(const Edge& e, int out, int in) {
  std::vector<int> v;
  v.reserve(e.vertices().size());
  bool removed = false;
  for (int w : e.vertices()) {
    if (!removed && w == out) {
      removed = true;
      continue;
    }
    v.push_back(w);
  }
  v.push_back(in);
  return MultiEdge(std::move(v));
}

inline MultiEdge core_plus_two(const Edge& e, int drop1, int drop2, int add1, int add2) {
  std::vector<int> v;
  v.reserve(e.vertices().size());
  bool d1 = false, d2 = false;
  for (int w : e.vertices()) {
    if (!d1 && w == drop1) { d1 = true; continue; }
    if (!d2 && w == drop2) { d2 = true; continue; }
    v.push_back(w);
  }
  v.push_back(add1);
  v.push_back(add2);
  return MultiEdge(std::move(v));
}

inline MultiHypergraph rebuild(const Hypergraph& g, const std::vector<int>& removed_indices,
                               std::vector<MultiEdge> added) {
  MultiHypergraph out;
  out.n = g.n();
  out.r = g.r();
  for (int i = 0; i < g.edge_count(); ++i)
    if (std::find(removed_indices.begin(), removed_indices.end(), i) == removed_indices.end())
      out.edges.emplace_back(g.edge(i));
  for (auto& e : added) out.edges.push_back(std::move(e));
  out.canonicalize();
  return out;
}

inline SwitchResult finish(MultiHypergraph raw) {
  SwitchResult res;
  res.simple = raw.is_simple();
  if (res.simple) res.hypergraph = raw.to_hypergraph();
  res.raw = std::move(raw);
  return res;
}

}  // namespace detail

/// S*(G*, e): all 6-tuples with z1, z2, y1, y2 distinct vertices, e, f1, f2
/// distinct edges of G*, z's in e and y_j in f_j. Everything is ordered:
/// swapping (f1, f2) gives a different tuple.
inline std::vector<SwitchTuple> enumerate_forward_tuples(const Hypergraph& g, const Edge& e) {
  const int ei = detail::find_edge(g, e);
  if (ei < 0) throw EdgeNotPresent("e is not an edge of G");
  std::vector<SwitchTuple> out;
  for (int z1 : e.vertices()) {
    for (int z2 : e.vertices()) {
      if (z2 == z1) continue;
      for (int f1 = 0; f1 < g.edge_count(); ++f1) {
        if (f1 == ei) continue;
        for (int f2 = 0; f2 < g.edge_count(); ++f2) {
          if (f2 == ei || f2 == f1) continue;
          for (int y1 : g.edge(f1).vertices()) {
            if (y1 == z1 || y1 == z2) continue;
            for (int y2 : g.edge(f2).vertices()) {
              if (y2 == z1 || y2 == z2 || y2 == y1) continue;
              out.push_back({z1, z2, y1, y2, f1, f2});
            }
          }
        }
      }
    }
  }
  return out;
}

namespace detail {

inline void require_forward_tuple(const Hypergraph& g, const Edge& e, const SwitchTuple& t) {
  const int ei = find_edge(g, e);
  if (ei < 0) throw NotInStarSet("e is not an edge of G");
  if (t.f1 < 0 || t.f2 < 0 || t.f1 >= g.edge_count() || t.f2 >= g.edge_count())
    throw NotInStarSet("edge index out of range");
  if (t.f1 == ei || t.f2 == ei || t.f1 == t.f2) throw NotInStarSet("e, f1, f2 must be distinct");
  if (!distinct4(t.z1, t.z2, t.y1, t.y2)) throw NotInStarSet("z1, z2, y1, y2 must be distinct");
  if (!e.contains(t.z1) || !e.contains(t.z2)) throw NotInStarSet("z1, z2 must lie in e");
  if (!g.edge(t.f1).contains(t.y1) || !g.edge(t.f2).contains(t.y2))
    throw NotInStarSet("y_j must lie in f_j");
}

}  // namespace detail

/// (G* \ {e, f1, f2}) u {g, g1, g2} with g = (e \ {z1,z2}) u {y1,y2} and
/// g_j = (f_j \ {y_j}) u {z_j}. A non-simple result comes back as the tagged
/// multiobject, never silently canonicalized.
inline SwitchResult apply_forward(const Hypergraph& g, const Edge& e, const SwitchTuple& t) {
  detail::require_forward_tuple(g, e, t);
  const int ei = detail::find_edge(g, e);
  std::vector<MultiEdge> added;
  added.push_back(detail::core_plus_two(e, t.z1, t.z2, t.y1, t.y2));
  added.push_back(detail::swap_vertex(g.edge(t.f1), t.y1, t.z1));
  added.push_back(detail::swap_vertex(g.edge(t.f2), t.y2, t.z2));
  return detail::finish(detail::rebuild(g, {ei, t.f1, t.f2}, std::move(added)));
}

/// Classify a forward switching. Legal means the switched hypergraph is
/// simple and free of e; otherwise the first matching case of the illegality
/// taxonomy, in the fixed order I, IIa, IIb, III.
///
/// The cases are implemented by what actually breaks in the constructed
/// object: (I) a loop appears in g or g_j, (IIa) g duplicates a surviving
/// edge, (IIb) some g_j is a multiple edge (duplicating a surviving edge, or
/// g1 = g2), (III) some g_j recreates e. This is exactly the case split of
/// the taxonomy's proof; loops are equivalent to z_j in f_j or y_j in e.
inline LegalityVerdict classify_forward(const Hypergraph& g, const Edge& e, const SwitchTuple& t) {
  detail::require_forward_tuple(g, e, t);
  const int ei = detail::find_edge(g, e);
  const Edge& f1 = g.edge(t.f1);
  const Edge& f2 = g.edge(t.f2);

  // (I): some z_j or y_j lies in both e and f_j, so a new edge has a loop
  if (f1.contains(t.z1))
    return {Case::I, "z1=" + std::to_string(t.z1) + " lies in e and f1: loop in g1"};
  if (f2.contains(t.z2))
    return {Case::I, "z2=" + std::to_string(t.z2) + " lies in e and f2: loop in g2"};
  if (e.contains(t.y1))
    return {Case::I, "y1=" + std::to_string(t.y1) + " lies in e and f1: loop in g"};
  if (e.contains(t.y2))
    return {Case::I, "y2=" + std::to_string(t.y2) + " lies in e and f2: loop in g"};

  const MultiEdge new_g = detail::core_plus_two(e, t.z1, t.z2, t.y1, t.y2);
  const MultiEdge new_g1 = detail::swap_vertex(f1, t.y1, t.z1);
  const MultiEdge new_g2 = detail::swap_vertex(f2, t.y2, t.z2);

  // (IIa): g has multiplicity greater than one in the result
  for (int i = 0; i < g.edge_count(); ++i) {
    if (i == ei || i == t.f1 || i == t.f2) continue;
    if (MultiEdge(g.edge(i)) == new_g)
      return {Case::IIa, "edge " + g.edge(i).to_string() + " duplicates g"};
  }

  // (IIb): some g_j has multiplicity greater than one
  for (int i = 0; i < g.edge_count(); ++i) {
    if (i == ei || i == t.f1 || i == t.f2) continue;
    const MultiEdge other(g.edge(i));
    if (other == new_g1)
      return {Case::IIb, "edge " + g.edge(i).to_string() + " duplicates g1"};
    if (other == new_g2)
      return {Case::IIb, "edge " + g.edge(i).to_string() + " duplicates g2"};
  }
  if (new_g1 == new_g2) return {Case::IIb, "g1 and g2 coincide"};

  // (III): f_j \ {y_j} = e \ {z_j}, so g_j recreates e
  const MultiEdge e_multi((Edge(e)));
  if (new_g1 == e_multi) return {Case::III, "f1 minus y1 equals e minus z1"};
  if (new_g2 == e_multi) return {Case::III, "f2 minus y2 equals e minus z2"};

  return {Case::Legal, std::nullopt};
}

/// S(G, e): all 6-tuples (z1, z2, y1, y2, g1, g2) with distinct vertices,
/// z's in e, y's outside e, g1 != g2 edges of G with z_j in g_j, and a bridge
/// edge g in G meeting e in exactly e \ {z1, z2} whose two outside vertices
/// are y1, y2. Requiring only membership z_j in g_j (not an exact
/// intersection) is what makes the forward/reverse double counting balance.
inline std::vector<SwitchTuple> enumerate_reverse_tuples(const Hypergraph& g, const Edge& e) {
  if (detail::find_edge(g, e) >= 0) throw EdgePresent("e is an edge of G");
  std::vector<SwitchTuple> out;
  const std::uint64_t em = e.mask();
  for (int z1 : e.vertices()) {
    for (int z2 : e.vertices()) {
      if (z2 == z1) continue;
      const std::uint64_t core =
          em & ~(std::uint64_t(1) << z1) & ~(std::uint64_t(1) << z2);
      for (int gi = 0; gi < g.edge_count(); ++gi) {
        const Edge& bridge = g.edge(gi);
        if ((bridge.mask() & em) != core) continue;
        int outside[2];
        int cnt = 0;
        for (int v : bridge.vertices())
          if (!(em >> v & 1)) outside[cnt++] = v;
        for (int g1 = 0; g1 < g.edge_count(); ++g1) {
          if (!g.edge(g1).contains(z1)) continue;
          for (int g2 = 0; g2 < g.edge_count(); ++g2) {
            if (g2 == g1 || !g.edge(g2).contains(z2)) continue;
            out.push_back({z1, z2, outside[0], outside[1], g1, g2});
            out.push_back({z1, z2, outside[1], outside[0], g1, g2});
          }
        }
      }
    }
  }
  return out;
}

namespace detail {

inline void require_reverse_tuple(const Hypergraph& g, const Edge& e, const SwitchTuple& t) {
  if (find_edge(g, e) >= 0) throw NotInSSet("e is an edge of G");
  if (t.f1 < 0 || t.f2 < 0 || t.f1 >= g.edge_count() || t.f2 >= g.edge_count())
    throw NotInSSet("edge index out of range");
  if (t.f1 == t.f2) throw NotInSSet("g1, g2 must be distinct");
  if (!distinct4(t.z1, t.z2, t.y1, t.y2)) throw NotInSSet("z1, z2, y1, y2 must be distinct");
  if (!e.contains(t.z1) || !e.contains(t.z2)) throw NotInSSet("z1, z2 must lie in e");
  if (e.contains(t.y1) || e.contains(t.y2)) throw NotInSSet("y1, y2 must lie outside e");
  if (!g.edge(t.f1).contains(t.z1) || !g.edge(t.f2).contains(t.z2))
    throw NotInSSet("z_j must lie in g_j");
  // the bridge edge is determined by the tuple; it must exist in G
  std::vector<int> bridge_verts;
  for (int v : e.vertices())
    if (v != t.z1 && v != t.z2) bridge_verts.push_back(v);
  bridge_verts.push_back(t.y1);
  bridge_verts.push_back(t.y2);
  if (find_edge(g, Edge(bridge_verts)) < 0) throw NotInSSet("bridge edge g missing from G");
}

}  // namespace detail

/// (G \ {g, g1, g2}) u {e, f1, f2} with f_j = (g_j \ {z_j}) u {y_j}. The
/// bridge g is recomputed from the tuple. Tagged multiobject on simplicity
/// violation; a legal reverse switching is exactly one whose result is
/// simple (it contains e by construction).
inline SwitchResult apply_reverse(const Hypergraph& g, const Edge& e, const SwitchTuple& t) {
  detail::require_reverse_tuple(g, e, t);
  std::vector<int> bridge_verts;
  for (int v : e.vertices())
    if (v != t.z1 && v != t.z2) bridge_verts.push_back(v);
  bridge_verts.push_back(t.y1);
  bridge_verts.push_back(t.y2);
  const int bridge = detail::find_edge(g, Edge(bridge_verts));
  std::vector<MultiEdge> added;
  added.push_back(MultiEdge(e));
  added.push_back(detail::swap_vertex(g.edge(t.f1), t.z1, t.y1));
  added.push_back(detail::swap_vertex(g.edge(t.f2), t.z2, t.y2));
  return detail::finish(detail::rebuild(g, {bridge, t.f1, t.f2}, std::move(added)));
}

/// Full audit of the counting facts behind the switching argument on one
/// candidate edge, by exhaustive enumeration of F_i and F_i^c.
struct AuditReport {
  int n = 0;
  int r = 0;
  Edge edge;
  BigInt m;
  int kmax = 0;
  std::uint64_t f_count = 0;
  std::uint64_t fc_count = 0;
  std::optional<BigRat> xi;       // |F_i| / |F_i^c|, absent when F_i^c is empty
  long double xi_bound_shape = 0;  // 2 kmax^3 / M^2
  BigInt forward_tuple_bound;      // r (r-1) M^2
  std::uint64_t reverse_tuple_bound = 0;  // 2 r (r-1) kmax^3
  std::vector<std::uint64_t> forward_tuples;  // |S*| per member of F_i
  std::vector<std::uint64_t> forward_legal;
  std::vector<std::uint64_t> reverse_tuples;  // |S| per member of F_i^c
  std::vector<std::uint64_t> reverse_legal;
  std::uint64_t forward_legal_total = 0;
  std::uint64_t reverse_legal_total = 0;
  long long identity_residual = 0;  // forward total minus reverse total
  bool forward_bound_ok = true;
  bool reverse_bound_ok = true;
  bool identity_ok = true;
};

inline AuditReport audit_bounds(const DegreeSequence& k, int r, const Edge& e,
                                const oracle::Options& opt = {}) {
  AuditReport rep;
  rep.n = k.size();
  rep.r = r;
  rep.edge = e;
  rep.m = k.m();
  rep.kmax = k.kmax();
  rep.forward_tuple_bound = BigInt(r) * (r - 1) * k.m() * k.m();
  rep.reverse_tuple_bound =
      2ull * static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(r - 1) *
      static_cast<std::uint64_t>(k.kmax()) * k.kmax() * k.kmax();
  if (k.m() > 0) {
    const long double mm = k.m().convert_to<long double>();
    rep.xi_bound_shape = 2.0L * k.kmax() * k.kmax() * k.kmax() / (mm * mm);
  }

  // split the class by side first; per-member work then parallelizes with a
  // plain ordered reduction
  std::vector<Hypergraph> in_f, in_fc;
  oracle::Visitor collect = [&](const Hypergraph& h) {
    (h.contains(e) ? in_f : in_fc).push_back(h);
  };
  oracle::Options single = opt;
  single.threads = 1;
  oracle::enumerate_avoiding(k, r, ForbiddenSet::none(k.size(), r), collect, single);

  rep.f_count = in_f.size();
  rep.fc_count = in_fc.size();
  rep.forward_tuples.resize(in_f.size());
  rep.forward_legal.resize(in_f.size());
  rep.reverse_tuples.resize(in_fc.size());
  rep.reverse_legal.resize(in_fc.size());

  auto forward_one = [&](std::size_t i) {
    const auto tuples = enumerate_forward_tuples(in_f[i], e);
    std::uint64_t legal = 0;
    for (const auto& t : tuples)
      if (classify_forward(in_f[i], e, t).legal()) ++legal;
    rep.forward_tuples[i] = tuples.size();
    rep.forward_legal[i] = legal;
  };
  auto reverse_one = [&](std::size_t i) {
    const auto tuples = enumerate_reverse_tuples(in_fc[i], e);
    std::uint64_t legal = 0;
    for (const auto& t : tuples)
      if (apply_reverse(in_fc[i], e, t).simple) ++legal;
    rep.reverse_tuples[i] = tuples.size();
    rep.reverse_legal[i] = legal;
  };

  const std::size_t total_work = in_f.size() + in_fc.size();
  const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(total_work)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < in_f.size(); ++i) forward_one(i);
    for (std::size_t i = 0; i < in_fc.size(); ++i) reverse_one(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= total_work) return;
        if (i < in_f.size())
          forward_one(i);
        else
          reverse_one(i - in_f.size());
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < in_f.size(); ++i) {
    rep.forward_legal_total += rep.forward_legal[i];
    if (BigInt(rep.forward_tuples[i]) > rep.forward_tuple_bound) rep.forward_bound_ok = false;
  }
  for (std::size_t i = 0; i < in_fc.size(); ++i) {
    rep.reverse_legal_total += rep.reverse_legal[i];
    if (rep.reverse_tuples[i] > rep.reverse_tuple_bound) rep.reverse_bound_ok = false;
  }

  if (rep.fc_count > 0) rep.xi = BigRat(rep.f_count, rep.fc_count);
  rep.identity_residual = static_cast<long long>(rep.forward_legal_total) -
                          static_cast<long long>(rep.reverse_legal_total);
  rep.identity_ok = rep.identity_residual == 0;
  return rep;
}

}  // namespace hyperenum::switching
