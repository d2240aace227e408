#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperenum/bigint.hpp"

namespace hyperenum {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDegree : Error { using Error::Error; };
struct InvalidEdge : Error { using Error::Error; };
struct NonDivisible : Error { using Error::Error; };
struct InfeasibleContainment : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };
struct DegenerateCycle : Error { using Error::Error; };
struct EmptyClass : Error { using Error::Error; };
struct InstanceTooLarge : Error { using Error::Error; };
struct EdgeNotPresent : Error { using Error::Error; };
struct EdgePresent : Error { using Error::Error; };
struct NotInStarSet : Error { using Error::Error; };
struct NotInSSet : Error { using Error::Error; };
struct AttemptsExhausted : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

/// Immutable degree vector with cached M = sum k_i, M2 = sum k_i (k_i - 1)
/// and k_max. Vertices are 0-indexed throughout.
class DegreeSequence {
 public:
  DegreeSequence() = default;

  explicit DegreeSequence(std::vector<int> degrees) : degrees_(std::move(degrees)) {
    for (int d : degrees_) {
      if (d < 0) throw InvalidDegree("negative degree in sequence");
      m_ += d;
      m2_ += BigInt(d) * (d - 1);
      kmax_ = std::max(kmax_, d);
    }
  }

  int size() const { return static_cast<int>(degrees_.size()); }
  const std::vector<int>& degrees() const { return degrees_; }
  int operator[](int v) const { return degrees_[static_cast<std::size_t>(v)]; }
  const BigInt& m() const { return m_; }
  const BigInt& m2() const { return m2_; }
  int kmax() const { return kmax_; }

  bool is_regular() const {
    return degrees_.empty() ||
           std::all_of(degrees_.begin(), degrees_.end(), [&](int d) { return d == degrees_[0]; });
  }

  friend bool operator==(const DegreeSequence& a, const DegreeSequence& b) {
    return a.degrees_ == b.degrees_;
  }

 private:
  std::vector<int> degrees_;
  BigInt m_ = 0;
  BigInt m2_ = 0;
  int kmax_ = 0;
};

/// Componentwise k - x; empty when some entry would go negative.
inline std::optional<DegreeSequence> subtract(const DegreeSequence& k, const DegreeSequence& x) {
  if (k.size() != x.size()) return std::nullopt;
  std::vector<int> out(static_cast<std::size_t>(k.size()));
  for (int i = 0; i < k.size(); ++i) {
    if (x[i] > k[i]) return std::nullopt;
    out[static_cast<std::size_t>(i)] = k[i] - x[i];
  }
  return DegreeSequence(out);
}

struct DegreeStats {
  BigInt m;
  BigInt m2;
  int kmax;
};

inline DegreeStats degree_stats(const std::vector<int>& degrees) {
  DegreeSequence k(degrees);
  return {k.m(), k.m2(), k.kmax()};
}

/// A simple edge: strictly increasing vertex indices. Two edges are equal iff
/// their vertex vectors are equal.
class Edge {
 public:
  Edge() = default;

  explicit Edge(std::vector<int> vertices) : verts_(std::move(vertices)) {
    std::sort(verts_.begin(), verts_.end());
    for (std::size_t i = 0; i + 1 < verts_.size(); ++i)
      if (verts_[i] == verts_[i + 1]) throw InvalidEdge("repeated vertex in edge");
    if (!verts_.empty() && verts_.front() < 0) throw InvalidEdge("negative vertex index");
  }

  Edge(std::initializer_list<int> vertices) : Edge(std::vector<int>(vertices)) {}

  int size() const { return static_cast<int>(verts_.size()); }
  const std::vector<int>& vertices() const { return verts_; }
  bool contains(int v) const { return std::binary_search(verts_.begin(), verts_.end(), v); }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int v : verts_) m |= std::uint64_t(1) << v;
    return m;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(verts_[i]);
    }
    return s + "}";
  }

  friend bool operator==(const Edge& a, const Edge& b) { return a.verts_ == b.verts_; }
  friend bool operator!=(const Edge& a, const Edge& b) { return !(a == b); }
  friend bool operator<(const Edge& a, const Edge& b) { return a.verts_ < b.verts_; }

 private:
  std::vector<int> verts_;
};

/// Simple r-uniform hypergraph in canonical form: the edge vector is sorted
/// lexicographically and duplicate-free, every edge has exactly r distinct
/// vertices in [0, n).
class Hypergraph {
 public:
  Hypergraph() = default;

  Hypergraph(int n, int r, std::vector<Edge> edges)
      : n_(n), r_(r), edges_(std::move(edges)) {
    if (n < 0 || r < 1) throw InvalidEdge("bad hypergraph dimensions");
    for (const Edge& e : edges_) {
      if (e.size() != r) throw InvalidEdge("edge arity differs from r");
      if (!e.vertices().empty() && e.vertices().back() >= n)
        throw InvalidEdge("vertex index out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
      if (edges_[i] == edges_[i + 1]) throw InvalidEdge("repeated edge in simple hypergraph");
  }

  static Hypergraph complete(int n, int r) {
    std::vector<Edge> edges;
    std::vector<int> cur;
    build_complete(n, r, 0, cur, edges);
    return Hypergraph(n, r, std::move(edges));
  }

  int n() const { return n_; }
  int r() const { return r_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }

  bool contains(const Edge& e) const {
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  bool contains_all(const std::vector<Edge>& es) const {
    return std::all_of(es.begin(), es.end(), [&](const Edge& e) { return contains(e); });
  }

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    return a.n_ == b.n_ && a.r_ == b.r_ && a.edges_ == b.edges_;
  }
  friend bool operator<(const Hypergraph& a, const Hypergraph& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    if (a.r_ != b.r_) return a.r_ < b.r_;
    return a.edges_ < b.edges_;
  }

 private:
  static void build_complete(int n, int r, int start, std::vector<int>& cur,
                             std::vector<Edge>& out) {
    if (static_cast<int>(cur.size()) == r) {
      out.emplace_back(cur);
      return;
    }
    for (int v = start; v < n; ++v) {
      cur.push_back(v);
      build_complete(n, r, v + 1, cur, out);
      cur.pop_back();
    }
  }

  int n_ = 0;
  int r_ = 1;
  std::vector<Edge> edges_;
};

inline DegreeSequence degree_sequence_of(const Hypergraph& h) {
  std::vector<int> deg(static_cast<std::size_t>(h.n()), 0);
  for (const Edge& e : h.edges())
    for (int v : e.vertices()) ++deg[static_cast<std::size_t>(v)];
  return DegreeSequence(deg);
}

/// Fixed simple r-uniform hypergraph X whose t edges are to be avoided (or all
/// contained), together with its degree sequence x.
class ForbiddenSet {
 public:
  ForbiddenSet() = default;

  explicit ForbiddenSet(Hypergraph x)
      : x_(std::move(x)), degrees_(degree_sequence_of(x_)) {}

  static ForbiddenSet none(int n, int r) { return ForbiddenSet(Hypergraph(n, r, {})); }

  const Hypergraph& hypergraph() const { return x_; }
  int t() const { return x_.edge_count(); }
  const DegreeSequence& degrees() const { return degrees_; }
  const std::vector<Edge>& edges() const { return x_.edges(); }
  bool empty() const { return t() == 0; }

 private:
  Hypergraph x_;
  DegreeSequence degrees_;
};

/// Degree sequence + uniformity + forbidden set, with the two feasibility
/// facts every consumer asks about cached up front.
class Instance {
 public:
  Instance(DegreeSequence k, int r, ForbiddenSet x)
      : k_(std::move(k)), r_(r), x_(std::move(x)) {
    if (x_.hypergraph().n() != k_.size() || x_.hypergraph().r() != r_)
      throw Error("forbidden set dimensions do not match instance");
    divisible_ = r_ > 0 && k_.m() % r_ == 0;
    containment_feasible_ = subtract(k_, x_.degrees()).has_value();
  }

  Instance(DegreeSequence k, int r) : Instance(std::move(k), r, ForbiddenSet::none(k.size(), r)) {}

  const DegreeSequence& k() const { return k_; }
  int r() const { return r_; }
  const ForbiddenSet& forbidden() const { return x_; }
  bool degree_sum_divisible() const { return divisible_; }
  bool containment_feasible() const { return containment_feasible_; }

 private:
  DegreeSequence k_;
  int r_ = 1;
  ForbiddenSet x_;
  bool divisible_ = false;
  bool containment_feasible_ = false;
};

struct Violation {
  enum class Kind { Schema, Infeasible, Containment };
  Kind kind;
  std::string message;
};

/// Report-style validation: collects every violation instead of stopping at
/// the first one.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.kind == k; });
  }
  void add(Violation::Kind k, std::string msg) { violations.push_back({k, std::move(msg)}); }
};

inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  if (inst.r() < 1) rep.add(Violation::Kind::Schema, "r must be at least 1");
  if (!inst.degree_sum_divisible())
    rep.add(Violation::Kind::Infeasible,
            "M(k) = " + inst.k().m().str() + " is not divisible by r = " + std::to_string(inst.r()));
  if (inst.r() > inst.k().size())
    rep.add(Violation::Kind::Infeasible, "r exceeds n: no simple edge exists");
  if (!inst.containment_feasible())
    rep.add(Violation::Kind::Containment, "x_i > k_i for some vertex: containment infeasible");
  return rep;
}

/// Multiset edge: sorted vertices, repeats allowed (a repeat is a loop).
struct MultiEdge {
  std::vector<int> vertices;  // sorted, possibly with repeats

  MultiEdge() = default;
  explicit MultiEdge(std::vector<int> v) : vertices(std::move(v)) {
    std::sort(vertices.begin(), vertices.end());
  }
  explicit MultiEdge(const Edge& e) : vertices(e.vertices()) {}

  bool has_loop() const {
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
      if (vertices[i] == vertices[i + 1]) return true;
    return false;
  }

  friend bool operator==(const MultiEdge& a, const MultiEdge& b) {
    return a.vertices == b.vertices;
  }
  friend bool operator<(const MultiEdge& a, const MultiEdge& b) {
    return a.vertices < b.vertices;
  }
};

/// Possibly-degenerate hypergraph produced by a switching or a pairing: edge
/// multiset with loops representable. Never silently canonicalized; callers
/// inspect why simplicity failed.
struct MultiHypergraph {
  int n = 0;
  int r = 1;
  std::vector<MultiEdge> edges;  // sorted

  void canonicalize() { std::sort(edges.begin(), edges.end()); }

  bool has_loop() const {
    return std::any_of(edges.begin(), edges.end(), [](const MultiEdge& e) { return e.has_loop(); });
  }
  bool has_repeated_edge() const {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (edges[i] == edges[i + 1]) return true;
    return false;
  }
  bool is_simple() const { return !has_loop() && !has_repeated_edge(); }

  std::vector<int> degree_vector() const {
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (const MultiEdge& e : edges)
      for (int v : e.vertices) ++deg[static_cast<std::size_t>(v)];
    return deg;
  }

  std::optional<Hypergraph> to_hypergraph() const {
    if (!is_simple()) return std::nullopt;
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (const MultiEdge& e : edges) out.emplace_back(e.vertices);
    return Hypergraph(n, r, std::move(out));
  }
};

}  // namespace hyperenum
