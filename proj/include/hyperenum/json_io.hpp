#pragma once

#include <algorithm>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperenum/core.hpp"
#include "hyperenum/formulas.hpp"
#include "hyperenum/sampler.hpp"
#include "hyperenum/switching.hpp"

namespace hyperenum::io {

using Json = nlohmann::ordered_json;

/// Integers survive JSON only up to 2^53; anything larger is emitted as a
/// decimal string so downstream consumers cannot mangle it.
inline Json big_to_json(const BigInt& v) {
  if (fits_double_exactly(v)) return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

inline Json rat_to_json(const BigRat& q) {
  if (boost::multiprecision::denominator(q) == 1)
    return big_to_json(boost::multiprecision::numerator(q));
  return Json(boost::multiprecision::numerator(q).str() + "/" +
              boost::multiprecision::denominator(q).str());
}

struct LoadResult {
  std::optional<Instance> instance;
  ValidationReport report;
};

/// Parse the instance schema
/// {"n": int, "r": int, "degrees": [int,...], "forbidden": [[int,...],...]}.
/// Schema problems are collected, not thrown; the instance is built only when
/// the document is clean.
inline LoadResult instance_from_json(const Json& j) {
  LoadResult out;
  auto& rep = out.report;

  if (!j.is_object()) {
    rep.add(Violation::Kind::Schema, "instance document must be a JSON object");
    return out;
  }
  for (const auto& key : {"n", "r", "degrees"})
    if (!j.contains(key)) rep.add(Violation::Kind::Schema, std::string("missing field: ") + key);
  if (!rep.ok()) return out;

  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 0)
    rep.add(Violation::Kind::Schema, "n must be a non-negative integer");
  if (!j["r"].is_number_integer() || j["r"].get<long long>() < 1)
    rep.add(Violation::Kind::Schema, "r must be a positive integer");
  if (!j["degrees"].is_array())
    rep.add(Violation::Kind::Schema, "degrees must be an array");
  if (!rep.ok()) return out;

  const int n = j["n"].get<int>();
  const int r = j["r"].get<int>();

  std::vector<int> degrees;
  for (const auto& d : j["degrees"]) {
    if (!d.is_number_integer() || d.get<long long>() < 0) {
      rep.add(Violation::Kind::Schema, "degrees entries must be non-negative integers");
      break;
    }
    degrees.push_back(d.get<int>());
  }
  if (static_cast<int>(degrees.size()) != n)
    rep.add(Violation::Kind::Schema, "degrees length must equal n");

  std::vector<Edge> forbidden;
  if (j.contains("forbidden")) {
    if (!j["forbidden"].is_array()) {
      rep.add(Violation::Kind::Schema, "forbidden must be an array of edges");
    } else {
      for (const auto& ej : j["forbidden"]) {
        if (!ej.is_array() || static_cast<int>(ej.size()) != r) {
          rep.add(Violation::Kind::Schema, "each forbidden edge must list exactly r vertices");
          continue;
        }
        std::vector<int> verts;
        bool ok = true;
        for (const auto& v : ej) {
          if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() >= n) {
            rep.add(Violation::Kind::Schema, "forbidden edge vertex out of range");
            ok = false;
            break;
          }
          verts.push_back(v.get<int>());
        }
        if (!ok) continue;
        try {
          forbidden.emplace_back(verts);  // canonicalizes; rejects loops
        } catch (const InvalidEdge& err) {
          rep.add(Violation::Kind::Schema, std::string("forbidden edge invalid: ") + err.what());
        }
      }
      std::vector<Edge> sorted = forbidden;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i] == sorted[i + 1])
          rep.add(Violation::Kind::Schema, "duplicate forbidden edge " + sorted[i].to_string());
    }
  }
  if (!rep.ok()) return out;

  Instance inst(DegreeSequence(degrees), r, ForbiddenSet(Hypergraph(n, r, forbidden)));
  const ValidationReport feasibility = validate_instance(inst);
  rep.violations.insert(rep.violations.end(), feasibility.violations.begin(),
                        feasibility.violations.end());
  out.instance = inst;
  return out;
}

inline LoadResult instance_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    LoadResult out;
    out.report.add(Violation::Kind::Schema, std::string("JSON parse error: ") + err.what());
    return out;
  }
  return instance_from_json(j);
}

inline LoadResult instance_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    LoadResult out;
    out.report.add(Violation::Kind::Schema, "cannot open instance file: " + path);
    return out;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_string(text);
}

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["n"] = inst.k().size();
  j["r"] = inst.r();
  j["degrees"] = inst.k().degrees();
  Json fb = Json::array();
  for (const Edge& e : inst.forbidden().edges()) fb.push_back(e.vertices());
  j["forbidden"] = fb;
  return j;
}

inline Json envelope_to_json(const formulas::ErrorEnvelope& env) {
  Json j;
  j["base_term"] = static_cast<double>(env.base_term);
  j["rho"] = static_cast<double>(env.rho);
  if (env.beta)
    j["beta"] = static_cast<double>(*env.beta);
  else
    j["beta"] = nullptr;
  j["base_small"] = env.base_small;
  j["rho_small"] = env.rho_small;
  if (env.beta_small)
    j["beta_small"] = *env.beta_small;
  else
    j["beta_small"] = nullptr;
  return j;
}

inline Json estimate_to_json(const sampler::EstimateReport& rep) {
  Json j;
  j["estimate"] = rep.estimate;
  j["stderr"] = rep.stderr_estimate;
  j["samples_accepted"] = rep.samples_accepted;
  j["samples_attempted"] = rep.samples_attempted;
  j["acceptance_rate"] = rep.acceptance_rate;
  j["seed"] = rep.seed;
  return j;
}

inline Json audit_to_json(const switching::AuditReport& rep) {
  Json j;
  j["n"] = rep.n;
  j["r"] = rep.r;
  j["edge"] = rep.edge.vertices();
  j["m"] = big_to_json(rep.m);
  j["kmax"] = rep.kmax;
  j["f_count"] = rep.f_count;
  j["fc_count"] = rep.fc_count;
  if (rep.xi)
    j["xi"] = rat_to_json(*rep.xi);
  else
    j["xi"] = nullptr;
  j["xi_bound_shape"] = static_cast<double>(rep.xi_bound_shape);
  j["forward_tuple_bound"] = big_to_json(rep.forward_tuple_bound);
  j["reverse_tuple_bound"] = rep.reverse_tuple_bound;
  j["forward_tuples"] = rep.forward_tuples;
  j["forward_legal"] = rep.forward_legal;
  j["reverse_tuples"] = rep.reverse_tuples;
  j["reverse_legal"] = rep.reverse_legal;
  j["forward_legal_total"] = rep.forward_legal_total;
  j["reverse_legal_total"] = rep.reverse_legal_total;
  j["identity_residual"] = rep.identity_residual;
  j["forward_bound_ok"] = rep.forward_bound_ok;
  j["reverse_bound_ok"] = rep.reverse_bound_ok;
  j["identity_ok"] = rep.identity_ok;
  return j;
}

}  // namespace hyperenum::io
