// Command-line front end: loads an instance, dispatches to the exact oracle,
// the formula evaluators, the switching audits and the Monte Carlo
// estimators, and emits machine-readable JSON or CSV reports.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperenum/json_io.hpp"

namespace he = hyperenum;
using he::io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

struct RunConfig {
  std::string command;
  std::string instance_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::uint64_t budget = he::oracle::Options{}.node_budget;
  int threads = 1;
  std::optional<std::string> structure;
  std::string out_path;
};

double ld_to_double(long double v) { return static_cast<double>(v); }

/// One result row: a quantity, the method that produced it, and the value in
/// whatever exact form survives (big integer, rational, or floating point).
struct Row {
  std::string quantity;
  std::string method;  // exact | formula | mc
  Json value;          // number or decimal string or "p/q"
  std::optional<double> log_value;
  std::optional<double> stderr_value;
  std::optional<he::formulas::ErrorEnvelope> envelope;
};

Json row_to_json(const Row& row) {
  Json j;
  j["quantity"] = row.quantity;
  j["method"] = row.method;
  j["value"] = row.value;
  if (row.log_value) {
    j["log_value"] = *row.log_value;
    j["log10_value"] = *row.log_value / std::log(10.0);
  } else {
    j["log_value"] = nullptr;
    j["log10_value"] = nullptr;
  }
  j["stderr"] = row.stderr_value ? Json(*row.stderr_value) : Json(nullptr);
  j["envelope"] = row.envelope ? he::io::envelope_to_json(*row.envelope) : Json(nullptr);
  return j;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string rows_to_csv(const std::vector<Row>& rows) {
  std::string out = "quantity,method,value,log_value,stderr,envelope_rho,envelope_beta,envelope_base\n";
  char buf[64];
  auto num = [&](std::optional<double> v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
  };
  for (const Row& r : rows) {
    out += r.quantity + "," + r.method + "," + csv_cell(r.value) + ",";
    out += num(r.log_value) + "," + num(r.stderr_value) + ",";
    if (r.envelope) {
      out += num(ld_to_double(r.envelope->rho)) + ",";
      out += r.envelope->beta ? num(ld_to_double(*r.envelope->beta)) : "";
      out += ",";
      out += num(ld_to_double(r.envelope->base_term));
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

std::optional<double> log_of_count(const he::BigInt& v) {
  if (v <= 0) return std::nullopt;
  return ld_to_double(he::log_rational(he::BigRat(v)));
}

std::optional<double> log_of_rat(const he::BigRat& v) {
  if (v <= 0) return std::nullopt;
  return ld_to_double(he::log_rational(v));
}

Row exact_count_row(const std::string& quantity, const he::oracle::EnumerationResult& res) {
  Row row;
  row.quantity = quantity;
  row.method = "exact";
  row.value = he::io::big_to_json(res.count);
  row.log_value = log_of_count(res.count);
  return row;
}

Row formula_row(const std::string& quantity, const he::formulas::FormulaResult& f) {
  Row row;
  row.quantity = quantity;
  row.method = "formula";
  row.value = f.main_term_exact ? he::io::rat_to_json(*f.main_term_exact) : Json(nullptr);
  row.log_value = ld_to_double(f.log_value);
  row.envelope = f.envelope;
  return row;
}

Row mc_row(const std::string& quantity, const he::sampler::EstimateReport& est) {
  Row row;
  row.quantity = quantity;
  row.method = "mc";
  row.value = est.estimate;
  row.log_value = est.estimate > 0 ? std::optional<double>(std::log(est.estimate)) : std::nullopt;
  row.stderr_value = est.stderr_estimate;
  return row;
}

he::oracle::Structure parse_structure(const std::string& s) {
  return s == "hc" ? he::oracle::Structure::LooseHamilton
                   : he::oracle::Structure::PerfectMatching;
}

int emit(const RunConfig& cfg, const Json& report, const std::vector<Row>& rows) {
  std::string text;
  if (cfg.format == "csv")
    text = rows_to_csv(rows);
  else
    text = report.dump(2) + "\n";
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) {
      std::cerr << "cannot write " << cfg.out_path << "\n";
      return kExitRuntime;
    }
    out << text;
  }
  return kExitOk;
}

Json base_report(const RunConfig& cfg, const he::Instance& inst) {
  Json j;
  j["schema"] = 1;
  j["command"] = cfg.command;
  j["instance"] = he::io::instance_to_json(inst);
  Json settings;
  settings["budget"] = cfg.budget;
  settings["threads"] = cfg.threads;
  if (cfg.seed) settings["seed"] = *cfg.seed;
  if (cfg.samples) settings["samples"] = *cfg.samples;
  if (cfg.structure) settings["structure"] = *cfg.structure;
  j["settings"] = settings;
  return j;
}

int run(const RunConfig& cfg) {
  auto loaded = he::io::instance_from_file(cfg.instance_path);
  if (loaded.report.has(he::Violation::Kind::Schema) || !loaded.instance) {
    for (const auto& v : loaded.report.violations) std::cerr << v.message << "\n";
    return kExitInvalid;
  }
  const he::Instance& inst = *loaded.instance;
  const he::DegreeSequence& k = inst.k();
  const int r = inst.r();
  const he::ForbiddenSet& x = inst.forbidden();

  if (!inst.degree_sum_divisible() || (k.m() > 0 && r > k.size())) {
    for (const auto& v : loaded.report.violations)
      if (v.kind == he::Violation::Kind::Infeasible) std::cerr << v.message << "\n";
    return kExitInfeasible;
  }
  const bool needs_containment = cfg.command == "prob" || cfg.command == "compare";
  if (needs_containment && !inst.containment_feasible()) {
    std::cerr << "x_i > k_i for some vertex: containment infeasible\n";
    return kExitInfeasible;
  }

  he::oracle::Options oracle_opt;
  oracle_opt.node_budget = cfg.budget;
  oracle_opt.threads = cfg.threads;
  he::sampler::Options sampler_opt;
  sampler_opt.threads = cfg.threads;
  const std::uint64_t seed = cfg.seed.value_or(1);
  const std::uint64_t samples = cfg.samples.value_or(100000);

  Json report = base_report(cfg, inst);
  std::vector<Row> rows;

  try {
    if (cfg.command == "exact") {
      const auto total = he::oracle::count_class(k, r, oracle_opt);
      rows.push_back(exact_count_row("class_size", total));
      if (!x.empty()) rows.push_back(exact_count_row("avoiding_count",
                                                     he::oracle::count_avoiding(k, r, x, oracle_opt)));
      report["nodes_explored"] = total.nodes_explored;
    } else if (cfg.command == "formula") {
      rows.push_back(formula_row("class_size", he::formulas::log_count_formula(k, r)));
      rows.push_back(formula_row("avoiding_count", he::formulas::log_avoiding_formula(k, r, x)));
    } else if (cfg.command == "prob") {
      const auto avoid_exact = he::oracle::prob_avoid_exact(k, r, x, oracle_opt);
      Row row;
      row.quantity = "avoid_probability";
      row.method = "exact";
      row.value = he::io::rat_to_json(avoid_exact);
      row.log_value = log_of_rat(avoid_exact);
      rows.push_back(row);
      rows.push_back(formula_row("containment_probability",
                                 he::formulas::containment_probability_formula(k, r, x)));
      const auto total = he::oracle::count_class(k, r, oracle_opt);
      const auto containing = he::oracle::count_containing(k, r, x, oracle_opt);
      Row crow;
      crow.quantity = "containment_probability";
      crow.method = "exact";
      const he::BigRat cp(containing.count, total.count);
      crow.value = he::io::rat_to_json(cp);
      crow.log_value = log_of_rat(cp);
      rows.push_back(crow);
    } else if (cfg.command == "expect") {
      const std::string structure_name = cfg.structure.value_or("pm");
      const auto structure = parse_structure(structure_name);
      const he::BigRat exact = he::oracle::expectation_exact(k, r, structure, oracle_opt);
      Row row;
      row.quantity =
          structure_name == "hc" ? "expected_loose_hamilton" : "expected_perfect_matchings";
      row.method = "exact";
      row.value = he::io::rat_to_json(exact);
      row.log_value = log_of_rat(exact);
      rows.push_back(row);
      if (k.is_regular() && k.size() > 0) {
        const int kreg = k[0];
        he::formulas::FormulaResult f;
        bool have = true;
        if (structure == he::oracle::Structure::PerfectMatching)
          f = he::formulas::expected_pm_formula(k.size(), r, kreg);
        else if (kreg >= 2)
          f = he::formulas::expected_hc_formula(k.size(), r, kreg);
        else
          have = false;
        if (have) {
          rows.push_back(formula_row(row.quantity, f));
          if (f.degenerate) report["degenerate"] = true;
        }
      }
    } else if (cfg.command == "sample") {
      const auto est = he::sampler::estimate_avoid_probability(k, r, x, samples, seed, sampler_opt);
      rows.push_back(mc_row("avoid_probability", est));
      report["sampling"] = he::io::estimate_to_json(est);
      if (cfg.structure) {
        const auto est2 = he::sampler::estimate_expectation(k, r, parse_structure(*cfg.structure),
                                                            samples, seed, sampler_opt);
        rows.push_back(mc_row(*cfg.structure == "hc" ? "expected_loose_hamilton"
                                                     : "expected_perfect_matchings",
                              est2));
      }
    } else if (cfg.command == "switch-audit") {
      Json audits = Json::array();
      for (const he::Edge& e : x.edges()) {
        const auto rep = he::switching::audit_bounds(k, r, e, oracle_opt);
        audits.push_back(he::io::audit_to_json(rep));
        Row row;
        row.quantity = "xi_" + e.to_string();
        row.method = "exact";
        row.value = rep.xi ? he::io::rat_to_json(*rep.xi) : Json(nullptr);
        rows.push_back(row);
      }
      report["audits"] = audits;
    } else if (cfg.command == "compare") {
      const auto total = he::oracle::count_class(k, r, oracle_opt);
      const auto avoiding = he::oracle::count_avoiding(k, r, x, oracle_opt);
      rows.push_back(exact_count_row("class_size", total));
      rows.push_back(exact_count_row("avoiding_count", avoiding));
      const auto count_f = he::formulas::log_count_formula(k, r);
      const auto avoid_f = he::formulas::log_avoiding_formula(k, r, x);
      rows.push_back(formula_row("class_size", count_f));
      rows.push_back(formula_row("avoiding_count", avoid_f));

      Json comparisons = Json::array();
      auto add_gap = [&](const std::string& q, const he::BigInt& exact, long double flog) {
        if (exact <= 0) return;
        const double le = *log_of_count(exact);
        Json c;
        c["quantity"] = q;
        c["log_gap"] = std::abs(le - ld_to_double(flog));
        c["relative_gap"] = le != 0 ? std::abs(le - ld_to_double(flog)) / std::abs(le) : 0.0;
        comparisons.push_back(c);
      };
      add_gap("class_size", total.count, count_f.log_value);
      add_gap("avoiding_count", avoiding.count, avoid_f.log_value);

      if (cfg.samples) {
        const auto est =
            he::sampler::estimate_avoid_probability(k, r, x, samples, seed, sampler_opt);
        rows.push_back(mc_row("avoid_probability", est));
        if (total.count > 0) {
          const he::BigRat exact_p(avoiding.count, total.count);
          Json c;
          c["quantity"] = "avoid_probability";
          c["mc_minus_exact"] =
              est.estimate - he::BigFloat(exact_p).convert_to<double>();
          c["stderr"] = est.stderr_estimate;
          comparisons.push_back(c);
        }
      }
      report["comparisons"] = comparisons;

      // duality: containment computed directly vs through the k - x identity
      const auto direct = he::oracle::count_containing_direct(k, r, x, oracle_opt);
      const auto via_identity = he::oracle::count_containing(k, r, x, oracle_opt);
      report["duality_ok"] = direct.count == via_identity.count;
      rows.push_back(exact_count_row("containing_count", direct));
    } else {
      std::cerr << "unknown command\n";
      return kExitRuntime;
    }
  } catch (const he::InstanceTooLarge& err) {
    std::cerr << err.what() << "\n";
    return kExitBudget;
  } catch (const he::AttemptsExhausted& err) {
    std::cerr << err.what() << "\n";
    return kExitBudget;
  } catch (const he::NonDivisible& err) {
    std::cerr << err.what() << "\n";
    return kExitInfeasible;
  } catch (const he::InfeasibleContainment& err) {
    std::cerr << err.what() << "\n";
    return kExitInfeasible;
  } catch (const he::DegenerateCycle& err) {
    std::cerr << err.what() << "\n";
    return kExitInfeasible;
  } catch (const he::EmptyClass& err) {
    std::cerr << err.what() << "\n";
    return kExitInfeasible;
  } catch (const he::Error& err) {
    std::cerr << err.what() << "\n";
    return kExitRuntime;
  }

  Json jrows = Json::array();
  for (const Row& row : rows) jrows.push_back(row_to_json(row));
  report["results"] = jrows;
  return emit(cfg, report, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymptotic enumeration of r-uniform hypergraphs with forbidden edges"};
  app.require_subcommand(1);

  RunConfig cfg;
  const std::vector<std::string> commands = {"exact",  "formula",      "prob",   "expect",
                                             "sample", "switch-audit", "compare"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--instance", cfg.instance_path, "instance JSON file")->required();
    sub->add_option("--format", cfg.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", cfg.seed, "RNG seed (echoed in reports)");
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    sub->add_option("--budget", cfg.budget, "search node budget");
    sub->add_option("--threads", cfg.threads, "worker count");
    sub->add_option("--out", cfg.out_path, "write the report here instead of stdout");
    if (name == "expect" || name == "sample")
      sub->add_option("--structure", cfg.structure, "pm or hc")
          ->check(CLI::IsMember({"pm", "hc"}));
    sub->callback([&cfg, name]() { cfg.command = name; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run(cfg);
  } catch (const std::exception& err) {
    std::cerr << err.what() << "\n";
    return kExitRuntime;
  }
}
