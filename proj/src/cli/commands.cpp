#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qalloc/bell.hpp"
#include "qalloc/cli.hpp"

namespace qalloc::cli {

namespace {

constexpr double kIdentityFailThreshold = 1e-8;

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json edge_json(const Edge& e) { return json(e); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json base_provenance(const Flags& flags) {
  return {{"tool", "qalloc"}, {"version", QALLOC_VERSION}, {"seed", flags.seed}};
}

json solution_json(const EquitableSolution& s) {
  json values = json::object();
  for (const auto& [id, v] : s.values) values[id] = v;
  return {{"values", values},
          {"elimination_order", s.elimination_order},
          {"stage_values", s.stage_values},
          {"active", s.active}};
}

}  // namespace

json Report::payload() const {
  return {{"command", command}, {"inputs", inputs}, {"results", results},
          {"provenance", provenance}, {"exit_code", exit_code}};
}

json Report::to_json() const {
  json j = payload();
  j["wall_time_s"] = wall_time_s;
  return j;
}

Report cmd_allocate(const json& doc, const Flags& flags, const std::optional<std::string>& criterion) {
  Stopwatch clock;
  const AllocationProblem p = parse_allocation(doc);
  std::vector<std::string> criteria = p.criteria;
  if (criterion) {
    if (*criterion == "all") {
      criteria = {"fairness", "reliability"};
    } else {
      criteria = {*criterion};
    }
  }
  if (criteria.empty()) {
    criteria.push_back("fairness");
    if (p.priors) criteria.push_back("reliability");
  }

  Report r;
  r.command = "allocate";
  r.inputs = doc;
  r.inputs["criteria_applied"] = criteria;
  const AllocationList alloc = theorem1_allocation(p.hypergraph, p.d);

  json edges = json::array();
  r.table.push_back({"edge", "size", "value", "prior"});
  for (const auto& e : alloc.entries()) {
    json row = {{"edge", edge_json(e.edge)}, {"value", e.value}};
    std::string prior_cell;
    if (p.priors) {
      const double pi = edge_prior(*p.priors, e.edge, p.hypergraph.vertices);
      row["prior"] = pi;
      prior_cell = fmt(pi);
    }
    edges.push_back(row);
    r.table.push_back({edge_label(e.edge), std::to_string(e.edge.size()), fmt(e.value), prior_cell});
  }
  r.results["edges"] = edges;
  r.results["d"] = p.d;
  for (const auto& c : criteria) {
    if (c == "fairness") {
      r.results["fairness"] = performance_fairness(alloc);
    } else if (c == "reliability") {
      if (!p.priors) throw SchemaError("/priors", "reliability needs per-vertex priors");
      r.results["reliability"] = performance_reliability(alloc, *p.priors);
    } else {
      throw SchemaError("/criteria", "unknown criterion '" + c + "'");
    }
  }
  r.provenance = base_provenance(flags);
  r.provenance["tolerances"] = json::object();
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_equitable(const json& doc, const Flags& flags) {
  Stopwatch clock;
  const KnapsackProblem problem = parse_equitable(doc);
  const EquitableResult result = lexicographic_maxmin(problem);

  Report r;
  r.command = "equitable";
  r.inputs = doc;
  json order = json::array();
  for (const auto& o : priority_order(problem)) {
    if (!o.tied) order.push_back({o.lower_id, o.upper_id});
  }
  r.results["priority_order"] = order;
  json sols = json::array();
  for (const auto& s : result.solutions) sols.push_back(solution_json(s));
  r.results["solutions"] = sols;
  r.results["tied"] = result.tied();

  r.table.push_back({"solution", "variable", "value", "stage"});
  for (std::size_t k = 0; k < result.solutions.size(); ++k) {
    const auto& s = result.solutions[k];
    for (const auto& [id, v] : s.values) {
      const auto pos = std::find(s.elimination_order.begin(), s.elimination_order.end(), id);
      r.table.push_back({std::to_string(k), id, fmt(v),
                         std::to_string(pos - s.elimination_order.begin() + 1)});
    }
  }
  r.provenance = base_provenance(flags);
  r.provenance["tolerances"] = {{"tie", 1e-9}};
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_robustness(const json& doc, const Flags& flags) {
  Stopwatch clock;
  RobustnessProblem p = parse_robustness(doc);
  if (flags.tol) p.options.bracket_tol = *flags.tol;
  const RobustnessResult res = generalized_robustness(p.assembly, p.options);

  Report r;
  r.command = "robustness";
  r.inputs = doc;
  r.results = {{"value", res.value},
               {"lo", res.lo},
               {"hi", res.hi},
               {"probes", res.probes},
               {"certificate_residual", res.certificate.residual},
               {"dim", p.assembly.dim()}};
  r.table.push_back({"value", "lo", "hi", "closed_form", "abs_diff"});
  std::vector<std::string> row = {fmt(res.value), fmt(res.lo), fmt(res.hi), "", ""};
  if (p.closed_form_dim) {
    const double cf = closed_form_mub_robustness(*p.closed_form_dim);
    r.results["closed_form"] = cf;
    r.results["abs_diff"] = std::abs(res.value - cf);
    row[3] = fmt(cf);
    row[4] = fmt(std::abs(res.value - cf));
  }
  r.table.push_back(row);
  r.provenance = base_provenance(flags);
  r.provenance["tolerances"] = {{"bracket", p.options.bracket_tol},
                                {"feasibility", p.options.feasibility.tol},
                                {"max_iterations", p.options.feasibility.max_iterations},
                                {"s_max", p.options.s_max}};
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_bell_verify(const BellVerifyProblem& p, const Flags& flags) {
  Stopwatch clock;
  const std::uint64_t seed = p.seed.value_or(flags.seed);
  IdentityReport rep;
  if (p.projectors == "random") {
    rep = verify_operator_identity(seed, p.trials);
  } else {
    const Matrix proj = p.projectors == "zero" ? Matrix(Matrix::Zero(2, 2)) : identity(2);
    for (std::size_t t = 0; t < p.trials; ++t) {
      const double res = operator_identity_residual(proj, proj, proj, proj, proj, proj);
      rep.residuals.push_back(res);
      rep.max_residual = std::max(rep.max_residual, res);
      rep.mean_residual += res / static_cast<double>(p.trials);
    }
  }

  Report r;
  r.command = "bell-verify";
  r.inputs = {{"trials", p.trials}, {"seed", seed}, {"projectors", p.projectors}};
  const bool passed = rep.max_residual <= kIdentityFailThreshold;
  r.results = {{"max_residual", rep.max_residual},
               {"mean_residual", rep.mean_residual},
               {"trials", p.trials},
               {"threshold", kIdentityFailThreshold},
               {"passed", passed}};
  r.table.push_back({"trial", "residual"});
  for (std::size_t t = 0; t < rep.residuals.size(); ++t) {
    r.table.push_back({std::to_string(t), fmt(rep.residuals[t])});
  }
  r.provenance = base_provenance(flags);
  r.provenance["seed"] = seed;
  r.provenance["prng"] = "mt19937_64 per trial, seed_seq(seed, trial)";
  r.provenance["tolerances"] = {{"fail_above", kIdentityFailThreshold}};
  r.exit_code = passed ? exit_code::kOk : exit_code::kVerificationFailed;
  r.wall_time_s = clock.seconds();
  return r;
}

std::string render(const Report& report, Format format) {
  switch (format) {
    case Format::Json:
      return report.to_json().dump(2) + "\n";
    case Format::Csv: {
      std::ostringstream os;
      for (const auto& row : report.table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) os << ',';
          const bool quote = row[i].find(',') != std::string::npos;
          os << (quote ? "\"" + row[i] + "\"" : row[i]);
        }
        os << '\n';
      }
      return os.str();
    }
    case Format::Text: {
      std::ostringstream os;
      os << "qalloc " << report.command << "\n";
      std::vector<std::size_t> widths;
      for (const auto& row : report.table) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
      }
      for (const auto& row : report.table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          os << std::left << std::setw(static_cast<int>(widths[i]) + 2) << row[i];
        }
        os << '\n';
      }
      for (const auto& [k, v] : report.results.items()) {
        if (v.is_primitive()) os << k << ": " << v.dump() << '\n';
      }
      return os.str();
    }
  }
  return {};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal allocation of quantum resources over hypergraphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QALLOC_VERSION);

  Flags flags;
  std::string format = "json";
  std::string problem_path;
  std::string criterion;
  std::size_t trials = 100;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", flags.out, "Write the report to this file instead of stdout");
    sub->add_option("--seed", flags.seed, "Seed for every random stream (default 0)");
    sub->add_option("--tol", flags.tol, "Tolerance override (robustness: bisection bracket)");
    sub->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
  };

  auto* allocate = app.add_subcommand("allocate", "Optimal product-MUB allocation over a hypergraph");
  allocate->add_option("problem", problem_path, "Problem file (kind = allocation)")->required();
  allocate->add_option("--criterion", criterion, "fairness, reliability or all")
      ->check(CLI::IsMember({"fairness", "reliability", "all"}));
  common(allocate);

  auto* equitable = app.add_subcommand("equitable", "Lexicographic max-min under knapsack constraints");
  equitable->add_option("problem", problem_path, "Problem file (kind = equitable)")->required();
  common(equitable);

  auto* robustness = app.add_subcommand("robustness", "Generalized incompatibility robustness");
  robustness->add_option("problem", problem_path, "Problem file (kind = robustness)")->required();
  common(robustness);

  auto* bell = app.add_subcommand("bell-verify", "Check the I3322 Bell-operator identity");
  bell->add_option("problem", problem_path, "Optional problem file (kind = bell-verify)");
  auto* trials_opt = bell->add_option("--trials", trials, "Number of random trials")
                         ->check(CLI::PositiveNumber);
  common(bell);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForVersion& e) {
    out << QALLOC_VERSION << "\n";
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "qalloc: " << e.what() << "\n";
    return exit_code::kSchema;
  }
  flags.format = format == "csv" ? Format::Csv : format == "text" ? Format::Text : Format::Json;

  try {
    Report report;
    if (allocate->parsed()) {
      err << "qalloc: allocate " << problem_path << "\n";
      report = cmd_allocate(load_problem_file(problem_path), flags,
                            criterion.empty() ? std::nullopt : std::optional<std::string>(criterion));
    } else if (equitable->parsed()) {
      err << "qalloc: equitable " << problem_path << "\n";
      report = cmd_equitable(load_problem_file(problem_path), flags);
    } else if (robustness->parsed()) {
      err << "qalloc: robustness " << problem_path << "\n";
      report = cmd_robustness(load_problem_file(problem_path), flags);
    } else {
      BellVerifyProblem p;
      if (!problem_path.empty()) p = parse_bell_verify(load_problem_file(problem_path));
      if (trials_opt->count() > 0) p.trials = trials;
      if (bell->get_option("--seed")->count() > 0) p.seed = flags.seed;
      err << "qalloc: bell-verify trials=" << p.trials << "\n";
      report = cmd_bell_verify(p, flags);
    }

    const std::string text = render(report, flags.format);
    if (flags.out) {
      std::ofstream file(*flags.out);
      if (!file) {
        err << "qalloc: cannot write " << *flags.out << "\n";
        return exit_code::kDomain;
      }
      file << text;
    } else {
      out << text;
    }
    if (report.exit_code != exit_code::kOk) {
      err << "qalloc: verification failed\n";
    }
    return report.exit_code;
  } catch (const SchemaError& e) {
    err << "qalloc: schema error at " << e.what() << "\n";
    return exit_code::kSchema;
  } catch (const Error& e) {
    err << "qalloc: " << to_string(e.code()) << " error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::Infeasible: return exit_code::kInfeasible;
      case ErrorCode::CapExceeded:
      case ErrorCode::Indeterminate: return exit_code::kCapExceeded;
      default: return exit_code::kDomain;
    }
  }
}

}  // namespace qalloc::cli
