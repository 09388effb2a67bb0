#include <cmath>
#include <fstream>
#include <set>

#include "qalloc/cli.hpp"

namespace qalloc::cli {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child(path, key), "required field is missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "number must be finite");
  return x;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw SchemaError(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, child(path, key));
}

std::vector<std::string> string_list(const json& v, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_string(arr[i], child(path, i)));
  return out;
}

Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {as_number(v, path), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {as_number(v[0], child(path, 0)), as_number(v[1], child(path, 1))};
  }
  throw SchemaError(path, "expected a number or a [re, im] pair");
}

Matrix as_matrix(const json& v, const std::string& path) {
  const auto& rows = as_array(v, path);
  if (rows.empty()) throw SchemaError(path, "matrix must have at least one row");
  const std::size_t n = rows.size();
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto rp = child(path, i);
    const auto& row = as_array(rows[i], rp);
    if (row.size() != n) throw SchemaError(rp, "matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = as_complex(row[j], child(rp, j));
    }
  }
  return m;
}

Hypergraph parse_hypergraph(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "H1") return hypergraph_h1();
    if (name == "H2") return hypergraph_h2();
    if (name == "H3") return hypergraph_h3();
    throw SchemaError(path, "unknown named hypergraph '" + name + "' (expected H1, H2 or H3)");
  }
  Hypergraph h;
  h.vertices = string_list(require(v, "vertices", path), child(path, "vertices"));
  const auto ep = child(path, "edges");
  const auto& edges = as_array(require(v, "edges", path), ep);
  if (edges.empty()) throw SchemaError(ep, "at least one hyperedge is required");
  const std::set<std::string> known(h.vertices.begin(), h.vertices.end());
  if (known.size() != h.vertices.size()) throw SchemaError(child(path, "vertices"), "duplicate vertex");
  std::set<Edge> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Edge e = string_list(edges[i], child(ep, i));
    if (e.empty()) throw SchemaError(child(ep, i), "hyperedge must be non-empty");
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (!known.count(e[j])) throw SchemaError(child(child(ep, i), j), "unknown vertex '" + e[j] + "'");
    }
    if (!seen.insert(canonical_edge(e)).second) throw SchemaError(child(ep, i), "duplicate hyperedge");
    h.edges.push_back(std::move(e));
  }
  return h;
}

}  // namespace

json load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("/", "cannot open problem file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
}

std::string check_header(const json& doc) {
  const auto& version = require(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw SchemaError("/schema_version", "unsupported schema version (expected " +
                                             std::to_string(kSchemaVersion) + ")");
  }
  const auto kind = as_string(require(doc, "kind", ""), "/kind");
  static const std::set<std::string> kinds = {"allocation", "equitable", "robustness", "bell-verify"};
  if (!kinds.count(kind)) throw SchemaError("/kind", "unknown kind '" + kind + "'");
  return kind;
}

AllocationProblem parse_allocation(const json& doc) {
  if (check_header(doc) != "allocation") throw SchemaError("/kind", "expected kind 'allocation'");
  AllocationProblem p;
  p.hypergraph = parse_hypergraph(require(doc, "hypergraph", ""), "/hypergraph");
  const auto& d = require(doc, "d", "");
  p.d = as_count(d, "/d");
  if (auto it = doc.find("priors"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("/priors", "expected an object of vertex -> probability");
    Priors priors;
    for (const auto& [k, v] : it->items()) priors[k] = as_number(v, "/priors/" + k);
    for (const auto& v : p.hypergraph.vertices) {
      if (!priors.count(v)) throw SchemaError("/priors/" + v, "missing prior for vertex");
    }
    for (const auto& [k, v] : priors) {
      if (std::find(p.hypergraph.vertices.begin(), p.hypergraph.vertices.end(), k) ==
          p.hypergraph.vertices.end()) {
        throw SchemaError("/priors/" + k, "prior for unknown vertex");
      }
    }
    p.priors = std::move(priors);
  }
  if (auto it = doc.find("criteria"); it != doc.end()) {
    p.criteria = string_list(*it, "/criteria");
    for (std::size_t i = 0; i < p.criteria.size(); ++i) {
      if (p.criteria[i] != "fairness" && p.criteria[i] != "reliability") {
        throw SchemaError(child("/criteria", i), "expected 'fairness' or 'reliability'");
      }
    }
  }
  return p;
}

KnapsackProblem parse_equitable(const json& doc) {
  if (check_header(doc) != "equitable") throw SchemaError("/kind", "expected kind 'equitable'");
  if (auto it = doc.find("builder"); it != doc.end()) {
    const std::string bp = "/builder";
    const auto name = as_string(require(*it, "name", bp), bp + "/name");
    if (name == "monogamy") {
      return monogamy_problem(as_number(require(*it, "lambda", bp), bp + "/lambda"),
                              number_or(*it, "nu1", bp, kDefaultNu1),
                              number_or(*it, "nu2", bp, kDefaultNu2));
    }
    if (name == "exclusivity") {
      return exclusivity_problem(as_number(require(*it, "gap_n", bp), bp + "/gap_n"),
                                 as_number(require(*it, "gap_m", bp), bp + "/gap_m"));
    }
    throw SchemaError(bp + "/name", "unknown builder '" + name + "'");
  }

  const std::string pp = "/problem";
  const auto& body = require(doc, "problem", "");
  KnapsackProblem p;
  const auto vp = child(pp, "variables");
  const auto& vars = as_array(require(body, "variables", pp), vp);
  if (vars.empty()) throw SchemaError(vp, "at least one variable is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto ip = child(vp, i);
    KnapsackVariable v;
    v.id = as_string(require(vars[i], "id", ip), child(ip, "id"));
    if (!ids.insert(v.id).second) throw SchemaError(child(ip, "id"), "duplicate variable id");
    v.lower = number_or(vars[i], "lower", ip, 0.0);
    v.upper = as_number(require(vars[i], "upper", ip), child(ip, "upper"));
    p.variables.push_back(std::move(v));
  }
  if (auto it = body.find("constraints"); it != body.end()) {
    const auto cp = child(pp, "constraints");
    const auto& cons = as_array(*it, cp);
    for (std::size_t k = 0; k < cons.size(); ++k) {
      const auto kp = child(cp, k);
      KnapsackConstraint c;
      const auto& coefs = require(cons[k], "coefficients", kp);
      if (!coefs.is_object()) throw SchemaError(child(kp, "coefficients"), "expected an object of id -> coefficient");
      for (const auto& [id, val] : coefs.items()) {
        const auto idp = child(child(kp, "coefficients"), id);
        if (!ids.count(id)) throw SchemaError(idp, "unknown variable id");
        c.coefficients[id] = as_number(val, idp);
      }
      c.budget = as_number(require(cons[k], "budget", kp), child(kp, "budget"));
      if (auto lt = cons[k].find("label"); lt != cons[k].end()) c.label = as_string(*lt, child(kp, "label"));
      p.constraints.push_back(std::move(c));
    }
  }
  if (auto it = body.find("exclusivity_groups"); it != body.end()) {
    const auto gp = child(pp, "exclusivity_groups");
    const auto& groups = as_array(*it, gp);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto members = string_list(groups[g], child(gp, g));
      for (std::size_t j = 0; j < members.size(); ++j) {
        if (!ids.count(members[j])) throw SchemaError(child(child(gp, g), j), "unknown variable id");
      }
      p.exclusivity_groups.push_back(std::move(members));
    }
  }
  return p;
}

RobustnessProblem parse_robustness(const json& doc) {
  if (check_header(doc) != "robustness") throw SchemaError("/kind", "expected kind 'robustness'");
  const std::string ap = "/assembly";
  const auto& desc = require(doc, "assembly", "");
  const auto type = as_string(require(desc, "type", ap), ap + "/type");
  const double eta = number_or(desc, "eta", ap, 1.0);
  if (eta < 0.0 || eta > 1.0) throw SchemaError(ap + "/eta", "eta must lie in [0, 1]");

  std::optional<Assembly> assembly;
  std::optional<double> closed_form_dim;
  if (type == "mub_pair") {
    const auto d = as_count(require(desc, "d", ap), ap + "/d");
    assembly = mub_pair_assembly(d);
    closed_form_dim = static_cast<double>(d);
  } else if (type == "product_mub") {
    const auto sites = as_count(require(desc, "sites", ap), ap + "/sites");
    const auto d = as_count(require(desc, "d", ap), ap + "/d");
    ProductAssembly pa = product_assembly(sites, d);
    if (auto it = desc.find("keep"); it != desc.end()) {
      std::vector<std::size_t> keep;
      const auto& arr = as_array(*it, ap + "/keep");
      for (std::size_t i = 0; i < arr.size(); ++i) keep.push_back(as_count(arr[i], child(ap + "/keep", i)));
      pa = reduce_assembly(pa, keep);
    }
    closed_form_dim = static_cast<double>(pa.dim());
    assembly = pa.expand();
  } else if (type == "explicit") {
    const auto pp = ap + "/povms";
    const auto& povms = as_array(require(desc, "povms", ap), pp);
    std::vector<Povm> members;
    for (std::size_t x = 0; x < povms.size(); ++x) {
      const auto xp = child(pp, x);
      std::vector<Matrix> elements;
      const auto& els = as_array(povms[x], xp);
      for (std::size_t a = 0; a < els.size(); ++a) elements.push_back(as_matrix(els[a], child(xp, a)));
      members.emplace_back(std::move(elements));
    }
    assembly = Assembly(std::move(members));
  } else {
    throw SchemaError(ap + "/type", "expected 'mub_pair', 'product_mub' or 'explicit'");
  }
  if (eta != 1.0) {
    assembly = depolarize(*assembly, eta);
    closed_form_dim.reset();
  }

  RobustnessOptions options;
  options.s_max = number_or(doc, "s_max", "", options.s_max);
  options.bracket_tol = number_or(doc, "bracket_tol", "", options.bracket_tol);
  options.feasibility.tol = number_or(doc, "feasibility_tol", "", options.feasibility.tol);
  if (auto it = doc.find("max_iterations"); it != doc.end()) {
    options.feasibility.max_iterations = as_count(*it, "/max_iterations");
  }
  return RobustnessProblem{std::move(*assembly), options, closed_form_dim};
}

BellVerifyProblem parse_bell_verify(const json& doc) {
  if (check_header(doc) != "bell-verify") throw SchemaError("/kind", "expected kind 'bell-verify'");
  BellVerifyProblem p;
  if (auto it = doc.find("trials"); it != doc.end()) p.trials = as_count(*it, "/trials");
  if (auto it = doc.find("seed"); it != doc.end()) p.seed = as_count(*it, "/seed");
  if (auto it = doc.find("projectors"); it != doc.end()) {
    p.projectors = as_string(*it, "/projectors");
    if (p.projectors != "random" && p.projectors != "zero" && p.projectors != "identity") {
      throw SchemaError("/projectors", "expected 'random', 'zero' or 'identity'");
    }
  }
  if (p.trials < 1) throw SchemaError("/trials", "need at least one trial");
  return p;
}

}  // namespace qalloc::cli
