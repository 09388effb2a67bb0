#include "qalloc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qalloc {

Edge canonical_edge(Edge edge) {
  std::sort(edge.begin(), edge.end());
  edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
  return edge;
}

std::string edge_label(const Edge& edge) {
  std::string out = "{";
  for (std::size_t i = 0; i < edge.size(); ++i) {
    if (i) out += ",";
    out += edge[i];
  }
  return out + "}";
}

bool validate_hypergraph(const Hypergraph& h) {
  if (h.edges.empty()) return false;
  const std::set<std::string> vertices(h.vertices.begin(), h.vertices.end());
  if (vertices.size() != h.vertices.size()) return false;
  std::set<Edge> seen;
  for (const auto& e : h.edges) {
    if (e.empty()) return false;
    for (const auto& v : e) {
      if (!vertices.count(v)) return false;
    }
    if (!seen.insert(canonical_edge(e)).second) return false;
  }
  return true;
}

Hypergraph hypergraph_h1() {
  return {{"a", "b", "c", "d"}, {{"a", "b", "c", "d"}, {"a", "b", "c"}}};
}

Hypergraph hypergraph_h2() { return {{"a", "b"}, {{"a", "b"}, {"a"}, {"b"}}}; }

Hypergraph hypergraph_h3() { return {{"a", "b"}, {{"a", "b"}, {"b"}}}; }

AllocationList::AllocationList(std::vector<AllocationEntry> entries) {
  std::set<Edge> seen;
  for (auto& e : entries) {
    e.edge = canonical_edge(std::move(e.edge));
    if (e.edge.empty()) fail(ErrorCode::InvalidEdge, "allocation entry has an empty edge");
    if (!seen.insert(e.edge).second) {
      fail(ErrorCode::InvalidEdge, "duplicate allocation entry for " + edge_label(e.edge));
    }
    if (!std::isfinite(e.value) || e.value < 0.0) {
      fail(ErrorCode::Domain, "allocation value for " + edge_label(e.edge) + " must be >= 0");
    }
  }
  entries_ = std::move(entries);
}

bool AllocationList::contains(const Edge& edge) const {
  const Edge key = canonical_edge(edge);
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const AllocationEntry& e) { return e.edge == key; });
}

double AllocationList::value(const Edge& edge) const {
  const Edge key = canonical_edge(edge);
  for (const auto& e : entries_) {
    if (e.edge == key) return e.value;
  }
  fail(ErrorCode::InvalidEdge, "no allocation entry for " + edge_label(key));
}

double edge_prior(const Priors& priors, const Edge& edge, const std::vector<std::string>& vertices) {
  const std::set<std::string> in_edge(edge.begin(), edge.end());
  for (const auto& v : in_edge) {
    if (std::find(vertices.begin(), vertices.end(), v) == vertices.end()) {
      fail(ErrorCode::InvalidEdge, "edge vertex '" + v + "' is not in the vertex set");
    }
  }
  double pi = 1.0;
  for (const auto& v : vertices) {
    const auto it = priors.find(v);
    if (it == priors.end()) fail(ErrorCode::InvalidPriors, "no prior for vertex '" + v + "'");
    const double p = it->second;
    if (!(p >= 0.0 && p <= 1.0)) {
      fail(ErrorCode::InvalidPriors, "prior for vertex '" + v + "' is outside [0, 1]");
    }
    pi *= in_edge.count(v) ? p : (1.0 - p);
  }
  return pi;
}

double performance_fairness(const AllocationList& alloc) {
  double total = 0.0;
  for (const auto& e : alloc.entries()) {
    if (!(e.value > 0.0)) {
      fail(ErrorCode::Domain, "edge " + edge_label(e.edge) + " has no resource (log undefined)");
    }
    total += std::log(e.value);
  }
  return total;
}

double performance_reliability(const AllocationList& alloc, const Priors& priors) {
  std::vector<std::string> vertices;
  for (const auto& [v, p] : priors) vertices.push_back(v);
  double total = 0.0;
  for (const auto& e : alloc.entries()) {
    total += edge_prior(priors, e.edge, vertices) * e.value;
  }
  return total;
}

double performance_generic(const AllocationList& alloc,
                           const std::vector<std::function<double(double)>>& per_edge) {
  if (per_edge.size() != alloc.size()) {
    fail(ErrorCode::Shape, "need exactly one performance function per hyperedge");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < alloc.size(); ++i) total += per_edge[i](alloc.entries()[i].value);
  return total;
}

double fairness_dominance(const AllocationList& alloc_star, const AllocationList& alloc) {
  if (alloc_star.size() != alloc.size()) {
    fail(ErrorCode::Shape, "allocations cover different edge sets");
  }
  double total = 0.0;
  for (const auto& e : alloc.entries()) {
    if (!alloc_star.contains(e.edge)) {
      fail(ErrorCode::Shape, "edge " + edge_label(e.edge) + " missing from reference allocation");
    }
    if (!(e.value > 0.0)) {
      fail(ErrorCode::Domain, "zero allocation value on edge " + edge_label(e.edge));
    }
    total += (e.value - alloc_star.value(e.edge)) / e.value;
  }
  return total;
}

AllocationList theorem1_allocation(const Hypergraph& h, std::size_t d) {
  if (d < 2) fail(ErrorCode::InvalidDimension, "qudit dimension must be >= 2");
  if (!validate_hypergraph(h)) fail(ErrorCode::InvalidEdge, "invalid hypergraph");
  std::vector<AllocationEntry> entries;
  entries.reserve(h.edges.size());
  for (const auto& e : h.edges) {
    const Edge edge = canonical_edge(e);
    const double root = std::pow(static_cast<double>(d), 0.5 * static_cast<double>(edge.size()));
    entries.push_back({edge, (root - 1.0) / (root + 1.0)});
  }
  return AllocationList(std::move(entries));
}

}  // namespace qalloc
