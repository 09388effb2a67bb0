#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qalloc/errors.hpp"

namespace qalloc {

/// A hyperedge is a set of vertex labels; canonical form is sorted and deduplicated.
using Edge = std::vector<std::string>;

Edge canonical_edge(Edge edge);
std::string edge_label(const Edge& edge);

struct Hypergraph {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
};

/// True iff there is at least one edge, every edge is non-empty and inside the
/// vertex set, vertices are unique and no edge repeats (as a set).
bool validate_hypergraph(const Hypergraph& h);

/// The three example hypergraphs H1, H2, H3.
Hypergraph hypergraph_h1();
Hypergraph hypergraph_h2();
Hypergraph hypergraph_h3();

struct AllocationEntry {
  Edge edge;
  double value = 0.0;
};

/// Resource value per hyperedge, kept in hypergraph edge order.
class AllocationList {
 public:
  AllocationList() = default;
  explicit AllocationList(std::vector<AllocationEntry> entries);

  const std::vector<AllocationEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double value(const Edge& edge) const;
  bool contains(const Edge& edge) const;

 private:
  std::vector<AllocationEntry> entries_;
};

/// Per-vertex probability that the party works.
using Priors = std::map<std::string, double>;

double edge_prior(const Priors& priors, const Edge& edge, const std::vector<std::string>& vertices);

/// Sum of natural logs of the allocation values.
double performance_fairness(const AllocationList& alloc);
/// Prior-weighted sum; the vertex universe is the key set of priors.
double performance_reliability(const AllocationList& alloc, const Priors& priors);
double performance_generic(const AllocationList& alloc,
                           const std::vector<std::function<double(double)>>& per_edge);

/// Aggregate proportional change of alloc_star against alloc. A value <= 0
/// certifies alloc_star is proportionally fair against alloc.
double fairness_dominance(const AllocationList& alloc_star, const AllocationList& alloc);

/// Optimal per-edge robustness for N qudits of dimension d measured in two
/// product unbiased bases: (d^{|e|/2} - 1) / (d^{|e|/2} + 1).
AllocationList theorem1_allocation(const Hypergraph& h, std::size_t d);

}  // namespace qalloc
