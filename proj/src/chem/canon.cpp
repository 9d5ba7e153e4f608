//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/chem/canon.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>

namespace mhnpath::chem {
namespace {

using Ranks = std::vector<int>;

// Dense ranks of vertices ordered by key; equal keys share a rank.
template <typename Key>
Ranks dense_ranks(const std::vector<Key> &keys) {
  const std::size_t n = keys.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
  });
  Ranks ranks(n, 0);
  int current = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && keys[static_cast<std::size_t>(order[i - 1])] <
                     keys[static_cast<std::size_t>(order[i])])
      ++current;
    ranks[static_cast<std::size_t>(order[i])] = current;
  }
  return ranks;
}

int count_classes(const Ranks &ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

Ranks refine(const LabeledGraph &g, Ranks ranks) {
  const int n = g.size();
  int classes = count_classes(ranks);
  while (true) {
    std::vector<std::vector<int>> signature(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, int>> nbrs;
      for (const auto &e : g.adjacency[static_cast<std::size_t>(v)])
        nbrs.emplace_back(e.label, ranks[static_cast<std::size_t>(e.neighbor)]);
      std::sort(nbrs.begin(), nbrs.end());
      auto &sig = signature[static_cast<std::size_t>(v)];
      sig.push_back(ranks[static_cast<std::size_t>(v)]);
      for (const auto &[label, rank] : nbrs) {
        sig.push_back(label);
        sig.push_back(rank);
      }
    }
    Ranks next = dense_ranks(signature);
    const int next_classes = count_classes(next);
    ranks = std::move(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return ranks;
}

Ranks individualize(const LabeledGraph &g, const Ranks &ranks, int vertex) {
  std::vector<std::pair<int, int>> keys(ranks.size());
  for (std::size_t v = 0; v < ranks.size(); ++v)
    keys[v] = {ranks[v], static_cast<int>(v) == vertex ? 0 : 1};
  return refine(g, dense_ranks(keys));
}

// Twins are interchangeable by an automorphism that fixes everything else.
bool twins(const LabeledGraph &g, int u, int v) {
  auto neighborhood = [&](int a, int exclude) {
    std::vector<std::pair<int, int>> out;
    for (const auto &e : g.adjacency[static_cast<std::size_t>(a)]) {
      if (e.neighbor != exclude) out.emplace_back(e.neighbor, e.label);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return neighborhood(u, v) == neighborhood(v, u);
}

class CanonicalSearch {
public:
  CanonicalSearch(const LabeledGraph &g, const Certificate &cert,
                  std::size_t budget)
      : graph_(g), certificate_(cert), budget_(budget) {}

  Ranks run() {
    Ranks initial = dense_ranks(graph_.vertex_labels);
    explore(refine(graph_, std::move(initial)));
    return best_ranks_;
  }

private:
  void explore(const Ranks &ranks) {
    const int n = graph_.size();
    std::vector<int> cell_size(static_cast<std::size_t>(n), 0);
    for (int r : ranks) ++cell_size[static_cast<std::size_t>(r)];
    int target = -1;
    for (int r = 0; r < n; ++r) {
      if (cell_size[static_cast<std::size_t>(r)] > 1) {
        target = r;
        break;
      }
    }
    if (target < 0) {
      ++leaves_;
      std::string cert = certificate_(ranks);
      if (!best_cert_ || cert < *best_cert_) {
        best_cert_ = std::move(cert);
        best_ranks_ = ranks;
      }
      return;
    }
    std::vector<int> explored;
    for (int v = 0; v < n; ++v) {
      if (ranks[static_cast<std::size_t>(v)] != target) continue;
      if (!explored.empty() && leaves_ >= budget_) break;
      const bool redundant = std::any_of(
          explored.begin(), explored.end(),
          [&](int u) { return twins(graph_, u, v); });
      if (redundant) continue;
      explored.push_back(v);
      explore(individualize(graph_, ranks, v));
    }
  }

  const LabeledGraph &graph_;
  const Certificate &certificate_;
  std::size_t budget_;
  std::size_t leaves_ = 0;
  std::optional<std::string> best_cert_;
  Ranks best_ranks_;
};

std::string ring_digit(int d) {
  if (d < 10) return std::to_string(d);
  return "%" + std::to_string(d);
}

class LineWriter {
public:
  LineWriter(const LabeledGraph &g, std::span<const int> ranks,
             const std::function<std::string(int)> &vertex_text,
             const std::function<std::string(int, int, int)> &bond_text)
      : g_(g), ranks_(ranks), vertex_text_(vertex_text), bond_text_(bond_text),
        info_(static_cast<std::size_t>(g.size())) {}

  std::string write() {
    const int n = g_.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return ranks_[static_cast<std::size_t>(a)] < ranks_[static_cast<std::size_t>(b)];
    });
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::set<int> ring_bonds;
    std::string out;
    for (int start : order) {
      if (visited[static_cast<std::size_t>(start)]) continue;
      discover(start, -1, visited, ring_bonds);
      if (!out.empty()) out += '.';
      emit(start, out);
    }
    return out;
  }

private:
  struct RingBond {
    int bond;
    int partner;
  };
  struct VertexInfo {
    std::vector<std::pair<int, int>> children;  // (vertex, bond)
    std::vector<RingBond> ring_open;
    std::vector<RingBond> ring_close;
  };

  std::vector<LabeledGraph::Edge> sorted_edges(int v) const {
    auto edges = g_.adjacency[static_cast<std::size_t>(v)];
    std::sort(edges.begin(), edges.end(), [&](const auto &a, const auto &b) {
      return ranks_[static_cast<std::size_t>(a.neighbor)] <
             ranks_[static_cast<std::size_t>(b.neighbor)];
    });
    return edges;
  }

  void discover(int v, int parent_bond, std::vector<bool> &visited,
                std::set<int> &ring_bonds) {
    visited[static_cast<std::size_t>(v)] = true;
    for (const auto &e : sorted_edges(v)) {
      if (e.bond == parent_bond) continue;
      if (!visited[static_cast<std::size_t>(e.neighbor)]) {
        info_[static_cast<std::size_t>(v)].children.emplace_back(e.neighbor, e.bond);
        discover(e.neighbor, e.bond, visited, ring_bonds);
      } else if (ring_bonds.insert(e.bond).second) {
        info_[static_cast<std::size_t>(e.neighbor)].ring_open.push_back({e.bond, v});
        info_[static_cast<std::size_t>(v)].ring_close.push_back({e.bond, e.neighbor});
      }
    }
  }

  void emit(int v, std::string &out) {
    out += vertex_text_(v);
    const VertexInfo &vi = info_[static_cast<std::size_t>(v)];
    std::vector<int> closing;
    for (const RingBond &rb : vi.ring_close) {
      const int d = digit_of_.at(rb.bond);
      out += ring_digit(d);
      closing.push_back(d);
    }
    for (const RingBond &rb : vi.ring_open) {
      int d = 1;
      while (in_use_.count(d) != 0 ||
             std::find(closing.begin(), closing.end(), d) != closing.end())
        ++d;
      in_use_.insert(d);
      digit_of_[rb.bond] = d;
      out += bond_text_(rb.bond, v, rb.partner) + ring_digit(d);
    }
    for (int d : closing) in_use_.erase(d);
    for (std::size_t i = 0; i < vi.children.size(); ++i) {
      const auto [child, bond] = vi.children[i];
      const bool last = i + 1 == vi.children.size();
      if (!last) out += '(';
      out += bond_text_(bond, v, child);
      emit(child, out);
      if (!last) out += ')';
    }
  }

  const LabeledGraph &g_;
  std::span<const int> ranks_;
  const std::function<std::string(int)> &vertex_text_;
  const std::function<std::string(int, int, int)> &bond_text_;
  std::vector<VertexInfo> info_;
  std::map<int, int> digit_of_;
  std::set<int> in_use_;
};

}  // namespace

std::vector<int> canonical_ranks(const LabeledGraph &graph,
                                 const Certificate &certificate,
                                 std::size_t leaf_budget) {
  if (graph.size() == 0) return {};
  return CanonicalSearch(graph, certificate, leaf_budget).run();
}

std::string write_line_notation(
    const LabeledGraph &graph, std::span<const int> ranks,
    const std::function<std::string(int vertex)> &vertex_text,
    const std::function<std::string(int bond, int from, int to)> &bond_text) {
  return LineWriter(graph, ranks, vertex_text, bond_text).write();
}

}  // namespace mhnpath::chem
