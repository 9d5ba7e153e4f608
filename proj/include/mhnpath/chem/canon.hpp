//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CHEM_CANON_HPP
#define MHNPATH_CHEM_CANON_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mhnpath::chem {

/// Minimal labeled graph used for canonical ranking. Both molecules and
/// template pattern graphs are lowered to this form.
struct LabeledGraph {
  struct Edge {
    int neighbor;
    int bond;
    int label;
  };
  /// Per-vertex invariant; only the relative order of labels matters.
  std::vector<std::string> vertex_labels;
  std::vector<std::vector<Edge>> adjacency;

  int size() const { return static_cast<int>(vertex_labels.size()); }
};

/// Maps a total vertex order (rank per vertex, a permutation of 0..n-1) to
/// a string that describes the graph written in that order.
using Certificate = std::function<std::string(std::span<const int> ranks)>;

/// Canonical vertex ranks: iterative neighborhood refinement, then
/// individualization of the first non-singleton cell over every member
/// (twins pruned). Among all leaves the one with the smallest certificate is
/// returned, so the result is invariant under input vertex permutation as
/// long as the search stays within `leaf_budget` leaves.
std::vector<int> canonical_ranks(const LabeledGraph &graph,
                                 const Certificate &certificate,
                                 std::size_t leaf_budget = 4096);

/// Writes a SMILES-style depth-first line notation following `ranks`: each
/// component starts at its lowest-ranked vertex, neighbors are visited in
/// rank order, ring closures take the lowest free digit, and all but the
/// last child are parenthesized. Components are joined by '.'.
std::string write_line_notation(
    const LabeledGraph &graph, std::span<const int> ranks,
    const std::function<std::string(int vertex)> &vertex_text,
    const std::function<std::string(int bond, int from, int to)> &bond_text);

}  // namespace mhnpath::chem

#endif  // MHNPATH_CHEM_CANON_HPP
