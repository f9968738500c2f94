#ifndef DICE_CRITERIA_HPP
#define DICE_CRITERIA_HPP

#include <vector>

#include "dice/graph.hpp"

namespace dice {

struct SeparationQuery {
    NodeId x;
    NodeId y;
    std::vector<NodeId> given;
};

// True iff both edge marks at path.nodes[i] point into it
// (-> v <-, <-> v <-, -> v <->, <-> v <->).  i must be interior.
bool is_collider_on(const Path& path, int i);

/// m-separation: x and y are separated by `given` iff every path between
/// them is blocked, i.e. carries a non-collider in the set or a collider
/// with neither itself nor any descendant in the set.  Linear-time
/// reachability over (node, entering-mark) states.
bool is_m_separated(const MixedGraph& g, const SeparationQuery& q);
bool is_m_separated(const MixedGraph& g, NodeId x, NodeId y,
                    const std::vector<NodeId>& given);

// Whether a single path is m-connecting (not blocked) given the set.
// Used by the per-path criteria below and by brute-force oracles.
bool is_path_m_connecting(const MixedGraph& g, const Path& path,
                          const std::vector<NodeId>& given);

// A directed edge tail -> head is visible when some node not adjacent to
// head has an edge into tail, or a collider path into tail whose interior
// nodes are all parents of head.
bool is_visible(const MixedGraph& g, NodeId tail, NodeId head);

// The graph admits adjustment for (w, y) iff w -> y exists, is directed
// and is visible.
bool is_amenable(const MixedGraph& g, NodeId w, NodeId y);

// A path anchored at w is a back-door path iff its first edge is not a
// visible directed edge out of w.
bool is_backdoor_path(const MixedGraph& g, const Path& path, NodeId w);

/// Generalised back-door criterion: z contains no descendant of w and
/// blocks every back-door path between w and y.  Uses explicit path
/// enumeration on small graphs and mark-state reachability on larger
/// ones; the two agree (see tests).
bool satisfies_gbc(const MixedGraph& g, NodeId w, NodeId y,
                   const std::vector<NodeId>& z);

namespace detail {
// Both routes of the dual implementation, exposed for cross-checking.
bool gbc_by_paths(const MixedGraph& g, NodeId w, NodeId y,
                  const std::vector<NodeId>& z);
bool gbc_by_reachability(const MixedGraph& g, NodeId w, NodeId y,
                         const std::vector<NodeId>& z);
}  // namespace detail

// Every subset of `candidates` satisfying the generalised back-door
// criterion, smallest first and lexicographic within a size.  Throws
// GraphError::CandidateCapExceeded when |candidates| > cap.
std::vector<std::vector<NodeId>> enumerate_adjustment_sets(
    const MixedGraph& g, NodeId w, NodeId y, const std::vector<NodeId>& candidates,
    int cap = 16);

}  // namespace dice

#endif
