#include "dice/criteria.hpp"

#include <algorithm>
#include <deque>

namespace dice {

namespace {

std::vector<bool> member_flags(int p, const std::vector<NodeId>& set) {
    std::vector<bool> flags(p, false);
    for (NodeId v : set) {
        if (v < 0 || v >= p)
            throw GraphError(GraphError::Code::UnknownNode,
                             "set member " + std::to_string(v) + " out of range");
        flags[v] = true;
    }
    return flags;
}

// Nodes that are in z or have a descendant in z (ancestors of z, reflexive).
std::vector<bool> anz_flags(const MixedGraph& g, const std::vector<bool>& in_z) {
    const int p = g.node_count();
    std::vector<bool> anz(p, false);
    std::deque<int> stack;
    for (int v = 0; v < p; ++v)
        if (in_z[v]) {
            anz[v] = true;
            stack.push_back(v);
        }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : g.parents(v))
            if (!anz[u]) {
                anz[u] = true;
                stack.push_back(u);
            }
    }
    return anz;
}

// Mark-state reachability: can y be reached from x along an m-connecting
// walk given z?  A connecting walk exists iff a connecting path does, so
// this decides m-separation.
bool m_connected_walk(const MixedGraph& g, NodeId x, NodeId y,
                      const std::vector<bool>& in_z) {
    const int p = g.node_count();
    std::vector<bool> anz = anz_flags(g, in_z);

    // state = node * 2 + (arrived with an arrowhead at node ? 1 : 0)
    std::vector<bool> seen(static_cast<std::size_t>(p) * 2, false);
    std::deque<int> queue;
    for (NodeId u : g.adjacent(x)) {
        Edge e = g.edge_between(x, u);
        if (u == y) return true;
        int s = u * 2 + (e.mark_at(u) == Mark::Arrow ? 1 : 0);
        if (!seen[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        NodeId v = s / 2;
        bool arrow_in = s % 2 == 1;
        for (NodeId u : g.adjacent(v)) {
            Edge e = g.edge_between(v, u);
            bool collider = arrow_in && e.mark_at(v) == Mark::Arrow;
            bool pass = collider ? anz[v] : !in_z[v];
            if (!pass) continue;
            if (u == y) return true;
            int t = u * 2 + (e.mark_at(u) == Mark::Arrow ? 1 : 0);
            if (!seen[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    return false;
}

void validate_query(const MixedGraph& g, NodeId x, NodeId y,
                    const std::vector<NodeId>& given) {
    g.adjacent(x);  // bounds check
    g.adjacent(y);
    if (x == y)
        throw GraphError(GraphError::Code::OverlapError, "query endpoints must differ");
    for (NodeId v : given)
        if (v == x || v == y)
            throw GraphError(GraphError::Code::OverlapError,
                             "conditioning set contains a query endpoint");
}

}  // namespace

bool is_collider_on(const Path& path, int i) {
    if (i <= 0 || i >= static_cast<int>(path.nodes.size()) - 1)
        throw GraphError(GraphError::Code::EndpointPosition,
                         "collider test only applies to interior path positions");
    NodeId v = path.nodes[i];
    return path.steps[i - 1].mark_at(v) == Mark::Arrow &&
           path.steps[i].mark_at(v) == Mark::Arrow;
}

bool is_m_separated(const MixedGraph& g, NodeId x, NodeId y,
                    const std::vector<NodeId>& given) {
    validate_query(g, x, y, given);
    std::vector<bool> in_z = member_flags(g.node_count(), given);
    return !m_connected_walk(g, x, y, in_z);
}

bool is_m_separated(const MixedGraph& g, const SeparationQuery& q) {
    return is_m_separated(g, q.x, q.y, q.given);
}

bool is_path_m_connecting(const MixedGraph& g, const Path& path,
                          const std::vector<NodeId>& given) {
    std::vector<bool> in_z = member_flags(g.node_count(), given);
    for (int i = 1; i + 1 < static_cast<int>(path.nodes.size()); ++i) {
        NodeId v = path.nodes[i];
        if (is_collider_on(path, i)) {
            // open only when the collider or one of its descendants is conditioned on
            bool opened = in_z[v];
            for (NodeId d : g.descendants(v)) opened = opened || in_z[d];
            if (!opened) return false;
        } else {
            if (in_z[v]) return false;
        }
    }
    return true;
}

bool is_visible(const MixedGraph& g, NodeId tail, NodeId head) {
    if (!g.has_directed_edge(tail, head))
        throw GraphError(GraphError::Code::MissingEdge,
                         "visibility is defined for an existing directed edge");
    const int p = g.node_count();
    std::vector<bool> near_head(p, false);
    near_head[head] = true;
    for (NodeId v : g.adjacent(head)) near_head[v] = true;

    // Direct witness: an edge into `tail` from a node not adjacent to `head`.
    for (NodeId k : g.adjacent(tail))
        if (!near_head[k] && g.mark_at(k, tail) == Mark::Arrow) return true;

    // Collider-path witness: chase bidirected edges from `tail` through
    // parents of `head`; any witness edge into a reached parent works.
    std::vector<bool> is_parent(p, false);
    for (NodeId v : g.parents(head)) is_parent[v] = true;
    std::vector<bool> reached(p, false);
    reached[tail] = true;
    std::deque<NodeId> stack{tail};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId m : g.spouses(v)) {
            if (reached[m] || !is_parent[m]) continue;
            reached[m] = true;
            stack.push_back(m);
            for (NodeId k : g.adjacent(m))
                if (!near_head[k] && g.mark_at(k, m) == Mark::Arrow) return true;
        }
    }
    return false;
}

bool is_amenable(const MixedGraph& g, NodeId w, NodeId y) {
    g.adjacent(w);
    g.adjacent(y);
    if (!g.has_directed_edge(w, y)) return false;
    return is_visible(g, w, y);
}

bool is_backdoor_path(const MixedGraph& g, const Path& path, NodeId w) {
    if (path.nodes.empty() || path.nodes.front() != w || path.steps.empty())
        throw GraphError(GraphError::Code::PathNotAnchored,
                         "path must start at the treatment node");
    const Edge& first = path.steps.front();
    bool directed_out = first.kind == EdgeKind::Directed && first.tail == w;
    if (directed_out && is_visible(g, w, first.head)) return false;
    return true;
}

namespace detail {

bool gbc_by_paths(const MixedGraph& g, NodeId w, NodeId y,
                  const std::vector<NodeId>& z) {
    validate_query(g, w, y, z);
    for (NodeId v : z)
        if (g.is_ancestor(w, v)) return false;  // descendant of w in z
    for (const Path& path : g.enumerate_paths(w, y)) {
        if (!is_backdoor_path(g, path, w)) continue;
        if (is_path_m_connecting(g, path, z)) return false;
    }
    return true;
}

bool gbc_by_reachability(const MixedGraph& g, NodeId w, NodeId y,
                         const std::vector<NodeId>& z) {
    validate_query(g, w, y, z);
    for (NodeId v : z)
        if (g.is_ancestor(w, v)) return false;
    // With no descendant of w conditioned on, back-door blocking reduces to
    // plain m-separation in the graph minus w's visible outgoing directed
    // edges: a simple w-y path can touch those edges only as its first edge,
    // and their removal leaves every ancestor set of z unchanged (a directed
    // path into z cannot pass through w once condition (1) holds).
    std::vector<Edge> kept;
    for (const Edge& e : g.edges()) {
        if (e.kind == EdgeKind::Directed && e.tail == w && is_visible(g, w, e.head))
            continue;
        kept.push_back(e);
    }
    MixedGraph pruned = MixedGraph::build_indexed(g.labels(), std::move(kept));
    std::vector<bool> in_z = member_flags(g.node_count(), z);
    return !m_connected_walk(pruned, w, y, in_z);
}

}  // namespace detail

bool satisfies_gbc(const MixedGraph& g, NodeId w, NodeId y,
                   const std::vector<NodeId>& z) {
    // Path enumeration mirrors the definition but is exponential; switch to
    // reachability beyond small graphs.
    constexpr int kPathRouteMaxNodes = 14;
    if (g.node_count() <= kPathRouteMaxNodes) return detail::gbc_by_paths(g, w, y, z);
    return detail::gbc_by_reachability(g, w, y, z);
}

std::vector<std::vector<NodeId>> enumerate_adjustment_sets(
    const MixedGraph& g, NodeId w, NodeId y, const std::vector<NodeId>& candidates,
    int cap) {
    std::vector<NodeId> cand = candidates;
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (static_cast<int>(cand.size()) > cap)
        throw GraphError(GraphError::Code::CandidateCapExceeded,
                         std::to_string(cand.size()) + " candidates exceed cap of " +
                             std::to_string(cap));
    for (NodeId v : cand)
        if (v == w || v == y)
            throw GraphError(GraphError::Code::OverlapError,
                             "candidates must exclude treatment and outcome");

    const int k = static_cast<int>(cand.size());
    std::vector<std::vector<NodeId>> subsets;
    subsets.reserve(std::size_t{1} << k);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
        std::vector<NodeId> s;
        for (int b = 0; b < k; ++b)
            if (mask & (std::uint32_t{1} << b)) s.push_back(cand[b]);
        subsets.push_back(std::move(s));
    }
    std::sort(subsets.begin(), subsets.end(),
              [](const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });

    std::vector<std::vector<NodeId>> out;
    for (auto& s : subsets)
        if (satisfies_gbc(g, w, y, s)) out.push_back(std::move(s));
    return out;
}

}  // namespace dice
