#include "dice/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <sstream>

namespace dice {

namespace {

bool edge_less(const Edge& a, const Edge& b) {
    if (a.tail != b.tail) return a.tail < b.tail;
    if (a.head != b.head) return a.head < b.head;
    return a.kind < b.kind;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void MixedGraph::check(NodeId v) const {
    if (v < 0 || v >= node_count())
        throw GraphError(GraphError::Code::UnknownNode,
                         "node index " + std::to_string(v) + " out of range");
}

NodeId MixedGraph::node_index(const std::string& label) const {
    for (int i = 0; i < node_count(); ++i)
        if (labels_[i] == label) return i;
    throw GraphError(GraphError::Code::UnknownNode, "unknown node '" + label + "'");
}

bool MixedGraph::has_node(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

MixedGraph MixedGraph::build(const std::vector<std::string>& labels,
                             const std::vector<EdgeSpec>& edges) {
    std::vector<Edge> indexed;
    indexed.reserve(edges.size());
    auto find = [&](const std::string& name) -> NodeId {
        auto it = std::find(labels.begin(), labels.end(), name);
        if (it == labels.end())
            throw GraphError(GraphError::Code::UnknownEndpoint,
                             "edge endpoint '" + name + "' is not a declared node");
        return static_cast<NodeId>(it - labels.begin());
    };
    for (const auto& e : edges)
        indexed.push_back({find(e.tail), find(e.head), e.kind});
    return build_indexed(labels, std::move(indexed));
}

MixedGraph MixedGraph::build_indexed(const std::vector<std::string>& labels,
                                     std::vector<Edge> edges) {
    MixedGraph g;
    for (const auto& l : labels) {
        if (std::count(labels.begin(), labels.end(), l) > 1)
            throw GraphError(GraphError::Code::DuplicateLabel,
                             "duplicate node label '" + l + "'");
    }
    g.labels_ = labels;
    const int p = g.node_count();

    for (auto& e : edges) {
        if (e.tail < 0 || e.tail >= p || e.head < 0 || e.head >= p)
            throw GraphError(GraphError::Code::UnknownEndpoint, "edge endpoint out of range");
        if (e.tail == e.head)
            throw GraphError(GraphError::Code::DirectedCycle,
                             "self loop on '" + labels[e.tail] + "'");
        if (e.kind == EdgeKind::Bidirected && e.tail > e.head)
            std::swap(e.tail, e.head);  // canonical orientation for bidirected
    }
    std::sort(edges.begin(), edges.end(), edge_less);
    for (std::size_t i = 1; i < edges.size(); ++i) {
        auto lo = std::minmax(edges[i].tail, edges[i].head);
        auto prev = std::minmax(edges[i - 1].tail, edges[i - 1].head);
        if (lo == prev)
            throw GraphError(GraphError::Code::ParallelEdge,
                             "more than one edge between '" + labels[edges[i].tail] +
                                 "' and '" + labels[edges[i].head] + "'");
    }
    g.edges_ = std::move(edges);
    g.build_indices();
    return g;
}

void MixedGraph::build_indices() {
    const int p = node_count();
    pa_.assign(p, {});
    ch_.assign(p, {});
    sp_.assign(p, {});
    adj_.assign(p, {});
    marks_.assign(static_cast<std::size_t>(p) * p, Mark::None);

    for (const auto& e : edges_) {
        adj_[e.tail].push_back(e.head);
        adj_[e.head].push_back(e.tail);
        if (e.kind == EdgeKind::Directed) {
            pa_[e.head].push_back(e.tail);
            ch_[e.tail].push_back(e.head);
        } else {
            sp_[e.tail].push_back(e.head);
            sp_[e.head].push_back(e.tail);
        }
        marks_[static_cast<std::size_t>(e.tail) * p + e.head] = e.mark_at(e.head);
        marks_[static_cast<std::size_t>(e.head) * p + e.tail] = e.mark_at(e.tail);
    }
    for (auto* lists : {&pa_, &ch_, &sp_, &adj_})
        for (auto& l : *lists) std::sort(l.begin(), l.end());

    // Directed-cycle check: Kahn's algorithm over the directed sub-graph.
    std::vector<int> indeg(p, 0);
    for (int v = 0; v < p; ++v) indeg[v] = static_cast<int>(pa_[v].size());
    std::deque<int> ready;
    for (int v = 0; v < p; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    int done = 0;
    while (!ready.empty()) {
        int v = ready.front();
        ready.pop_front();
        ++done;
        for (int c : ch_[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (done != p)
        throw GraphError(GraphError::Code::DirectedCycle, "graph contains a directed cycle");

    // Strict ancestor sets by reverse reachability over directed edges.
    an_.assign(p, {});
    de_.assign(p, {});
    for (int v = 0; v < p; ++v) {
        std::vector<bool> seen(p, false);
        std::deque<int> stack(pa_[v].begin(), pa_[v].end());
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            if (seen[u]) continue;
            seen[u] = true;
            for (int w : pa_[u]) stack.push_back(w);
        }
        for (int u = 0; u < p; ++u)
            if (seen[u] && u != v) an_[v].push_back(u);
    }
    for (int v = 0; v < p; ++v)
        for (int a : an_[v]) de_[a].push_back(v);
    for (auto& l : de_) std::sort(l.begin(), l.end());

    for (const auto& e : edges_) {
        if (e.kind != EdgeKind::Bidirected) continue;
        if (is_ancestor(e.tail, e.head) || is_ancestor(e.head, e.tail))
            throw GraphError(GraphError::Code::AlmostDirectedCycle,
                             "bidirected edge '" + labels_[e.tail] + "' <-> '" +
                                 labels_[e.head] + "' closes an almost directed cycle");
    }
}

bool MixedGraph::is_ancestor(NodeId a, NodeId b) const {
    check(a), check(b);
    return std::binary_search(an_[b].begin(), an_[b].end(), a);
}

bool MixedGraph::has_edge(NodeId a, NodeId b) const {
    check(a), check(b);
    return marks_[static_cast<std::size_t>(a) * node_count() + b] != Mark::None;
}

Mark MixedGraph::mark_at(NodeId a, NodeId b) const {
    check(a), check(b);
    return marks_[static_cast<std::size_t>(a) * node_count() + b];
}

bool MixedGraph::has_directed_edge(NodeId tail, NodeId head) const {
    return has_edge(tail, head) && mark_at(tail, head) == Mark::Arrow &&
           mark_at(head, tail) == Mark::Tail;
}

bool MixedGraph::has_bidirected_edge(NodeId a, NodeId b) const {
    return has_edge(a, b) && mark_at(a, b) == Mark::Arrow && mark_at(b, a) == Mark::Arrow;
}

Edge MixedGraph::edge_between(NodeId a, NodeId b) const {
    check(a), check(b);
    for (const auto& e : edges_)
        if ((e.tail == a && e.head == b) || (e.tail == b && e.head == a)) return e;
    throw GraphError(GraphError::Code::MissingEdge,
                     "no edge between '" + labels_[a] + "' and '" + labels_[b] + "'");
}

MixedGraph MixedGraph::manipulate(NodeId w, NodeId y) const {
    check(w), check(y);
    if (!has_directed_edge(w, y))
        throw GraphError(GraphError::Code::MissingTreatmentEdge,
                         "no directed edge '" + labels_[w] + "' -> '" + labels_[y] + "'");
    std::vector<Edge> kept;
    kept.reserve(edges_.size() - 1);
    for (const auto& e : edges_)
        if (!(e.kind == EdgeKind::Directed && e.tail == w && e.head == y))
            kept.push_back(e);
    return build_indexed(labels_, std::move(kept));
}

std::vector<Path> MixedGraph::enumerate_paths(NodeId a, NodeId b, int max_len) const {
    check(a), check(b);
    if (a == b)
        throw GraphError(GraphError::Code::OverlapError, "path endpoints must differ");
    const int cap = max_len < 0 ? node_count() : max_len;

    std::vector<Path> out;
    std::vector<bool> on_path(node_count(), false);
    Path cur;
    cur.nodes.push_back(a);
    on_path[a] = true;

    auto dfs = [&](auto&& self, NodeId v) -> void {
        if (static_cast<int>(cur.steps.size()) >= cap) return;
        for (NodeId u : adj_[v]) {
            if (on_path[u]) continue;
            Edge e = edge_between(v, u);
            cur.nodes.push_back(u);
            cur.steps.push_back(e);
            if (u == b) {
                out.push_back(cur);
            } else {
                on_path[u] = true;
                self(self, u);
                on_path[u] = false;
            }
            cur.nodes.pop_back();
            cur.steps.pop_back();
        }
    };
    dfs(dfs, a);

    std::sort(out.begin(), out.end(), [](const Path& x, const Path& y) {
        if (x.nodes.size() != y.nodes.size()) return x.nodes.size() < y.nodes.size();
        return x.nodes < y.nodes;
    });
    return out;
}

MixedGraph MixedGraph::from_text(const std::string& text) {
    std::istringstream in(text);
    return from_text(in);
}

MixedGraph MixedGraph::from_text(std::istream& in) {
    std::vector<std::string> labels;
    std::vector<EdgeSpec> edges;
    bool have_nodes = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (!have_nodes) {
            if (s.rfind("nodes:", 0) != 0)
                throw GraphError(GraphError::Code::ParseError,
                                 "line " + std::to_string(lineno) +
                                     ": expected 'nodes:' header");
            std::string rest = s.substr(6);
            std::stringstream ss(rest);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) labels.push_back(tok);
            }
            have_nodes = true;
            continue;
        }
        auto bidir = s.find("<->");
        auto dir = s.find("->");
        if (bidir != std::string::npos) {
            edges.push_back({trim(s.substr(0, bidir)), trim(s.substr(bidir + 3)),
                             EdgeKind::Bidirected});
        } else if (dir != std::string::npos) {
            edges.push_back(
                {trim(s.substr(0, dir)), trim(s.substr(dir + 2)), EdgeKind::Directed});
        } else {
            throw GraphError(GraphError::Code::ParseError,
                             "line " + std::to_string(lineno) + ": expected an edge");
        }
    }
    if (!have_nodes)
        throw GraphError(GraphError::Code::ParseError, "missing 'nodes:' header");
    return build(labels, edges);
}

std::string MixedGraph::to_text() const {
    std::string out = "nodes: ";
    for (int i = 0; i < node_count(); ++i) {
        if (i) out += ',';
        out += labels_[i];
    }
    out += '\n';
    for (const auto& e : edges_) {  // edges_ is canonically sorted
        out += labels_[e.tail];
        out += e.kind == EdgeKind::Directed ? " -> " : " <-> ";
        out += labels_[e.head];
        out += '\n';
    }
    return out;
}

namespace {

// DFS for an inducing path between observed a and b: every non-endpoint
// node is hidden or a collider, every collider an ancestor of a or b.
bool inducing_dfs(const MixedGraph& g, const std::vector<bool>& hidden, NodeId a,
                  NodeId b, NodeId v, const Edge* in_edge, std::vector<bool>& visited) {
    for (NodeId u : g.adjacent(v)) {
        if (visited[u]) continue;
        Edge e = g.edge_between(v, u);
        if (in_edge != nullptr) {
            bool collider =
                in_edge->mark_at(v) == Mark::Arrow && e.mark_at(v) == Mark::Arrow;
            bool ok = collider ? (g.is_ancestor(v, a) || g.is_ancestor(v, b))
                               : hidden[v];
            if (!ok) continue;
        }
        if (u == b) return true;
        visited[u] = true;
        if (inducing_dfs(g, hidden, a, b, u, &e, visited)) return true;
        visited[u] = false;
    }
    return false;
}

}  // namespace

MixedGraph latent_project(const MixedGraph& dag, const std::vector<bool>& hidden) {
    if (hidden.size() != static_cast<std::size_t>(dag.node_count()))
        throw std::invalid_argument("hidden flag count does not match node count");
    for (const auto& e : dag.edges())
        if (e.kind == EdgeKind::Bidirected)
            throw std::invalid_argument("latent projection input must be a DAG");

    std::vector<NodeId> observed;
    std::vector<std::string> labels;
    for (int v = 0; v < dag.node_count(); ++v) {
        if (!hidden[v]) {
            observed.push_back(v);
            labels.push_back(dag.label(v));
        }
    }

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        for (std::size_t j = i + 1; j < observed.size(); ++j) {
            NodeId a = observed[i], b = observed[j];
            std::vector<bool> visited(dag.node_count(), false);
            visited[a] = true;
            if (!inducing_dfs(dag, hidden, a, b, a, nullptr, visited)) continue;
            int ia = static_cast<int>(i), ib = static_cast<int>(j);
            if (dag.is_ancestor(a, b))
                edges.push_back({ia, ib, EdgeKind::Directed});
            else if (dag.is_ancestor(b, a))
                edges.push_back({ib, ia, EdgeKind::Directed});
            else
                edges.push_back({ia, ib, EdgeKind::Bidirected});
        }
    }
    return MixedGraph::build_indexed(labels, std::move(edges));
}

}  // namespace dice
