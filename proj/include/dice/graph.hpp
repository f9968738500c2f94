#ifndef DICE_GRAPH_HPP
#define DICE_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dice {

using NodeId = int;

enum class EdgeKind { Directed, Bidirected };

// Edge endpoint mark as seen from one node: a directed edge a -> b has a
// Tail mark at a and an Arrow mark at b; a bidirected edge has Arrow marks
// at both ends.
enum class Mark : std::uint8_t { None, Tail, Arrow };

struct Edge {
    NodeId tail;
    NodeId head;
    EdgeKind kind;

    bool operator==(const Edge&) const = default;

    // Mark this edge puts at node v (v must be an endpoint).
    Mark mark_at(NodeId v) const {
        if (kind == EdgeKind::Bidirected) return Mark::Arrow;
        return v == head ? Mark::Arrow : Mark::Tail;
    }
    NodeId other(NodeId v) const { return v == tail ? head : tail; }
};

class GraphError : public std::runtime_error {
public:
    enum class Code {
        DuplicateLabel,
        UnknownEndpoint,
        UnknownNode,
        DirectedCycle,
        AlmostDirectedCycle,
        ParallelEdge,
        MissingTreatmentEdge,
        MissingEdge,
        EndpointPosition,
        PathNotAnchored,
        OverlapError,
        CandidateCapExceeded,
        ParseError,
    };

    GraphError(Code code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// A simple path: distinct nodes, one edge per consecutive pair.  steps[i]
// is the edge between nodes[i] and nodes[i+1].
struct Path {
    std::vector<NodeId> nodes;
    std::vector<Edge> steps;

    std::size_t length() const { return steps.size(); }
    bool operator==(const Path&) const = default;
};

struct EdgeSpec {
    std::string tail;
    std::string head;
    EdgeKind kind;
};

/// Mixed graph with directed and bidirected edges, validated at
/// construction to be ancestral: no directed cycles and no almost directed
/// cycles (Vi <-> Vj with a directed path from Vj to Vi).  Instances are
/// immutable after construction and safe to share across threads.
class MixedGraph {
public:
    // Builds and validates a graph from node labels and labelled edges.
    // Throws GraphError on duplicate labels, unknown endpoints, parallel
    // edges, directed cycles or almost directed cycles.
    static MixedGraph build(const std::vector<std::string>& labels,
                            const std::vector<EdgeSpec>& edges);

    // Same, with endpoints given as node indices into `labels`.
    static MixedGraph build_indexed(const std::vector<std::string>& labels,
                                    std::vector<Edge> edges);

    int node_count() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(NodeId v) const { return labels_.at(v); }
    NodeId node_index(const std::string& label) const;  // GraphError::UnknownNode
    bool has_node(const std::string& label) const;

    const std::vector<Edge>& edges() const { return edges_; }
    bool has_edge(NodeId a, NodeId b) const;           // any kind, any direction
    bool has_directed_edge(NodeId tail, NodeId head) const;
    bool has_bidirected_edge(NodeId a, NodeId b) const;
    // Mark at b of the edge between a and b; Mark::None when not adjacent.
    Mark mark_at(NodeId a, NodeId b) const;
    // The unique edge between a and b; GraphError::MissingEdge when absent.
    Edge edge_between(NodeId a, NodeId b) const;

    const std::vector<NodeId>& parents(NodeId v) const { return check(v), pa_[v]; }
    const std::vector<NodeId>& children(NodeId v) const { return check(v), ch_[v]; }
    const std::vector<NodeId>& spouses(NodeId v) const { return check(v), sp_[v]; }
    const std::vector<NodeId>& adjacent(NodeId v) const { return check(v), adj_[v]; }
    // Strict ancestors/descendants over directed paths (v itself excluded).
    const std::vector<NodeId>& ancestors(NodeId v) const { return check(v), an_[v]; }
    const std::vector<NodeId>& descendants(NodeId v) const { return check(v), de_[v]; }
    bool is_ancestor(NodeId a, NodeId b) const;  // directed path a -> ... -> b

    // Copy of this graph with the directed edge w -> y removed.
    // GraphError::MissingTreatmentEdge when that edge is absent.
    MixedGraph manipulate(NodeId w, NodeId y) const;

    // All simple paths between a and b with at most max_len edges
    // (max_len < 0 means no cap beyond simplicity), ordered shortest first
    // and lexicographically by node index within a length.
    std::vector<Path> enumerate_paths(NodeId a, NodeId b, int max_len = -1) const;

    // Text format: `nodes: a,b,c` header, one `a -> b` / `a <-> b` line per
    // edge, `#` comments.  to_text is canonical (edges sorted), so
    // parse/serialize round-trips are byte-stable.
    static MixedGraph from_text(std::istream& in);
    static MixedGraph from_text(const std::string& text);
    std::string to_text() const;

    bool operator==(const MixedGraph& other) const {
        return labels_ == other.labels_ && edges_ == other.edges_;
    }

private:
    MixedGraph() = default;
    void check(NodeId v) const;
    void build_indices();

    std::vector<std::string> labels_;
    std::vector<Edge> edges_;  // canonical order; bidirected stored tail < head
    std::vector<std::vector<NodeId>> pa_, ch_, sp_, adj_, an_, de_;
    std::vector<Mark> marks_;  // p*p, marks_[a*p+b] = mark at b of edge a-b
};

// Maximal ancestral graph over the observed nodes of a DAG with hidden
// nodes: observed a,b are adjacent iff an inducing path joins them (every
// non-endpoint hidden or a collider, every collider an ancestor of a or b),
// directed a -> b when a is an ancestor of b and bidirected otherwise.
// `hidden` has one flag per node of `dag`; the DAG must contain no
// bidirected edges.
MixedGraph latent_project(const MixedGraph& dag, const std::vector<bool>& hidden);

}  // namespace dice

#endif
