#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dampnet/damping.hpp"
#include "dampnet/errors.hpp"
#include "dampnet/timefunc.hpp"

namespace dampnet {

enum class NodeKind { source, junction, demand };

const char* to_string(NodeKind kind);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::junction;

    bool operator==(const Node&) const = default;
};

/// One directed arc with linear flux λ(t)·z and damping μ(t)·ĝ(z).
struct ArcSpec {
    std::string id;
    std::string tail;
    std::string head;
    double length = 1.0;
    TimeFunction velocity{1.0};
    TimeFunction damping_factor{0.0};
    DampingShape damping;

    bool operator==(const ArcSpec&) const = default;
};

using ArcIndex = std::size_t;
using NodeIndex = std::size_t;
using ArcPath = std::vector<ArcIndex>;

/// Directed tree: one source feeding one root arc, junctions with exactly one
/// ingoing arc, demand nodes as leaves.
///
/// Topology queries are only available after a successful validate(); any
/// mutation drops the validated state again.
class TreeNetwork {
public:
    TreeNetwork() = default;
    TreeNetwork(std::vector<Node> nodes, std::vector<ArcSpec> arcs);

    void add_node(Node node);
    void add_arc(ArcSpec arc);

    /// Replace the damping shape on every arc.
    void set_damping_everywhere(const DampingShape& shape);

    /// All violated structural invariants; marks the network validated when
    /// the list is empty.
    std::vector<Violation> validate();
    /// validate(), throwing ValidationError on any violation.
    void require_valid();
    bool is_validated() const { return validated_; }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<ArcSpec>& arcs() const { return arcs_; }
    const ArcSpec& arc(ArcIndex a) const { return arcs_.at(a); }
    const Node& node(NodeIndex n) const { return nodes_.at(n); }
    std::optional<NodeIndex> find_node(const std::string& id) const;
    std::optional<ArcIndex> find_arc(const std::string& id) const;

    // Validated-only queries. Throw ValidationError("validation required") otherwise.
    ArcIndex root_arc() const;
    NodeIndex head_node(ArcIndex a) const;
    NodeIndex tail_node(ArcIndex a) const;
    const std::vector<ArcIndex>& outgoing(NodeIndex n) const;
    bool head_is_demand(ArcIndex a) const;
    /// Demand nodes in declaration order.
    const std::vector<NodeIndex>& demand_nodes() const;
    /// Junction nodes in topological order.
    const std::vector<NodeIndex>& junction_nodes() const;
    /// Arc feeding a demand node.
    ArcIndex leaf_arc(NodeIndex demand) const;
    /// The single ingoing arc of a junction or demand node.
    ArcIndex incoming_arc(NodeIndex node) const;
    /// Arcs ordered so every arc comes after its parent.
    const std::vector<ArcIndex>& topological_arcs() const;
    std::vector<NodeIndex> topological_order() const;
    /// One arc sequence per demand node (same order as demand_nodes()).
    std::vector<ArcPath> root_to_leaf_paths() const;

private:
    void ensure_validated() const;
    void invalidate() { validated_ = false; }

    std::vector<Node> nodes_;
    std::vector<ArcSpec> arcs_;

    bool validated_ = false;
    ArcIndex root_ = 0;
    std::vector<NodeIndex> head_, tail_;
    std::vector<std::vector<ArcIndex>> outgoing_;
    std::vector<ArcIndex> incoming_;  // per node, arcs_.size() if none
    std::vector<NodeIndex> demand_nodes_, junction_nodes_;
    std::vector<ArcIndex> topo_arcs_;
};

}  // namespace dampnet
