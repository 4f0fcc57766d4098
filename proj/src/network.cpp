#include "dampnet/network.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace dampnet {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::source: return "source";
        case NodeKind::junction: return "junction";
        case NodeKind::demand: return "demand";
    }
    return "?";
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
          std::ostringstream msg;
          msg << "network validation failed:";
          for (const auto& v : violations) msg << "\n  [" << v.code << "] " << v.message;
          return msg.str();
      }()),
      violations_(std::move(violations)) {}

TreeNetwork::TreeNetwork(std::vector<Node> nodes, std::vector<ArcSpec> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {}

void TreeNetwork::add_node(Node node) {
    invalidate();
    nodes_.push_back(std::move(node));
}

void TreeNetwork::add_arc(ArcSpec arc) {
    invalidate();
    arcs_.push_back(std::move(arc));
}

void TreeNetwork::set_damping_everywhere(const DampingShape& shape) {
    for (auto& a : arcs_) a.damping = shape;
}

std::optional<NodeIndex> TreeNetwork::find_node(const std::string& id) const {
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id == id) return i;
    }
    return std::nullopt;
}

std::optional<ArcIndex> TreeNetwork::find_arc(const std::string& id) const {
    for (ArcIndex i = 0; i < arcs_.size(); ++i) {
        if (arcs_[i].id == id) return i;
    }
    return std::nullopt;
}

std::vector<Violation> TreeNetwork::validate() {
    validated_ = false;
    std::vector<Violation> out;
    auto report = [&](std::string code, const std::string& message) {
        out.push_back({std::move(code), message});
    };

    std::map<std::string, NodeIndex> node_ids;
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
        if (!node_ids.emplace(nodes_[i].id, i).second) {
            report("duplicate_node", "node id '" + nodes_[i].id + "' declared twice");
        }
    }
    std::map<std::string, ArcIndex> arc_ids;
    for (ArcIndex i = 0; i < arcs_.size(); ++i) {
        if (!arc_ids.emplace(arcs_[i].id, i).second) {
            report("duplicate_arc", "arc id '" + arcs_[i].id + "' declared twice");
        }
    }

    const std::size_t n_nodes = nodes_.size();
    std::vector<NodeIndex> head(arcs_.size(), n_nodes), tail(arcs_.size(), n_nodes);
    std::vector<std::vector<ArcIndex>> outgoing(n_nodes);
    std::vector<std::vector<ArcIndex>> incoming(n_nodes);
    for (ArcIndex a = 0; a < arcs_.size(); ++a) {
        const auto& arc = arcs_[a];
        const auto t = node_ids.find(arc.tail);
        const auto h = node_ids.find(arc.head);
        if (t == node_ids.end()) report("unknown_node", "arc '" + arc.id + "' tail '" + arc.tail + "' is not a node");
        if (h == node_ids.end()) report("unknown_node", "arc '" + arc.id + "' head '" + arc.head + "' is not a node");
        if (t != node_ids.end() && h != node_ids.end()) {
            tail[a] = t->second;
            head[a] = h->second;
            outgoing[t->second].push_back(a);
            incoming[h->second].push_back(a);
        }
        if (!(arc.length > 0.0)) report("arc_length", "arc '" + arc.id + "' length must be > 0");
        if (!(arc.velocity.lower_bound() > 0.0)) {
            report("velocity_not_positive",
                   "arc '" + arc.id + "' velocity is not bounded away from zero (constant - sum|amplitude| <= 0)");
        }
        if (arc.damping_factor.lower_bound() < 0.0) {
            report("damping_factor_negative", "arc '" + arc.id + "' damping factor may become negative");
        }
    }

    std::vector<NodeIndex> sources;
    std::vector<NodeIndex> demands, junctions;
    for (NodeIndex i = 0; i < n_nodes; ++i) {
        const auto& node = nodes_[i];
        const auto in = incoming[i].size();
        const auto outd = outgoing[i].size();
        switch (node.kind) {
            case NodeKind::source:
                sources.push_back(i);
                if (in != 0) report("source_in_degree", "source '" + node.id + "' has ingoing arcs");
                if (outd != 1) {
                    report("source_out_degree", "source '" + node.id + "' must have exactly one outgoing arc, has " +
                                                    std::to_string(outd));
                }
                break;
            case NodeKind::junction:
                junctions.push_back(i);
                if (in != 1) {
                    report("junction_in_degree", "junction '" + node.id + "' in-degree " + std::to_string(in) +
                                                     " != 1");
                }
                if (outd == 0) report("junction_out_degree", "junction '" + node.id + "' has no outgoing arc");
                break;
            case NodeKind::demand:
                demands.push_back(i);
                if (in != 1) {
                    report("demand_in_degree", "demand node '" + node.id + "' in-degree " + std::to_string(in) +
                                                   " != 1");
                }
                if (outd != 0) report("demand_not_leaf", "demand node '" + node.id + "' has outgoing arcs");
                break;
        }
    }
    if (sources.size() != 1) {
        report("source_count", "expected exactly one source, found " + std::to_string(sources.size()));
    }
    if (demands.empty()) report("no_demand", "network has no demand node");

    // Reachability from the source. With in-degrees already checked this is
    // the remaining condition for a directed tree; anything unreachable sits
    // on a cycle or in a separate component.
    std::vector<ArcIndex> topo;
    std::vector<NodeIndex> junction_topo;
    if (sources.size() == 1) {
        std::vector<bool> seen(n_nodes, false);
        std::deque<NodeIndex> queue{sources.front()};
        seen[sources.front()] = true;
        while (!queue.empty()) {
            const NodeIndex n = queue.front();
            queue.pop_front();
            if (nodes_[n].kind == NodeKind::junction) junction_topo.push_back(n);
            for (ArcIndex a : outgoing[n]) {
                if (seen[head[a]]) {
                    report("cycle", "arc '" + arcs_[a].id + "' revisits node '" + nodes_[head[a]].id + "'");
                    continue;
                }
                seen[head[a]] = true;
                topo.push_back(a);
                queue.push_back(head[a]);
            }
        }
        for (NodeIndex i = 0; i < n_nodes; ++i) {
            if (!seen[i]) {
                report("unreachable", "node '" + nodes_[i].id + "' is not reachable from the source (cycle or disconnected)");
            }
        }
    }

    if (!out.empty()) return out;

    head_ = std::move(head);
    tail_ = std::move(tail);
    outgoing_ = std::move(outgoing);
    incoming_.assign(n_nodes, arcs_.size());
    for (NodeIndex i = 0; i < n_nodes; ++i) {
        if (!incoming[i].empty()) incoming_[i] = incoming[i].front();
    }
    root_ = outgoing_[sources.front()].front();
    demand_nodes_ = std::move(demands);
    junction_nodes_ = std::move(junction_topo);
    topo_arcs_ = std::move(topo);
    validated_ = true;
    return out;
}

void TreeNetwork::require_valid() {
    auto violations = validate();
    if (!violations.empty()) throw ValidationError(std::move(violations));
}

void TreeNetwork::ensure_validated() const {
    if (!validated_) {
        throw ValidationError("network topology queried before successful validation",
                              {{"validation_required", "call validate() first"}});
    }
}

ArcIndex TreeNetwork::root_arc() const {
    ensure_validated();
    return root_;
}

NodeIndex TreeNetwork::head_node(ArcIndex a) const {
    ensure_validated();
    return head_.at(a);
}

NodeIndex TreeNetwork::tail_node(ArcIndex a) const {
    ensure_validated();
    return tail_.at(a);
}

const std::vector<ArcIndex>& TreeNetwork::outgoing(NodeIndex n) const {
    ensure_validated();
    return outgoing_.at(n);
}

bool TreeNetwork::head_is_demand(ArcIndex a) const {
    ensure_validated();
    return nodes_[head_.at(a)].kind == NodeKind::demand;
}

const std::vector<NodeIndex>& TreeNetwork::demand_nodes() const {
    ensure_validated();
    return demand_nodes_;
}

const std::vector<NodeIndex>& TreeNetwork::junction_nodes() const {
    ensure_validated();
    return junction_nodes_;
}

ArcIndex TreeNetwork::leaf_arc(NodeIndex demand) const {
    ensure_validated();
    if (nodes_.at(demand).kind != NodeKind::demand) {
        throw DomainError("node '" + nodes_[demand].id + "' is not a demand node");
    }
    return incoming_[demand];
}

ArcIndex TreeNetwork::incoming_arc(NodeIndex node) const {
    ensure_validated();
    const ArcIndex a = incoming_.at(node);
    if (a == arcs_.size()) throw DomainError("node '" + nodes_[node].id + "' has no ingoing arc");
    return a;
}

const std::vector<ArcIndex>& TreeNetwork::topological_arcs() const {
    ensure_validated();
    return topo_arcs_;
}

std::vector<NodeIndex> TreeNetwork::topological_order() const {
    ensure_validated();
    std::vector<NodeIndex> order{tail_[root_]};
    for (ArcIndex a : topo_arcs_) order.push_back(head_[a]);
    return order;
}

std::vector<ArcPath> TreeNetwork::root_to_leaf_paths() const {
    ensure_validated();
    std::vector<ArcPath> paths;
    for (NodeIndex d : demand_nodes_) {
        ArcPath path;
        for (ArcIndex a = incoming_[d]; a != arcs_.size(); a = incoming_[tail_[a]]) path.push_back(a);
        paths.emplace_back(path.rbegin(), path.rend());
    }
    return paths;
}

}  // namespace dampnet
