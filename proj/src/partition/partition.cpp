#include <algorithm>
#include <cmath>
#include <map>

#include "codegraph/error.hpp"
#include "codegraph/partition.hpp"

namespace codegraph::partition {

using sast::EdgeKind;
using sast::NodeId;
using sast::SAst;
using sast::SAstEdge;

namespace {

std::vector<std::vector<NodeId>> tree_children(const SAst& g) {
    std::vector<std::vector<NodeId>> children(g.nodes.size());
    for (const SAstEdge& e : g.edges)
        if (e.kind == EdgeKind::AstChild || e.kind == EdgeKind::Subtoken)
            children[e.src].push_back(e.dst);
    return children;
}

std::vector<NodeId> collect_subtree(const std::vector<std::vector<NodeId>>& children,
                                    NodeId root) {
    std::vector<NodeId> nodes;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        nodes.push_back(id);
        for (NodeId c : children[id]) stack.push_back(c);
    }
    return nodes;
}

struct Occurrence {
    std::uint32_t pos;
    NodeId node;
};

} // namespace

PartitionResult partition(const SAst& g, const PartitionConfig& cfg) {
    if (cfg.lambda < 1) throw FormatError("<config>", 0, "lambda must be at least 1");
    if (g.statement_roots.empty()) throw EmptyBodyError("nothing to partition: no statements");

    const auto children = tree_children(g);
    std::vector<std::vector<NodeId>> stmt_nodes;
    stmt_nodes.reserve(g.statement_roots.size());
    for (NodeId root : g.statement_roots) stmt_nodes.push_back(collect_subtree(children, root));

    // Group statements: close once the accumulated subtree size reaches
    // lambda, or at the end of the list.
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> current;
    std::size_t nodes_sum = 0;
    for (std::size_t i = 0; i < stmt_nodes.size(); ++i) {
        current.push_back(i);
        nodes_sum += stmt_nodes[i].size();
        if (nodes_sum >= cfg.lambda || i + 1 == stmt_nodes.size()) {
            groups.push_back(std::move(current));
            current.clear();
            nodes_sum = 0;
        }
    }

    // An undersized tail (under half of lambda, counted over its own
    // statements) joins the previous group.
    if (groups.size() > 1) {
        std::size_t tail = 0;
        for (std::size_t i : groups.back()) tail += stmt_nodes[i].size();
        if (2 * tail < cfg.lambda) {
            auto last = std::move(groups.back());
            groups.pop_back();
            groups.back().insert(groups.back().end(), last.begin(), last.end());
        }
    }

    // Variable occurrences seen in earlier subgraphs, per spelling.
    std::map<std::string, std::vector<Occurrence>> earlier;

    PartitionResult result;
    result.lambda_used = cfg.lambda;
    result.subgraphs.reserve(groups.size());

    std::vector<char> in_graph(g.nodes.size(), 0);
    std::vector<char> is_carried(g.nodes.size(), 0);

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        Subgraph sub;
        sub.order_index = gi;
        for (std::size_t si : groups[gi]) {
            sub.statement_roots.push_back(g.statement_roots[si]);
            sub.node_ids.insert(sub.node_ids.end(), stmt_nodes[si].begin(), stmt_nodes[si].end());
        }
        std::sort(sub.node_ids.begin(), sub.node_ids.end());
        sub.native_count = sub.node_ids.size();

        // Import, per variable this subgraph mentions, the closest earlier
        // occurrence: greatest source position still before the subgraph's
        // first own occurrence of that variable.
        std::map<std::string, std::uint32_t> first_native;
        for (NodeId id : sub.node_ids) {
            const auto& name = g.nodes[id].variable_name;
            if (!name) continue;
            const auto [it, fresh] = first_native.try_emplace(*name, g.nodes[id].source_pos);
            if (!fresh) it->second = std::min(it->second, g.nodes[id].source_pos);
        }
        for (const auto& [name, first_pos] : first_native) {
            const auto it = earlier.find(name);
            if (it == earlier.end()) continue;
            const Occurrence* best = nullptr;
            for (const Occurrence& occ : it->second)
                if (occ.pos < first_pos && (!best || occ.pos > best->pos)) best = &occ;
            if (best) sub.carried.push_back(best->node);
        }
        std::sort(sub.carried.begin(), sub.carried.end());

        for (NodeId id : sub.node_ids) in_graph[id] = 1;
        for (NodeId id : sub.carried) {
            in_graph[id] = 1;
            is_carried[id] = 1;
        }

        // Restore every edge that stays inside the subgraph. Carried nodes
        // take part in variable chains only, never in the leaf chain.
        for (const SAstEdge& e : g.edges) {
            if (!in_graph[e.src] || !in_graph[e.dst]) continue;
            if (e.kind == EdgeKind::NextLeaf && (is_carried[e.src] || is_carried[e.dst]))
                continue;
            sub.edges.push_back(e);
        }

        for (NodeId id : sub.node_ids) in_graph[id] = 0;
        for (NodeId id : sub.carried) {
            in_graph[id] = 0;
            is_carried[id] = 0;
        }

        for (NodeId id : sub.node_ids) {
            const auto& name = g.nodes[id].variable_name;
            if (name) earlier[*name].push_back({g.nodes[id].source_pos, id});
        }
        sub.node_ids.insert(sub.node_ids.end(), sub.carried.begin(), sub.carried.end());
        result.subgraphs.push_back(std::move(sub));
    }
    return result;
}

std::uint32_t recommend_lambda(double average_node_count) {
    const long r = std::lround(average_node_count / 4.5);
    return static_cast<std::uint32_t>(std::clamp(r, 10L, 190L));
}

} // namespace codegraph::partition
