#pragma once

#include <cstdint>
#include <vector>

#include "codegraph/sast.hpp"

namespace codegraph::partition {

struct PartitionConfig {
    std::uint32_t lambda = 30; // minimum accumulated node count per subgraph
};

struct Subgraph {
    std::vector<sast::NodeId> node_ids; // natives ascending, then carried ascending
    std::vector<sast::NodeId> carried;  // nodes imported from earlier subgraphs
    std::vector<sast::SAstEdge> edges;  // ids refer to the parent graph
    std::vector<sast::NodeId> statement_roots;
    std::size_t order_index = 0;
    std::size_t native_count = 0;
};

struct PartitionResult {
    std::vector<Subgraph> subgraphs;
    std::uint32_t lambda_used = 0;
};

// Splits an S-AST into statement-grouped subgraphs of at least `lambda`
// nodes (counted over the tree skeleton, subtoken children included).
// Groups close when the running node total reaches lambda; an undersized
// trailing group merges into its predecessor. Every later subgraph imports,
// per variable it mentions, the nearest earlier occurrence of that variable,
// and re-adds the data-flow and leaf-chain edges among its own nodes.
PartitionResult partition(const sast::SAst& g, const PartitionConfig& cfg);

// Lambda guidance from a corpus average: a quarter-ish of the average
// S-AST node count, kept inside the useful sweep range.
std::uint32_t recommend_lambda(double average_node_count);

} // namespace codegraph::partition
