#pragma once

#include <vector>

#include "codegraph/gnn.hpp"

// Intermediate activations kept by the traced forward passes so the reverse
// pass can replay them. Internal to the kernel sources and the gradient
// check; nothing here is part of the library surface.
namespace codegraph::gnn::detail {

struct GgnnLayerTrace {
    Tensor2 h_prev;      // n x d, states entering the layer
    Tensor2 edge_hidden; // E x d, post-activation MLP hidden per in-edge
    Tensor2 m;           // n x d, summed messages
    Tensor2 z, r, hhat;  // n x d, GRU internals
};

struct GgnnTrace {
    GraphView view;
    std::vector<std::size_t> edge_offset; // n + 1, flattened in-edge offsets
    std::vector<GgnnLayerTrace> layers;
    Tensor2 h_final;       // n x d
    std::vector<double> g; // d, mean readout
};

struct LstmLayerTrace {
    Tensor2 x;              // T x d, layer inputs
    Tensor2 gi, gf, gg, go; // T x d, post-activation gates
    Tensor2 c, h;           // T x d
};

struct LstmTrace {
    std::vector<LstmLayerTrace> layers;
};

struct PipelineTrace {
    std::vector<GgnnTrace> subs;
    GgnnTrace whole;
    LstmTrace lstm;
    std::vector<double> concat; // 2d, [C ; O_last]
    std::vector<double> ep;     // d
};

GgnnTrace ggnn_forward_traced(const GraphView& view, const PgnnParams& params);
LstmTrace lstm_forward_traced(const std::vector<std::vector<double>>& seq,
                              const PgnnParams& params);
PipelineTrace pipeline_forward(const sast::SAst& graph,
                               const partition::PartitionResult& parts,
                               const PgnnParams& params);

// Accumulates d loss / d params into grads given d loss / d E_p.
void pipeline_backward(const PipelineTrace& trace, const std::vector<double>& dep,
                       const PgnnParams& params, PgnnParams& grads);

} // namespace codegraph::gnn::detail
