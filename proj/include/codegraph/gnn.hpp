#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "codegraph/partition.hpp"
#include "codegraph/sast.hpp"
#include "codegraph/tensor.hpp"

namespace codegraph::gnn {

struct Dims {
    std::size_t d = 32;          // node state and embedding width
    std::size_t e_dim = 8;       // one-hot edge feature: 4 kinds x 2 directions
    std::size_t gnn_layers = 3;
    std::size_t lstm_layers = 2;
    std::size_t vocab_size = 0;
    // Replaces sigmoid with the constant 1 and tanh with the identity, which
    // makes the whole pipeline affine in the parameters. Central differences
    // are then exact up to rounding, so gradient checks can be run at very
    // tight tolerances.
    bool linear_activations = false;
};

struct GgnnLayerParams {
    Tensor2 mlp_w1, mlp_b1; // d x (d + e_dim), d x 1
    Tensor2 mlp_w2, mlp_b2; // d x d, d x 1
    Tensor2 gru_wz, gru_uz, gru_bz;
    Tensor2 gru_wr, gru_ur, gru_br;
    Tensor2 gru_wh, gru_uh, gru_bh;
};

struct LstmLayerParams {
    Tensor2 w; // 4d x d, gate order [input, forget, cell, output]
    Tensor2 u; // 4d x d
    Tensor2 b; // 4d x 1
};

struct PgnnParams {
    Dims dims;
    Tensor2 node_embed; // vocab_size x d
    std::vector<GgnnLayerParams> layers;
    std::vector<LstmLayerParams> lstm;
    Tensor2 fc_w; // d x 2d
    Tensor2 fc_b; // d x 1

    // All tensors filled uniformly from [-0.1, 0.1] in registry order.
    static PgnnParams init(const Dims& dims, std::uint64_t seed);
    static PgnnParams zeros(const Dims& dims);

    // Visits every tensor as (name, tensor) in a fixed order. The order
    // defines both the initialisation stream and the checkpoint layout.
    template <typename F> void for_each_tensor(F&& f);
    template <typename F> void for_each_tensor(F&& f) const;

    void check_shapes() const; // throws ShapeMismatchError

    std::size_t parameter_count() const;
};

// Message-passing view of a (sub)graph: per-node vocabulary ids plus, for
// every node, its incoming messages as (source node, edge feature) pairs.
// Each undirected structural edge contributes two messages, one per
// direction; the feature index is kind * 2 + direction.
struct GraphView {
    std::vector<std::uint32_t> vocab_ids;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> in_edges;

    std::size_t size() const { return vocab_ids.size(); }
};

GraphView whole_graph_view(const sast::SAst& graph);
GraphView subgraph_view(const sast::SAst& graph, const partition::Subgraph& sub);

struct GgnnResult {
    Tensor2 node_states;                 // n x d, final layer
    std::vector<double> graph_embedding; // d, mean over node states
};

// Message passing over the bidirectional edge view followed by a GRU state
// update, repeated for dims.gnn_layers rounds. In training mode node states
// are dropped out (rate 0.2, inverted scaling) after each update; the seed
// only matters there. Evaluation mode ignores it.
GgnnResult ggnn_forward(const GraphView& view, const PgnnParams& params,
                        std::uint64_t seed = 0, bool training = false);
GgnnResult ggnn_forward(const sast::SAst& graph, const PgnnParams& params,
                        std::uint64_t seed = 0, bool training = false);
GgnnResult ggnn_forward(const sast::SAst& graph, const partition::Subgraph& sub,
                        const PgnnParams& params,
                        std::uint64_t seed = 0, bool training = false);

// Runs the stacked LSTM over a sequence of d-vectors and returns the top
// layer output at every step.
std::vector<std::vector<double>> lstm_forward(const std::vector<std::vector<double>>& seq,
                                              const PgnnParams& params);

enum class EmbeddingKind { SubgraphG, WholeGraphC, LstmOut, Ep, Ef };

struct Embedding {
    std::vector<double> v;
    EmbeddingKind kind = EmbeddingKind::Ep;
};

struct PipelineOutput {
    Embedding ep;                                       // fused program embedding
    std::vector<std::vector<double>> subgraph_embeddings; // G_k per subgraph
    std::vector<double> whole_embedding;                  // C
    std::vector<double> lstm_last;                        // last LSTM output
};

// Full pipeline: per-subgraph GGNN -> LSTM over subgraph embeddings in
// order, whole-graph GGNN, then a linear layer over the concatenation.
PipelineOutput pgnn_embed(const sast::SAst& graph,
                          const partition::PartitionResult& parts,
                          const PgnnParams& params);

// Compares analytic gradients of loss(params) = ||E_p||^2 against central
// finite differences on a random sample of parameters and returns the worst
// relative error seen. sample_fraction picks the share of parameters probed
// (at least one); seed fixes the sample.
double finite_diff_check(const sast::SAst& graph,
                         const partition::PartitionResult& parts,
                         const PgnnParams& params,
                         double epsilon,
                         double sample_fraction = 0.05,
                         std::uint64_t seed = 1);

namespace detail {

template <typename P, typename F>
void visit_tensors(P& p, F&& f) {
    f("node_embed", p.node_embed);
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        auto& g = p.layers[i];
        const std::string base = "ggnn" + std::to_string(i) + ".";
        f(base + "mlp_w1", g.mlp_w1);
        f(base + "mlp_b1", g.mlp_b1);
        f(base + "mlp_w2", g.mlp_w2);
        f(base + "mlp_b2", g.mlp_b2);
        f(base + "gru_wz", g.gru_wz);
        f(base + "gru_uz", g.gru_uz);
        f(base + "gru_bz", g.gru_bz);
        f(base + "gru_wr", g.gru_wr);
        f(base + "gru_ur", g.gru_ur);
        f(base + "gru_br", g.gru_br);
        f(base + "gru_wh", g.gru_wh);
        f(base + "gru_uh", g.gru_uh);
        f(base + "gru_bh", g.gru_bh);
    }
    for (std::size_t i = 0; i < p.lstm.size(); ++i) {
        auto& l = p.lstm[i];
        const std::string base = "lstm" + std::to_string(i) + ".";
        f(base + "w", l.w);
        f(base + "u", l.u);
        f(base + "b", l.b);
    }
    f("fc_p.w", p.fc_w);
    f("fc_p.b", p.fc_b);
}

} // namespace detail

template <typename F> void PgnnParams::for_each_tensor(F&& f) {
    detail::visit_tensors(*this, std::forward<F>(f));
}

template <typename F> void PgnnParams::for_each_tensor(F&& f) const {
    detail::visit_tensors(*this, std::forward<F>(f));
}

} // namespace codegraph::gnn
