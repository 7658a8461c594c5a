#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "codegraph/error.hpp"
#include "codegraph/gnn.hpp"
#include "codegraph/util.hpp"
#include "trace.hpp"

namespace codegraph::gnn {

namespace {

double sigmoid_or_one(double x, bool linear) {
    return linear ? 1.0 : 1.0 / (1.0 + std::exp(-x));
}

double tanh_or_id(double x, bool linear) { return linear ? x : std::tanh(x); }

void require_finite(const Tensor2& t, const char* what) {
    for (double v : t.data)
        if (!std::isfinite(v)) throw NonFiniteError(std::string(what) + " became non-finite");
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw NonFiniteError(std::string(what) + " became non-finite");
}

void validate_view(const GraphView& view, const PgnnParams& params) {
    if (view.size() == 0) throw ShapeMismatchError("graph has no nodes");
    if (view.in_edges.size() != view.size())
        throw ShapeMismatchError("in-edge table does not match node count");
    for (std::uint32_t id : view.vocab_ids)
        if (id >= params.dims.vocab_size)
            throw ShapeMismatchError("vocab id " + std::to_string(id) +
                                     " outside embedding table of size " +
                                     std::to_string(params.dims.vocab_size));
    for (const auto& edges : view.in_edges)
        for (const auto& [src, feat] : edges) {
            if (src >= view.size())
                throw ShapeMismatchError("edge source outside the graph");
            if (feat >= params.dims.e_dim)
                throw ShapeMismatchError("edge feature index " + std::to_string(feat) +
                                         " exceeds e_dim " + std::to_string(params.dims.e_dim));
        }
}

} // namespace

namespace detail {

GgnnTrace ggnn_forward_traced(const GraphView& view, const PgnnParams& params) {
    params.check_shapes();
    validate_view(view, params);
    const std::size_t n = view.size();
    const std::size_t d = params.dims.d;
    const bool linear = params.dims.linear_activations;

    GgnnTrace tr;
    tr.view = view;
    tr.edge_offset.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        tr.edge_offset[i + 1] = tr.edge_offset[i] + view.in_edges[i].size();
    const std::size_t edge_total = tr.edge_offset[n];

    Tensor2 h(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            h.at(i, c) = params.node_embed.at(view.vocab_ids[i], c);

    for (std::size_t layer = 0; layer < params.dims.gnn_layers; ++layer) {
        const GgnnLayerParams& lp = params.layers[layer];
        GgnnLayerTrace lt;
        lt.h_prev = h;
        lt.edge_hidden = Tensor2(edge_total, d);
        lt.m = Tensor2(n, d);
        lt.z = Tensor2(n, d);
        lt.r = Tensor2(n, d);
        lt.hhat = Tensor2(n, d);
        Tensor2 hnew(n, d);

        // Each destination node only reads shared state and writes its own
        // rows, and its in-edge sum runs in a fixed order, so the result is
        // identical for any thread count.
#pragma omp parallel for schedule(static)
        for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            std::vector<double> msum(d, 0.0), hidden(d), out(d);
            const auto& edges = view.in_edges[i];
            for (std::size_t k = 0; k < edges.size(); ++k) {
                const auto [src, feat] = edges[k];
                for (std::size_t u = 0; u < d; ++u) {
                    double acc = lp.mlp_b1.at(u, 0);
                    for (std::size_t c = 0; c < d; ++c)
                        acc += lp.mlp_w1.at(u, c) * lt.h_prev.at(src, c);
                    acc += lp.mlp_w1.at(u, d + feat);
                    hidden[u] = tanh_or_id(acc, linear);
                }
                const std::size_t e = tr.edge_offset[i] + k;
                for (std::size_t u = 0; u < d; ++u) lt.edge_hidden.at(e, u) = hidden[u];
                for (std::size_t u = 0; u < d; ++u) {
                    double acc = lp.mlp_b2.at(u, 0);
                    for (std::size_t c = 0; c < d; ++c)
                        acc += lp.mlp_w2.at(u, c) * hidden[c];
                    msum[u] += acc;
                }
            }
            for (std::size_t u = 0; u < d; ++u) lt.m.at(i, u) = msum[u];

            std::vector<double> z(d), r(d), hh(d);
            for (std::size_t u = 0; u < d; ++u) {
                double az = lp.gru_bz.at(u, 0);
                double ar = lp.gru_br.at(u, 0);
                for (std::size_t c = 0; c < d; ++c) {
                    az += lp.gru_wz.at(u, c) * msum[c] + lp.gru_uz.at(u, c) * lt.h_prev.at(i, c);
                    ar += lp.gru_wr.at(u, c) * msum[c] + lp.gru_ur.at(u, c) * lt.h_prev.at(i, c);
                }
                z[u] = sigmoid_or_one(az, linear);
                r[u] = sigmoid_or_one(ar, linear);
            }
            for (std::size_t u = 0; u < d; ++u) {
                double ah = lp.gru_bh.at(u, 0);
                for (std::size_t c = 0; c < d; ++c)
                    ah += lp.gru_wh.at(u, c) * msum[c] +
                          lp.gru_uh.at(u, c) * (r[c] * lt.h_prev.at(i, c));
                hh[u] = tanh_or_id(ah, linear);
            }
            for (std::size_t u = 0; u < d; ++u) {
                lt.z.at(i, u) = z[u];
                lt.r.at(i, u) = r[u];
                lt.hhat.at(i, u) = hh[u];
                hnew.at(i, u) = (1.0 - z[u]) * lt.h_prev.at(i, u) + z[u] * hh[u];
            }
        }

        require_finite(hnew, "node state");
        h = hnew;
        tr.layers.push_back(std::move(lt));
    }

    tr.h_final = h;
    tr.g.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) tr.g[c] += h.at(i, c);
    for (std::size_t c = 0; c < d; ++c) tr.g[c] /= static_cast<double>(n);
    require_finite(tr.g, "graph embedding");
    return tr;
}

LstmTrace lstm_forward_traced(const std::vector<std::vector<double>>& seq,
                              const PgnnParams& params) {
    if (seq.empty()) throw ShapeMismatchError("LSTM input sequence is empty");
    const std::size_t d = params.dims.d;
    const bool linear = params.dims.linear_activations;
    for (const auto& x : seq)
        if (x.size() != d)
            throw ShapeMismatchError("LSTM input width " + std::to_string(x.size()) +
                                     " does not match d = " + std::to_string(d));
    const std::size_t steps = seq.size();

    LstmTrace tr;
    Tensor2 input(steps, d);
    for (std::size_t t = 0; t < steps; ++t)
        for (std::size_t c = 0; c < d; ++c) input.at(t, c) = seq[t][c];

    for (std::size_t layer = 0; layer < params.dims.lstm_layers; ++layer) {
        const LstmLayerParams& lp = params.lstm[layer];
        LstmLayerTrace lt;
        lt.x = input;
        lt.gi = Tensor2(steps, d);
        lt.gf = Tensor2(steps, d);
        lt.gg = Tensor2(steps, d);
        lt.go = Tensor2(steps, d);
        lt.c = Tensor2(steps, d);
        lt.h = Tensor2(steps, d);

        std::vector<double> c_prev(d, 0.0), h_prev(d, 0.0), a(4 * d);
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t u = 0; u < 4 * d; ++u) {
                double acc = lp.b.at(u, 0);
                for (std::size_t cidx = 0; cidx < d; ++cidx)
                    acc += lp.w.at(u, cidx) * input.at(t, cidx) + lp.u.at(u, cidx) * h_prev[cidx];
                a[u] = acc;
            }
            for (std::size_t u = 0; u < d; ++u) {
                const double gi = sigmoid_or_one(a[u], linear);
                const double gf = sigmoid_or_one(a[d + u], linear);
                const double gg = tanh_or_id(a[2 * d + u], linear);
                const double go = sigmoid_or_one(a[3 * d + u], linear);
                const double cc = gf * c_prev[u] + gi * gg;
                const double hh = go * tanh_or_id(cc, linear);
                lt.gi.at(t, u) = gi;
                lt.gf.at(t, u) = gf;
                lt.gg.at(t, u) = gg;
                lt.go.at(t, u) = go;
                lt.c.at(t, u) = cc;
                lt.h.at(t, u) = hh;
            }
            for (std::size_t u = 0; u < d; ++u) {
                c_prev[u] = lt.c.at(t, u);
                h_prev[u] = lt.h.at(t, u);
            }
        }
        require_finite(lt.h, "LSTM state");
        input = lt.h;
        tr.layers.push_back(std::move(lt));
    }
    return tr;
}

PipelineTrace pipeline_forward(const sast::SAst& graph,
                               const partition::PartitionResult& parts,
                               const PgnnParams& params) {
    PipelineTrace tr;
    std::vector<std::vector<double>> seq;
    for (const auto& sub : parts.subgraphs) {
        tr.subs.push_back(ggnn_forward_traced(subgraph_view(graph, sub), params));
        seq.push_back(tr.subs.back().g);
    }
    tr.whole = ggnn_forward_traced(whole_graph_view(graph), params);
    tr.lstm = lstm_forward_traced(seq, params);

    const std::size_t d = params.dims.d;
    const Tensor2& top = tr.lstm.layers.back().h;
    tr.concat.resize(2 * d);
    for (std::size_t c = 0; c < d; ++c) {
        tr.concat[c] = tr.whole.g[c];
        tr.concat[d + c] = top.at(top.rows - 1, c);
    }
    tr.ep.assign(d, 0.0);
    for (std::size_t u = 0; u < d; ++u) {
        double acc = params.fc_b.at(u, 0);
        for (std::size_t c = 0; c < 2 * d; ++c) acc += params.fc_w.at(u, c) * tr.concat[c];
        tr.ep[u] = acc;
    }
    require_finite(tr.ep, "program embedding");
    return tr;
}

} // namespace detail

GraphView whole_graph_view(const sast::SAst& graph) {
    GraphView view;
    view.vocab_ids.reserve(graph.nodes.size());
    for (const auto& node : graph.nodes) view.vocab_ids.push_back(node.vocab_id);
    view.in_edges.resize(graph.nodes.size());
    for (const auto& e : graph.edges) {
        const auto feat = static_cast<std::uint32_t>(e.kind) * 2;
        view.in_edges[e.dst].emplace_back(e.src, feat);
        view.in_edges[e.src].emplace_back(e.dst, feat + 1);
    }
    return view;
}

GraphView subgraph_view(const sast::SAst& graph, const partition::Subgraph& sub) {
    GraphView view;
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    local.reserve(sub.node_ids.size());
    view.vocab_ids.reserve(sub.node_ids.size());
    for (std::uint32_t id : sub.node_ids) {
        local.emplace(id, static_cast<std::uint32_t>(view.vocab_ids.size()));
        view.vocab_ids.push_back(graph.nodes[id].vocab_id);
    }
    view.in_edges.resize(view.vocab_ids.size());
    for (const auto& e : sub.edges) {
        const auto feat = static_cast<std::uint32_t>(e.kind) * 2;
        const std::uint32_t s = local.at(e.src);
        const std::uint32_t t = local.at(e.dst);
        view.in_edges[t].emplace_back(s, feat);
        view.in_edges[s].emplace_back(t, feat + 1);
    }
    return view;
}

namespace {

void apply_dropout(Tensor2& h, util::Rng& rng) {
    constexpr double kRate = 0.2;
    for (double& v : h.data) {
        if (rng.next_double() < kRate)
            v = 0.0;
        else
            v /= (1.0 - kRate);
    }
}

} // namespace

GgnnResult ggnn_forward(const GraphView& view, const PgnnParams& params,
                        std::uint64_t seed, bool training) {
    if (!training) {
        detail::GgnnTrace tr = detail::ggnn_forward_traced(view, params);
        return {std::move(tr.h_final), std::move(tr.g)};
    }

    // Training mode reruns the layer loop with dropout after each update;
    // the traced path stays evaluation-only because the reverse pass does
    // not model the masks.
    params.check_shapes();
    validate_view(view, params);
    const std::size_t n = view.size();
    const std::size_t d = params.dims.d;
    util::Rng rng(seed);
    Tensor2 h(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            h.at(i, c) = params.node_embed.at(view.vocab_ids[i], c);

    for (std::size_t layer = 0; layer < params.dims.gnn_layers; ++layer) {
        GraphView step_view = view;
        PgnnParams one = params;
        one.dims.gnn_layers = 1;
        one.layers = {params.layers[layer]};
        // Reuse the single-layer kernel on the current states by treating
        // them as a one-row embedding table per node.
        one.dims.vocab_size = n;
        one.node_embed = h;
        for (std::size_t i = 0; i < n; ++i)
            step_view.vocab_ids[i] = static_cast<std::uint32_t>(i);
        detail::GgnnTrace tr = detail::ggnn_forward_traced(step_view, one);
        h = std::move(tr.h_final);
        apply_dropout(h, rng);
        require_finite(h, "node state");
    }

    GgnnResult out;
    out.graph_embedding.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out.graph_embedding[c] += h.at(i, c);
    for (std::size_t c = 0; c < d; ++c) out.graph_embedding[c] /= static_cast<double>(n);
    out.node_states = std::move(h);
    return out;
}

GgnnResult ggnn_forward(const sast::SAst& graph, const PgnnParams& params,
                        std::uint64_t seed, bool training) {
    return ggnn_forward(whole_graph_view(graph), params, seed, training);
}

GgnnResult ggnn_forward(const sast::SAst& graph, const partition::Subgraph& sub,
                        const PgnnParams& params, std::uint64_t seed, bool training) {
    return ggnn_forward(subgraph_view(graph, sub), params, seed, training);
}

std::vector<std::vector<double>> lstm_forward(const std::vector<std::vector<double>>& seq,
                                              const PgnnParams& params) {
    params.check_shapes();
    detail::LstmTrace tr = detail::lstm_forward_traced(seq, params);
    const Tensor2& top = tr.layers.back().h;
    std::vector<std::vector<double>> out(top.rows);
    for (std::size_t t = 0; t < top.rows; ++t) {
        out[t].resize(top.cols);
        for (std::size_t c = 0; c < top.cols; ++c) out[t][c] = top.at(t, c);
    }
    return out;
}

PipelineOutput pgnn_embed(const sast::SAst& graph,
                          const partition::PartitionResult& parts,
                          const PgnnParams& params) {
    detail::PipelineTrace tr = detail::pipeline_forward(graph, parts, params);
    PipelineOutput out;
    out.ep.v = tr.ep;
    out.ep.kind = EmbeddingKind::Ep;
    for (const auto& sub : tr.subs) out.subgraph_embeddings.push_back(sub.g);
    out.whole_embedding = tr.whole.g;
    const Tensor2& top = tr.lstm.layers.back().h;
    out.lstm_last.resize(top.cols);
    for (std::size_t c = 0; c < top.cols; ++c) out.lstm_last[c] = top.at(top.rows - 1, c);
    return out;
}

} // namespace codegraph::gnn
