#include <cmath>
#include <vector>

#include "codegraph/error.hpp"
#include "codegraph/gnn.hpp"
#include "trace.hpp"

namespace codegraph::gnn::detail {

namespace {

// Derivatives are taken from the stored post-activation values.
double dsigmoid(double y, bool linear) { return linear ? 0.0 : y * (1.0 - y); }
double dtanh(double y, bool linear) { return linear ? 1.0 : 1.0 - y * y; }

void ggnn_backward(const GgnnTrace& tr, const std::vector<double>& dg,
                   const PgnnParams& params, PgnnParams& grads) {
    const std::size_t n = tr.h_final.rows;
    const std::size_t d = params.dims.d;
    const bool linear = params.dims.linear_activations;

    Tensor2 dh(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) dh.at(i, c) = dg[c] / static_cast<double>(n);

    for (std::size_t layer = params.dims.gnn_layers; layer-- > 0;) {
        const GgnnLayerTrace& lt = tr.layers[layer];
        const GgnnLayerParams& lp = params.layers[layer];
        GgnnLayerParams& lg = grads.layers[layer];
        Tensor2 dh_prev(n, d);
        Tensor2 dm(n, d);

        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> dz(d), dhh(d), dr(d), dah(d), drh(d);
            for (std::size_t u = 0; u < d; ++u) {
                const double grad = dh.at(i, u);
                const double z = lt.z.at(i, u);
                dz[u] = grad * (lt.hhat.at(i, u) - lt.h_prev.at(i, u));
                dhh[u] = grad * z;
                dh_prev.at(i, u) += grad * (1.0 - z);
            }
            for (std::size_t u = 0; u < d; ++u)
                dah[u] = dhh[u] * dtanh(lt.hhat.at(i, u), linear);
            for (std::size_t u = 0; u < d; ++u) {
                lg.gru_bh.at(u, 0) += dah[u];
                for (std::size_t c = 0; c < d; ++c) {
                    lg.gru_wh.at(u, c) += dah[u] * lt.m.at(i, c);
                    lg.gru_uh.at(u, c) += dah[u] * (lt.r.at(i, c) * lt.h_prev.at(i, c));
                }
            }
            for (std::size_t c = 0; c < d; ++c) {
                double acc_m = 0.0, acc_rh = 0.0;
                for (std::size_t u = 0; u < d; ++u) {
                    acc_m += lp.gru_wh.at(u, c) * dah[u];
                    acc_rh += lp.gru_uh.at(u, c) * dah[u];
                }
                dm.at(i, c) += acc_m;
                drh[c] = acc_rh;
            }
            for (std::size_t c = 0; c < d; ++c) {
                dr[c] = drh[c] * lt.h_prev.at(i, c);
                dh_prev.at(i, c) += drh[c] * lt.r.at(i, c);
            }

            std::vector<double> daz(d), dar(d);
            for (std::size_t u = 0; u < d; ++u) {
                daz[u] = dz[u] * dsigmoid(lt.z.at(i, u), linear);
                dar[u] = dr[u] * dsigmoid(lt.r.at(i, u), linear);
            }
            for (std::size_t u = 0; u < d; ++u) {
                lg.gru_bz.at(u, 0) += daz[u];
                lg.gru_br.at(u, 0) += dar[u];
                for (std::size_t c = 0; c < d; ++c) {
                    lg.gru_wz.at(u, c) += daz[u] * lt.m.at(i, c);
                    lg.gru_uz.at(u, c) += daz[u] * lt.h_prev.at(i, c);
                    lg.gru_wr.at(u, c) += dar[u] * lt.m.at(i, c);
                    lg.gru_ur.at(u, c) += dar[u] * lt.h_prev.at(i, c);
                }
            }
            for (std::size_t c = 0; c < d; ++c) {
                double acc = 0.0;
                for (std::size_t u = 0; u < d; ++u)
                    acc += lp.gru_wz.at(u, c) * daz[u] + lp.gru_wr.at(u, c) * dar[u];
                dm.at(i, c) += acc;
            }
            for (std::size_t c = 0; c < d; ++c) {
                double acc = 0.0;
                for (std::size_t u = 0; u < d; ++u)
                    acc += lp.gru_uz.at(u, c) * daz[u] + lp.gru_ur.at(u, c) * dar[u];
                dh_prev.at(i, c) += acc;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            const auto& edges = tr.view.in_edges[i];
            std::vector<double> dout(d), dhidden(d), dpre(d);
            for (std::size_t c = 0; c < d; ++c) dout[c] = dm.at(i, c);
            for (std::size_t k = 0; k < edges.size(); ++k) {
                const auto [src, feat] = edges[k];
                const std::size_t e = tr.edge_offset[i] + k;
                for (std::size_t u = 0; u < d; ++u) {
                    lg.mlp_b2.at(u, 0) += dout[u];
                    for (std::size_t c = 0; c < d; ++c)
                        lg.mlp_w2.at(u, c) += dout[u] * lt.edge_hidden.at(e, c);
                }
                for (std::size_t c = 0; c < d; ++c) {
                    double acc = 0.0;
                    for (std::size_t u = 0; u < d; ++u) acc += lp.mlp_w2.at(u, c) * dout[u];
                    dhidden[c] = acc;
                }
                for (std::size_t u = 0; u < d; ++u)
                    dpre[u] = dhidden[u] * dtanh(lt.edge_hidden.at(e, u), linear);
                for (std::size_t u = 0; u < d; ++u) {
                    lg.mlp_b1.at(u, 0) += dpre[u];
                    for (std::size_t c = 0; c < d; ++c)
                        lg.mlp_w1.at(u, c) += dpre[u] * lt.h_prev.at(src, c);
                    lg.mlp_w1.at(u, d + feat) += dpre[u];
                }
                for (std::size_t c = 0; c < d; ++c) {
                    double acc = 0.0;
                    for (std::size_t u = 0; u < d; ++u) acc += lp.mlp_w1.at(u, c) * dpre[u];
                    dh_prev.at(src, c) += acc;
                }
            }
        }

        dh = std::move(dh_prev);
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            grads.node_embed.at(tr.view.vocab_ids[i], c) += dh.at(i, c);
}

// Returns d loss / d x for the bottom layer, one row per step.
Tensor2 lstm_backward(const LstmTrace& tr, const std::vector<double>& dlast,
                      const PgnnParams& params, PgnnParams& grads) {
    const std::size_t d = params.dims.d;
    const bool linear = params.dims.linear_activations;
    const std::size_t steps = tr.layers.front().x.rows;

    Tensor2 dx_above(steps, d);
    for (std::size_t c = 0; c < d; ++c) dx_above.at(steps - 1, c) = dlast[c];

    for (std::size_t layer = params.dims.lstm_layers; layer-- > 0;) {
        const LstmLayerTrace& lt = tr.layers[layer];
        const LstmLayerParams& lp = params.lstm[layer];
        LstmLayerParams& lg = grads.lstm[layer];
        Tensor2 dx_this(steps, d);
        std::vector<double> dh_carry(d, 0.0), dc_carry(d, 0.0);
        std::vector<double> da(4 * d);

        for (std::size_t t = steps; t-- > 0;) {
            for (std::size_t u = 0; u < d; ++u) {
                const double dh = dx_above.at(t, u) + dh_carry[u];
                const double tc = linear ? lt.c.at(t, u) : std::tanh(lt.c.at(t, u));
                const double go = lt.go.at(t, u);
                const double do_ = dh * tc;
                const double dc = dc_carry[u] + dh * go * dtanh(tc, linear);
                const double di = dc * lt.gg.at(t, u);
                const double dg = dc * lt.gi.at(t, u);
                const double cprev = t == 0 ? 0.0 : lt.c.at(t - 1, u);
                const double df = dc * cprev;
                dc_carry[u] = dc * lt.gf.at(t, u);
                da[u] = di * dsigmoid(lt.gi.at(t, u), linear);
                da[d + u] = df * dsigmoid(lt.gf.at(t, u), linear);
                da[2 * d + u] = dg * dtanh(lt.gg.at(t, u), linear);
                da[3 * d + u] = do_ * dsigmoid(go, linear);
            }
            for (std::size_t u = 0; u < 4 * d; ++u) {
                lg.b.at(u, 0) += da[u];
                for (std::size_t c = 0; c < d; ++c) {
                    lg.w.at(u, c) += da[u] * lt.x.at(t, c);
                    if (t > 0) lg.u.at(u, c) += da[u] * lt.h.at(t - 1, c);
                }
            }
            for (std::size_t c = 0; c < d; ++c) {
                double accx = 0.0, acch = 0.0;
                for (std::size_t u = 0; u < 4 * d; ++u) {
                    accx += lp.w.at(u, c) * da[u];
                    acch += lp.u.at(u, c) * da[u];
                }
                dx_this.at(t, c) = accx;
                dh_carry[c] = acch;
            }
        }
        dx_above = std::move(dx_this);
    }
    return dx_above;
}

} // namespace

void pipeline_backward(const PipelineTrace& trace, const std::vector<double>& dep,
                       const PgnnParams& params, PgnnParams& grads) {
    const std::size_t d = params.dims.d;
    if (dep.size() != d) throw ShapeMismatchError("output gradient width does not match d");

    std::vector<double> dconcat(2 * d, 0.0);
    for (std::size_t u = 0; u < d; ++u) {
        grads.fc_b.at(u, 0) += dep[u];
        for (std::size_t c = 0; c < 2 * d; ++c) {
            grads.fc_w.at(u, c) += dep[u] * trace.concat[c];
            dconcat[c] += params.fc_w.at(u, c) * dep[u];
        }
    }
    std::vector<double> dC(dconcat.begin(), dconcat.begin() + d);
    std::vector<double> dO(dconcat.begin() + d, dconcat.end());

    Tensor2 dseq = lstm_backward(trace.lstm, dO, params, grads);
    ggnn_backward(trace.whole, dC, params, grads);
    for (std::size_t k = 0; k < trace.subs.size(); ++k) {
        std::vector<double> dg(d);
        for (std::size_t c = 0; c < d; ++c) dg[c] = dseq.at(k, c);
        ggnn_backward(trace.subs[k], dg, params, grads);
    }
}

} // namespace codegraph::gnn::detail
