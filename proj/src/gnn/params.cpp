#include "codegraph/gnn.hpp"

#include <string>

#include "codegraph/error.hpp"
#include "codegraph/util.hpp"

namespace codegraph::gnn {

namespace {

PgnnParams with_shapes(const Dims& dims) {
    PgnnParams p;
    p.dims = dims;
    const std::size_t d = dims.d;
    p.node_embed = Tensor2(dims.vocab_size, d);
    p.layers.resize(dims.gnn_layers);
    for (auto& g : p.layers) {
        g.mlp_w1 = Tensor2(d, d + dims.e_dim);
        g.mlp_b1 = Tensor2(d, 1);
        g.mlp_w2 = Tensor2(d, d);
        g.mlp_b2 = Tensor2(d, 1);
        g.gru_wz = Tensor2(d, d);
        g.gru_uz = Tensor2(d, d);
        g.gru_bz = Tensor2(d, 1);
        g.gru_wr = Tensor2(d, d);
        g.gru_ur = Tensor2(d, d);
        g.gru_br = Tensor2(d, 1);
        g.gru_wh = Tensor2(d, d);
        g.gru_uh = Tensor2(d, d);
        g.gru_bh = Tensor2(d, 1);
    }
    p.lstm.resize(dims.lstm_layers);
    for (auto& l : p.lstm) {
        l.w = Tensor2(4 * d, d);
        l.u = Tensor2(4 * d, d);
        l.b = Tensor2(4 * d, 1);
    }
    p.fc_w = Tensor2(d, 2 * d);
    p.fc_b = Tensor2(d, 1);
    return p;
}

} // namespace

PgnnParams PgnnParams::init(const Dims& dims, std::uint64_t seed) {
    PgnnParams p = with_shapes(dims);
    util::Rng rng(seed);
    p.for_each_tensor([&](const std::string&, Tensor2& t) {
        for (double& v : t.data) v = rng.uniform(-0.1, 0.1);
    });
    return p;
}

PgnnParams PgnnParams::zeros(const Dims& dims) { return with_shapes(dims); }

void PgnnParams::check_shapes() const {
    const PgnnParams want = with_shapes(dims);
    const PgnnParams* self = this;
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> expected;
    want.for_each_tensor([&](const std::string& name, const Tensor2& t) {
        expected.emplace_back(name, std::make_pair(t.rows, t.cols));
    });
    std::size_t i = 0;
    self->for_each_tensor([&](const std::string& name, const Tensor2& t) {
        if (i >= expected.size() || expected[i].first != name)
            throw ShapeMismatchError("unexpected parameter tensor " + name);
        if (expected[i].second.first != t.rows || expected[i].second.second != t.cols)
            throw ShapeMismatchError("parameter tensor " + name + " has shape " +
                                     std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                                     " but the dims require " +
                                     std::to_string(expected[i].second.first) + "x" +
                                     std::to_string(expected[i].second.second));
        ++i;
    });
    if (i != expected.size())
        throw ShapeMismatchError("parameter registry has " + std::to_string(i) +
                                 " tensors, expected " + std::to_string(expected.size()));
}

std::size_t PgnnParams::parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const std::string&, const Tensor2& t) { n += t.size(); });
    return n;
}

} // namespace codegraph::gnn
