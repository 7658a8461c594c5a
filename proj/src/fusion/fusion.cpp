#include "codegraph/fusion.hpp"

#include <cmath>
#include <string>

#include "codegraph/error.hpp"
#include "codegraph/util.hpp"

namespace codegraph::fusion {

FusionParams FusionParams::init(std::size_t d, std::uint64_t seed) {
    FusionParams p = zeros(d);
    util::Rng rng(seed);
    for (double& v : p.w.data) v = rng.uniform(-0.1, 0.1);
    for (double& v : p.b.data) v = rng.uniform(-0.1, 0.1);
    return p;
}

FusionParams FusionParams::zeros(std::size_t d) {
    FusionParams p;
    p.w = gnn::Tensor2(d, 2 * d);
    p.b = gnn::Tensor2(d, 1);
    return p;
}

ModelParams ModelParams::init(const gnn::Dims& dims, std::uint64_t seed) {
    ModelParams m;
    m.pgnn = gnn::PgnnParams::init(dims, seed);
    m.fuse = FusionParams::init(dims.d, seed ^ 0x9e3779b97f4a7c15ull);
    return m;
}

gnn::Embedding fuse(const gnn::Embedding& ep, const std::vector<double>& ee,
                    const FusionParams& params) {
    const std::size_t d = params.w.rows;
    if (params.w.cols != 2 * d || params.b.rows != d || params.b.cols != 1)
        throw ShapeMismatchError("fusion layer tensors are inconsistent");
    if (ep.v.size() != d || ee.size() != d)
        throw ShapeMismatchError("fusion inputs must both have width " + std::to_string(d));

    gnn::Embedding out;
    out.kind = gnn::EmbeddingKind::Ef;
    out.v.resize(d);
    for (std::size_t u = 0; u < d; ++u) {
        double acc = params.b.at(u, 0);
        for (std::size_t c = 0; c < d; ++c) acc += params.w.at(u, c) * ep.v[c];
        for (std::size_t c = 0; c < d; ++c) acc += params.w.at(u, d + c) * ee[c];
        if (!std::isfinite(acc)) throw NonFiniteError("fused embedding became non-finite");
        out.v[u] = acc;
    }
    return out;
}

double cosine01(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ShapeMismatchError("cosine inputs differ in width: " + std::to_string(a.size()) +
                                 " vs " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.5;
    if (a == b) return 1.0;
    double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
    if (cosine > 1.0) cosine = 1.0;
    if (cosine < -1.0) cosine = -1.0;
    return (cosine + 1.0) / 2.0;
}

ProgramEmbeddings embed_source(const frontend::SourceUnit& unit, const ModelParams& model,
                               const PipelineContext& ctx) {
    if (ctx.vocab == nullptr || ctx.merges == nullptr)
        throw ShapeMismatchError("pipeline context needs a vocabulary and a merge table");

    const frontend::Ast ast = frontend::parse(unit);
    const sast::SAst graph = sast::build_sast(ast, *ctx.vocab, *ctx.merges);

    ProgramEmbeddings out;
    out.parts = partition::partition(graph, ctx.partition);
    out.pipeline = gnn::pgnn_embed(graph, out.parts, model.pgnn);

    static const ek::ApiStore kEmptyStore;
    out.context = ek::transform(ast, ctx.api != nullptr ? *ctx.api : kEmptyStore);

    if (ctx.encoder != nullptr) {
        out.ee = ctx.encoder->encode(out.context.text);
        if (out.ee.size() != model.pgnn.dims.d)
            throw ShapeMismatchError("encoder width " + std::to_string(out.ee.size()) +
                                     " does not match pipeline width " +
                                     std::to_string(model.pgnn.dims.d));
    } else {
        out.ee = ek::reference_encode(out.context.text, model.pgnn.dims.d);
    }

    out.ef = fuse(out.pipeline.ep, out.ee, model.fuse);
    return out;
}

namespace {

[[noreturn]] void rethrow_with_side(const ParseError& e, const char* side,
                                    const frontend::SourceUnit& unit) {
    throw ParseError(e.line, e.column, e.expected,
                     std::string(side) + " input " + unit.path + ": " + e.what());
}

} // namespace

CloneScore clone_score(const frontend::SourceUnit& a, const frontend::SourceUnit& b,
                       const ModelParams& model, const PipelineContext& ctx) {
    ProgramEmbeddings ea, eb;
    try {
        ea = embed_source(a, model, ctx);
    } catch (const ParseError& e) {
        rethrow_with_side(e, "first", a);
    }
    try {
        eb = embed_source(b, model, ctx);
    } catch (const ParseError& e) {
        rethrow_with_side(e, "second", b);
    }

    CloneScore score;
    score.threshold = ctx.threshold;
    score.value = cosine01(ea.ef.v, eb.ef.v);
    score.label = score.value >= score.threshold;
    return score;
}

} // namespace codegraph::fusion
