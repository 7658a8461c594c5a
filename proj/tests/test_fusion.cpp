#include <cmath>
#include <string>
#include <vector>

#include "codegraph/error.hpp"
#include "codegraph/fusion.hpp"
#include "codegraph/util.hpp"
#include "doctest.h"
#include "reference_forward.hpp"

namespace fu = codegraph::fusion;
namespace fe = codegraph::frontend;
namespace cs = codegraph::sast;
namespace gnn = codegraph::gnn;
namespace ek = codegraph::ek;

namespace {

const cs::Vocabulary& shipped_vocab() {
    static const cs::Vocabulary vocab =
        cs::build_vocabulary(std::string(CODEGRAPH_DATA_DIR) + "/vocab.txt");
    return vocab;
}

const cs::MergeTable& shipped_merges() {
    static const cs::MergeTable merges =
        cs::MergeTable::load(std::string(CODEGRAPH_DATA_DIR) + "/merges.txt");
    return merges;
}

fu::PipelineContext make_context() {
    fu::PipelineContext ctx;
    ctx.vocab = &shipped_vocab();
    ctx.merges = &shipped_merges();
    ctx.partition.lambda = 10;
    return ctx;
}

gnn::Dims pipeline_dims(std::size_t d = 8) {
    gnn::Dims dims;
    dims.d = d;
    dims.vocab_size = shipped_vocab().size();
    return dims;
}

std::vector<double> random_vec(codegraph::util::Rng& rng, std::size_t d) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

} // namespace

TEST_CASE("identity-on-first-half fusion returns the program embedding") {
    const std::size_t d = 6;
    fu::FusionParams params = fu::FusionParams::zeros(d);
    for (std::size_t i = 0; i < d; ++i) params.w.at(i, i) = 1.0;

    gnn::Embedding ep;
    ep.kind = gnn::EmbeddingKind::Ep;
    codegraph::util::Rng rng(4);
    ep.v = random_vec(rng, d);

    const gnn::Embedding ef = fu::fuse(ep, std::vector<double>(d, 0.0), params);
    CHECK(ef.kind == gnn::EmbeddingKind::Ef);
    CHECK(ef.v == ep.v);
}

TEST_CASE("fusion matches the straight-line matrix oracle") {
    const std::size_t d = 8;
    codegraph::util::Rng rng(9);
    for (int round = 0; round < 20; ++round) {
        const fu::FusionParams params = fu::FusionParams::init(d, rng.next_u64());
        gnn::Embedding ep;
        ep.v = random_vec(rng, d);
        const std::vector<double> ee = random_vec(rng, d);

        std::vector<double> cat = ep.v;
        cat.insert(cat.end(), ee.begin(), ee.end());
        const std::vector<double> want =
            testsupport::ref_add(testsupport::ref_matvec(params.w, cat),
                                 testsupport::ref_bias(params.b));

        const gnn::Embedding got = fu::fuse(ep, ee, params);
        const gnn::Embedding again = fu::fuse(ep, ee, params);
        CHECK(got.v == again.v);
        for (std::size_t u = 0; u < d; ++u)
            CHECK(got.v[u] == doctest::Approx(want[u]).epsilon(1e-12));
    }
}

TEST_CASE("fusion rejects mismatched widths") {
    const fu::FusionParams params = fu::FusionParams::init(4, 1);
    gnn::Embedding ep;
    ep.v = std::vector<double>(4, 1.0);
    CHECK_THROWS_AS(fu::fuse(ep, std::vector<double>(3, 0.0), params),
                    codegraph::ShapeMismatchError);
    ep.v.resize(5);
    CHECK_THROWS_AS(fu::fuse(ep, std::vector<double>(4, 0.0), params),
                    codegraph::ShapeMismatchError);

    fu::FusionParams broken = fu::FusionParams::init(4, 1);
    broken.b = gnn::Tensor2(3, 1);
    ep.v.resize(4);
    CHECK_THROWS_AS(fu::fuse(ep, std::vector<double>(4, 0.0), broken),
                    codegraph::ShapeMismatchError);
}

TEST_CASE("cosine similarity on the unit interval") {
    const std::vector<double> v{1.0, -2.0, 3.0, 0.5};
    CHECK(fu::cosine01(v, v) == 1.0);

    std::vector<double> neg = v;
    for (double& x : neg) x = -x;
    CHECK(fu::cosine01(v, neg) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(fu::cosine01({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));

    const std::vector<double> zero(4, 0.0);
    CHECK(fu::cosine01(zero, v) == 0.5);
    CHECK(fu::cosine01(v, zero) == 0.5);
    CHECK(fu::cosine01(zero, zero) == 0.5);

    std::vector<double> doubled = v;
    for (double& x : doubled) x *= 2.0;
    CHECK(fu::cosine01(v, doubled) == doctest::Approx(1.0).epsilon(1e-12));

    codegraph::util::Rng rng(77);
    for (int round = 0; round < 50; ++round) {
        const auto a = random_vec(rng, 8);
        const auto b = random_vec(rng, 8);
        const double ab = fu::cosine01(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == fu::cosine01(b, a));
    }

    CHECK_THROWS_AS(fu::cosine01({1.0}, {1.0, 2.0}), codegraph::ShapeMismatchError);
}

TEST_CASE("identical sources score exactly one") {
    const auto unit = fe::SourceUnit::from_text(
        "int f(int x) { int y = x * x; return y + 1; }", "self.java");
    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 12);
    const fu::PipelineContext ctx = make_context();

    const fu::CloneScore score = fu::clone_score(unit, unit, model, ctx);
    CHECK(score.value == 1.0);
    CHECK(score.threshold == 0.5);
    CHECK(score.label);
}

TEST_CASE("clone scoring is symmetric") {
    const char* left =
        "int sum(int n) { int s = 0; int i = 0;"
        " while (i < n) { s = s + i; i = i + 1; } return s; }";
    const char* right =
        "int prod(int n) { int p = 1; int i = 1;"
        " while (i < n) { p = p * i; i = i + 1; } return p; }";
    const auto a = fe::SourceUnit::from_text(left, "a.java");
    const auto b = fe::SourceUnit::from_text(right, "b.java");
    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 5);
    const fu::PipelineContext ctx = make_context();

    const fu::CloneScore ab = fu::clone_score(a, b, model, ctx);
    const fu::CloneScore ba = fu::clone_score(b, a, model, ctx);
    CHECK(ab.value == ba.value);
    CHECK(ab.value >= 0.0);
    CHECK(ab.value <= 1.0);
}

TEST_CASE("score matches an end-to-end scripted recomputation") {
    const char* left = "int f(int a) { int b = a + 2; return b * b; }";
    const char* right =
        "int g(int n) { int t = 0; for (int k = 0; k < n; k = k + 1) { t = t + k; }"
        " int u = Math.abs(t); return u; }";
    const auto ua = fe::SourceUnit::from_text(left, "left.java");
    const auto ub = fe::SourceUnit::from_text(right, "right.java");

    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 31);
    fu::PipelineContext ctx = make_context();
    const ek::ApiStore store =
        ek::load_api_pairs(std::string(CODEGRAPH_DATA_DIR) + "/api_pairs.tsv");
    ctx.api = &store;

    const fu::CloneScore got = fu::clone_score(ua, ub, model, ctx);

    const auto recompute = [&](const fe::SourceUnit& unit) {
        const auto ast = fe::parse(unit);
        const auto graph = cs::build_sast(ast, shipped_vocab(), shipped_merges());
        const auto parts = codegraph::partition::partition(graph, ctx.partition);
        const auto ep = testsupport::ref_pgnn_embed(graph, parts, model.pgnn);
        const auto context = ek::transform(ast, store);
        const auto ee = ek::reference_encode(context.text, model.pgnn.dims.d);
        std::vector<double> cat = ep;
        cat.insert(cat.end(), ee.begin(), ee.end());
        return testsupport::ref_add(testsupport::ref_matvec(model.fuse.w, cat),
                                    testsupport::ref_bias(model.fuse.b));
    };
    const std::vector<double> efa = recompute(ua);
    const std::vector<double> efb = recompute(ub);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < efa.size(); ++i) {
        dot += efa[i] * efb[i];
        na += efa[i] * efa[i];
        nb += efb[i] * efb[i];
    }
    const double want = (dot / (std::sqrt(na) * std::sqrt(nb)) + 1.0) / 2.0;
    CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("parse failures name the offending side") {
    const auto good = fe::SourceUnit::from_text("int f(int x) { return x; }", "good.java");
    const auto bad = fe::SourceUnit::from_text("int f(int x) { return x", "bad.java");
    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 2);
    const fu::PipelineContext ctx = make_context();

    bool threw = false;
    try {
        fu::clone_score(bad, good, model, ctx);
    } catch (const codegraph::ParseError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("first input bad.java") != std::string::npos);
    }
    CHECK(threw);

    threw = false;
    try {
        fu::clone_score(good, bad, model, ctx);
    } catch (const codegraph::ParseError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("second input bad.java") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("zero parameters give the indifferent score") {
    const auto a = fe::SourceUnit::from_text("int f(int x) { return x + 1; }", "a.java");
    const auto b = fe::SourceUnit::from_text("int g(int y) { return y * 2; }", "b.java");

    fu::ModelParams model;
    model.pgnn = gnn::PgnnParams::zeros(pipeline_dims());
    model.fuse = fu::FusionParams::zeros(8);
    const fu::PipelineContext ctx = make_context();

    const fu::CloneScore score = fu::clone_score(a, b, model, ctx);
    CHECK(score.value == 0.5);
    CHECK(score.label);
}

TEST_CASE("threshold moves the label, not the value") {
    const auto a = fe::SourceUnit::from_text("int f(int x) { return x + 1; }", "a.java");
    const auto b = fe::SourceUnit::from_text(
        "int h(int q) { int w = q * q; int e = w + q; return e - 4; }", "b.java");
    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 8);

    fu::PipelineContext loose = make_context();
    fu::PipelineContext strict = make_context();
    strict.threshold = 0.999999;

    const fu::CloneScore low = fu::clone_score(a, b, model, loose);
    const fu::CloneScore high = fu::clone_score(a, b, model, strict);
    CHECK(low.value == high.value);
    CHECK(high.threshold == 0.999999);
    CHECK(low.label == (low.value >= 0.5));
    CHECK(high.label == (high.value >= 0.999999));
}

TEST_CASE("custom encoder feeds the fusion input") {
    const auto unit = fe::SourceUnit::from_text("int f(int x) { return x; }", "enc.java");
    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 3);

    fu::PipelineContext ctx = make_context();
    const ek::ReferenceEncoder narrow(4);
    ctx.encoder = &narrow;
    CHECK_THROWS_AS(fu::embed_source(unit, model, ctx), codegraph::ShapeMismatchError);

    const ek::ReferenceEncoder matching(8);
    ctx.encoder = &matching;
    const fu::ProgramEmbeddings manual = fu::embed_source(unit, model, ctx);
    CHECK(manual.ee == matching.encode(manual.context.text));
    CHECK(manual.ef.v.size() == 8);
}

TEST_CASE("missing vocabulary or merges is reported") {
    const auto unit = fe::SourceUnit::from_text("int f(int x) { return x; }", "x.java");
    const fu::ModelParams model = fu::ModelParams::init(pipeline_dims(), 3);
    fu::PipelineContext ctx;
    CHECK_THROWS_AS(fu::embed_source(unit, model, ctx), codegraph::ShapeMismatchError);
}
