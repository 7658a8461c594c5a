#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

#include "codegraph/cli.hpp"
#include "codegraph/gnn.hpp"
#include "codegraph/io.hpp"
#include "codegraph/util.hpp"

namespace codegraph::cli {

namespace {

constexpr double kPermutationTolerance = 1e-9;
constexpr double kGradientTolerance = 1e-4;
// Central-difference step. The check loss is quadratic in each parameter, so
// the step trades rounding noise (~machine epsilon * loss / step) against a
// truncation term that vanishes for nearly-linear slots; 1e-4 keeps the
// noise term well under the tolerance for widths up to a few hundred.
constexpr double kGradientEpsilon = 1e-4;

const char* kFixtureSource =
    "class Fixture {\n"
    "    int mix(int a, int b) {\n"
    "        int low = a;\n"
    "        int high = b;\n"
    "        if (high < low) {\n"
    "            low = b;\n"
    "            high = a;\n"
    "        }\n"
    "        int span = high - low;\n"
    "        while (span > 10) {\n"
    "            span = span - low;\n"
    "        }\n"
    "        return span;\n"
    "    }\n"
    "}\n";

gnn::GraphView random_view(util::Rng& rng, std::size_t vocab_size) {
    const std::size_t n = 2 + rng.below(29); // at most 30 nodes
    gnn::GraphView view;
    view.vocab_ids.resize(n);
    for (auto& id : view.vocab_ids) id = static_cast<std::uint32_t>(rng.below(vocab_size));
    view.in_edges.resize(n);
    const std::size_t edges = n + rng.below(n);
    for (std::size_t e = 0; e < edges; ++e) {
        const auto a = static_cast<std::uint32_t>(rng.below(n));
        const auto b = static_cast<std::uint32_t>(rng.below(n));
        const auto kind = static_cast<std::uint32_t>(rng.below(4));
        view.in_edges[b].push_back({a, kind * 2});
        view.in_edges[a].push_back({b, kind * 2 + 1});
    }
    return view;
}

gnn::GraphView permuted_view(const gnn::GraphView& view, const std::vector<std::uint32_t>& perm) {
    gnn::GraphView out;
    const std::size_t n = view.size();
    out.vocab_ids.resize(n);
    out.in_edges.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.vocab_ids[perm[i]] = view.vocab_ids[i];
        for (const auto& [src, feat] : view.in_edges[i])
            out.in_edges[perm[i]].push_back({perm[src], feat});
    }
    return out;
}

double permutation_deviation(std::size_t d, std::uint64_t seed) {
    gnn::Dims dims;
    dims.d = d;
    dims.vocab_size = 64;
    const gnn::PgnnParams params = gnn::PgnnParams::init(dims, seed);

    util::Rng rng(seed ^ 0x5bf03635u);
    double worst = 0.0;
    for (int round = 0; round < 20; ++round) {
        const gnn::GraphView view = random_view(rng, dims.vocab_size);
        std::vector<std::uint32_t> perm(view.size());
        std::iota(perm.begin(), perm.end(), 0u);
        rng.shuffle(perm);

        const auto base = gnn::ggnn_forward(view, params).graph_embedding;
        const auto permuted = gnn::ggnn_forward(permuted_view(view, perm), params).graph_embedding;
        for (std::size_t i = 0; i < base.size(); ++i)
            worst = std::max(worst, std::abs(base[i] - permuted[i]));
    }
    return worst;
}

double gradient_error(std::size_t d, std::uint64_t seed) {
    // A byte-unit vocabulary segments every token into in-vocabulary pieces,
    // so the check needs no external data files.
    const auto& units = sast::MergeTable::byte_units();
    const sast::Vocabulary vocab = sast::Vocabulary::from_entries(
        std::vector<std::string>(units.begin(), units.end()), frontend::non_leaf_kind_names());
    const sast::MergeTable merges = sast::MergeTable::from_pairs({});

    const frontend::Ast ast = frontend::parse(frontend::SourceUnit::from_text(kFixtureSource));
    const sast::SAst graph = sast::build_sast(ast, vocab, merges);
    partition::PartitionConfig cfg;
    cfg.lambda = 6;
    const partition::PartitionResult parts = partition::partition(graph, cfg);

    gnn::Dims dims;
    dims.d = d;
    dims.vocab_size = vocab.size();
    const gnn::PgnnParams params = gnn::PgnnParams::init(dims, seed);
    // Probe at most ~400 parameters so the check stays fast at large widths.
    const double fraction =
        std::min(0.05, 400.0 / static_cast<double>(params.parameter_count()));
    return gnn::finite_diff_check(graph, parts, params, kGradientEpsilon, fraction, seed);
}

void report_line(std::ostream& out, const char* name, bool ok, double value, double tol) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << value << " (tolerance " << tol
        << ")\n";
}

} // namespace

SelfcheckReport run_selfcheck(std::size_t dims, std::uint64_t seed, std::ostream& out) {
    SelfcheckReport report;
    report.permutation_deviation = permutation_deviation(dims, seed);
    const bool perm_ok = report.permutation_deviation < kPermutationTolerance;
    report_line(out, "permutation invariance, max deviation", perm_ok,
                report.permutation_deviation, kPermutationTolerance);

    report.gradient_error = gradient_error(dims, seed);
    const bool grad_ok = report.gradient_error < kGradientTolerance;
    report_line(out, "gradient check (central differences, step 1e-4), max relative error",
                grad_ok, report.gradient_error, kGradientTolerance);

    report.passed = perm_ok && grad_ok;
    out << (report.passed ? "selfcheck passed\n" : "selfcheck FAILED\n");
    return report;
}

} // namespace codegraph::cli
