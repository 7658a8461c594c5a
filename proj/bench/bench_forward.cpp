// Times the parallel message-passing kernel against the serial reference
// and cross-checks their embeddings. Usage: codegraph_bench [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "codegraph/gnn.hpp"
#include "codegraph/util.hpp"
#include "reference_forward.hpp"

namespace gnn = codegraph::gnn;
namespace util = codegraph::util;

namespace {

struct Workload {
    gnn::GraphView view;
    std::vector<std::uint32_t> vocab_ids;
    std::vector<testsupport::RefEdge> edges;
};

Workload make_workload(std::size_t nodes, std::uint32_t vocab_cap, std::uint64_t seed) {
    util::Rng rng(seed);
    Workload w;
    w.vocab_ids.resize(nodes);
    for (auto& id : w.vocab_ids) id = static_cast<std::uint32_t>(rng.below(vocab_cap));
    w.view.vocab_ids = w.vocab_ids;
    w.view.in_edges.resize(nodes);
    const std::size_t edge_count = 2 * nodes;
    for (std::size_t e = 0; e < edge_count; ++e) {
        const auto a = static_cast<std::uint32_t>(rng.below(nodes));
        const auto b = static_cast<std::uint32_t>(rng.below(nodes));
        const auto kind = static_cast<std::uint32_t>(rng.below(4));
        w.edges.push_back({a, b, kind});
        w.view.in_edges[b].emplace_back(a, kind * 2);
        w.view.in_edges[a].emplace_back(b, kind * 2 + 1);
    }
    return w;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    if (reps < 1) {
        std::fprintf(stderr, "usage: %s [reps >= 1]\n", argv[0]);
        return 2;
    }

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%8s %4s %12s %12s %8s %10s\n", "nodes", "d", "serial ms", "parallel ms",
                "speedup", "max |diff|");

    const std::size_t sizes[] = {100, 300, 1000};
    const std::size_t widths[] = {32, 64};
    for (std::size_t nodes : sizes)
        for (std::size_t d : widths) {
            gnn::Dims dims;
            dims.d = d;
            dims.vocab_size = 256;
            const gnn::PgnnParams params = gnn::PgnnParams::init(dims, 7);
            const Workload w = make_workload(nodes, 256, 91 + nodes + d);

            // one warm round each, then timed reps
            auto serial = testsupport::ref_ggnn_states(w.vocab_ids, w.edges, params);
            double t0 = now_ms();
            for (int r = 0; r < reps; ++r)
                serial = testsupport::ref_ggnn_states(w.vocab_ids, w.edges, params);
            const double serial_ms = (now_ms() - t0) / reps;

            auto parallel = gnn::ggnn_forward(w.view, params);
            t0 = now_ms();
            for (int r = 0; r < reps; ++r) parallel = gnn::ggnn_forward(w.view, params);
            const double parallel_ms = (now_ms() - t0) / reps;

            const auto mean = testsupport::ref_mean(serial);
            double worst = 0.0;
            for (std::size_t c = 0; c < d; ++c)
                worst = std::max(worst, std::fabs(mean[c] - parallel.graph_embedding[c]));

            std::printf("%8zu %4zu %12.3f %12.3f %8.2f %10.2e\n", nodes, d, serial_ms,
                        parallel_ms, serial_ms / parallel_ms, worst);
            if (worst > 1e-10) {
                std::fprintf(stderr, "embedding mismatch at nodes=%zu d=%zu\n", nodes, d);
                return 1;
            }
        }
    return 0;
}
