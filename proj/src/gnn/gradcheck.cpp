#include <algorithm>
#include <cmath>
#include <numeric>

#include "codegraph/error.hpp"
#include "codegraph/gnn.hpp"
#include "codegraph/util.hpp"
#include "trace.hpp"

namespace codegraph::gnn {

double finite_diff_check(const sast::SAst& graph,
                         const partition::PartitionResult& parts,
                         const PgnnParams& params,
                         double epsilon,
                         double sample_fraction,
                         std::uint64_t seed) {
    PgnnParams work = params;

    const auto loss = [&](const PgnnParams& p) {
        const detail::PipelineTrace tr = detail::pipeline_forward(graph, parts, p);
        double s = 0.0;
        for (double v : tr.ep) s += v * v;
        return s;
    };

    const detail::PipelineTrace tr = detail::pipeline_forward(graph, parts, work);
    std::vector<double> dep(tr.ep.size());
    for (std::size_t i = 0; i < tr.ep.size(); ++i) dep[i] = 2.0 * tr.ep[i];
    PgnnParams grads = PgnnParams::zeros(work.dims);
    detail::pipeline_backward(tr, dep, work, grads);

    std::vector<Tensor2*> param_tensors, grad_tensors;
    work.for_each_tensor([&](const std::string&, Tensor2& t) { param_tensors.push_back(&t); });
    grads.for_each_tensor([&](const std::string&, Tensor2& t) { grad_tensors.push_back(&t); });

    std::size_t total = 0;
    for (const Tensor2* t : param_tensors) total += t->size();
    std::size_t count = static_cast<std::size_t>(
        std::llround(sample_fraction * static_cast<double>(total)));
    count = std::clamp<std::size_t>(count, 1, total);

    std::vector<std::size_t> flat(total);
    std::iota(flat.begin(), flat.end(), 0);
    util::Rng rng(seed);
    rng.shuffle(flat);
    flat.resize(count);

    double worst = 0.0;
    for (std::size_t index : flat) {
        std::size_t ti = 0, offset = index;
        while (offset >= param_tensors[ti]->size()) {
            offset -= param_tensors[ti]->size();
            ++ti;
        }
        double& slot = param_tensors[ti]->data[offset];
        const double original = slot;
        slot = original + epsilon;
        const double up = loss(work);
        slot = original - epsilon;
        const double down = loss(work);
        slot = original;

        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = grad_tensors[ti]->data[offset];
        if (!std::isfinite(numeric) || !std::isfinite(analytic))
            throw NonFiniteError("gradient comparison produced a non-finite value");
        const double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-8});
        worst = std::max(worst, std::fabs(numeric - analytic) / denom);
    }
    return worst;
}

} // namespace codegraph::gnn
