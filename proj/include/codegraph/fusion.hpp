#pragma once

#include <cstdint>
#include <vector>

#include "codegraph/ek.hpp"
#include "codegraph/gnn.hpp"
#include "codegraph/partition.hpp"
#include "codegraph/sast.hpp"

namespace codegraph::fusion {

struct FusionParams {
    gnn::Tensor2 w; // d x 2d
    gnn::Tensor2 b; // d x 1

    static FusionParams init(std::size_t d, std::uint64_t seed);
    static FusionParams zeros(std::size_t d);
};

// Full model state: the graph pipeline plus the fusion head.
struct ModelParams {
    gnn::PgnnParams pgnn;
    FusionParams fuse;

    static ModelParams init(const gnn::Dims& dims, std::uint64_t seed);
};

// Everything the end-to-end pipeline needs besides the parameters. The
// vocabulary and merge table are required; a null api store means no
// descriptions and a null encoder falls back to the hashed-bag reference
// encoder at width d.
struct PipelineContext {
    const sast::Vocabulary* vocab = nullptr;
    const sast::MergeTable* merges = nullptr;
    const ek::ApiStore* api = nullptr;
    const ek::TextEncoder* encoder = nullptr;
    partition::PartitionConfig partition{};
    double threshold = 0.5;
};

// E_f = fc_f([E_p ; E_e]).
gnn::Embedding fuse(const gnn::Embedding& ep, const std::vector<double>& ee,
                    const FusionParams& params);

// Cosine similarity mapped to [0, 1]. Bitwise-equal non-zero vectors score
// exactly 1; a zero vector on either side scores 0.5.
double cosine01(const std::vector<double>& a, const std::vector<double>& b);

struct ProgramEmbeddings {
    gnn::PipelineOutput pipeline;     // E_p and intermediates
    ek::TransformedContext context;   // transformed text
    std::vector<double> ee;           // encoder output
    gnn::Embedding ef;                // fused embedding
    partition::PartitionResult parts;
};

// parse -> S-AST -> partition -> graph pipeline -> transform -> encode -> fuse.
ProgramEmbeddings embed_source(const frontend::SourceUnit& unit, const ModelParams& model,
                               const PipelineContext& ctx);

struct CloneScore {
    double value = 0.0;
    double threshold = 0.5;
    bool label = false; // value >= threshold
};

// Runs both sources through the pipeline with the same parameter object and
// scores the fused embeddings. Parse failures carry the offending side.
CloneScore clone_score(const frontend::SourceUnit& a, const frontend::SourceUnit& b,
                       const ModelParams& model, const PipelineContext& ctx);

} // namespace codegraph::fusion
