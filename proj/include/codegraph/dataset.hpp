#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codegraph/frontend.hpp"
#include "codegraph/sast.hpp"

namespace codegraph::dataset {

struct Fragment {
    std::uint32_t id = 0;
    frontend::SourceUnit source;
    std::uint32_t functionality_id = 0;
};

// Reads "fragment_id,path,functionality_id" lines and loads each referenced
// file. Relative paths resolve against the index file's directory.
std::vector<Fragment> load_index(const std::string& csv_path);

struct ClonePair {
    std::uint32_t a = 0;
    std::uint32_t b = 0; // always a < b
    int label = 0;       // 1 clone, 0 non-clone
};

struct Split {
    std::vector<std::uint32_t> functionality_ids; // ascending
    std::vector<ClonePair> pairs;                 // positives then negatives, each ascending
};

struct SplitManifest {
    Split train, val, test;
    std::uint64_t seed = 0;
};

struct SplitCounts {
    std::size_t train_k = 0;
    std::size_t val_k = 0;
    std::size_t test_k = 0;
};

enum class SplitBy { Functionality, Random };

struct SplitOptions {
    SplitCounts counts;
    std::uint64_t seed = 42;
    // Caps the positive pairs kept per split; 0 keeps every pair. Negatives
    // always match the kept positive count.
    std::size_t max_positives_per_split = 0;
    // Functionality keeps every functionality id inside exactly one split.
    // Random shuffles fragments instead, with counts as proportions.
    SplitBy by = SplitBy::Functionality;
};

// Deals functionalities into three disjoint sets, takes all within-
// functionality fragment pairs of a split as positives and samples the same
// number of cross-functionality pairs inside that split as negatives.
SplitManifest build_split(const std::vector<Fragment>& fragments, const SplitOptions& opts);

struct CorpusStats {
    std::size_t fragment_count = 0;
    std::size_t functionality_count = 0;
    std::size_t parsed_count = 0;
    std::size_t parse_failures = 0;
    double avg_sast_nodes = 0.0;       // over parsed fragments only
    std::uint32_t recommended_lambda = 0;
};

CorpusStats corpus_stats(const std::vector<Fragment>& fragments,
                         const sast::Vocabulary& vocab, const sast::MergeTable& merges);

} // namespace codegraph::dataset
