#include "codegraph/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "codegraph/error.hpp"
#include "codegraph/partition.hpp"
#include "codegraph/util.hpp"

namespace codegraph::dataset {

std::vector<Fragment> load_index(const std::string& csv_path) {
    const std::string content = util::read_file(csv_path);
    const std::filesystem::path base = std::filesystem::path(csv_path).parent_path();

    std::vector<Fragment> fragments;
    std::set<std::uint32_t> seen_ids;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw FormatError(csv_path, line_no,
                              "expected \"fragment_id,path,functionality_id\"");
        const std::string id_text = util::trim(line.substr(0, c1));
        const std::string path_text = util::trim(line.substr(c1 + 1, c2 - c1 - 1));
        const std::string func_text = util::trim(line.substr(c2 + 1));

        const auto digits = [](const std::string& s) {
            return !s.empty() &&
                   std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
        };
        Fragment f;
        try {
            if (!digits(id_text) || !digits(func_text)) throw std::invalid_argument(id_text);
            f.id = static_cast<std::uint32_t>(std::stoul(id_text));
            f.functionality_id = static_cast<std::uint32_t>(std::stoul(func_text));
        } catch (const std::exception&) {
            throw FormatError(csv_path, line_no, "ids must be non-negative integers");
        }
        if (path_text.empty()) throw FormatError(csv_path, line_no, "empty fragment path");
        if (!seen_ids.insert(f.id).second)
            throw FormatError(csv_path, line_no,
                              "duplicate fragment id " + std::to_string(f.id));

        std::filesystem::path p(path_text);
        if (p.is_relative()) p = base / p;
        f.source = frontend::SourceUnit::from_file(p.string());
        fragments.push_back(std::move(f));
    }
    return fragments;
}

namespace {

using FragmentsByFunc = std::map<std::uint32_t, std::vector<std::uint32_t>>;

FragmentsByFunc group_by_functionality(const std::vector<Fragment>& fragments) {
    FragmentsByFunc grouped;
    for (const Fragment& f : fragments) grouped[f.functionality_id].push_back(f.id);
    for (auto& [func, ids] : grouped) std::sort(ids.begin(), ids.end());
    return grouped;
}

bool pair_less(const ClonePair& x, const ClonePair& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
}

// Positives: every same-functionality pair, optionally capped. Negatives:
// uniform sample of cross-functionality pairs, matched in count.
Split make_split(const FragmentsByFunc& grouped, const std::vector<std::uint32_t>& funcs,
                 const std::map<std::uint32_t, std::uint32_t>& func_of,
                 std::size_t positive_cap, util::Rng& rng, const char* name) {
    Split split;
    split.functionality_ids = funcs;
    std::sort(split.functionality_ids.begin(), split.functionality_ids.end());

    std::vector<ClonePair> positives;
    std::vector<std::uint32_t> members;
    for (std::uint32_t func : split.functionality_ids) {
        const std::vector<std::uint32_t>& ids = grouped.at(func);
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                positives.push_back({ids[i], ids[j], 1});
        members.insert(members.end(), ids.begin(), ids.end());
    }
    if (positive_cap > 0 && positives.size() > positive_cap) {
        rng.shuffle(positives);
        positives.resize(positive_cap);
        std::sort(positives.begin(), positives.end(), pair_less);
    }

    std::sort(members.begin(), members.end());
    std::vector<ClonePair> candidates;
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
            if (func_of.at(members[i]) != func_of.at(members[j]))
                candidates.push_back({members[i], members[j], 0});
    if (candidates.size() < positives.size())
        throw InsufficientNegativesError(
            std::string(name) + " split has " + std::to_string(positives.size()) +
            " positive pairs but only " + std::to_string(candidates.size()) +
            " cross-functionality pairs to draw negatives from");
    rng.shuffle(candidates);
    candidates.resize(positives.size());
    std::sort(candidates.begin(), candidates.end(), pair_less);

    split.pairs = std::move(positives);
    split.pairs.insert(split.pairs.end(), candidates.begin(), candidates.end());
    return split;
}

} // namespace

SplitManifest build_split(const std::vector<Fragment>& fragments, const SplitOptions& opts) {
    const FragmentsByFunc grouped = group_by_functionality(fragments);
    for (const auto& [func, ids] : grouped)
        if (ids.size() < 2)
            throw InsufficientFunctionalitiesError(
                "functionality " + std::to_string(func) + " has " +
                std::to_string(ids.size()) + " fragment(s); at least 2 are needed");

    std::map<std::uint32_t, std::uint32_t> func_of;
    for (const Fragment& f : fragments) func_of[f.id] = f.functionality_id;

    const std::size_t want = opts.counts.train_k + opts.counts.val_k + opts.counts.test_k;
    util::Rng rng(opts.seed);
    SplitManifest manifest;
    manifest.seed = opts.seed;

    if (opts.by == SplitBy::Functionality) {
        std::vector<std::uint32_t> funcs;
        for (const auto& [func, ids] : grouped) funcs.push_back(func);
        if (want > funcs.size())
            throw InsufficientFunctionalitiesError(
                "split needs " + std::to_string(want) + " functionalities but the corpus has " +
                std::to_string(funcs.size()));
        rng.shuffle(funcs);

        const auto take = [&](std::size_t offset, std::size_t count) {
            return std::vector<std::uint32_t>(funcs.begin() + offset,
                                              funcs.begin() + offset + count);
        };
        manifest.train = make_split(grouped, take(0, opts.counts.train_k), func_of,
                                    opts.max_positives_per_split, rng, "train");
        manifest.val = make_split(grouped, take(opts.counts.train_k, opts.counts.val_k),
                                  func_of, opts.max_positives_per_split, rng, "val");
        manifest.test =
            make_split(grouped, take(opts.counts.train_k + opts.counts.val_k, opts.counts.test_k),
                       func_of, opts.max_positives_per_split, rng, "test");
        return manifest;
    }

    // Random mode: deal fragments, not functionalities; counts act as
    // proportions. Functionality ids may then appear in several splits.
    if (want == 0) throw InsufficientFunctionalitiesError("split counts are all zero");
    std::vector<std::uint32_t> ids;
    for (const Fragment& f : fragments) ids.push_back(f.id);
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);

    const double total = static_cast<double>(want);
    const std::size_t n_train = static_cast<std::size_t>(
        static_cast<double>(ids.size()) * static_cast<double>(opts.counts.train_k) / total);
    const std::size_t n_val = static_cast<std::size_t>(
        static_cast<double>(ids.size()) * static_cast<double>(opts.counts.val_k) / total);

    const auto build_pool = [&](std::size_t offset, std::size_t count, const char* name) {
        std::vector<std::uint32_t> pool(ids.begin() + offset, ids.begin() + offset + count);
        std::sort(pool.begin(), pool.end());
        FragmentsByFunc local;
        for (std::uint32_t id : pool) local[func_of.at(id)].push_back(id);
        std::vector<std::uint32_t> funcs;
        for (const auto& [func, members] : local) funcs.push_back(func);
        return make_split(local, funcs, func_of, opts.max_positives_per_split, rng, name);
    };
    manifest.train = build_pool(0, n_train, "train");
    manifest.val = build_pool(n_train, n_val, "val");
    manifest.test = build_pool(n_train + n_val, ids.size() - n_train - n_val, "test");
    return manifest;
}

CorpusStats corpus_stats(const std::vector<Fragment>& fragments,
                         const sast::Vocabulary& vocab, const sast::MergeTable& merges) {
    CorpusStats stats;
    stats.fragment_count = fragments.size();
    std::set<std::uint32_t> funcs;
    for (const Fragment& f : fragments) funcs.insert(f.functionality_id);
    stats.functionality_count = funcs.size();

    // Results land in per-fragment slots; the reduction below is serial, so
    // totals do not depend on the thread schedule.
    std::vector<long long> node_counts(fragments.size(), -1);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(fragments.size()); ++i) {
        try {
            const frontend::Ast ast = frontend::parse(fragments[i].source);
            const sast::SAst graph = sast::build_sast(ast, vocab, merges);
            node_counts[i] = static_cast<long long>(graph.nodes.size());
        } catch (const Error&) {
            node_counts[i] = -1;
        }
    }

    long long total = 0;
    for (long long count : node_counts) {
        if (count < 0)
            ++stats.parse_failures;
        else {
            ++stats.parsed_count;
            total += count;
        }
    }
    if (stats.parsed_count > 0) {
        stats.avg_sast_nodes =
            static_cast<double>(total) / static_cast<double>(stats.parsed_count);
        stats.recommended_lambda = partition::recommend_lambda(stats.avg_sast_nodes);
    }
    return stats;
}

} // namespace codegraph::dataset
