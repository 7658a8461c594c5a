#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "codegraph/dataset.hpp"
#include "codegraph/error.hpp"
#include "codegraph/partition.hpp"
#include "codegraph/sast.hpp"
#include "doctest.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ds = codegraph::dataset;
namespace fe = codegraph::frontend;
namespace cs = codegraph::sast;

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

std::vector<ds::Fragment> make_corpus(std::uint32_t funcs, std::uint32_t per_func) {
    std::vector<ds::Fragment> corpus;
    std::uint32_t id = 0;
    for (std::uint32_t f = 0; f < funcs; ++f)
        for (std::uint32_t k = 0; k < per_func; ++k) {
            ds::Fragment frag;
            frag.id = id++;
            frag.functionality_id = 100 + f;
            corpus.push_back(frag);
        }
    return corpus;
}

std::map<std::uint32_t, std::uint32_t> func_of(const std::vector<ds::Fragment>& corpus) {
    std::map<std::uint32_t, std::uint32_t> m;
    for (const ds::Fragment& f : corpus) m[f.id] = f.functionality_id;
    return m;
}

bool same_pairs(const std::vector<ds::ClonePair>& x, const std::vector<ds::ClonePair>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].a != y[i].a || x[i].b != y[i].b || x[i].label != y[i].label) return false;
    return true;
}

bool same_split(const ds::Split& x, const ds::Split& y) {
    return x.functionality_ids == y.functionality_ids && same_pairs(x.pairs, y.pairs);
}

bool same_manifest(const ds::SplitManifest& x, const ds::SplitManifest& y) {
    return x.seed == y.seed && same_split(x.train, y.train) && same_split(x.val, y.val) &&
           same_split(x.test, y.test);
}

// Checks every structural invariant one split must satisfy: sorted pair
// blocks, positives first, endpoints inside the split, matching counts.
void check_split_invariants(const ds::Split& split,
                            const std::map<std::uint32_t, std::uint32_t>& owner) {
    CHECK(std::is_sorted(split.functionality_ids.begin(), split.functionality_ids.end()));
    const std::set<std::uint32_t> funcs(split.functionality_ids.begin(),
                                        split.functionality_ids.end());

    std::size_t positives = 0;
    std::size_t negatives = 0;
    bool seen_negative = false;
    std::set<std::pair<std::uint32_t, std::uint32_t>> unique;
    for (const ds::ClonePair& p : split.pairs) {
        CHECK(p.a < p.b);
        CHECK(unique.insert({p.a, p.b}).second);
        REQUIRE(owner.count(p.a) == 1);
        REQUIRE(owner.count(p.b) == 1);
        CHECK(funcs.count(owner.at(p.a)) == 1);
        CHECK(funcs.count(owner.at(p.b)) == 1);
        if (p.label == 1) {
            CHECK_FALSE(seen_negative);
            CHECK(owner.at(p.a) == owner.at(p.b));
            ++positives;
        } else {
            CHECK(p.label == 0);
            seen_negative = true;
            CHECK(owner.at(p.a) != owner.at(p.b));
            ++negatives;
        }
    }
    CHECK(positives == negatives);

    const auto sorted_block = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin + 1; i < end; ++i) {
            const ds::ClonePair& prev = split.pairs[i - 1];
            const ds::ClonePair& cur = split.pairs[i];
            CHECK((prev.a < cur.a || (prev.a == cur.a && prev.b < cur.b)));
        }
    };
    sorted_block(0, positives);
    sorted_block(positives, split.pairs.size());
}

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("codegraph-test-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    out << text;
}

const char* kTwiceSource =
    "class Probe {\n"
    "    int twice(int n) {\n"
    "        int r = n + n;\n"
    "        return r;\n"
    "    }\n"
    "}\n";

const char* kSumSource =
    "class Probe {\n"
    "    int sum(int a, int b) {\n"
    "        int total = a + b;\n"
    "        int twice = total + total;\n"
    "        return twice;\n"
    "    }\n"
    "}\n";

ds::Fragment text_fragment(std::uint32_t id, std::uint32_t func, std::string source) {
    ds::Fragment f;
    f.id = id;
    f.functionality_id = func;
    f.source = fe::SourceUnit::from_text(std::move(source), "frag" + std::to_string(id) + ".java");
    return f;
}

std::string generated_program(std::uint32_t index);

} // namespace

TEST_CASE("index file loads fragments and resolves relative paths") {
    TempDir dir("index");
    write_text(dir.path / "a.java", kTwiceSource);
    write_text(dir.path / "sub" / "b.java", kSumSource);

    std::string csv;
    csv += "10,a.java,3\r\n";
    csv += "\n";
    csv += "11,sub/b.java,3\n";
    csv += "12," + (dir.path / "a.java").string() + ",4\n";
    write_text(dir.path / "index.csv", csv);

    const std::vector<ds::Fragment> frags = ds::load_index((dir.path / "index.csv").string());
    REQUIRE(frags.size() == 3);
    CHECK(frags[0].id == 10);
    CHECK(frags[0].functionality_id == 3);
    CHECK(frags[0].source.text == kTwiceSource);
    CHECK(frags[1].id == 11);
    CHECK(frags[1].source.text == kSumSource);
    CHECK(frags[2].id == 12);
    CHECK(frags[2].functionality_id == 4);
    CHECK(frags[2].source.text == kTwiceSource);
}

TEST_CASE("index file rejects malformed rows with the offending line number") {
    TempDir dir("badindex");
    write_text(dir.path / "ok.java", kTwiceSource);
    const std::string csv_path = (dir.path / "index.csv").string();

    SUBCASE("missing column") {
        write_text(dir.path / "index.csv", "1,ok.java,7\n2,ok.java\n");
        try {
            ds::load_index(csv_path);
            FAIL("expected FormatError");
        } catch (const codegraph::FormatError& e) {
            CHECK(e.line == 2);
            CHECK(e.path == csv_path);
        }
    }
    SUBCASE("non-numeric id") {
        write_text(dir.path / "index.csv", "one,ok.java,7\n");
        CHECK_THROWS_AS(ds::load_index(csv_path), codegraph::FormatError);
    }
    SUBCASE("negative id") {
        write_text(dir.path / "index.csv", "-4,ok.java,7\n");
        CHECK_THROWS_AS(ds::load_index(csv_path), codegraph::FormatError);
    }
    SUBCASE("empty path") {
        write_text(dir.path / "index.csv", "1,,7\n");
        CHECK_THROWS_AS(ds::load_index(csv_path), codegraph::FormatError);
    }
    SUBCASE("duplicate fragment id") {
        write_text(dir.path / "index.csv", "1,ok.java,7\n1,ok.java,8\n");
        try {
            ds::load_index(csv_path);
            FAIL("expected FormatError");
        } catch (const codegraph::FormatError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("missing referenced file") {
        write_text(dir.path / "index.csv", "1,ghost.java,7\n");
        CHECK_THROWS_AS(ds::load_index(csv_path), codegraph::Error);
    }
}

TEST_CASE("six functionalities with three fragments each split into 6+6 pairs per part") {
    const std::vector<ds::Fragment> corpus = make_corpus(6, 3);
    ds::SplitOptions opts;
    opts.counts = {2, 2, 2};
    opts.seed = 7;

    const ds::SplitManifest manifest = ds::build_split(corpus, opts);
    const auto owner = func_of(corpus);

    for (const ds::Split* split : {&manifest.train, &manifest.val, &manifest.test}) {
        REQUIRE(split->functionality_ids.size() == 2);
        // Two functionalities of three fragments: 2 * C(3,2) positives.
        REQUIRE(split->pairs.size() == 12);
        std::size_t positives = 0;
        for (const ds::ClonePair& p : split->pairs) positives += p.label == 1 ? 1 : 0;
        CHECK(positives == 6);
        check_split_invariants(*split, owner);
    }

    std::set<std::uint32_t> all;
    for (const ds::Split* split : {&manifest.train, &manifest.val, &manifest.test})
        all.insert(split->functionality_ids.begin(), split->functionality_ids.end());
    CHECK(all.size() == 6);

    const ds::SplitManifest again = ds::build_split(corpus, opts);
    CHECK(same_manifest(manifest, again));
}

TEST_CASE("forty-three functionalities split 22/11/10 without leakage") {
    const std::vector<ds::Fragment> corpus = make_corpus(43, 2);
    ds::SplitOptions opts;
    opts.counts = {22, 11, 10};
    opts.seed = 42;

    const ds::SplitManifest manifest = ds::build_split(corpus, opts);
    CHECK(manifest.seed == 42);
    CHECK(manifest.train.functionality_ids.size() == 22);
    CHECK(manifest.val.functionality_ids.size() == 11);
    CHECK(manifest.test.functionality_ids.size() == 10);

    std::set<std::uint32_t> all;
    std::size_t total = 0;
    const auto owner = func_of(corpus);
    for (const ds::Split* split : {&manifest.train, &manifest.val, &manifest.test}) {
        all.insert(split->functionality_ids.begin(), split->functionality_ids.end());
        total += split->functionality_ids.size();
        check_split_invariants(*split, owner);
    }
    CHECK(total == 43);
    CHECK(all.size() == 43);

    CHECK(same_manifest(manifest, ds::build_split(corpus, opts)));
    ds::SplitOptions other = opts;
    other.seed = 43;
    CHECK_FALSE(same_manifest(manifest, ds::build_split(corpus, other)));
}

TEST_CASE("single-functionality splits cannot draw negatives") {
    const std::vector<ds::Fragment> corpus = make_corpus(3, 2);
    ds::SplitOptions opts;
    opts.counts = {1, 1, 1};
    CHECK_THROWS_AS(ds::build_split(corpus, opts), codegraph::InsufficientNegativesError);
}

TEST_CASE("asking for more functionalities than the corpus has fails") {
    const std::vector<ds::Fragment> corpus = make_corpus(4, 2);
    ds::SplitOptions opts;
    opts.counts = {3, 1, 1};
    CHECK_THROWS_AS(ds::build_split(corpus, opts), codegraph::InsufficientFunctionalitiesError);
}

TEST_CASE("a functionality with a single fragment is rejected") {
    std::vector<ds::Fragment> corpus = make_corpus(4, 2);
    ds::Fragment lone;
    lone.id = 99;
    lone.functionality_id = 500;
    corpus.push_back(lone);
    ds::SplitOptions opts;
    opts.counts = {2, 1, 1};
    CHECK_THROWS_AS(ds::build_split(corpus, opts), codegraph::InsufficientFunctionalitiesError);
}

TEST_CASE("positive cap keeps a subset of the uncapped pairs and matches negatives") {
    const std::vector<ds::Fragment> corpus = make_corpus(8, 5);
    ds::SplitOptions opts;
    opts.counts = {4, 2, 2};
    opts.seed = 11;
    const ds::SplitManifest full = ds::build_split(corpus, opts);

    ds::SplitOptions capped = opts;
    capped.max_positives_per_split = 5;
    const ds::SplitManifest cut = ds::build_split(corpus, capped);
    const auto owner = func_of(corpus);

    // Train holds four functionalities of five fragments: 4 * C(5,2) = 40.
    std::size_t full_pos = 0;
    for (const ds::ClonePair& p : full.train.pairs) full_pos += p.label == 1 ? 1 : 0;
    CHECK(full_pos == 40);

    std::set<std::pair<std::uint32_t, std::uint32_t>> universe;
    for (const ds::ClonePair& p : full.train.pairs)
        if (p.label == 1) universe.insert({p.a, p.b});

    std::size_t cut_pos = 0;
    for (const ds::ClonePair& p : cut.train.pairs)
        if (p.label == 1) {
            ++cut_pos;
            CHECK(universe.count({p.a, p.b}) == 1);
        }
    CHECK(cut_pos == 5);
    CHECK(cut.train.pairs.size() == 10);
    check_split_invariants(cut.train, owner);
}

TEST_CASE("split invariants hold across seeds") {
    const std::vector<ds::Fragment> corpus = make_corpus(9, 4);
    const auto owner = func_of(corpus);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull, 94ull}) {
        ds::SplitOptions opts;
        opts.counts = {5, 2, 2};
        opts.seed = seed;
        const ds::SplitManifest manifest = ds::build_split(corpus, opts);
        std::set<std::uint32_t> all;
        for (const ds::Split* split : {&manifest.train, &manifest.val, &manifest.test}) {
            check_split_invariants(*split, owner);
            for (std::uint32_t func : split->functionality_ids) CHECK(all.insert(func).second);
        }
        CHECK(all.size() == 9);
    }
}

TEST_CASE("random mode deals fragments proportionally and keeps pairs inside each part") {
    std::vector<ds::Fragment> corpus = make_corpus(4, 6);
    ds::SplitOptions opts;
    opts.counts = {2, 1, 1};
    opts.seed = 5;
    opts.by = ds::SplitBy::Random;

    const ds::SplitManifest manifest = ds::build_split(corpus, opts);

    const auto members_of = [](const ds::Split& split) {
        std::set<std::uint32_t> members;
        for (const ds::ClonePair& p : split.pairs) {
            members.insert(p.a);
            members.insert(p.b);
        }
        return members;
    };
    const std::set<std::uint32_t> train_members = members_of(manifest.train);
    const std::set<std::uint32_t> val_members = members_of(manifest.val);
    const std::set<std::uint32_t> test_members = members_of(manifest.test);

    // 24 fragments dealt at proportions 2:1:1 bound the pool sizes.
    CHECK(train_members.size() <= 12);
    CHECK(val_members.size() <= 6);
    CHECK(test_members.size() <= 6);

    const auto owner = func_of(corpus);
    for (const ds::Split* split : {&manifest.train, &manifest.val, &manifest.test}) {
        std::size_t positives = 0;
        std::size_t negatives = 0;
        for (const ds::ClonePair& p : split->pairs) {
            CHECK(p.a < p.b);
            if (p.label == 1) {
                CHECK(owner.at(p.a) == owner.at(p.b));
                ++positives;
            } else {
                CHECK(owner.at(p.a) != owner.at(p.b));
                ++negatives;
            }
        }
        CHECK(positives == negatives);
    }

    // Fragment pools stay disjoint even though functionality ids may repeat.
    for (std::uint32_t id : val_members) CHECK(train_members.count(id) == 0);
    for (std::uint32_t id : test_members) {
        CHECK(train_members.count(id) == 0);
        CHECK(val_members.count(id) == 0);
    }

    CHECK(same_manifest(manifest, ds::build_split(corpus, opts)));
}

TEST_CASE("corpus stats average the node counts of parsed fragments") {
    std::vector<ds::Fragment> corpus;
    corpus.push_back(text_fragment(1, 100, kTwiceSource));
    corpus.push_back(text_fragment(2, 100, kSumSource));

    SUBCASE("single fragment") {
        corpus.resize(1);
        const ds::CorpusStats stats = ds::corpus_stats(corpus, shipped_vocab(), shipped_merges());
        CHECK(stats.fragment_count == 1);
        CHECK(stats.functionality_count == 1);
        CHECK(stats.parsed_count == 1);
        CHECK(stats.parse_failures == 0);
        CHECK(stats.avg_sast_nodes == doctest::Approx(28.0).epsilon(1e-12));
        CHECK(stats.recommended_lambda == 10);
    }
    SUBCASE("two fragments") {
        const ds::CorpusStats stats = ds::corpus_stats(corpus, shipped_vocab(), shipped_merges());
        CHECK(stats.fragment_count == 2);
        CHECK(stats.parsed_count == 2);
        // (28 + 43) / 2
        CHECK(stats.avg_sast_nodes == doctest::Approx(35.5).epsilon(1e-12));
        CHECK(stats.recommended_lambda == 10);
    }
}

TEST_CASE("corpus stats count parse failures and average the rest") {
    std::vector<ds::Fragment> corpus;
    corpus.push_back(text_fragment(1, 100, kTwiceSource));
    corpus.push_back(text_fragment(2, 101, "class { broken"));
    corpus.push_back(text_fragment(3, 101, kSumSource));

    const ds::CorpusStats stats = ds::corpus_stats(corpus, shipped_vocab(), shipped_merges());
    CHECK(stats.fragment_count == 3);
    CHECK(stats.functionality_count == 2);
    CHECK(stats.parsed_count == 2);
    CHECK(stats.parse_failures == 1);
    CHECK(stats.avg_sast_nodes == doctest::Approx(35.5).epsilon(1e-12));
}

TEST_CASE("corpus stats match an independent serial fold on a generated corpus") {
    std::vector<ds::Fragment> corpus;
    for (std::uint32_t i = 0; i < 100; ++i)
        corpus.push_back(text_fragment(i, 100 + i % 7, generated_program(i)));

    double total = 0.0;
    std::size_t parsed = 0;
    for (const ds::Fragment& f : corpus) {
        const fe::Ast ast = fe::parse(f.source);
        const cs::SAst graph = cs::build_sast(ast, shipped_vocab(), shipped_merges());
        total += static_cast<double>(graph.nodes.size());
        ++parsed;
    }
    const double expected = total / static_cast<double>(parsed);

    const ds::CorpusStats stats = ds::corpus_stats(corpus, shipped_vocab(), shipped_merges());
    CHECK(stats.fragment_count == 100);
    CHECK(stats.functionality_count == 7);
    CHECK(stats.parsed_count == 100);
    CHECK(stats.parse_failures == 0);
    CHECK(stats.avg_sast_nodes == doctest::Approx(expected).epsilon(1e-12));
    CHECK(stats.recommended_lambda ==
          codegraph::partition::recommend_lambda(stats.avg_sast_nodes));

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const ds::CorpusStats serial = ds::corpus_stats(corpus, shipped_vocab(), shipped_merges());
    omp_set_num_threads(saved);
    CHECK(serial.avg_sast_nodes == stats.avg_sast_nodes);
    CHECK(serial.parsed_count == stats.parsed_count);
#endif
}

TEST_CASE("empty corpus reports zeros") {
    const ds::CorpusStats stats = ds::corpus_stats({}, shipped_vocab(), shipped_merges());
    CHECK(stats.fragment_count == 0);
    CHECK(stats.parsed_count == 0);
    CHECK(stats.parse_failures == 0);
    CHECK(stats.avg_sast_nodes == 0.0);
    CHECK(stats.recommended_lambda == 0);
}

namespace {

std::string generated_program(std::uint32_t index) {
    const std::size_t statements = 1 + index % 9;
    std::string body = "        int v0 = seed + " + std::to_string(index) + ";\n";
    for (std::size_t s = 1; s < statements; ++s)
        body += "        int v" + std::to_string(s) + " = v" + std::to_string(s - 1) + " * 2;\n";
    body += "        return v" + std::to_string(statements - 1) + ";\n";
    return "class Gen" + std::to_string(index) +
           " {\n    int run(int seed) {\n" + body + "    }\n}\n";
}

} // namespace
