#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "codegraph/util.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + "'" + std::string(CODEGRAPH_CLI_PATH) + "' " + args;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string data_flags() {
    const std::string dir(CODEGRAPH_DATA_DIR);
    return " --vocab '" + dir + "/vocab.txt' --merges '" + dir + "/merges.txt'";
}

std::string api_flag() { return " --api '" + std::string(CODEGRAPH_DATA_DIR) + "/api_pairs.tsv'"; }

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("codegraph-cli-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kAbsSource =
    "class Walk {\n"
    "    int distance(int from, int to) {\n"
    "        int gap = to - from;\n"
    "        int size = Math.abs(gap);\n"
    "        return size;\n"
    "    }\n"
    "}\n";

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// 6 functionalities x 3 fragments, enough for a 2/2/2 split.
void write_corpus(const TempDir& dir) {
    std::string index;
    for (int f = 0; f < 6; ++f)
        for (int k = 0; k < 3; ++k) {
            const int id = f * 3 + k;
            const std::string name = "frag" + std::to_string(id) + ".java";
            write_text(dir.path / name,
                       "class F" + std::to_string(id) +
                           " {\n    int run(int a) {\n        int b = a + " + std::to_string(id) +
                           ";\n        return b;\n    }\n}\n");
            index += std::to_string(id) + "," + name + "," + std::to_string(f) + "\n";
        }
    write_text(dir.path / "index.csv", index);
}

std::string slurp(const std::string& path) { return codegraph::util::read_file(path); }

} // namespace

TEST_CASE("cli parse emits a JSON tree and reports missing files") {
    TempDir dir("parse");
    write_text(dir.path / "a.java", kAbsSource);

    const RunResult ok = run_cli("parse '" + dir.file("a.java") + "'");
    CHECK(ok.exit_code == 0);
    const auto doc = nlohmann::json::parse(ok.out);
    CHECK(doc.at("schema_version") == 1);
    CHECK(doc.at("nodes").size() > 10);

    const RunResult missing =
        run_cli("parse '" + dir.file("ghost.java") + "' 2>'" + dir.file("err") + "'");
    CHECK(missing.exit_code == 1);
    const auto err = nlohmann::json::parse(slurp(dir.file("err")));
    CHECK(err.at("error") == "io_error");

    write_text(dir.path / "bad.java", "class { nope");
    const RunResult bad =
        run_cli("parse '" + dir.file("bad.java") + "' 2>'" + dir.file("err2") + "'");
    CHECK(bad.exit_code == 1);
    const auto err2 = nlohmann::json::parse(slurp(dir.file("err2")));
    CHECK(err2.at("error") == "parse_error");
    CHECK(err2.contains("line"));
}

TEST_CASE("cli rejects unknown subcommands and missing arguments with exit 2") {
    CHECK(run_cli("frobnicate 2>/dev/null").exit_code == 2);
    CHECK(run_cli("parse 2>/dev/null").exit_code == 2);
    CHECK(run_cli("2>/dev/null").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("split --index x.csv --counts 1,2 2>/dev/null").exit_code == 2);
    CHECK(run_cli("embed x.java --encoder bogus 2>/dev/null").exit_code == 2);
}

TEST_CASE("cli sast writes matching JSON and DOT exports") {
    TempDir dir("sast");
    write_text(dir.path / "a.java", kAbsSource);

    const RunResult res = run_cli("sast '" + dir.file("a.java") + "'" + data_flags() +
                                  " --out '" + dir.file("g.json") + "' --dot '" +
                                  dir.file("g.dot") + "'");
    CHECK(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir.file("g.json")));
    CHECK(doc.at("nodes").size() > doc.at("ast_node_count").get<std::size_t>());

    const std::string dot = slurp(dir.file("g.dot"));
    CHECK(dot.rfind("digraph sast {", 0) == 0);
    CHECK(dot.find("color=") != std::string::npos);
}

TEST_CASE("cli partition covers the graph at the requested lambda") {
    TempDir dir("part");
    write_text(dir.path / "a.java", kAbsSource);

    const RunResult res =
        run_cli("partition '" + dir.file("a.java") + "'" + data_flags() + " --lambda 6");
    CHECK(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.out);
    CHECK(doc.at("lambda") == 6);
    CHECK(doc.at("subgraphs").size() >= 2);
}

TEST_CASE("cli embed is byte-identical across runs and through checkpoints") {
    TempDir dir("embed");
    write_text(dir.path / "a.java", kAbsSource);
    const std::string base = "embed '" + dir.file("a.java") + "'" + data_flags() +
                             " --dims 8 --lambda 6 --seed 5";

    CHECK(run_cli(base + " --out '" + dir.file("e1.json") + "' --save-params '" +
                  dir.file("m.ckpt") + "'")
              .exit_code == 0);
    CHECK(run_cli(base + " --out '" + dir.file("e2.json") + "'").exit_code == 0);
    CHECK(slurp(dir.file("e1.json")) == slurp(dir.file("e2.json")));

    CHECK(run_cli("embed '" + dir.file("a.java") + "'" + data_flags() + " --lambda 6 --params '" +
                  dir.file("m.ckpt") + "' --out '" + dir.file("e3.json") + "'")
              .exit_code == 0);
    CHECK(slurp(dir.file("e1.json")) == slurp(dir.file("e3.json")));

    const auto doc = nlohmann::json::parse(slurp(dir.file("e1.json")));
    CHECK(doc.at("ep").size() == 8);
    CHECK(doc.at("ef").size() == 8);
    CHECK(doc.at("subgraph_count").get<int>() >= 2);
}

TEST_CASE("cli clone-score prints a deterministic verdict") {
    TempDir dir("clone");
    write_text(dir.path / "a.java", kAbsSource);
    write_text(dir.path / "b.java", kAbsSource);

    const std::string cmd = "clone-score '" + dir.file("a.java") + "' '" + dir.file("b.java") +
                            "'" + data_flags() + api_flag() + " --dims 8 --lambda 6";
    const RunResult first = run_cli(cmd);
    CHECK(first.exit_code == 0);
    const auto doc = nlohmann::json::parse(first.out);
    CHECK(doc.at("value") == 1.0);
    CHECK(doc.at("label") == true);
    CHECK(run_cli(cmd).out == first.out);
}

TEST_CASE("cli transform starts with the serialization and appends descriptions") {
    TempDir dir("transform");
    write_text(dir.path / "a.java", kAbsSource);

    const RunResult res =
        run_cli("transform '" + dir.file("a.java") + "'" + api_flag() + " --max-context 0");
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("CompilationUnit ClassDeclaration", 0) == 0);
    CHECK(res.out.find("Returns the absolute value of an int value.") != std::string::npos);

    const RunResult cut = run_cli("transform '" + dir.file("a.java") + "' --max-context 3");
    CHECK(cut.exit_code == 0);
    CHECK(cut.out == "CompilationUnit ClassDeclaration Walk\n");
}

TEST_CASE("cli split honors counts and stays seed-stable") {
    TempDir dir("split");
    write_corpus(dir);
    const std::string cmd =
        "split --index '" + dir.file("index.csv") + "' --counts 2,2,2 --seed 11";

    const RunResult first = run_cli(cmd);
    CHECK(first.exit_code == 0);
    const auto doc = nlohmann::json::parse(first.out);
    for (const char* part : {"train", "val", "test"}) {
        CHECK(doc.at(part).at("functionality_ids").size() == 2);
        CHECK(doc.at(part).at("pairs").size() == 12);
    }
    CHECK(run_cli(cmd).out == first.out);
    CHECK(run_cli(cmd + " --by random").exit_code == 0);

    const RunResult overflow = run_cli("split --index '" + dir.file("index.csv") +
                                       "' --counts 5,1,1 2>'" + dir.file("err") + "'");
    CHECK(overflow.exit_code == 1);
    CHECK(nlohmann::json::parse(slurp(dir.file("err"))).at("error") ==
          "insufficient_functionalities");
}

TEST_CASE("cli stats reports corpus averages") {
    TempDir dir("stats");
    write_corpus(dir);

    const RunResult res =
        run_cli("stats --index '" + dir.file("index.csv") + "'" + data_flags() + " --jobs 2");
    CHECK(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.out);
    CHECK(doc.at("fragment_count") == 18);
    CHECK(doc.at("functionality_count") == 6);
    CHECK(doc.at("parsed_count") == 18);
    CHECK(doc.at("parse_failures") == 0);
    CHECK(doc.at("avg_sast_nodes").get<double>() > 10.0);
    CHECK(doc.at("recommended_lambda").get<int>() >= 10);
}

TEST_CASE("cli selfcheck passes at the documented flags") {
    const RunResult res = run_cli("selfcheck --dims 8 --seed 7");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("[PASS] permutation invariance") != std::string::npos);
    CHECK(res.out.find("[PASS] gradient check") != std::string::npos);
    CHECK(res.out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("cli config file and flags compose with documented precedence") {
    TempDir dir("config");
    write_text(dir.path / "a.java", kAbsSource);
    write_text(dir.path / "cg.conf",
               "dims = 8\nlambda = 6\nseed = 5\nvocab = " + std::string(CODEGRAPH_DATA_DIR) +
                   "/vocab.txt\nmerges = " + std::string(CODEGRAPH_DATA_DIR) + "/merges.txt\n");

    const std::string flag_run = "embed '" + dir.file("a.java") + "'" + data_flags() +
                                 " --dims 8 --lambda 6 --seed 5";
    const RunResult flags = run_cli(flag_run);
    REQUIRE(flags.exit_code == 0);

    const RunResult conf =
        run_cli("embed '" + dir.file("a.java") + "' --config '" + dir.file("cg.conf") + "'");
    CHECK(conf.exit_code == 0);
    CHECK(conf.out == flags.out);

    const RunResult env = run_cli("embed '" + dir.file("a.java") + "'",
                                  "CODEGRAPH_CONFIG='" + dir.file("cg.conf") + "' ");
    CHECK(env.exit_code == 0);
    CHECK(env.out == flags.out);

    const RunResult overridden = run_cli(
        "embed '" + dir.file("a.java") + "' --config '" + dir.file("cg.conf") + "' --seed 9");
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.out != flags.out);

    write_text(dir.path / "bad.conf", "nonsense = 1\n");
    const RunResult bad = run_cli("embed '" + dir.file("a.java") + "' --config '" +
                                  dir.file("bad.conf") + "' 2>'" + dir.file("err") + "'");
    CHECK(bad.exit_code == 1);
    CHECK(nlohmann::json::parse(slurp(dir.file("err"))).at("error") == "format_error");
}
