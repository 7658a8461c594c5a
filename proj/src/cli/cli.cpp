#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "codegraph/cli.hpp"
#include "codegraph/dataset.hpp"
#include "codegraph/ek.hpp"
#include "codegraph/error.hpp"
#include "codegraph/fusion.hpp"
#include "codegraph/io.hpp"
#include "codegraph/util.hpp"

namespace codegraph::cli {

namespace {

struct Options {
    std::string config_path;
    std::uint32_t lambda = 30;
    std::size_t dims = 32;
    std::uint64_t seed = 42;
    std::string vocab = "data/vocab.txt";
    std::string merges = "data/merges.txt";
    std::string api;
    std::string params_path;
    std::string encoder = "reference";
    std::string encoder_command;
    std::size_t max_context = 400;
    double threshold = 0.5;
};

struct CommandArgs {
    std::string input;
    std::string input_b;
    std::string out;
    std::string dot;
    std::string index;
    std::string counts;
    std::string by = "functionality";
    std::string save_params;
    std::size_t max_positives = 0;
    std::size_t jobs = 0;
    std::size_t self_dims = 8;
};

std::uint64_t parse_u64(const std::string& text, const std::string& path, const std::string& key) {
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(text, &used);
        if (used != text.size() || text.empty() || text[0] == '-')
            throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw FormatError(path, 0,
                          "config key \"" + key + "\" needs an integer, got \"" + text + "\"");
    }
}

// File values overwrite defaults; command-line flags parsed afterwards win.
void apply_config(const std::map<std::string, std::string>& values, const std::string& path,
                  Options& opts) {
    for (const auto& [key, value] : values) {
        if (key == "lambda")
            opts.lambda = static_cast<std::uint32_t>(parse_u64(value, path, key));
        else if (key == "dims")
            opts.dims = parse_u64(value, path, key);
        else if (key == "seed")
            opts.seed = parse_u64(value, path, key);
        else if (key == "max_context")
            opts.max_context = parse_u64(value, path, key);
        else if (key == "vocab")
            opts.vocab = value;
        else if (key == "merges")
            opts.merges = value;
        else if (key == "api")
            opts.api = value;
        else if (key == "params")
            opts.params_path = value;
        else if (key == "encoder")
            opts.encoder = value;
        else if (key == "encoder_command")
            opts.encoder_command = value;
        else if (key == "threshold") {
            try {
                opts.threshold = std::stod(value);
            } catch (const std::exception&) {
                throw FormatError(path, 0, "config key \"threshold\" needs a number");
            }
        } else {
            throw FormatError(path, 0, "unknown config key \"" + key + "\"");
        }
    }
    if (opts.lambda < 1) throw FormatError(path, 0, "lambda must be at least 1");
    if (opts.dims < 2) throw FormatError(path, 0, "dims must be at least 2");
    if (opts.encoder != "reference" && opts.encoder != "command")
        throw FormatError(path, 0, "encoder must be \"reference\" or \"command\"");
}

// --config beats CODEGRAPH_CONFIG; either names a file that must exist.
std::optional<std::string> config_location(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    if (const char* env = std::getenv("CODEGRAPH_CONFIG"); env && *env)
        return std::string(env);
    return std::nullopt;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        util::write_file(out_path, text);
}

struct Model {
    sast::Vocabulary vocab;
    sast::MergeTable merges;
    fusion::ModelParams params;
    std::optional<ek::ApiStore> api;
    std::unique_ptr<ek::TextEncoder> encoder;
    fusion::PipelineContext ctx;
};

// Loads everything embed/clone-score need. A checkpoint fixes the dims; the
// --dims/--seed flags only apply when parameters are freshly initialised.
Model load_model(const Options& opts) {
    Model m;
    m.vocab = sast::build_vocabulary(opts.vocab);
    m.merges = sast::MergeTable::load(opts.merges);

    if (!opts.params_path.empty()) {
        m.params = io::load_checkpoint(opts.params_path);
        if (m.params.pgnn.dims.vocab_size != m.vocab.size())
            throw ShapeMismatchError(
                "checkpoint was built for a vocabulary of " +
                std::to_string(m.params.pgnn.dims.vocab_size) + " entries, this one has " +
                std::to_string(m.vocab.size()));
    } else {
        gnn::Dims dims;
        dims.d = opts.dims;
        dims.vocab_size = m.vocab.size();
        m.params = fusion::ModelParams::init(dims, opts.seed);
    }

    if (!opts.api.empty()) m.api = ek::load_api_pairs(opts.api);

    const std::size_t d = m.params.pgnn.dims.d;
    if (opts.encoder == "command")
        m.encoder =
            std::make_unique<ek::CommandEncoder>(opts.encoder_command, d, opts.max_context);
    else
        m.encoder = std::make_unique<ek::ReferenceEncoder>(d, opts.max_context);

    m.ctx.vocab = &m.vocab;
    m.ctx.merges = &m.merges;
    m.ctx.api = m.api ? &*m.api : nullptr;
    m.ctx.encoder = m.encoder.get();
    m.ctx.partition.lambda = opts.lambda;
    m.ctx.threshold = opts.threshold;
    return m;
}

dataset::SplitCounts parse_counts(const std::string& text) {
    dataset::SplitCounts counts;
    std::size_t* slots[3] = {&counts.train_k, &counts.val_k, &counts.test_k};
    std::size_t begin = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t comma = text.find(',', begin);
        const bool last = i == 2;
        if (last != (comma == std::string::npos))
            throw CLI::ValidationError("--counts", "expected three comma-separated integers");
        const std::string part =
            text.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
        try {
            std::size_t used = 0;
            *slots[i] = std::stoull(part, &used);
            if (used != part.size() || part.empty()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--counts", "expected three comma-separated integers");
        }
        begin = comma + 1;
    }
    return counts;
}

int dispatch(const CLI::App& app, const Options& opts, const CommandArgs& args) {
    if (app.got_subcommand("parse")) {
        const frontend::Ast ast = frontend::parse(frontend::SourceUnit::from_file(args.input));
        emit(io::dump(io::ast_json(ast)), args.out);
        return 0;
    }
    if (app.got_subcommand("sast")) {
        const frontend::Ast ast = frontend::parse(frontend::SourceUnit::from_file(args.input));
        const sast::Vocabulary vocab = sast::build_vocabulary(opts.vocab);
        const sast::MergeTable merges = sast::MergeTable::load(opts.merges);
        const sast::SAst graph = sast::build_sast(ast, vocab, merges);
        emit(io::dump(io::sast_json(graph)), args.out);
        if (!args.dot.empty()) util::write_file(args.dot, io::sast_dot(graph));
        return 0;
    }
    if (app.got_subcommand("partition")) {
        const frontend::Ast ast = frontend::parse(frontend::SourceUnit::from_file(args.input));
        const sast::Vocabulary vocab = sast::build_vocabulary(opts.vocab);
        const sast::MergeTable merges = sast::MergeTable::load(opts.merges);
        const sast::SAst graph = sast::build_sast(ast, vocab, merges);
        partition::PartitionConfig cfg;
        cfg.lambda = opts.lambda;
        emit(io::dump(io::partition_json(partition::partition(graph, cfg))), args.out);
        return 0;
    }
    if (app.got_subcommand("embed")) {
        const Model m = load_model(opts);
        const fusion::ProgramEmbeddings emb =
            fusion::embed_source(frontend::SourceUnit::from_file(args.input), m.params, m.ctx);
        emit(io::dump(io::embedding_json(emb)), args.out);
        if (!args.save_params.empty()) io::save_checkpoint(args.save_params, m.params);
        return 0;
    }
    if (app.got_subcommand("transform")) {
        const frontend::Ast ast = frontend::parse(frontend::SourceUnit::from_file(args.input));
        ek::ApiStore store;
        if (!opts.api.empty()) store = ek::load_api_pairs(opts.api);
        const ek::TransformedContext ctx = ek::transform(ast, store);
        const std::string text =
            opts.max_context > 0 ? ek::truncate_tokens(ctx.text, opts.max_context) : ctx.text;
        emit(text + "\n", args.out);
        return 0;
    }
    if (app.got_subcommand("clone-score")) {
        const Model m = load_model(opts);
        const fusion::CloneScore score =
            fusion::clone_score(frontend::SourceUnit::from_file(args.input),
                                frontend::SourceUnit::from_file(args.input_b), m.params, m.ctx);
        emit(io::dump(io::clone_score_json(score)), args.out);
        return 0;
    }
    if (app.got_subcommand("split")) {
        dataset::SplitOptions sopts;
        sopts.counts = parse_counts(args.counts);
        const std::vector<dataset::Fragment> fragments = dataset::load_index(args.index);
        sopts.seed = opts.seed;
        sopts.by = args.by == "random" ? dataset::SplitBy::Random : dataset::SplitBy::Functionality;
        sopts.max_positives_per_split = args.max_positives;
        emit(io::dump(io::manifest_json(dataset::build_split(fragments, sopts))), args.out);
        return 0;
    }
    if (app.got_subcommand("stats")) {
        const std::vector<dataset::Fragment> fragments = dataset::load_index(args.index);
        const sast::Vocabulary vocab = sast::build_vocabulary(opts.vocab);
        const sast::MergeTable merges = sast::MergeTable::load(opts.merges);
#ifdef _OPENMP
        if (args.jobs > 0) omp_set_num_threads(static_cast<int>(args.jobs));
#endif
        emit(io::dump(io::stats_json(dataset::corpus_stats(fragments, vocab, merges))), args.out);
        return 0;
    }
    if (app.got_subcommand("selfcheck")) {
        const SelfcheckReport report = run_selfcheck(args.self_dims, opts.seed, std::cout);
        return report.passed ? 0 : 1;
    }
    return 2;
}

} // namespace

int run(int argc, const char* const* argv) {
    Options opts;
    CommandArgs args;

    CLI::App app{"program-graph pipeline: parse, build S-ASTs, partition, embed, and score"};
    app.require_subcommand(1);
    // Subcommands hand unmatched flags back up so --config works anywhere.
    app.fallthrough();
    app.add_option("--config", opts.config_path,
                   "config file (key = value); CODEGRAPH_CONFIG sets the default path");

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--vocab", opts.vocab, "subword vocabulary file");
        cmd->add_option("--merges", opts.merges, "BPE merge file");
    };
    const auto add_lambda = [&](CLI::App* cmd) {
        cmd->add_option("--lambda", opts.lambda, "minimum nodes per subgraph")
            ->check(CLI::Range(1u, 1000000u));
    };
    const auto add_model = [&](CLI::App* cmd) {
        add_common(cmd);
        add_lambda(cmd);
        cmd->add_option("--dims", opts.dims, "embedding width d")->check(CLI::Range(2, 4096));
        cmd->add_option("--seed", opts.seed, "parameter init seed");
        cmd->add_option("--params", opts.params_path, "load parameters from this checkpoint");
        cmd->add_option("--api", opts.api, "API description pairs (TSV)");
        cmd->add_option("--encoder", opts.encoder, "context encoder")
            ->check(CLI::IsMember({"reference", "command"}));
        cmd->add_option("--encoder-command", opts.encoder_command,
                        "shell command for --encoder command");
        cmd->add_option("--max-context", opts.max_context,
                        "token budget for the encoder input (0 = unlimited)");
        cmd->add_option("--threshold", opts.threshold, "clone decision threshold");
    };

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse a source file to a JSON AST");
    parse_cmd->add_option("file", args.input, "source file")->required();
    parse_cmd->add_option("--out", args.out, "output path (default stdout)");

    CLI::App* sast_cmd = app.add_subcommand("sast", "build the subtoken AST graph");
    sast_cmd->add_option("file", args.input, "source file")->required();
    sast_cmd->add_option("--out", args.out, "output path (default stdout)");
    sast_cmd->add_option("--dot", args.dot, "also write a GraphViz rendering here");
    add_common(sast_cmd);

    CLI::App* part_cmd = app.add_subcommand("partition", "split the graph into subgraphs");
    part_cmd->add_option("file", args.input, "source file")->required();
    part_cmd->add_option("--out", args.out, "output path (default stdout)");
    add_common(part_cmd);
    add_lambda(part_cmd);

    CLI::App* embed_cmd = app.add_subcommand("embed", "run the full embedding pipeline");
    embed_cmd->add_option("file", args.input, "source file")->required();
    embed_cmd->add_option("--out", args.out, "output path (default stdout)");
    embed_cmd->add_option("--save-params", args.save_params,
                          "write the parameters used to this checkpoint");
    add_model(embed_cmd);

    CLI::App* trans_cmd =
        app.add_subcommand("transform", "serialize the AST and append API descriptions");
    trans_cmd->add_option("file", args.input, "source file")->required();
    trans_cmd->add_option("--out", args.out, "output path (default stdout)");
    trans_cmd->add_option("--api", opts.api, "API description pairs (TSV)");
    trans_cmd->add_option("--max-context", opts.max_context,
                          "token budget for the output (0 = unlimited)");

    CLI::App* clone_cmd = app.add_subcommand("clone-score", "score two files for cloneness");
    clone_cmd->add_option("fileA", args.input, "first source file")->required();
    clone_cmd->add_option("fileB", args.input_b, "second source file")->required();
    clone_cmd->add_option("--out", args.out, "output path (default stdout)");
    add_model(clone_cmd);

    CLI::App* split_cmd = app.add_subcommand("split", "build a leakage-free dataset split");
    split_cmd->add_option("--index", args.index, "fragment index CSV")->required();
    split_cmd->add_option("--counts", args.counts, "train,val,test set sizes")->required();
    split_cmd->add_option("--seed", opts.seed, "shuffle seed");
    split_cmd->add_option("--by", args.by, "assignment unit")
        ->check(CLI::IsMember({"functionality", "random"}));
    split_cmd->add_option("--max-positives", args.max_positives,
                          "cap on positive pairs per split (0 = keep all)");
    split_cmd->add_option("--out", args.out, "output path (default stdout)");

    CLI::App* stats_cmd = app.add_subcommand("stats", "corpus statistics and lambda guidance");
    stats_cmd->add_option("--index", args.index, "fragment index CSV")->required();
    stats_cmd->add_option("--jobs", args.jobs, "worker threads (0 = library default)");
    stats_cmd->add_option("--out", args.out, "output path (default stdout)");
    add_common(stats_cmd);

    CLI::App* self_cmd = app.add_subcommand("selfcheck", "run the built-in numeric checks");
    self_cmd->add_option("--dims", args.self_dims, "embedding width for the check fixtures")
        ->check(CLI::Range(2, 4096));
    self_cmd->add_option("--seed", opts.seed, "fixture seed");

    try {
        if (const auto config = config_location(argc, argv))
            apply_config(io::load_config_file(*config), *config, opts);
        app.parse(argc, argv);
        return dispatch(app, opts, args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << io::dump(io::error_json(e));
        return 1;
    } catch (const std::exception& e) {
        const nlohmann::json doc{{"error", "internal"}, {"message", e.what()}};
        std::cerr << io::dump(doc);
        return 1;
    }
}

} // namespace codegraph::cli
