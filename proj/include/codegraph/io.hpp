#pragma once

#include <map>
#include <string>
#include <string_view>

#include "codegraph/dataset.hpp"
#include "codegraph/error.hpp"
#include "codegraph/frontend.hpp"
#include "codegraph/fusion.hpp"
#include "codegraph/partition.hpp"
#include "codegraph/sast.hpp"
#include "json.hpp"

namespace codegraph::io {

// Stamped into every JSON document so downstream readers can detect layout
// changes. nlohmann::json keeps object keys sorted, which combined with its
// shortest-round-trip double formatting makes each export byte-stable.
inline constexpr int kSchemaVersion = 1;

nlohmann::json ast_json(const frontend::Ast& ast);
nlohmann::json sast_json(const sast::SAst& graph);
nlohmann::json partition_json(const partition::PartitionResult& parts);
nlohmann::json embedding_json(const fusion::ProgramEmbeddings& emb);
nlohmann::json manifest_json(const dataset::SplitManifest& manifest);
nlohmann::json stats_json(const dataset::CorpusStats& stats);
nlohmann::json clone_score_json(const fusion::CloneScore& score);

// {"error": code, "message": ...} plus location fields when the exception
// carries them.
nlohmann::json error_json(const Error& e);

// Canonical serialization: two-space indent, trailing newline.
std::string dump(const nlohmann::json& doc);

// GraphViz digraph of the S-AST, one color per edge kind.
std::string sast_dot(const sast::SAst& graph);

// Binary model checkpoint; layout documented in docs/formats.md. Loading
// validates magic, version, and every tensor name and shape.
void save_checkpoint(const std::string& path, const fusion::ModelParams& params);
fusion::ModelParams load_checkpoint(const std::string& path);

// "key = value" lines; '#' starts a comment; later assignments win.
std::map<std::string, std::string> load_config_file(const std::string& path);

} // namespace codegraph::io
