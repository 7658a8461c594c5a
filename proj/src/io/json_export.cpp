#include "codegraph/error.hpp"
#include "codegraph/io.hpp"

namespace codegraph::io {

using nlohmann::json;

namespace {

json span_json(const frontend::Span& span) {
    return json{{"begin", span.begin}, {"end", span.end}};
}

json edge_json(const sast::SAstEdge& edge) {
    return json{{"src", edge.src}, {"dst", edge.dst}, {"kind", sast::edge_kind_name(edge.kind)}};
}

json pair_json(const dataset::ClonePair& pair) {
    return json{{"a", pair.a}, {"b", pair.b}, {"label", pair.label}};
}

json split_json(const dataset::Split& split) {
    json pairs = json::array();
    for (const dataset::ClonePair& p : split.pairs) pairs.push_back(pair_json(p));
    return json{{"functionality_ids", split.functionality_ids}, {"pairs", pairs}};
}

} // namespace

json ast_json(const frontend::Ast& ast) {
    json nodes = json::array();
    for (const frontend::AstNode& node : ast.nodes) {
        json entry{{"id", node.id},
                   {"kind", frontend::kind_name(node.kind)},
                   {"children", node.children},
                   {"span", span_json(node.span)}};
        if (!node.token.empty()) entry["token"] = node.token;
        nodes.push_back(std::move(entry));
    }
    return json{{"schema_version", kSchemaVersion}, {"path", ast.unit.path}, {"nodes", nodes}};
}

json sast_json(const sast::SAst& graph) {
    json nodes = json::array();
    for (const sast::SAstNode& node : graph.nodes) {
        json entry{{"id", node.id},
                   {"vocab_id", node.vocab_id},
                   {"kind", frontend::kind_name(node.kind)},
                   {"source_pos", node.source_pos},
                   {"is_original_leaf", node.is_original_leaf},
                   {"is_subtoken_child", node.is_subtoken_child}};
        if (!node.token.empty()) entry["token"] = node.token;
        if (node.variable_name) entry["variable_name"] = *node.variable_name;
        nodes.push_back(std::move(entry));
    }
    json edges = json::array();
    for (const sast::SAstEdge& edge : graph.edges) edges.push_back(edge_json(edge));
    return json{{"schema_version", kSchemaVersion},
                {"root", graph.root},
                {"ast_node_count", graph.ast_node_count},
                {"statement_roots", graph.statement_roots},
                {"nodes", nodes},
                {"edges", edges}};
}

json partition_json(const partition::PartitionResult& parts) {
    json subgraphs = json::array();
    for (const partition::Subgraph& sub : parts.subgraphs) {
        const std::vector<sast::NodeId> native(sub.node_ids.begin(),
                                               sub.node_ids.begin() +
                                                   static_cast<std::ptrdiff_t>(sub.native_count));
        json edges = json::array();
        for (const sast::SAstEdge& edge : sub.edges) edges.push_back(edge_json(edge));
        subgraphs.push_back(json{{"order_index", sub.order_index},
                                 {"native", native},
                                 {"carried", sub.carried},
                                 {"statement_roots", sub.statement_roots},
                                 {"edges", edges}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"lambda", parts.lambda_used},
                {"subgraphs", subgraphs}};
}

json embedding_json(const fusion::ProgramEmbeddings& emb) {
    json subs = json::array();
    for (const std::vector<double>& g : emb.pipeline.subgraph_embeddings) subs.push_back(g);
    return json{{"schema_version", kSchemaVersion},
                {"subgraph_count", emb.parts.subgraphs.size()},
                {"lambda", emb.parts.lambda_used},
                {"ep", emb.pipeline.ep.v},
                {"ee", emb.ee},
                {"ef", emb.ef.v},
                {"whole_embedding", emb.pipeline.whole_embedding},
                {"lstm_last", emb.pipeline.lstm_last},
                {"subgraph_embeddings", subs},
                {"context_text", emb.context.text}};
}

json manifest_json(const dataset::SplitManifest& manifest) {
    return json{{"schema_version", kSchemaVersion},
                {"seed", manifest.seed},
                {"train", split_json(manifest.train)},
                {"val", split_json(manifest.val)},
                {"test", split_json(manifest.test)}};
}

json stats_json(const dataset::CorpusStats& stats) {
    return json{{"schema_version", kSchemaVersion},
                {"fragment_count", stats.fragment_count},
                {"functionality_count", stats.functionality_count},
                {"parsed_count", stats.parsed_count},
                {"parse_failures", stats.parse_failures},
                {"avg_sast_nodes", stats.avg_sast_nodes},
                {"recommended_lambda", stats.recommended_lambda}};
}

json clone_score_json(const fusion::CloneScore& score) {
    return json{{"schema_version", kSchemaVersion},
                {"value", score.value},
                {"threshold", score.threshold},
                {"label", score.label}};
}

json error_json(const Error& e) {
    json doc{{"error", e.code()}, {"message", e.what()}};
    if (const auto* parse = dynamic_cast<const ParseError*>(&e)) {
        doc["line"] = parse->line;
        doc["column"] = parse->column;
        doc["expected"] = parse->expected;
    } else if (const auto* format = dynamic_cast<const FormatError*>(&e)) {
        doc["path"] = format->path;
        doc["line"] = format->line;
    }
    return doc;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

} // namespace codegraph::io
