#include <string>

#include "codegraph/io.hpp"

namespace codegraph::io {

namespace {

std::string escape_label(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

const char* edge_color(sast::EdgeKind kind) {
    switch (kind) {
        case sast::EdgeKind::AstChild: return "black";
        case sast::EdgeKind::DataFlow: return "red";
        case sast::EdgeKind::NextLeaf: return "blue";
        case sast::EdgeKind::Subtoken: return "forestgreen";
    }
    return "black";
}

} // namespace

std::string sast_dot(const sast::SAst& graph) {
    std::string out = "digraph sast {\n";
    out += "  node [shape=box, fontname=\"monospace\"];\n";
    for (const sast::SAstNode& node : graph.nodes) {
        const std::string label =
            node.token.empty() ? frontend::kind_name(node.kind) : escape_label(node.token);
        out += "  n" + std::to_string(node.id) + " [label=\"" + label + "\"];\n";
    }
    for (const sast::SAstEdge& edge : graph.edges) {
        out += "  n" + std::to_string(edge.src) + " -> n" + std::to_string(edge.dst) +
               " [color=" + edge_color(edge.kind) + ", label=\"" +
               sast::edge_kind_name(edge.kind) + "\"];\n";
    }
    out += "}\n";
    return out;
}

} // namespace codegraph::io
