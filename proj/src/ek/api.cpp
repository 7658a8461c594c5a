#include "codegraph/ek.hpp"

#include <sstream>
#include <unordered_set>

#include "codegraph/error.hpp"
#include "codegraph/util.hpp"

namespace codegraph::ek {

std::optional<std::string_view> ApiStore::lookup(std::string_view key) const {
    const auto it = entries.find(std::string(key));
    if (it == entries.end()) return std::nullopt;
    return std::string_view(it->second);
}

ApiStore load_api_pairs(const std::string& path, LoadMode mode) {
    const std::string content = util::read_file(path);
    ApiStore store;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        const std::string name = tab == std::string::npos ? "" : line.substr(0, tab);
        const std::string desc = tab == std::string::npos ? "" : line.substr(tab + 1);
        if (name.empty() || desc.empty()) {
            if (mode == LoadMode::Strict)
                throw FormatError(path, line_no,
                                  "expected \"QualifiedName<TAB>Description\"");
            ++store.skipped_lines;
            continue;
        }
        if (!store.entries.emplace(name, desc).second) ++store.duplicate_keys;
    }
    return store;
}

std::string invocation_key(const frontend::Ast& ast, frontend::NodeId invocation) {
    const frontend::AstNode& node = ast.node(invocation);
    if (node.kind != frontend::NodeKindId::MethodInvocation)
        throw ShapeMismatchError("node " + std::to_string(invocation) +
                                 " is not a method invocation");
    std::string key;
    for (frontend::NodeId child : node.children) {
        const frontend::AstNode& part = ast.node(child);
        if (part.kind == frontend::NodeKindId::Identifier) {
            key += part.token;
            key += '.';
        } else if (part.kind == frontend::NodeKindId::MemberName) {
            key += part.token;
            break;
        }
    }
    return key;
}

TransformedContext transform(const frontend::Ast& ast, const ApiStore& store) {
    TransformedContext ctx;
    ctx.tokens = frontend::preorder_tokens(ast);

    std::unordered_set<std::string> seen;
    for (const frontend::AstNode& node : ast.nodes) {
        if (node.kind != frontend::NodeKindId::MethodInvocation) continue;
        const std::string key = invocation_key(ast, node.id);
        if (!seen.insert(key).second) continue;
        if (const auto desc = store.lookup(key))
            ctx.descriptions.emplace_back(*desc);
    }

    ctx.text = util::join(ctx.tokens, " ");
    if (!ctx.descriptions.empty()) {
        if (!ctx.text.empty()) ctx.text += ' ';
        ctx.text += util::join(ctx.descriptions, " ");
    }
    return ctx;
}

std::string truncate_tokens(std::string_view text, std::size_t limit) {
    if (limit == 0) return std::string(text);
    std::vector<std::string> tokens = util::split_ws(text);
    if (tokens.size() > limit) tokens.resize(limit);
    return util::join(tokens, " ");
}

} // namespace codegraph::ek
