#include <map>

#include "codegraph/error.hpp"
#include "codegraph/sast.hpp"

namespace codegraph::sast {

const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::AstChild: return "AstChild";
        case EdgeKind::DataFlow: return "DataFlow";
        case EdgeKind::NextLeaf: return "NextLeaf";
        case EdgeKind::Subtoken: return "Subtoken";
    }
    return "?";
}

namespace {

// Pieces with vocabulary ids; unknown pieces fall back to byte units.
std::vector<std::pair<std::string, std::uint32_t>> resolve_pieces(const std::string& token,
                                                                  const Vocabulary& vocab,
                                                                  const MergeTable& merges) {
    std::vector<std::pair<std::string, std::uint32_t>> out;
    for (const std::string& piece : merges.split(token)) {
        if (const auto id = vocab.subword_id(piece)) {
            out.emplace_back(piece, *id);
            continue;
        }
        const std::string raw = MergeTable::unmap_bytes(piece);
        for (unsigned char b : raw) {
            const std::string& unit = MergeTable::byte_units()[b];
            const auto id = vocab.subword_id(unit);
            if (!id)
                throw VocabularyMissError("byte unit for 0x" + std::to_string(b) +
                                          " missing from vocabulary (token \"" + token + "\")");
            out.emplace_back(unit, *id);
        }
    }
    return out;
}

} // namespace

SAst build_sast(const frontend::Ast& ast, const Vocabulary& vocab, const MergeTable& merges) {
    using frontend::NodeKindId;

    if (vocab.kind_size() != static_cast<std::size_t>(frontend::kNonLeafKindCount))
        throw VocabularyMissError("vocabulary carries " + std::to_string(vocab.kind_size()) +
                                  " kind entries, grammar defines " +
                                  std::to_string(frontend::kNonLeafKindCount));

    SAst g;
    g.root = ast.root;
    g.ast_node_count = ast.nodes.size();
    g.nodes.resize(ast.nodes.size());

    std::vector<NodeId> leaves;
    for (const frontend::AstNode& a : ast.nodes) {
        SAstNode& n = g.nodes[a.id];
        n.id = a.id;
        n.kind = a.kind;
        n.source_pos = a.span.begin;
        if (frontend::is_leaf_kind(a.kind)) {
            n.is_original_leaf = true;
            leaves.push_back(a.id);
            if (a.kind == NodeKindId::Identifier) n.variable_name = a.token;
        } else {
            n.vocab_id = vocab.kind_entry_id(static_cast<std::size_t>(a.kind));
        }
    }

    // Subtokenize leaves: first piece stays on the node, the rest become
    // fresh child nodes. Children are appended after all original ids.
    std::vector<std::vector<NodeId>> subtoken_children(ast.nodes.size());
    for (NodeId leaf : leaves) {
        const auto pieces = resolve_pieces(ast.nodes[leaf].token, vocab, merges);
        g.nodes[leaf].token = pieces[0].first;
        g.nodes[leaf].vocab_id = pieces[0].second;
        for (std::size_t k = 1; k < pieces.size(); ++k) {
            SAstNode child;
            child.id = static_cast<NodeId>(g.nodes.size());
            child.vocab_id = pieces[k].second;
            child.kind = ast.nodes[leaf].kind;
            child.token = pieces[k].first;
            child.source_pos = ast.nodes[leaf].span.begin;
            child.is_subtoken_child = true;
            subtoken_children[leaf].push_back(child.id);
            g.nodes.push_back(std::move(child));
        }
    }

    for (const frontend::AstNode& a : ast.nodes)
        for (NodeId c : a.children) g.edges.push_back({a.id, c, EdgeKind::AstChild});

    for (NodeId leaf : leaves)
        for (NodeId c : subtoken_children[leaf]) g.edges.push_back({leaf, c, EdgeKind::Subtoken});

    for (std::size_t i = 0; i + 1 < leaves.size(); ++i)
        g.edges.push_back({leaves[i], leaves[i + 1], EdgeKind::NextLeaf});

    // Variable chains, lexical and per method: identifier leaves that share
    // a spelling inside one method are occurrences of one variable.
    for (NodeId method : frontend::method_nodes(ast)) {
        const NodeId past = method + static_cast<NodeId>(frontend::subtree_size(ast, method));
        std::vector<std::string> order;
        std::map<std::string, std::vector<NodeId>> groups;
        for (NodeId id = method; id < past; ++id) {
            const frontend::AstNode& a = ast.nodes[id];
            if (a.kind != NodeKindId::Identifier) continue;
            auto [it, fresh] = groups.try_emplace(a.token);
            if (fresh) order.push_back(a.token);
            it->second.push_back(id);
        }
        for (const std::string& name : order) {
            const auto& occ = groups[name];
            for (std::size_t i = 0; i + 1 < occ.size(); ++i)
                g.edges.push_back({occ[i], occ[i + 1], EdgeKind::DataFlow});
        }
    }

    const auto methods = frontend::method_nodes(ast);
    if (!methods.empty()) {
        const frontend::AstNode& m = ast.nodes[methods.front()];
        const NodeId body = m.children.back();
        g.statement_roots = ast.nodes[body].children;
    }
    return g;
}

} // namespace codegraph::sast
