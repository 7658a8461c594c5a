#include <array>

#include "codegraph/error.hpp"
#include "codegraph/frontend.hpp"
#include "codegraph/util.hpp"

namespace codegraph::frontend {

namespace {

constexpr std::array<const char*, static_cast<std::size_t>(NodeKindId::Count_)> kKindNames = {
    "CompilationUnit",
    "ClassDeclaration",
    "ClassBody",
    "MethodDeclaration",
    "FormalParameters",
    "FormalParameter",
    "Block",
    "LocalVariableDeclaration",
    "VariableDeclarator",
    "ExpressionStatement",
    "Assignment",
    "IfStatement",
    "WhileStatement",
    "ForStatement",
    "ForControl",
    "ForInit",
    "ForUpdate",
    "ReturnStatement",
    "MethodInvocation",
    "Arguments",
    "BinaryOperation",
    "UnaryOperation",
    "PostfixOperation",
    "Identifier",
    "MemberName",
    "MethodName",
    "ClassName",
    "TypeName",
    "Modifier",
    "Operator",
    "IntegerLiteral",
    "FloatLiteral",
    "StringLiteral",
    "CharLiteral",
    "BooleanLiteral",
    "NullLiteral",
};

} // namespace

const char* kind_name(NodeKindId kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

bool is_leaf_kind(NodeKindId kind) {
    return static_cast<int>(kind) >= kNonLeafKindCount;
}

std::vector<std::string> non_leaf_kind_names() {
    std::vector<std::string> names;
    names.reserve(kNonLeafKindCount);
    for (int i = 0; i < kNonLeafKindCount; ++i)
        names.emplace_back(kKindNames[static_cast<std::size_t>(i)]);
    return names;
}

SourceUnit SourceUnit::from_file(const std::string& path) {
    SourceUnit unit;
    unit.path = path;
    unit.text = util::read_file(path);
    return unit;
}

SourceUnit SourceUnit::from_text(std::string text, std::string name) {
    SourceUnit unit;
    unit.path = std::move(name);
    unit.text = std::move(text);
    return unit;
}

std::vector<std::string> preorder_tokens(const Ast& ast) {
    std::vector<std::string> out;
    std::vector<NodeId> stack{ast.root};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        const AstNode& n = ast.nodes[id];
        if (is_leaf_kind(n.kind)) {
            out.push_back(n.token);
        } else {
            out.emplace_back(kind_name(n.kind));
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
                stack.push_back(*it);
        }
    }
    return out;
}

std::vector<NodeId> method_nodes(const Ast& ast) {
    std::vector<NodeId> out;
    for (const AstNode& n : ast.nodes)
        if (n.kind == NodeKindId::MethodDeclaration) out.push_back(n.id);
    return out;
}

std::vector<NodeId> statement_subtrees_of(const Ast& ast, NodeId method) {
    const AstNode& m = ast.nodes[method];
    if (m.kind != NodeKindId::MethodDeclaration)
        throw ShapeMismatchError("node " + std::to_string(method) + " is not a method declaration");
    const NodeId body = m.children.back();
    return ast.nodes[body].children;
}

std::vector<NodeId> statement_subtrees(const Ast& ast) {
    const std::vector<NodeId> methods = method_nodes(ast);
    if (methods.empty())
        throw EmptyBodyError("no method declaration in " + ast.unit.path);
    const std::vector<NodeId> stmts = statement_subtrees_of(ast, methods.front());
    if (stmts.empty())
        throw EmptyBodyError("method body is empty in " + ast.unit.path);
    return stmts;
}

std::size_t subtree_size(const Ast& ast, NodeId root) {
    std::size_t count = 0;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        ++count;
        for (NodeId c : ast.nodes[id].children) stack.push_back(c);
    }
    return count;
}

} // namespace codegraph::frontend
