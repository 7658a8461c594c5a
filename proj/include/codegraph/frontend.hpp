#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codegraph::frontend {

// ---------------------------------------------------------------------------
// Grammar definition
// ---------------------------------------------------------------------------
//
// The parser accepts a Java-language subset: class and method declarations,
// local variable declarations, assignments, if/for/while, return, method
// invocation (including dotted qualified calls), arithmetic/relational/unary
// expressions, literals and identifiers. The node-kind table below is the
// embedded grammar definition; the count of non-leaf kinds feeds the
// vocabulary builder.

enum class NodeKindId : std::uint8_t {
    // non-leaf kinds
    CompilationUnit,
    ClassDeclaration,
    ClassBody,
    MethodDeclaration,
    FormalParameters,
    FormalParameter,
    Block,
    LocalVariableDeclaration,
    VariableDeclarator,
    ExpressionStatement,
    Assignment,
    IfStatement,
    WhileStatement,
    ForStatement,
    ForControl,
    ForInit,
    ForUpdate,
    ReturnStatement,
    MethodInvocation,
    Arguments,
    BinaryOperation,
    UnaryOperation,
    PostfixOperation,
    // leaf kinds (carry a token)
    Identifier,
    MemberName,
    MethodName,
    ClassName,
    TypeName,
    Modifier,
    Operator,
    IntegerLiteral,
    FloatLiteral,
    StringLiteral,
    CharLiteral,
    BooleanLiteral,
    NullLiteral,
    Count_,
};

inline constexpr int kNodeKindCount = static_cast<int>(NodeKindId::Count_);
inline constexpr int kNonLeafKindCount = static_cast<int>(NodeKindId::Identifier);

const char* kind_name(NodeKindId k);
bool is_leaf_kind(NodeKindId k);

// Names of the non-leaf kinds in id order; these become the vocabulary's
// kind entries.
std::vector<std::string> non_leaf_kind_names();

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class Language { JavaSubset };

struct SourceUnit {
    std::string path = "<memory>";
    std::string text;
    Language language = Language::JavaSubset;

    static SourceUnit from_file(const std::string& path);
    static SourceUnit from_text(std::string text, std::string path = "<memory>");
};

using NodeId = std::uint32_t;

struct Span {
    std::uint32_t begin = 0; // byte offset, inclusive
    std::uint32_t end = 0;   // byte offset, exclusive
};

struct AstNode {
    NodeId id = 0;
    NodeKindId kind = NodeKindId::CompilationUnit;
    std::string token; // non-empty iff leaf
    std::vector<NodeId> children;
    Span span;
};

struct Ast {
    NodeId root = 0; // always 0: nodes are stored in pre-order
    std::vector<AstNode> nodes;
    SourceUnit unit;

    const AstNode& node(NodeId id) const { return nodes[id]; }
    std::size_t size() const { return nodes.size(); }
};

// ---------------------------------------------------------------------------
// Lexer surface (exposed for round-trip checks and tooling)
// ---------------------------------------------------------------------------

enum class TokenType {
    Identifier,
    Keyword,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    CharLiteral,
    Operator, // operators and punctuation
    EndOfFile,
};

struct Token {
    TokenType type;
    std::string text;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    int line = 1;
    int column = 1;
};

std::vector<Token> lex(std::string_view text);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Parse a source unit; throws ParseError on malformed input or on any
// construct outside the subset.
Ast parse(const SourceUnit& unit);

// Depth-first pre-order walk: kind name for non-leaf nodes, token for leaves.
std::vector<std::string> preorder_tokens(const Ast& ast);

// Pre-order list of MethodDeclaration node ids.
std::vector<NodeId> method_nodes(const Ast& ast);

// The children of a method's body block, left to right; each id roots one
// statement subtree. Throws EmptyBodyError when the body has no statements.
std::vector<NodeId> statement_subtrees_of(const Ast& ast, NodeId method);

// Same, for the first method in the unit (fragments are method-level).
std::vector<NodeId> statement_subtrees(const Ast& ast);

// Number of nodes in the subtree rooted at `root`, including the root.
std::size_t subtree_size(const Ast& ast, NodeId root);

} // namespace codegraph::frontend
