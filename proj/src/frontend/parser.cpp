#include <cassert>

#include "codegraph/error.hpp"
#include "codegraph/frontend.hpp"
#include "codegraph/util.hpp"

namespace codegraph::frontend {

namespace {

bool is_modifier(const Token& t) {
    return t.type == TokenType::Keyword &&
           (t.text == "public" || t.text == "private" || t.text == "protected" ||
            t.text == "static" || t.text == "final");
}

// Recursive-descent parser over the token stream. Nodes are appended to an
// arena in creation order and renumbered to pre-order once the unit is done.
class Parser {
public:
    explicit Parser(const SourceUnit& unit) : unit_(unit), tokens_(lex(unit.text)) {}

    Ast run() {
        const NodeId root = begin_node(NodeKindId::CompilationUnit);
        if (peek().type == TokenType::EndOfFile)
            fail("a class or method declaration");
        while (peek().type != TokenType::EndOfFile)
            add_child(root, parse_declaration());
        end_node(root);
        return finish(root);
    }

private:
    // -- token helpers -------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    const Token& advance() { return tokens_[pos_++]; }

    bool at_op(std::string_view text) const {
        return peek().type == TokenType::Operator && peek().text == text;
    }

    bool at_keyword(std::string_view text) const {
        return peek().type == TokenType::Keyword && peek().text == text;
    }

    const Token& expect_op(std::string_view text) {
        if (!at_op(text)) fail("'" + std::string(text) + "'");
        return advance();
    }

    const Token& expect_keyword(std::string_view text) {
        if (!at_keyword(text)) fail("'" + std::string(text) + "'");
        return advance();
    }

    const Token& expect_identifier(const char* what) {
        if (peek().type != TokenType::Identifier) fail(what);
        return advance();
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        const std::string got = t.type == TokenType::EndOfFile ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.column, expected,
                         unit_.path + ":" + std::to_string(t.line) + ":" +
                             std::to_string(t.column) + ": expected " + expected + ", got " + got);
    }

    // -- node arena ----------------------------------------------------------

    NodeId begin_node(NodeKindId kind) {
        const NodeId id = static_cast<NodeId>(nodes_.size());
        AstNode n;
        n.id = id;
        n.kind = kind;
        n.span.begin = peek().begin;
        nodes_.push_back(std::move(n));
        return id;
    }

    void end_node(NodeId id) {
        nodes_[id].span.end = pos_ > 0 ? tokens_[pos_ - 1].end : 0;
    }

    void add_child(NodeId parent, NodeId child) { nodes_[parent].children.push_back(child); }

    NodeId leaf(NodeKindId kind, const Token& t) {
        const NodeId id = static_cast<NodeId>(nodes_.size());
        AstNode n;
        n.id = id;
        n.kind = kind;
        n.token = t.text;
        n.span = {t.begin, t.end};
        nodes_.push_back(std::move(n));
        return id;
    }

    // -- declarations --------------------------------------------------------

    NodeId parse_declaration() {
        std::vector<NodeId> modifiers;
        while (is_modifier(peek())) modifiers.push_back(leaf(NodeKindId::Modifier, advance()));
        if (at_keyword("class")) return parse_class(std::move(modifiers));
        return parse_method(std::move(modifiers));
    }

    NodeId parse_class(std::vector<NodeId> modifiers) {
        const NodeId node = begin_node(NodeKindId::ClassDeclaration);
        nodes_[node].span.begin = modifiers.empty() ? peek().begin : nodes_[modifiers[0]].span.begin;
        for (NodeId m : modifiers) add_child(node, m);
        expect_keyword("class");
        add_child(node, leaf(NodeKindId::ClassName, expect_identifier("class name")));
        const NodeId body = begin_node(NodeKindId::ClassBody);
        expect_op("{");
        while (!at_op("}")) {
            std::vector<NodeId> mods;
            while (is_modifier(peek())) mods.push_back(leaf(NodeKindId::Modifier, advance()));
            add_child(body, parse_method(std::move(mods)));
        }
        expect_op("}");
        end_node(body);
        add_child(node, body);
        end_node(node);
        return node;
    }

    NodeId parse_method(std::vector<NodeId> modifiers) {
        const NodeId node = begin_node(NodeKindId::MethodDeclaration);
        nodes_[node].span.begin = modifiers.empty() ? peek().begin : nodes_[modifiers[0]].span.begin;
        for (NodeId m : modifiers) add_child(node, m);
        add_child(node, leaf(NodeKindId::TypeName, expect_identifier("return type")));
        add_child(node, leaf(NodeKindId::MethodName, expect_identifier("method name")));
        const NodeId params = begin_node(NodeKindId::FormalParameters);
        expect_op("(");
        if (!at_op(")")) {
            for (;;) {
                const NodeId p = begin_node(NodeKindId::FormalParameter);
                add_child(p, leaf(NodeKindId::TypeName, expect_identifier("parameter type")));
                add_child(p, leaf(NodeKindId::Identifier, expect_identifier("parameter name")));
                end_node(p);
                add_child(params, p);
                if (!at_op(",")) break;
                advance();
            }
        }
        expect_op(")");
        end_node(params);
        add_child(node, params);
        add_child(node, parse_block());
        end_node(node);
        return node;
    }

    // -- statements ----------------------------------------------------------

    NodeId parse_block() {
        const NodeId node = begin_node(NodeKindId::Block);
        expect_op("{");
        while (!at_op("}")) add_child(node, parse_statement());
        expect_op("}");
        end_node(node);
        return node;
    }

    NodeId parse_statement() {
        if (at_op("{")) return parse_block();
        if (at_keyword("if")) return parse_if();
        if (at_keyword("while")) return parse_while();
        if (at_keyword("for")) return parse_for();
        if (at_keyword("return")) return parse_return();
        if (peek().type == TokenType::Identifier && peek(1).type == TokenType::Identifier) {
            const NodeId decl = parse_local_var_decl();
            expect_op(";");
            end_node(decl);
            return decl;
        }
        const NodeId node = begin_node(NodeKindId::ExpressionStatement);
        add_child(node, parse_statement_expression());
        expect_op(";");
        end_node(node);
        return node;
    }

    NodeId parse_if() {
        const NodeId node = begin_node(NodeKindId::IfStatement);
        expect_keyword("if");
        expect_op("(");
        add_child(node, parse_expression());
        expect_op(")");
        add_child(node, parse_statement());
        if (at_keyword("else")) {
            advance();
            add_child(node, parse_statement());
        }
        end_node(node);
        return node;
    }

    NodeId parse_while() {
        const NodeId node = begin_node(NodeKindId::WhileStatement);
        expect_keyword("while");
        expect_op("(");
        add_child(node, parse_expression());
        expect_op(")");
        add_child(node, parse_statement());
        end_node(node);
        return node;
    }

    NodeId parse_for() {
        const NodeId node = begin_node(NodeKindId::ForStatement);
        expect_keyword("for");
        const NodeId control = begin_node(NodeKindId::ForControl);
        expect_op("(");
        const NodeId init = begin_node(NodeKindId::ForInit);
        if (!at_op(";")) {
            if (peek().type == TokenType::Identifier && peek(1).type == TokenType::Identifier) {
                add_child(init, parse_local_var_decl());
            } else {
                add_child(init, parse_statement_expression());
                while (at_op(",")) {
                    advance();
                    add_child(init, parse_statement_expression());
                }
            }
        }
        expect_op(";");
        end_node(init);
        add_child(control, init);
        if (!at_op(";")) add_child(control, parse_expression());
        expect_op(";");
        const NodeId update = begin_node(NodeKindId::ForUpdate);
        if (!at_op(")")) {
            add_child(update, parse_statement_expression());
            while (at_op(",")) {
                advance();
                add_child(update, parse_statement_expression());
            }
        }
        expect_op(")");
        end_node(update);
        add_child(control, update);
        end_node(control);
        add_child(node, control);
        add_child(node, parse_statement());
        end_node(node);
        return node;
    }

    NodeId parse_return() {
        const NodeId node = begin_node(NodeKindId::ReturnStatement);
        expect_keyword("return");
        if (!at_op(";")) add_child(node, parse_expression());
        expect_op(";");
        end_node(node);
        return node;
    }

    // Declarator list without the trailing semicolon (shared with for-init).
    NodeId parse_local_var_decl() {
        const NodeId node = begin_node(NodeKindId::LocalVariableDeclaration);
        add_child(node, leaf(NodeKindId::TypeName, expect_identifier("type name")));
        for (;;) {
            const NodeId decl = begin_node(NodeKindId::VariableDeclarator);
            add_child(decl, leaf(NodeKindId::Identifier, expect_identifier("variable name")));
            if (at_op("=")) {
                add_child(decl, leaf(NodeKindId::Operator, advance()));
                add_child(decl, parse_expression());
            }
            end_node(decl);
            add_child(node, decl);
            if (!at_op(",")) break;
            advance();
        }
        end_node(node);
        return node;
    }

    // -- expressions ---------------------------------------------------------

    bool at_assignment_op() const {
        return peek().type == TokenType::Operator &&
               (peek().text == "=" || peek().text == "+=" || peek().text == "-=" ||
                peek().text == "*=" || peek().text == "/=" || peek().text == "%=");
    }

    // A statement expression: assignment, method invocation, or an
    // increment/decrement. Anything else is not a statement in the subset.
    NodeId parse_statement_expression() {
        const std::uint32_t begin = peek().begin;
        const NodeId expr = parse_expression();
        if (at_assignment_op()) {
            if (nodes_[expr].kind != NodeKindId::Identifier)
                fail("a simple variable as assignment target");
            const NodeId node = begin_node(NodeKindId::Assignment);
            nodes_[node].span.begin = begin;
            add_child(node, expr);
            add_child(node, leaf(NodeKindId::Operator, advance()));
            add_child(node, parse_expression());
            end_node(node);
            return node;
        }
        const NodeKindId k = nodes_[expr].kind;
        const bool incdec =
            (k == NodeKindId::UnaryOperation || k == NodeKindId::PostfixOperation) &&
            (nodes_[nodes_[expr].children[k == NodeKindId::UnaryOperation ? 0 : 1]].token == "++" ||
             nodes_[nodes_[expr].children[k == NodeKindId::UnaryOperation ? 0 : 1]].token == "--");
        if (k != NodeKindId::MethodInvocation && !incdec)
            fail("an assignment, a method call, or ++/--");
        return expr;
    }

    NodeId parse_expression() { return parse_binary(0); }

    // Precedence levels, loosest first.
    static int binary_level(const Token& t) {
        if (t.type != TokenType::Operator) return -1;
        const std::string& s = t.text;
        if (s == "||") return 0;
        if (s == "&&") return 1;
        if (s == "==" || s == "!=") return 2;
        if (s == "<" || s == "<=" || s == ">" || s == ">=") return 3;
        if (s == "+" || s == "-") return 4;
        if (s == "*" || s == "/" || s == "%") return 5;
        return -1;
    }

    NodeId parse_binary(int min_level) {
        const std::uint32_t begin = peek().begin;
        NodeId left = parse_unary();
        for (;;) {
            const int level = binary_level(peek());
            if (level < min_level) return left;
            const NodeId node = begin_node(NodeKindId::BinaryOperation);
            nodes_[node].span.begin = begin;
            add_child(node, left);
            add_child(node, leaf(NodeKindId::Operator, advance()));
            add_child(node, parse_binary(level + 1));
            end_node(node);
            left = node;
        }
    }

    NodeId parse_unary() {
        if (at_op("!") || at_op("-") || at_op("+") || at_op("++") || at_op("--")) {
            const NodeId node = begin_node(NodeKindId::UnaryOperation);
            add_child(node, leaf(NodeKindId::Operator, advance()));
            add_child(node, parse_unary());
            end_node(node);
            return node;
        }
        return parse_postfix();
    }

    NodeId parse_postfix() {
        const std::uint32_t begin = peek().begin;
        const NodeId primary = parse_primary();
        if (at_op("++") || at_op("--")) {
            const NodeId node = begin_node(NodeKindId::PostfixOperation);
            nodes_[node].span.begin = begin;
            add_child(node, primary);
            add_child(node, leaf(NodeKindId::Operator, advance()));
            end_node(node);
            return node;
        }
        return primary;
    }

    NodeId parse_primary() {
        const Token& t = peek();
        switch (t.type) {
            case TokenType::IntLiteral:
                return leaf(NodeKindId::IntegerLiteral, advance());
            case TokenType::FloatLiteral:
                return leaf(NodeKindId::FloatLiteral, advance());
            case TokenType::StringLiteral:
                return leaf(NodeKindId::StringLiteral, advance());
            case TokenType::CharLiteral:
                return leaf(NodeKindId::CharLiteral, advance());
            case TokenType::Keyword:
                if (t.text == "true" || t.text == "false")
                    return leaf(NodeKindId::BooleanLiteral, advance());
                if (t.text == "null") return leaf(NodeKindId::NullLiteral, advance());
                fail("an expression");
            case TokenType::Operator:
                if (t.text == "(") {
                    advance();
                    const NodeId inner = parse_expression();
                    expect_op(")");
                    return inner; // parentheses leave no node
                }
                fail("an expression");
            case TokenType::Identifier:
                return parse_name_or_call();
            default:
                fail("an expression");
        }
    }

    // Name, qualified name, or (qualified) method invocation. Bare dotted
    // names without a call are field accesses, which the subset excludes.
    NodeId parse_name_or_call() {
        const std::uint32_t begin = peek().begin;
        std::vector<const Token*> parts;
        parts.push_back(&expect_identifier("a name"));
        while (at_op(".") && peek(1).type == TokenType::Identifier) {
            advance();
            parts.push_back(&advance());
        }
        if (at_op("(")) {
            const NodeId node = begin_node(NodeKindId::MethodInvocation);
            nodes_[node].span.begin = begin;
            for (std::size_t i = 0; i + 1 < parts.size(); ++i)
                add_child(node, leaf(NodeKindId::Identifier, *parts[i]));
            add_child(node, leaf(NodeKindId::MemberName, *parts.back()));
            const NodeId args = begin_node(NodeKindId::Arguments);
            expect_op("(");
            if (!at_op(")")) {
                add_child(args, parse_expression());
                while (at_op(",")) {
                    advance();
                    add_child(args, parse_expression());
                }
            }
            expect_op(")");
            end_node(args);
            add_child(node, args);
            end_node(node);
            if (at_op(".")) fail("no chained call (outside the subset)");
            return node;
        }
        if (parts.size() > 1) fail("a method call after a qualified name");
        return leaf(NodeKindId::Identifier, *parts[0]);
    }

    // -- finalization --------------------------------------------------------

    Ast finish(NodeId root) {
        if (peek().type != TokenType::EndOfFile) fail("end of input");
        // Renumber to pre-order so node ids follow source structure.
        std::vector<NodeId> order;
        order.reserve(nodes_.size());
        std::vector<NodeId> remap(nodes_.size(), 0);
        std::vector<NodeId> stack{root};
        while (!stack.empty()) {
            const NodeId id = stack.back();
            stack.pop_back();
            remap[id] = static_cast<NodeId>(order.size());
            order.push_back(id);
            const auto& ch = nodes_[id].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        Ast ast;
        ast.unit = unit_;
        ast.root = 0;
        ast.nodes.resize(nodes_.size());
        for (NodeId old_id : order) {
            AstNode n = std::move(nodes_[old_id]);
            n.id = remap[old_id];
            for (NodeId& c : n.children) c = remap[c];
            ast.nodes[n.id] = std::move(n);
        }
        return ast;
    }

    const SourceUnit& unit_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<AstNode> nodes_;
};

} // namespace

Ast parse(const SourceUnit& unit) {
    if (unit.text.empty()) throw ParseError(1, 1, "non-empty input", "empty source unit");
    return Parser(unit).run();
}

} // namespace codegraph::frontend
