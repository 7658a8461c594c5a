#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codegraph/frontend.hpp"

namespace codegraph::ek {

// Qualified method name -> description, loaded from a two-column TSV.
struct ApiStore {
    std::unordered_map<std::string, std::string> entries;
    std::size_t skipped_lines = 0;  // malformed lines dropped in lenient mode
    std::size_t duplicate_keys = 0; // later occurrences of an existing key

    std::size_t count() const { return entries.size(); }
    std::optional<std::string_view> lookup(std::string_view key) const;
};

enum class LoadMode { Lenient, Strict };

// Reads "QualifiedName<TAB>Description" lines. Blank lines are ignored.
// Malformed lines throw FormatError in strict mode and are counted in
// lenient mode. Duplicate keys keep the first occurrence.
ApiStore load_api_pairs(const std::string& path, LoadMode mode = LoadMode::Lenient);

// Pre-order serialization of the AST plus the descriptions of every API
// call found in the store, in first-call-site order without repeats.
struct TransformedContext {
    std::vector<std::string> tokens;
    std::vector<std::string> descriptions;
    std::string text; // tokens then descriptions, space separated
};

TransformedContext transform(const frontend::Ast& ast, const ApiStore& store);

// Dotted call name ("Math.abs") for an invocation node, or the bare member
// name when the call has no qualifier.
std::string invocation_key(const frontend::Ast& ast, frontend::NodeId invocation);

// Keeps the first limit whitespace tokens; 0 means unlimited. The code
// serialization comes first in the text, so trailing descriptions are what
// truncation drops.
std::string truncate_tokens(std::string_view text, std::size_t limit);

class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual std::size_t dim() const = 0;
    virtual std::vector<double> encode(std::string_view text) const = 0;
};

// Hashed bag of tokens: each token adds +-1 to one of d buckets, and the
// result is L2-normalized. Empty text gives the zero vector.
std::vector<double> reference_encode(std::string_view text, std::size_t d);

class ReferenceEncoder : public TextEncoder {
public:
    explicit ReferenceEncoder(std::size_t d, std::size_t max_tokens = 0)
        : d_(d), max_tokens_(max_tokens) {}

    std::size_t dim() const override { return d_; }
    std::vector<double> encode(std::string_view text) const override;

private:
    std::size_t d_;
    std::size_t max_tokens_;
};

// Runs a command with the (truncated) text on stdin and parses a JSON array
// of dim() numbers from its stdout.
class CommandEncoder : public TextEncoder {
public:
    CommandEncoder(std::string command, std::size_t d, std::size_t max_tokens = 0)
        : command_(std::move(command)), d_(d), max_tokens_(max_tokens) {}

    std::size_t dim() const override { return d_; }
    std::vector<double> encode(std::string_view text) const override;

private:
    std::string command_;
    std::size_t d_;
    std::size_t max_tokens_;
};

} // namespace codegraph::ek
