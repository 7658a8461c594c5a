#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codegraph/frontend.hpp"

namespace codegraph::sast {

// ---------------------------------------------------------------------------
// Byte-level BPE
// ---------------------------------------------------------------------------
//
// Tokens are processed as byte sequences mapped to a printable alphabet (one
// distinct character per byte value), so any input reconstructs exactly.
// Subtoken pieces live in that mapped alphabet; for ASCII identifiers the
// mapped text equals the raw text.

class MergeTable {
public:
    // Loads "left right" pair lines, highest priority first.
    static MergeTable load(const std::string& path);
    static MergeTable from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

    std::size_t size() const { return merges_.size(); }

    // Segments a raw token into subword pieces (mapped alphabet). The
    // concatenation of the pieces always reproduces the token's bytes.
    std::vector<std::string> split(std::string_view raw_token) const;

    // Mapped single-character unit for each byte value.
    static const std::array<std::string, 256>& byte_units();
    static std::string map_bytes(std::string_view raw);
    static std::string unmap_bytes(std::string_view mapped);

private:
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<std::string, std::uint32_t> ranks_; // "left right" -> rank
};

std::vector<std::string> subtokenize(std::string_view token, const MergeTable& merges);

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------
//
// Dense id space: subword entries 0..base_size-1 from the vocab file, then
// one entry per non-leaf grammar kind.

class Vocabulary {
public:
    // Loads "token<TAB>id" lines; ids must be dense 0..n-1.
    static Vocabulary load(const std::string& path, std::vector<std::string> kind_names);
    static Vocabulary from_entries(std::vector<std::string> subwords,
                                   std::vector<std::string> kind_names);

    std::size_t base_size() const { return base_size_; }
    std::size_t kind_size() const { return kind_names_.size(); }
    std::size_t size() const { return base_size_ + kind_names_.size(); }

    std::optional<std::uint32_t> subword_id(std::string_view token) const;
    std::uint32_t kind_entry_id(std::size_t kind_index) const {
        return static_cast<std::uint32_t>(base_size_ + kind_index);
    }

    // Text for any id: subword token or kind name.
    const std::string& token_of(std::uint32_t id) const;

private:
    std::unordered_map<std::string, std::uint32_t> subwords_;
    std::vector<std::string> subword_tokens_; // by id
    std::vector<std::string> kind_names_;
    std::size_t base_size_ = 0;
};

Vocabulary build_vocabulary(const std::string& vocab_path);

// ---------------------------------------------------------------------------
// S-AST
// ---------------------------------------------------------------------------

enum class EdgeKind : std::uint8_t { AstChild, DataFlow, NextLeaf, Subtoken };
inline constexpr int kEdgeKindCount = 4;

const char* edge_kind_name(EdgeKind k);

using NodeId = frontend::NodeId;

struct SAstNode {
    NodeId id = 0;
    std::uint32_t vocab_id = 0;
    frontend::NodeKindId kind = frontend::NodeKindId::CompilationUnit;
    std::string token;           // subword piece for leaves, empty for non-leaf
    std::uint32_t source_pos = 0; // byte offset of the owning source token
    bool is_original_leaf = false;
    bool is_subtoken_child = false;
    std::optional<std::string> variable_name; // original spelling, on variable leaves
};

struct SAstEdge {
    NodeId src = 0;
    NodeId dst = 0;
    EdgeKind kind = EdgeKind::AstChild;
};

struct SAst {
    std::vector<SAstNode> nodes;
    std::vector<SAstEdge> edges;
    NodeId root = 0;
    std::size_t ast_node_count = 0;      // ids below this mirror the Ast
    std::vector<NodeId> statement_roots; // first method's top-level statements
};

// Builds the S-AST: AST edges kept, leaves subtokenized (first piece stays on
// the node, the rest become Subtoken children), original leaves chained with
// NextLeaf edges, consecutive occurrences of each variable chained with
// DataFlow edges, every node mapped to a vocabulary id.
SAst build_sast(const frontend::Ast& ast, const Vocabulary& vocab, const MergeTable& merges);

} // namespace codegraph::sast
