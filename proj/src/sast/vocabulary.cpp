#include <fstream>

#include "codegraph/error.hpp"
#include "codegraph/sast.hpp"

namespace codegraph::sast {

Vocabulary Vocabulary::load(const std::string& path, std::vector<std::string> kind_names) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw FormatError(path, line_no, "vocab line must be token<TAB>id");
        const std::string token = line.substr(0, tab);
        std::uint32_t id = 0;
        try {
            id = static_cast<std::uint32_t>(std::stoul(line.substr(tab + 1)));
        } catch (const std::exception&) {
            throw FormatError(path, line_no, "vocab id is not a number");
        }
        if (id != tokens.size())
            throw FormatError(path, line_no, "vocab ids must be dense and in order");
        tokens.push_back(token);
    }
    if (tokens.empty()) throw FormatError(path, 0, "vocabulary file is empty");
    return from_entries(std::move(tokens), std::move(kind_names));
}

Vocabulary Vocabulary::from_entries(std::vector<std::string> subwords,
                                    std::vector<std::string> kind_names) {
    Vocabulary v;
    v.base_size_ = subwords.size();
    v.subword_tokens_ = std::move(subwords);
    v.subwords_.reserve(v.subword_tokens_.size());
    for (std::size_t i = 0; i < v.subword_tokens_.size(); ++i) {
        if (!v.subwords_.emplace(v.subword_tokens_[i], static_cast<std::uint32_t>(i)).second)
            throw FormatError("<vocab>", static_cast<long>(i + 1),
                              "duplicate vocabulary token: " + v.subword_tokens_[i]);
    }
    for (const std::string& kind : kind_names) {
        if (v.subwords_.count(kind))
            throw FormatError("<vocab>", 0, "kind name collides with a subword entry: " + kind);
    }
    v.kind_names_ = std::move(kind_names);
    return v;
}

std::optional<std::uint32_t> Vocabulary::subword_id(std::string_view token) const {
    const auto it = subwords_.find(std::string(token));
    if (it == subwords_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::token_of(std::uint32_t id) const {
    if (id < base_size_) return subword_tokens_[id];
    const std::size_t k = id - base_size_;
    if (k >= kind_names_.size())
        throw ShapeMismatchError("vocabulary id out of range: " + std::to_string(id));
    return kind_names_[k];
}

Vocabulary build_vocabulary(const std::string& vocab_path) {
    return Vocabulary::load(vocab_path, frontend::non_leaf_kind_names());
}

} // namespace codegraph::sast
