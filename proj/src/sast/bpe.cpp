#include <fstream>
#include <limits>
#include <sstream>

#include "codegraph/error.hpp"
#include "codegraph/sast.hpp"

namespace codegraph::sast {

namespace {

std::string encode_utf8(int cp) {
    std::string out;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
    return out;
}

// Bijection byte -> code point: printable byte values map to themselves,
// the rest take code points from 256 upward so every unit stays printable.
std::array<int, 256> make_byte_codepoints() {
    std::array<int, 256> cps{};
    std::array<bool, 256> direct{};
    const auto mark = [&](int lo, int hi) {
        for (int b = lo; b <= hi; ++b) direct[static_cast<std::size_t>(b)] = true;
    };
    mark('!', '~');
    mark(0xa1, 0xac);
    mark(0xae, 0xff);
    int next = 256;
    for (int b = 0; b < 256; ++b)
        cps[static_cast<std::size_t>(b)] = direct[static_cast<std::size_t>(b)] ? b : next++;
    return cps;
}

const std::array<int, 256>& byte_codepoints() {
    static const std::array<int, 256> cps = make_byte_codepoints();
    return cps;
}

int decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    if ((b0 & 0xe0) == 0xc0 && i + 1 < s.size()) {
        const int cp = ((b0 & 0x1f) << 6) | (byte(i + 1) & 0x3f);
        i += 2;
        return cp;
    }
    if ((b0 & 0xf0) == 0xe0 && i + 2 < s.size()) {
        const int cp = ((b0 & 0x0f) << 12) | ((byte(i + 1) & 0x3f) << 6) | (byte(i + 2) & 0x3f);
        i += 3;
        return cp;
    }
    throw FormatError("<bpe>", 0, "invalid UTF-8 in mapped token text");
}

} // namespace

const std::array<std::string, 256>& MergeTable::byte_units() {
    static const std::array<std::string, 256> units = [] {
        std::array<std::string, 256> u;
        for (int b = 0; b < 256; ++b)
            u[static_cast<std::size_t>(b)] = encode_utf8(byte_codepoints()[static_cast<std::size_t>(b)]);
        return u;
    }();
    return units;
}

std::string MergeTable::map_bytes(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) out += byte_units()[c];
    return out;
}

std::string MergeTable::unmap_bytes(std::string_view mapped) {
    static const std::array<int, 1024> reverse = [] {
        std::array<int, 1024> r;
        r.fill(-1);
        for (int b = 0; b < 256; ++b)
            r[static_cast<std::size_t>(byte_codepoints()[static_cast<std::size_t>(b)])] = b;
        return r;
    }();
    std::string out;
    std::size_t i = 0;
    while (i < mapped.size()) {
        const int cp = decode_utf8(mapped, i);
        const int b = cp < 1024 ? reverse[static_cast<std::size_t>(cp)] : -1;
        if (b < 0) throw FormatError("<bpe>", 0, "code point outside the byte alphabet");
        out.push_back(static_cast<char>(b));
    }
    return out;
}

MergeTable MergeTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open merge file: " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
            line.find(' ', sp + 1) != std::string::npos)
            throw FormatError(path, line_no, "merge line must be two space-separated pieces");
        pairs.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return from_pairs(pairs);
}

MergeTable MergeTable::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    MergeTable t;
    t.merges_ = pairs;
    t.ranks_.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string key = pairs[i].first + ' ' + pairs[i].second;
        if (!t.ranks_.emplace(key, static_cast<std::uint32_t>(i)).second)
            throw FormatError("<merges>", static_cast<long>(i + 1), "duplicate merge pair: " + key);
    }
    return t;
}

std::vector<std::string> MergeTable::split(std::string_view raw_token) const {
    std::vector<std::string> parts;
    parts.reserve(raw_token.size());
    for (unsigned char c : raw_token) parts.push_back(byte_units()[c]);

    // Repeatedly apply the best-ranked pair present, merging every
    // occurrence, until no listed pair remains adjacent.
    while (parts.size() > 1) {
        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            const auto it = ranks_.find(parts[i] + ' ' + parts[i + 1]);
            if (it != ranks_.end() && it->second < best) best = it->second;
        }
        if (best == std::numeric_limits<std::uint32_t>::max()) break;
        const auto& [left, right] = merges_[best];
        std::vector<std::string> merged;
        merged.reserve(parts.size());
        std::size_t i = 0;
        while (i < parts.size()) {
            if (i + 1 < parts.size() && parts[i] == left && parts[i + 1] == right) {
                merged.push_back(left + right);
                i += 2;
            } else {
                merged.push_back(std::move(parts[i]));
                i += 1;
            }
        }
        parts = std::move(merged);
    }
    return parts;
}

std::vector<std::string> subtokenize(std::string_view token, const MergeTable& merges) {
    return merges.split(token);
}

} // namespace codegraph::sast
