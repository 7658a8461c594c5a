#include <sstream>

#include "codegraph/error.hpp"
#include "codegraph/io.hpp"
#include "codegraph/util.hpp"

namespace codegraph::io {

std::map<std::string, std::string> load_config_file(const std::string& path) {
    const std::string content = util::read_file(path);
    std::map<std::string, std::string> values;
    std::istringstream in(content);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string trimmed = util::trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw FormatError(path, line_no, "expected \"key = value\"");
        const std::string key = util::trim(trimmed.substr(0, eq));
        const std::string value = util::trim(trimmed.substr(eq + 1));
        if (key.empty()) throw FormatError(path, line_no, "empty config key");
        values[key] = value;
    }
    return values;
}

} // namespace codegraph::io
