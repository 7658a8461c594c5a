#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "codegraph/ek.hpp"
#include "codegraph/error.hpp"
#include "codegraph/util.hpp"
#include "json.hpp"

namespace codegraph::ek {

std::vector<double> reference_encode(std::string_view text, std::size_t d) {
    std::vector<double> v(d, 0.0);
    double norm_sq = 0.0;
    for (const std::string& token : util::split_ws(text)) {
        const std::uint64_t h = util::fnv1a64(token);
        const std::size_t bucket = h % d;
        v[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& x : v) x *= inv;
    }
    return v;
}

std::vector<double> ReferenceEncoder::encode(std::string_view text) const {
    return reference_encode(truncate_tokens(text, max_tokens_), d_);
}

namespace {

class TempFile {
public:
    explicit TempFile(std::string_view content) {
        static std::atomic<unsigned> counter{0};
        const auto dir = std::filesystem::temp_directory_path();
        path_ = (dir / ("codegraph-ctx-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++) + ".txt"))
                    .string();
        util::write_file(path_, content);
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace

std::vector<double> CommandEncoder::encode(std::string_view text) const {
    const TempFile input(truncate_tokens(text, max_tokens_));
    // The subshell makes the redirection feed the whole command, pipelines
    // included, not just the final stage.
    const std::string shell = "( " + command_ + " ) < '" + input.path() + "'";

    FILE* pipe = ::popen(shell.c_str(), "r");
    if (pipe == nullptr) throw IoError("cannot run encoder command: " + command_);
    std::string output;
    char buffer[4096];
    std::size_t got;
    while ((got = std::fread(buffer, 1, sizeof buffer, pipe)) > 0)
        output.append(buffer, got);
    const int status = ::pclose(pipe);
    if (status != 0)
        throw IoError("encoder command failed with status " + std::to_string(status) +
                      ": " + command_);

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(output);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("<encoder output>", 0,
                          std::string("expected a JSON array of numbers: ") + e.what());
    }
    if (!parsed.is_array())
        throw FormatError("<encoder output>", 0, "expected a JSON array of numbers");
    if (parsed.size() != d_)
        throw ShapeMismatchError("encoder returned " + std::to_string(parsed.size()) +
                                 " values, expected " + std::to_string(d_));
    std::vector<double> v;
    v.reserve(d_);
    for (const auto& item : parsed) {
        if (!item.is_number())
            throw FormatError("<encoder output>", 0, "vector entries must be numbers");
        const double x = item.get<double>();
        if (!std::isfinite(x)) throw NonFiniteError("encoder returned a non-finite value");
        v.push_back(x);
    }
    return v;
}

} // namespace codegraph::ek
