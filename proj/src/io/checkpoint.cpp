#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "codegraph/error.hpp"
#include "codegraph/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint layout assumes a little-endian host");

namespace codegraph::io {

namespace {

constexpr char kMagic[8] = {'C', 'G', 'C', 'K', 'P', 'T', '0', '1'};
constexpr std::uint32_t kVersion = 1;

struct NamedTensor {
    std::string name;
    const gnn::Tensor2* tensor;
};

// Checkpoint order: the graph-pipeline registry, then the fusion head.
std::vector<NamedTensor> tensor_list(const fusion::ModelParams& params) {
    std::vector<NamedTensor> list;
    params.pgnn.for_each_tensor(
        [&](const std::string& name, const gnn::Tensor2& t) { list.push_back({name, &t}); });
    list.push_back({"fc_f.w", &params.fuse.w});
    list.push_back({"fc_f.b", &params.fuse.b});
    return list;
}

std::vector<std::pair<std::string, gnn::Tensor2*>> tensor_slots(fusion::ModelParams& params) {
    std::vector<std::pair<std::string, gnn::Tensor2*>> list;
    params.pgnn.for_each_tensor(
        [&](const std::string& name, gnn::Tensor2& t) { list.push_back({name, &t}); });
    list.push_back({"fc_f.w", &params.fuse.w});
    list.push_back({"fc_f.b", &params.fuse.b});
    return list;
}

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T take(std::ifstream& in, const std::string& path) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(value));
    if (!in) throw FormatError(path, 0, "truncated checkpoint");
    return value;
}

} // namespace

void save_checkpoint(const std::string& path, const fusion::ModelParams& params) {
    params.pgnn.check_shapes();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    const gnn::Dims& dims = params.pgnn.dims;
    put(out, static_cast<std::uint32_t>(dims.d));
    put(out, static_cast<std::uint32_t>(dims.e_dim));
    put(out, static_cast<std::uint32_t>(dims.gnn_layers));
    put(out, static_cast<std::uint32_t>(dims.lstm_layers));
    put(out, static_cast<std::uint64_t>(dims.vocab_size));

    const std::vector<NamedTensor> tensors = tensor_list(params);
    put(out, static_cast<std::uint32_t>(tensors.size()));
    for (const NamedTensor& entry : tensors) {
        put(out, static_cast<std::uint32_t>(entry.name.size()));
        out.write(entry.name.data(), static_cast<std::streamsize>(entry.name.size()));
        put(out, static_cast<std::uint64_t>(entry.tensor->rows));
        put(out, static_cast<std::uint64_t>(entry.tensor->cols));
        out.write(reinterpret_cast<const char*>(entry.tensor->data.data()),
                  static_cast<std::streamsize>(entry.tensor->data.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

fusion::ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);

    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError(path, 0, "not a checkpoint file (bad magic)");
    const auto version = take<std::uint32_t>(in, path);
    if (version != kVersion)
        throw FormatError(path, 0, "unsupported checkpoint version " + std::to_string(version));

    gnn::Dims dims;
    dims.d = take<std::uint32_t>(in, path);
    dims.e_dim = take<std::uint32_t>(in, path);
    dims.gnn_layers = take<std::uint32_t>(in, path);
    dims.lstm_layers = take<std::uint32_t>(in, path);
    dims.vocab_size = take<std::uint64_t>(in, path);
    if (dims.d < 2 || dims.vocab_size == 0)
        throw FormatError(path, 0, "implausible dims header");

    fusion::ModelParams params;
    params.pgnn = gnn::PgnnParams::zeros(dims);
    params.fuse = fusion::FusionParams::zeros(dims.d);
    const auto slots = tensor_slots(params);

    const auto count = take<std::uint32_t>(in, path);
    if (count != slots.size())
        throw FormatError(path, 0,
                          "checkpoint holds " + std::to_string(count) + " tensors, expected " +
                              std::to_string(slots.size()));
    for (const auto& [name, tensor] : slots) {
        const auto name_len = take<std::uint32_t>(in, path);
        std::string stored(name_len, '\0');
        in.read(stored.data(), name_len);
        if (!in) throw FormatError(path, 0, "truncated checkpoint");
        if (stored != name)
            throw FormatError(path, 0, "tensor \"" + stored + "\" out of order, expected \"" +
                                           name + "\"");
        const auto rows = take<std::uint64_t>(in, path);
        const auto cols = take<std::uint64_t>(in, path);
        if (rows != tensor->rows || cols != tensor->cols)
            throw FormatError(path, 0,
                              "tensor \"" + name + "\" has shape " + std::to_string(rows) + "x" +
                                  std::to_string(cols) + ", expected " +
                                  std::to_string(tensor->rows) + "x" +
                                  std::to_string(tensor->cols));
        in.read(reinterpret_cast<char*>(tensor->data.data()),
                static_cast<std::streamsize>(tensor->data.size() * sizeof(double)));
        if (!in) throw FormatError(path, 0, "truncated checkpoint");
    }
    char extra;
    if (in.read(&extra, 1)) throw FormatError(path, 0, "trailing bytes after last tensor");
    params.pgnn.check_shapes();
    return params;
}

} // namespace codegraph::io
