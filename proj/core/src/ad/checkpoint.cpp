#include "hpc/ad/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "hpc/common/io.hpp"

namespace hpc::ad {

static constexpr char kMagic[8] = {'H', 'P', 'C', 'P', 'A', 'R', 'M', 'S'};

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params,
                     const std::string& kind) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TensorError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, 8);
  write_u32(out, kCheckpointVersion);
  write_string(out, kind);
  write_u32(out, static_cast<uint32_t>(params.items().size()));
  for (const auto& [name, t] : params.items()) {
    write_string(out, name);
    write_u32(out, static_cast<uint32_t>(t.shape().size()));
    for (int d : t.shape()) write_u64(out, static_cast<uint64_t>(d));
    for (double v : t.data()) write_f64(out, v);
  }
  if (!out) throw TensorError("checkpoint write failed: " + path.string());
}

LoadedCheckpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw TensorError("not a parameter file (bad magic): " + path.string());
  const uint32_t version = read_u32(in);
  if (version != kCheckpointVersion)
    throw TensorError("unsupported checkpoint version " + std::to_string(version) + " in " +
                      path.string());
  LoadedCheckpoint ck;
  ck.kind = read_string(in);
  const uint32_t count = read_u32(in);
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = read_string(in);
    const uint32_t ndim = read_u32(in);
    if (ndim == 0 || ndim > 2)
      throw TensorError("checkpoint entry '" + name + "' has rank " + std::to_string(ndim));
    std::vector<int> shape(ndim);
    int64_t numel = 1;
    for (auto& d : shape) {
      d = static_cast<int>(read_u64(in));
      numel *= d;
    }
    std::vector<double> values(static_cast<size_t>(numel));
    for (auto& v : values) v = read_f64(in);
    ck.params.emplace_back(std::move(name), Tensor::from(std::move(values), shape));
  }
  return ck;
}

void load_checkpoint(const std::filesystem::path& path, ParamStore& params,
                     const std::string& expected_kind) {
  LoadedCheckpoint ck = read_checkpoint(path);
  if (!expected_kind.empty() && ck.kind != expected_kind)
    throw TensorError("checkpoint kind mismatch: file has '" + ck.kind + "', expected '" +
                      expected_kind + "' (" + path.string() + ")");
  if (ck.params.size() != params.items().size())
    throw TensorError("checkpoint has " + std::to_string(ck.params.size()) +
                      " parameters, model has " + std::to_string(params.items().size()));
  for (auto& [name, loaded] : ck.params) {
    Tensor* dst = params.find(name);
    if (!dst) throw TensorError("checkpoint parameter '" + name + "' not found in model");
    if (dst->shape() != loaded.shape())
      throw TensorError("shape mismatch for '" + name + "': file " +
                        shape_str(loaded.shape()) + ", model " + shape_str(dst->shape()));
    std::copy(loaded.data().begin(), loaded.data().end(), dst->data().begin());
  }
}

uint64_t param_hash(const ParamStore& params) {
  uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (auto& [name, t] : params.items()) {
    for (char ch : name) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
    for (double x : t.data()) {
      uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      mix(bits);
    }
  }
  return h;
}

}  // namespace hpc::ad
