#include "promptrl/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace promptrl {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'R', 'L', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get() {
    T v{};
    need(sizeof(T));
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void get_bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > size_ - pos_) throw CheckpointError("checkpoint truncated");
  }
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path, const PolicyModel<Scalar>& model, const Checkpoint& meta) {
  Writer w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put(kCheckpointVersion);
  w.put(static_cast<std::uint32_t>(sizeof(Scalar)));
  const auto& c = model.config();
  w.put(static_cast<std::int32_t>(c.vocab_size));
  w.put(static_cast<std::int32_t>(c.d_model));
  w.put(static_cast<std::int32_t>(c.n_layers));
  w.put(static_cast<std::int32_t>(c.n_heads));
  w.put(static_cast<std::int32_t>(c.max_len));
  w.put(static_cast<std::uint64_t>(c.seed));
  w.put(static_cast<std::uint64_t>(meta.step));
  w.put(static_cast<std::uint32_t>(model.manifest().size()));
  for (const auto& b : model.manifest()) {
    w.put_string(b.name);
    w.put(static_cast<std::int64_t>(b.rows));
    w.put(static_cast<std::int64_t>(b.cols));
  }
  w.put(static_cast<std::uint64_t>(model.num_parameters()));
  w.put_bytes(model.parameters().data(), static_cast<std::size_t>(model.num_parameters()) * sizeof(Scalar));

  w.put(static_cast<std::uint8_t>(meta.vocab ? 1 : 0));
  if (meta.vocab) {
    const auto& toks = meta.vocab->tokens();
    w.put(static_cast<std::uint32_t>(toks.size() - Vocab::kNumSpecial));
    for (std::size_t k = Vocab::kNumSpecial; k < toks.size(); ++k) w.put_string(toks[k]);
  }
  w.put(static_cast<std::uint8_t>(meta.optimizer ? 1 : 0));
  if (meta.optimizer) {
    const auto& o = *meta.optimizer;
    w.put(static_cast<std::uint64_t>(o.t));
    w.put(static_cast<std::uint64_t>(o.indices.size()));
    for (auto k : o.indices) w.put(static_cast<std::int64_t>(k));
    w.put_bytes(o.m.data(), static_cast<std::size_t>(o.m.size()) * sizeof(double));
    w.put_bytes(o.v.data(), static_cast<std::size_t>(o.v.size()) * sizeof(double));
  }
  auto& buf = w.buffer();
  const auto crc = crc_of(buf.data(), buf.size());
  w.put(crc);

  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

template <typename Scalar>
LoadedCheckpoint<Scalar> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader r(buf.data(), buf.size());
  char magic[8];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw CheckpointError("not a checkpoint file: " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  if (buf.size() < 16) throw CheckpointError("checkpoint truncated");
  std::uint32_t stored = 0;
  std::memcpy(&stored, buf.data() + buf.size() - 4, 4);
  if (stored != crc_of(buf.data(), buf.size() - 4)) throw CheckpointError("checkpoint checksum mismatch: " + path.string());
  Reader body(buf.data() + 12, buf.size() - 16);

  const auto width = body.get<std::uint32_t>();
  if (width != sizeof(Scalar)) throw CheckpointError("checkpoint scalar width mismatch");
  ModelConfig c;
  c.vocab_size = body.get<std::int32_t>();
  c.d_model = body.get<std::int32_t>();
  c.n_layers = body.get<std::int32_t>();
  c.n_heads = body.get<std::int32_t>();
  c.max_len = body.get<std::int32_t>();
  c.seed = body.get<std::uint64_t>();
  Checkpoint meta;
  meta.step = body.get<std::uint64_t>();

  PolicyModel<Scalar> model = [&] {
    try {
      return PolicyModel<Scalar>(c);
    } catch (const std::invalid_argument& e) {
      throw CheckpointError(std::string("invalid model config in checkpoint: ") + e.what());
    }
  }();
  const auto n_blocks = body.get<std::uint32_t>();
  if (n_blocks != model.manifest().size()) throw CheckpointError("checkpoint manifest size mismatch");
  for (const auto& b : model.manifest()) {
    const auto name = body.get_string();
    const auto rows = body.get<std::int64_t>();
    const auto cols = body.get<std::int64_t>();
    if (name != b.name || rows != b.rows || cols != b.cols) {
      throw CheckpointError("checkpoint manifest mismatch at block '" + name + "'");
    }
  }
  const auto n_params = body.get<std::uint64_t>();
  if (n_params != static_cast<std::uint64_t>(model.num_parameters())) {
    throw CheckpointError("checkpoint parameter count mismatch");
  }
  body.get_bytes(model.parameters().data(), n_params * sizeof(Scalar));

  if (body.get<std::uint8_t>() != 0) {
    const auto n = body.get<std::uint32_t>();
    std::vector<std::string> words;
    words.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) words.push_back(body.get_string());
    meta.vocab = Vocab(std::move(words));
  }
  if (body.get<std::uint8_t>() != 0) {
    OptimizerState o;
    o.t = body.get<std::uint64_t>();
    const auto n = body.get<std::uint64_t>();
    if (n > static_cast<std::uint64_t>(model.num_parameters())) throw CheckpointError("optimizer state too large");
    o.indices.resize(n);
    for (auto& k : o.indices) k = static_cast<Eigen::Index>(body.get<std::int64_t>());
    o.m.resize(static_cast<Eigen::Index>(n));
    o.v.resize(static_cast<Eigen::Index>(n));
    body.get_bytes(o.m.data(), n * sizeof(double));
    body.get_bytes(o.v.data(), n * sizeof(double));
    meta.optimizer = std::move(o);
  }
  if (body.remaining() != 0) throw CheckpointError("trailing bytes in checkpoint");
  return {std::move(model), std::move(meta)};
}

template void save_checkpoint<float>(const std::filesystem::path&, const PolicyModel<float>&, const Checkpoint&);
template void save_checkpoint<double>(const std::filesystem::path&, const PolicyModel<double>&, const Checkpoint&);
template LoadedCheckpoint<float> load_checkpoint<float>(const std::filesystem::path&);
template LoadedCheckpoint<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace promptrl
