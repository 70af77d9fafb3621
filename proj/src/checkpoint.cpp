#include "sccl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "sccl/error.hpp"

namespace sccl {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'C', 'C', 'L', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, const std::filesystem::path& path) : buf_(buf), path_(path) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw DataError("checkpoint " + path_.string() + ": truncated file");
  }
  const std::string& buf_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint snapshot(const ParameterSet& params, std::string metadata) {
  Checkpoint ckpt;
  ckpt.metadata = std::move(metadata);
  for (const auto& [name, p] : params) {
    ckpt.tensors.emplace(name, StoredTensor{p.tensor.shape(), p.tensor.to_vector()});
  }
  return ckpt;
}

void restore(const Checkpoint& ckpt, ParameterSet& params) {
  if (ckpt.tensors.size() != params.size()) {
    throw DataError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                    std::to_string(params.size()));
  }
  for (auto& [name, p] : params) {
    auto it = ckpt.tensors.find(name);
    if (it == ckpt.tensors.end()) throw DataError("checkpoint is missing tensor '" + name + "'");
    if (it->second.shape != p.tensor.shape()) {
      throw DataError("checkpoint tensor '" + name + "' has shape " + shape_str(it->second.shape) +
                      ", model expects " + shape_str(p.tensor.shape()));
    }
    auto w = p.tensor.mutable_data();
    std::copy(it->second.values.begin(), it->second.values.end(), w.begin());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint32_t>(buf, kCheckpointVersion);
  put<std::uint64_t>(buf, ckpt.metadata.size());
  buf += ckpt.metadata;
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(name.size()));
    buf += name;
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint64_t>(buf, d);
    for (double v : t.values) put<double>(buf, v);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(buf, path);
  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw DataError("checkpoint " + path.string() + ": bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint " + path.string() + ": unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.metadata = r.bytes(r.get<std::uint64_t>());
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name = r.bytes(r.get<std::uint32_t>());
    StoredTensor t;
    t.shape.resize(r.get<std::uint32_t>());
    for (auto& d : t.shape) d = r.get<std::uint64_t>();
    t.values.resize(shape_size(t.shape));
    for (auto& v : t.values) v = r.get<double>();
    if (!ckpt.tensors.emplace(std::move(name), std::move(t)).second) {
      throw DataError("checkpoint " + path.string() + ": duplicate tensor name");
    }
  }
  if (!r.done()) throw DataError("checkpoint " + path.string() + ": trailing bytes");
  return ckpt;
}

void save_checkpoint_json(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json doc;
  doc["version"] = kCheckpointVersion;
  doc["metadata"] = ckpt.metadata;
  auto& tensors = doc["tensors"] = nlohmann::json::object();
  for (const auto& [name, t] : ckpt.tensors) tensors[name] = {{"shape", t.shape}, {"values", t.values}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << doc.dump() << '\n';
}

Checkpoint load_checkpoint_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("version").get<std::uint32_t>() != kCheckpointVersion) {
      throw DataError("checkpoint " + path.string() + ": unsupported version");
    }
    Checkpoint ckpt;
    ckpt.metadata = doc.at("metadata").get<std::string>();
    for (const auto& [name, t] : doc.at("tensors").items()) {
      StoredTensor st{t.at("shape").get<Shape>(), t.at("values").get<std::vector<double>>()};
      if (st.values.size() != shape_size(st.shape)) {
        throw DataError("checkpoint tensor '" + name + "' value count does not match its shape");
      }
      ckpt.tensors.emplace(name, std::move(st));
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace sccl
