#include "nnkit/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

namespace seam::nn {

namespace {

constexpr char kMagic[9] = "SEAMNN01";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_scalar(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
void put_scalar(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
 public:
  ByteReader(std::string bytes, std::string origin)
      : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }

  std::string str(std::size_t n) { return std::string(take(n), n); }

  void read_scalar(float& v) { v = std::bit_cast<float>(u32()); }
  void read_scalar(double& v) { v = std::bit_cast<double>(u64()); }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      raise(ErrorKind::Model, "truncated checkpoint: " + origin_);
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::string bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::string read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_binary_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorKind::Io, "write failed: " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

template <typename T>
void save_checkpoint(const ParameterStoreT<T>& store, const std::filesystem::path& path,
                     const std::string& config_json) {
  std::string out;
  out.append(kMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(store.names().size()));
  for (const std::string& name : store.names()) {
    const TensorT<T>& t = store.value(name);
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.append(name);
    out.push_back(static_cast<char>(sizeof(T)));
    out.push_back(static_cast<char>(t.rank()));
    for (int dim : t.shape) put_u32(out, static_cast<std::uint32_t>(dim));
    for (T v : t.data) put_scalar(out, v);
  }
  write_binary_file(path, out);
  write_binary_file(sidecar_path(path), config_json);
}

template <typename T>
std::string load_checkpoint(ParameterStoreT<T>& store, const std::filesystem::path& path) {
  if (!store.names().empty()) raise(ErrorKind::Model, "load_checkpoint needs an empty store");
  ByteReader in(read_binary_file(path), path.string());
  if (in.str(8) != std::string(kMagic, 8)) {
    raise(ErrorKind::Model, "bad checkpoint magic in " + path.string());
  }
  const std::uint32_t count = in.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = in.u32();
    const std::string name = in.str(name_len);
    const std::uint8_t width = in.u8();
    if (width != sizeof(T)) {
      raise(ErrorKind::Model, "checkpoint scalar width " + std::to_string(width) +
                                  " does not match store width " + std::to_string(sizeof(T)));
    }
    const std::uint8_t rank = in.u8();
    if (rank > 4) raise(ErrorKind::Model, "checkpoint tensor rank exceeds 4");
    std::vector<int> dims;
    for (std::uint8_t r = 0; r < rank; ++r) dims.push_back(static_cast<int>(in.u32()));
    TensorT<T> t(dims);
    for (T& v : t.data) in.read_scalar(v);
    store.adopt(name, std::move(t));
  }
  if (!in.done()) raise(ErrorKind::Model, "trailing bytes in checkpoint " + path.string());
  return read_binary_file(sidecar_path(path));
}

template void save_checkpoint<float>(const ParameterStoreT<float>&, const std::filesystem::path&,
                                     const std::string&);
template void save_checkpoint<double>(const ParameterStoreT<double>&,
                                      const std::filesystem::path&, const std::string&);
template std::string load_checkpoint<float>(ParameterStoreT<float>&,
                                            const std::filesystem::path&);
template std::string load_checkpoint<double>(ParameterStoreT<double>&,
                                             const std::filesystem::path&);

}  // namespace seam::nn
