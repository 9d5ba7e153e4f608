//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mhnpath/errors.hpp"
#include "mhnpath/mhn/model.hpp"

// Layout (all integers and floats little-endian):
//   "MHNP" | u32 version | u32 n | n bytes config JSON | u64 library checksum
//   | u32 tensor count | per tensor: u32 name length, name, u32 rows,
//   u32 cols, rows*cols f64 in column-major order.

namespace mhnpath::mhn {

namespace {

constexpr char kMagic[4] = {'M', 'H', 'N', 'P'};
constexpr std::uint32_t kMaxBlock = 1U << 24;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
public:
  explicit Writer(std::ostream &out) : out_(out) {}
  template <typename T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char *>(&v), sizeof v);
  }
  void bytes(const std::string &s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

private:
  std::ostream &out_;
};

class Reader {
public:
  explicit Reader(std::istream &in) : in_(in) {}
  template <typename T>
  T get() {
    T v;
    read(reinterpret_cast<char *>(&v), sizeof v);
    return to_little(v);
  }
  std::string bytes(std::uint32_t n) {
    if (n > kMaxBlock) throw CorruptFile("model file has an oversized block");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

private:
  void read(char *dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw CorruptFile("model file is truncated");
  }
  std::istream &in_;
};

void write_tensor(Writer &w, const std::string &name, const Eigen::MatrixXd &t) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
  w.bytes(name);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rows()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.cols()));
  for (Eigen::Index i = 0; i < t.size(); ++i) w.put<double>(t.data()[i]);
}

}  // namespace

void save_model(const PrioritizerModel &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  Writer w(out);
  out.write(kMagic, 4);
  w.put<std::uint32_t>(kModelFormatVersion);
  const std::string config = to_json(model.config()).dump();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config.size()));
  w.bytes(config);
  w.put<std::uint64_t>(model.library_checksum());
  w.put<std::uint32_t>(
      static_cast<std::uint32_t>(model.parameters().size() + model.buffers().size()));
  for (const auto &[name, t] : model.parameters()) write_tensor(w, name, t);
  for (const auto &[name, t] : model.buffers()) write_tensor(w, name, t);
  if (!out) throw IoError("error writing " + path.string());
}

PrioritizerModel load_model(const std::filesystem::path &path,
                            const templates::TemplateLibrary &lib) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Reader r(in);
  if (r.bytes(4) != std::string(kMagic, 4)) throw CorruptFile(path.string() + ": not a model file");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion)
    throw VersionError(path.string() + ": model format version " + std::to_string(version) +
                       ", this build reads " + std::to_string(kModelFormatVersion));
  const std::string config_text = r.bytes(r.get<std::uint32_t>());
  ModelConfig cfg;
  try {
    cfg = config_from_json(nlohmann::json::parse(config_text));
  } catch (const nlohmann::json::exception &e) {
    throw CorruptFile(path.string() + ": bad config block: " + e.what());
  } catch (const ConfigError &e) {
    throw CorruptFile(path.string() + ": bad config block: " + e.what());
  }
  const auto checksum = r.get<std::uint64_t>();
  if (checksum != lib.checksum()) {
    std::ostringstream msg;
    msg << path.string() << ": model was trained on library " << std::hex << checksum
        << ", given library is " << lib.checksum();
    throw ChecksumError(msg.str());
  }

  PrioritizerModel model = init_model(cfg, lib);
  const auto count = r.get<std::uint32_t>();
  if (count != model.parameters().size() + model.buffers().size())
    throw CorruptFile(path.string() + ": unexpected tensor count " + std::to_string(count));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.get<std::uint32_t>());
    Eigen::MatrixXd *slot = nullptr;
    if (auto it = model.parameters().find(name); it != model.parameters().end()) slot = &it->second;
    else if (auto jt = model.buffers().find(name); jt != model.buffers().end()) slot = &jt->second;
    if (!slot) throw CorruptFile(path.string() + ": unknown tensor '" + name + "'");
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    if (rows != slot->rows() || cols != slot->cols())
      throw CorruptFile(path.string() + ": tensor '" + name + "' has the wrong shape");
    for (Eigen::Index j = 0; j < slot->size(); ++j) {
      const double v = r.get<double>();
      if (!std::isfinite(v)) throw CorruptFile(path.string() + ": tensor '" + name + "' is not finite");
      slot->data()[j] = v;
    }
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw CorruptFile(path.string() + ": trailing bytes after last tensor");
  model.build_cache();
  return model;
}

}  // namespace mhnpath::mhn
