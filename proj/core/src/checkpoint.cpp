#include "eegrc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eegrc/error.hpp"

namespace eegrc::uercm {

namespace {

constexpr char kMagic[6] = {'U', 'E', 'R', 'C', 'M', '\0'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  const char* take(std::size_t n) {
    if (pos_ + n > s_.size()) throw StructuralError("checkpoint truncated");
    const char* p = s_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  double f64() {
    double v;
    std::memcpy(&v, take(8), 8);
    return v;
  }
  std::string str(std::size_t n) { return std::string(take(n), n); }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  ckpt.params.check_shapes(ckpt.config);
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kCheckpointVersion);
  nlohmann::json header = {{"config", ckpt.config}, {"task", ckpt.task}};
  const std::string text = header.dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;

  std::uint32_t count = 0;
  ModelParams::visit_all(ckpt.params, [&](std::string_view, const Eigen::MatrixXd&) { ++count; });
  put_u32(out, count);
  ModelParams::visit_all(ckpt.params, [&](std::string_view name, const Eigen::MatrixXd& m) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.append(name.data(), name.size());
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
    }
  });
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(sizeof kMagic), kMagic, sizeof kMagic) != 0) {
    throw StructuralError("not a UERCM checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw StructuralError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  try {
    const auto header = nlohmann::json::parse(r.str(r.u32()));
    ck.config = header.at("config").get<ModelConfig>();
    ck.task = header.value("task", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("checkpoint header: ") + e.what());
  }
  ck.config.validate();
  ck.params = ModelParams::init(ck.config);

  const std::uint32_t count = r.u32();
  std::uint32_t expected = 0;
  ModelParams::visit_all(ck.params, [&](std::string_view, const Eigen::MatrixXd&) { ++expected; });
  if (count != expected) {
    throw StructuralError("checkpoint holds " + std::to_string(count) + " tensors, expected " +
                          std::to_string(expected));
  }
  ModelParams::visit_all(ck.params, [&](std::string_view name, Eigen::MatrixXd& m) {
    const std::string stored = r.str(r.u32());
    if (stored != name) {
      throw StructuralError("checkpoint tensor '" + stored + "' where '" + std::string(name) +
                            "' was expected");
    }
    if (r.u32() != 2) throw StructuralError("tensor " + stored + " is not two-dimensional");
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows != m.rows() || cols != m.cols()) {
      throw StructuralError("tensor " + stored + " has shape " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", config implies " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.f64();
    }
  });
  if (!r.done()) throw StructuralError("trailing bytes after checkpoint tensors");
  if (!ck.params.all_finite()) throw StructuralError("checkpoint contains non-finite values");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write checkpoint " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace eegrc::uercm
