#include "wlc/ensemble_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace wlc {
namespace {

constexpr char kMagic[4] = {'W', 'L', 'C', '1'};

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_integral_v<T> || std::is_floating_point_v<T>);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    static_assert(sizeof(T) == sizeof(U));
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes_.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
  void put_raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<unsigned char>& bytes() { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= U{bytes_[pos_ + i]} << (8 * i);
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }
  std::span<const unsigned char> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw EnsembleTruncatedError("ensemble file is truncated");
  }
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t state) noexcept {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= 0x100000001b3ull;
  }
  return state;
}

void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& path) {
  const auto& m = ensemble.meta;
  check_ensemble_shape(m.count, m.points, m.dim);
  if (ensemble.loops.size() != m.count) throw std::invalid_argument("save_ensemble: count mismatch");
  for (char c : m.generator_id)
    if (static_cast<unsigned char>(c) > 127) throw std::invalid_argument("save_ensemble: generator id must be ASCII");

  ByteWriter w;
  w.put_raw(kMagic, 4);
  w.put(m.format_version);
  w.put(m.dim);
  w.put(m.points);
  w.put(m.count);
  w.put(m.seed);
  w.put(static_cast<std::uint32_t>(m.generator_id.size()));
  w.put_raw(m.generator_id.data(), m.generator_id.size());
  w.bytes().reserve(w.bytes().size() + m.count * m.points * m.dim * 8 + 8);
  for (const Loop& loop : ensemble.loops) {
    if (loop.size() != static_cast<Eigen::Index>(m.points) || loop.dim() != static_cast<Eigen::Index>(m.dim))
      throw std::invalid_argument("save_ensemble: loop shape does not match metadata");
    for (Eigen::Index k = 0; k < loop.size(); ++k)
      for (Eigen::Index c = 0; c < loop.dim(); ++c) w.put(loop.points()(c, k));
  }
  w.put(fnv1a64(w.bytes()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_ensemble: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw std::runtime_error("save_ensemble: write failed for " + path.string());
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_ensemble: cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ByteReader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw EnsembleFormatError("load_ensemble: bad magic bytes");
  Ensemble e;
  e.meta.format_version = r.get<std::uint32_t>();
  if (e.meta.format_version != kEnsembleFormatVersion)
    throw EnsembleVersionError("load_ensemble: unsupported format version " +
                               std::to_string(e.meta.format_version));
  e.meta.dim = r.get<std::uint32_t>();
  e.meta.points = r.get<std::uint64_t>();
  e.meta.count = r.get<std::uint64_t>();
  e.meta.seed = r.get<std::uint64_t>();
  const auto id_len = r.get<std::uint32_t>();
  const auto id = r.take(id_len);
  e.meta.generator_id.assign(id.begin(), id.end());
  try {
    check_ensemble_shape(e.meta.count, e.meta.points, e.meta.dim);
  } catch (const std::invalid_argument& err) {
    throw EnsembleFormatError(std::string("load_ensemble: bad header: ") + err.what());
  }

  const std::uint64_t values = e.meta.count * e.meta.points * e.meta.dim;
  if (values / e.meta.count / e.meta.points != e.meta.dim || r.remaining() < values * 8 + 8)
    throw EnsembleTruncatedError("load_ensemble: file is truncated");
  if (r.remaining() > values * 8 + 8) throw EnsembleFormatError("load_ensemble: trailing bytes after checksum");

  const std::size_t payload_end = r.position() + values * 8;
  const std::uint64_t expected = fnv1a64(std::span(bytes).first(payload_end));

  e.loops.reserve(e.meta.count);
  const auto n = static_cast<Eigen::Index>(e.meta.points);
  const auto d = static_cast<Eigen::Index>(e.meta.dim);
  std::vector<Eigen::MatrixXd> raw;
  raw.reserve(e.meta.count);
  for (std::uint64_t l = 0; l < e.meta.count; ++l) {
    Eigen::MatrixXd pts(d, n);
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index c = 0; c < d; ++c) pts(c, k) = r.get<double>();
    raw.push_back(std::move(pts));
  }
  if (r.get<std::uint64_t>() != expected) throw EnsembleChecksumError("load_ensemble: checksum mismatch");
  for (auto& pts : raw) e.loops.emplace_back(std::move(pts));
  return e;
}

}  // namespace wlc
