#include "emitsim/cli/cache.hpp"
#include "emitsim/arrowhead.hpp"
#include "emitsim/cli/checksum.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <unistd.h>

namespace emitsim::cli {

namespace {

constexpr char magic[5] = {'A', 'D', 'E', 'C', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

class Writer {
public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf.insert(buf.end(), c, c + n);
  }
  void u64(std::uint64_t v) {
    v = to_le(v);
    bytes(&v, 8);
  }
  void f64(double d) { u64(std::bit_cast<std::uint64_t>(d)); }
  std::vector<char> buf;
};

class Reader {
public:
  explicit Reader(const std::vector<char>& b) : buf(b) {}
  bool bytes(void* p, std::size_t n) {
    if (pos + n > buf.size()) return false;
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
    return true;
  }
  bool u64(std::uint64_t& v) {
    if (!bytes(&v, 8)) return false;
    v = to_le(v);
    return true;
  }
  bool f64(double& d) {
    std::uint64_t v;
    if (!u64(v)) return false;
    d = std::bit_cast<double>(v);
    return true;
  }
  const std::vector<char>& buf;
  std::size_t pos = 0;
};

} // namespace

std::uint64_t hamiltonian_hash(const ArrowheadHamiltoniand& h) {
  Fnv1a f;
  const std::uint64_t dims[2] = {to_le(static_cast<std::uint64_t>(h.atom_count())),
                                 to_le(static_cast<std::uint64_t>(h.oscillator_count()))};
  f.update(dims, sizeof dims);
  auto feed = [&](const auto& m) {
    for (Index i = 0; i < m.size(); ++i) {
      const std::uint64_t v = to_le(std::bit_cast<std::uint64_t>(m.data()[i]));
      f.update(&v, 8);
    }
  };
  feed(h.head());
  feed(h.diag());
  feed(h.border());
  return f.digest();
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t hash) {
  return dir / ("adec-" + hex64(hash) + ".bin");
}

void write_cache(const std::filesystem::path& path, std::uint64_t hash,
                 const EigenDecompositiond& eig) {
  const Index n = eig.dimension();
  if (n > cache_dense_limit) throw DomainError("write_cache: dimension above the cache limit");
  const Eigen::MatrixXd u = eig.eigenvectors();
  Writer w;
  w.bytes(magic, sizeof magic);
  w.u64(16);
  w.u64(static_cast<std::uint64_t>(n));
  w.u64(hash);
  for (Index i = 0; i < n; ++i) w.f64(eig.eigenvalues()(i));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) w.f64(u(i, j));
  Fnv1a f;
  f.update(w.buf.data(), w.buf.size());
  w.u64(f.digest());

  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<EigenDecompositiond> read_cache(const std::filesystem::path& path,
                                              std::uint64_t hash, Index dimension,
                                              std::string* problem) {
  auto fail = [&](const std::string& why) -> std::optional<EigenDecompositiond> {
    if (problem) *problem = why;
    return std::nullopt;
  };
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail("missing");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8) return fail("truncated");
  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - 8, 8);
  stored = to_le(stored);
  Fnv1a f;
  f.update(buf.data(), buf.size() - 8);
  if (f.digest() != stored) return fail("checksum mismatch");
  Reader r(buf);
  char m[5];
  if (!r.bytes(m, 5) || std::memcmp(m, magic, 5) != 0) return fail("bad magic");
  std::uint64_t meta, n, h;
  if (!r.u64(meta) || meta < 16 || !r.u64(n) || !r.u64(h)) return fail("bad metadata");
  r.pos += meta - 16;
  if (h != hash) return fail("parameter hash mismatch");
  if (static_cast<Index>(n) != dimension) return fail("dimension mismatch");
  if (buf.size() != r.pos + 8 * (n + n * n) + 8) return fail("size mismatch");
  Eigen::VectorXd values(n);
  Eigen::MatrixXd u(n, n);
  for (Index i = 0; i < static_cast<Index>(n); ++i) r.f64(values(i));
  for (Index j = 0; j < static_cast<Index>(n); ++j)
    for (Index i = 0; i < static_cast<Index>(n); ++i) r.f64(u(i, j));
  return EigenDecompositiond(std::move(values), std::move(u));
}

EigenDecompositiond cached_eigendecomposition(const ArrowheadHamiltoniand& h,
                                              const std::optional<std::filesystem::path>& dir,
                                              std::ostream& log, std::filesystem::path* used) {
  const Index n = h.dimension();
  // Below the limit the dense form is used whether or not a cache is
  // configured, so cache hits and misses give bit-identical results.
  auto dense = [](const EigenDecompositiond& e) {
    return EigenDecompositiond(e.eigenvalues(), e.eigenvectors());
  };
  if (n > cache_dense_limit) {
    if (dir) log << "note: dimension " << n << " exceeds the cache limit " << cache_dense_limit
                 << "; not caching\n";
    return eigendecompose(h);
  }
  if (!dir) return dense(eigendecompose(h));
  const std::uint64_t key = hamiltonian_hash(h);
  const auto path = cache_path(*dir, key);
  if (used) *used = path;
  if (std::filesystem::exists(path)) {
    std::string problem;
    if (auto hit = read_cache(path, key, n, &problem)) return std::move(*hit);
    log << "warning: cache entry " << path.string() << " unusable (" << problem
        << "); recomputing\n";
  }
  EigenDecompositiond eig = dense(eigendecompose(h));
  write_cache(path, key, eig);
  return eig;
}

} // namespace emitsim::cli
