#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace emitsim::cli {

/// 64-bit FNV-1a.
class Fnv1a {
public:
  void update(const void* data, std::size_t n);
  void update(std::string_view s) { update(s.data(), s.size()); }
  std::uint64_t digest() const { return h_; }

private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t file_checksum(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

} // namespace emitsim::cli
