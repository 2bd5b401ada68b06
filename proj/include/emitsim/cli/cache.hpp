#pragma once

#include "emitsim/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace emitsim::cli {

/// Dense eigendecompositions above this dimension are not cached (the file
/// would hold dimension^2 doubles).
inline constexpr Index cache_dense_limit = 4001;

/// FNV-1a over the head, diagonal and border entries of H.
std::uint64_t hamiltonian_hash(const ArrowheadHamiltoniand& h);

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t hash);

/// "ADEC1", u64 metadata length, metadata (u64 dimension, u64 parameter
/// hash), eigenvalues, eigenvector columns, u64 FNV-1a of everything before
/// it. Integers and doubles little-endian. Written to a temporary file and
/// renamed into place.
void write_cache(const std::filesystem::path& path, std::uint64_t hash,
                 const EigenDecompositiond& eig);

/// Empty with `problem` set when the file is missing, truncated, has the
/// wrong key or fails its checksum.
std::optional<EigenDecompositiond> read_cache(const std::filesystem::path& path,
                                              std::uint64_t hash, Index dimension,
                                              std::string* problem = nullptr);

/// Loads the decomposition of h from `dir` when a valid entry exists,
/// otherwise computes it and stores it (dimension permitting). Corrupt
/// entries are reported on `log` and recomputed.
EigenDecompositiond cached_eigendecomposition(const ArrowheadHamiltoniand& h,
                                              const std::optional<std::filesystem::path>& dir,
                                              std::ostream& log,
                                              std::filesystem::path* used = nullptr);

} // namespace emitsim::cli
