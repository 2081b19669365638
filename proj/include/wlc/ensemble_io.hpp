#pragma once

#include "wlc/ensemble.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>

namespace wlc {

/// Ensemble file layout (all integers and floats little-endian):
///
///   "WLC1" | format_version u32 | d u32 | N u64 | count u64 | seed u64 |
///   generator_id (u32 length + ASCII) | count*N*d f64 | checksum u64
///
/// Payload order is loop, then point, then coordinate. The checksum is
/// FNV-1a (64 bit) over every byte before it.
class EnsembleFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EnsembleVersionError : public EnsembleFormatError {
 public:
  using EnsembleFormatError::EnsembleFormatError;
};
class EnsembleChecksumError : public EnsembleFormatError {
 public:
  using EnsembleFormatError::EnsembleFormatError;
};
class EnsembleTruncatedError : public EnsembleFormatError {
 public:
  using EnsembleFormatError::EnsembleFormatError;
};

std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ull) noexcept;

void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& path);
Ensemble load_ensemble(const std::filesystem::path& path);

}  // namespace wlc
