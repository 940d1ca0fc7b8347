#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "swat/core/types.hpp"

namespace swat {

// 64-bit FNV-1a. Stable across platforms with the same endianness.
class Fnv1a {
 public:
  void update(std::span<const std::byte> bytes);
  void update(std::string_view text);
  void update(const Matrix& m);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a(std::string_view text);
std::string to_hex(std::uint64_t value);

// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace swat
