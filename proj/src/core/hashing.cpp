#include "swat/core/hashing.hpp"

#include <cstdio>
#include <cstring>

#include "swat/core/error.hpp"

namespace swat {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}

void Fnv1a::update(std::span<const std::byte> bytes) {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= kFnvPrime;
  }
}

void Fnv1a::update(std::string_view text) {
  update(std::as_bytes(std::span(text.data(), text.size())));
}

void Fnv1a::update(const Matrix& m) {
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  update(std::as_bytes(std::span(dims)));
  update(std::as_bytes(std::span(m.data(), static_cast<std::size_t>(m.size()))));
}

std::string Fnv1a::hex() const { return to_hex(state_); }

std::uint64_t fnv1a(std::string_view text) {
  Fnv1a h;
  h.update(text);
  return h.digest();
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string_view to_string(Source source) {
  return source == Source::kFewShot ? "fewshot" : "retrieved";
}

Source source_from_string(std::string_view text) {
  if (text == "fewshot") return Source::kFewShot;
  if (text == "retrieved") return Source::kRetrieved;
  throw InvalidArgument("unknown source tag '" + std::string(text) + "'");
}

}  // namespace swat
