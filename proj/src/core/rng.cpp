#include "core/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace condmean {

namespace {

std::mt19937_64 seeded_engine(SeedSpec seed, std::uint64_t substream) {
  const std::array<std::uint32_t, 6> words{
      static_cast<std::uint32_t>(seed.master_seed),
      static_cast<std::uint32_t>(seed.master_seed >> 32),
      static_cast<std::uint32_t>(seed.stream_index),
      static_cast<std::uint32_t>(seed.stream_index >> 32),
      static_cast<std::uint32_t>(substream),
      static_cast<std::uint32_t>(substream >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Stream::Stream(SeedSpec seed, std::uint64_t substream)
    : engine_(seeded_engine(seed, substream)) {}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

SeedSpec derive_seed(SeedSpec seed, std::uint64_t tag) {
  std::uint64_t z = seed.master_seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return {z, seed.stream_index};
}

}  // namespace condmean
