#pragma once

#include <cstdint>
#include <random>

namespace condmean {

/// Identifies one reproducible random stream.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// A seeded 64-bit Mersenne Twister keyed by (master_seed, stream_index,
/// substream). The key's six 32-bit words feed std::seed_seq, whose mixing
/// is fixed by the standard, so a key reproduces the same sequence on every
/// conforming implementation. Distinct keys give distinct seed sequences.
///
/// The uniform and normal transforms are implemented here rather than taken
/// from <random> because the standard distribution classes are
/// implementation-defined.
class Stream {
 public:
  explicit Stream(SeedSpec seed, std::uint64_t substream = 0);

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// A seed for an independent sub-experiment: the master seed is remixed
/// with `tag` (SplitMix64 finalizer), the stream index is kept.
SeedSpec derive_seed(SeedSpec seed, std::uint64_t tag);

}  // namespace condmean
