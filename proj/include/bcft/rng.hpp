#pragma once

#include <cstdint>
#include <limits>

namespace bcft {

// SplitMix64 started at a hash of (seed, stream).  Streams with different
// indices are independent for all practical purposes, so work can be cut into
// numbered blocks and each block draws from its own stream.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

 private:
  std::uint64_t state_;
};

}  // namespace bcft
