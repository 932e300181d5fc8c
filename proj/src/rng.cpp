#include "bcft/rng.hpp"

namespace bcft {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(mix(seed) + kGolden * (stream + 1))) {}

StreamRng::result_type StreamRng::operator()() {
  state_ += kGolden;
  return mix(state_);
}

}  // namespace bcft
