#pragma once

#include <cstdint>

namespace accsim {

enum class Purpose : std::uint64_t {
  kGroundTruth = 1,
  kPerception = 2,
  kJourneySampling = 3,
};

// Identifies one independent random stream. Grid indices, never the float
// grid values, key the stream.
struct StreamKey {
  Purpose purpose = Purpose::kGroundTruth;
  std::uint64_t journey = 0;
  std::uint64_t rate = 0;
  std::uint64_t tpr = 0;
  std::uint64_t tnr = 0;
  std::uint64_t trial = 0;
};

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 generator. The sequence is a pure function of the initial
// state, so it is identical on every platform.
class RngStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr RngStream(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  constexpr double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); n > 0. Uses the high 64 bits of a 128-bit
  // product, so the result is independent of the platform's RNG facilities.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Seed construction:
//   h0 = mix64(master_seed)
//   h1 = mix64(h0 ^ (purpose * gamma))
//   h_{k+1} = mix64(h_k ^ mix64(index_k + (k+1) * gamma))   for the five
//   indices (journey, rate, tpr, tnr, trial) in that order.
// The stream's initial state is h6.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed,
                                    const StreamKey& key) {
  constexpr std::uint64_t g = RngStream::kGamma;
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ (static_cast<std::uint64_t>(key.purpose) * g));
  const std::uint64_t indices[] = {key.journey, key.rate, key.tpr, key.tnr,
                                   key.trial};
  std::uint64_t k = 1;
  for (std::uint64_t index : indices) {
    h = mix64(h ^ mix64(index + k * g));
    ++k;
  }
  return h;
}

constexpr RngStream derive_stream(std::uint64_t master_seed,
                                  const StreamKey& key) {
  return RngStream(stream_seed(master_seed, key));
}

}  // namespace accsim
