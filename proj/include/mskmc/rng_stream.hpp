#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mskmc {

/// Random stream identified by (seed, stream_id).
///
/// Each pair seeds its own 64-bit Mersenne twister through std::seed_seq, whose
/// output is fixed by the standard, so a stream is bit-reproducible across
/// platforms and standard libraries. Distinct stream ids give unrelated
/// generator states, one per Monte Carlo replica.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x6d736b6du};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw on the open interval (0, 1); never returns 0 or 1.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential variate of parameter `rate` by inversion, -ln(U)/rate.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace mskmc
