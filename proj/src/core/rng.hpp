#pragma once
#include <array>
#include <cstdint>

namespace stochham {

// Counter-based RNG: Philox4x32-10. A stream is identified by
// (master key, 64-bit stream id); draws are indexed by a 64-bit counter, so
// streams are splittable without coordination and every draw is addressable.
// Counter block layout: (draw_lo, draw_hi, stream_lo, stream_hi); key = the
// 64-bit master split into two 32-bit words.
std::array<uint32_t, 4> philox4x32_10(const std::array<uint32_t, 4>& ctr,
                                      const std::array<uint32_t, 2>& key);

// 64-bit avalanche mix (splitmix64 finalizer); used to derive purpose-salted
// master keys from the user seed.
uint64_t mix64(uint64_t x);

// Purpose salts: independent master keys per high-level task so e.g. the
// Birkhoff estimator never shares draws with the main ensemble.
enum class Purpose : uint64_t { main = 0, birkhoff = 1, bootstrap = 2 };
uint64_t master_key(uint64_t seed, Purpose p);

// Stream-id scheme: stream = replica * 256 + tag, tag = role * 16 + summand.
// Roles separate the action channel from the angle channel; summands separate
// the three random parts of a Levy path so toggling one (e.g. interlacing the
// large jumps) cannot shift the draws of another.
enum class Role : uint32_t { standalone = 0, action = 1, angle = 2 };
enum class Summand : uint32_t { generic = 0, diffusion = 1, small_jumps = 2, large_jumps = 3 };
uint64_t stream_id(uint32_t replica, Role role, Summand summand);

// Sequential view of one stream. normal() uses Box-Muller and caches the
// second variate, so the draw order (not the count of calls) defines
// reproducibility; all samplers consume draws in a documented fixed order.
class Stream {
  public:
    Stream(uint64_t master, uint64_t stream) : key_(master), stream_(stream) {}

    uint64_t next_u64();
    double uniform01(); // strictly inside (0, 1)
    double normal();    // standard normal
    // Exact Poisson sampling (Knuth product method; large means split
    // additively into chunks so the method stays exact for any mean).
    uint64_t poisson(double mean);

  private:
    uint64_t key_;
    uint64_t stream_;
    uint64_t draw_ = 0;
    uint64_t buffer_ = 0;
    bool have_buffer_ = false;
    double cached_normal_ = 0.0;
    bool have_normal_ = false;
};

} // namespace stochham
