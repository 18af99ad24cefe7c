#include "core/rng.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace stochham {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline std::array<uint32_t, 4> round_once(const std::array<uint32_t, 4>& x,
                                          const std::array<uint32_t, 2>& k) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

} // namespace

std::array<uint32_t, 4> philox4x32_10(const std::array<uint32_t, 4>& ctr,
                                      const std::array<uint32_t, 2>& key) {
    std::array<uint32_t, 4> x = ctr;
    std::array<uint32_t, 2> k = key;
    for (int r = 0; r < 9; ++r) {
        x = round_once(x, k);
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return round_once(x, k);
}

uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t master_key(uint64_t seed, Purpose p) {
    return mix64(mix64(seed) ^ mix64(static_cast<uint64_t>(p) + 0xA5A5A5A5A5A5A5A5ull));
}

uint64_t stream_id(uint32_t replica, Role role, Summand summand) {
    uint64_t tag = static_cast<uint64_t>(role) * 16 + static_cast<uint64_t>(summand);
    return static_cast<uint64_t>(replica) * 256 + tag;
}

uint64_t Stream::next_u64() {
    if (have_buffer_) {
        have_buffer_ = false;
        return buffer_;
    }
    std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(draw_),
        static_cast<uint32_t>(draw_ >> 32),
        static_cast<uint32_t>(stream_),
        static_cast<uint32_t>(stream_ >> 32),
    };
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(key_), static_cast<uint32_t>(key_ >> 32)};
    auto block = philox4x32_10(ctr, key);
    ++draw_;
    buffer_ = (static_cast<uint64_t>(block[2]) << 32) | block[3];
    have_buffer_ = true;
    return (static_cast<uint64_t>(block[0]) << 32) | block[1];
}

double Stream::uniform01() {
    uint64_t x = next_u64();
    // 53-bit mantissa plus a half-ulp offset keeps the value strictly in (0,1),
    // so log() below is always finite.
    return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double Stream::normal() {
    if (have_normal_) {
        have_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(a);
    have_normal_ = true;
    return r * std::cos(a);
}

uint64_t Stream::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw SpecError("poisson mean must be finite and nonnegative");
    uint64_t total = 0;
    // Split large means into chunks; a Poisson(a+b) variable is the sum of
    // independent Poisson(a) and Poisson(b), so the law stays exact.
    while (mean > 0.0) {
        double chunk = mean > 30.0 ? 30.0 : mean;
        mean -= chunk;
        double limit = std::exp(-chunk);
        double prod = uniform01();
        while (prod > limit) {
            ++total;
            prod *= uniform01();
        }
    }
    return total;
}

} // namespace stochham
