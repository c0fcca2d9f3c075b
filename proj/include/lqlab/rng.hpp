#ifndef LQLAB_RNG_HPP
#define LQLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lqlab {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix_bits(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Counter-based substream derivation: derive(seed, k) gives statistically
// independent streams for distinct k, independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix_bits(mix_bits(seed + 0x9E3779B97F4A7C15ull) ^
                    (stream + 0xD1B54A32D192ED03ull));
}

// Fixed stream tags so every consumer of a root seed draws from a
// disjoint substream.
namespace streams {
inline constexpr std::uint64_t kTrial = 0x7452;
inline constexpr std::uint64_t kBatch = 0xBA7C;
inline constexpr std::uint64_t kPopulation = 0x909;
inline constexpr std::uint64_t kNet = 0x4E7;
inline constexpr std::uint64_t kWidth = 0x31D7;
inline constexpr std::uint64_t kDesign = 0xDE51;
inline constexpr std::uint64_t kFixedPoint = 0xF1C5;
inline constexpr std::uint64_t kAudit = 0xA0D1;
}  // namespace streams

// Deterministic generator (splitmix64 stream). All randomness in the
// library flows through this type so that results are reproducible
// bit-for-bit from a root seed on any platform.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix_bits(state_);
    }

    // uniform on [0, 1), 53-bit resolution
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1]; safe as a log argument
    double next_unit_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (one value per uniform pair; no cache,
    // so the stream position is a pure function of the draw count)
    double next_gaussian() {
        const double u1 = next_unit_pos();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace lqlab

#endif  // LQLAB_RNG_HPP
