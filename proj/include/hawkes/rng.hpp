#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "special_functions.hpp"

namespace hawkes {

namespace detail {

// Stafford "mix13" finalizer, as used by SplitMix64.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Counter-based random stream with cheap, reproducible splitting.
///
/// Output k of a stream is mix64(key + k * gamma); substream(label) derives
/// a child key by hashing (key, label), so any (seed, label...) path names
/// the same stream on every run regardless of evaluation order. That is
/// what makes particle proposals, replicates, and PMMH iterations
/// independent and bit-reproducible.
class RngStream {
  public:
    RngStream() : RngStream(0) {}

    explicit RngStream(std::uint64_t seed)
        : key_(detail::mix64(seed + detail::kGoldenGamma)), counter_(0) {}

    /// Key of the child stream labelled `label`; usable as a fresh seed.
    [[nodiscard]] std::uint64_t substream_key(std::uint64_t label) const noexcept {
        return detail::mix64(key_ ^ detail::mix64(label + detail::kGoldenGamma));
    }

    [[nodiscard]] RngStream substream(std::uint64_t label) const noexcept {
        return RngStream(FromKey{}, substream_key(label));
    }

    [[nodiscard]] RngStream substream(std::uint64_t a, std::uint64_t b) const noexcept {
        return substream(a).substream(b);
    }

    std::uint64_t next_u64() noexcept {
        counter_ += detail::kGoldenGamma;
        return detail::mix64(key_ + counter_);
    }

    /// Uniform draw in the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) noexcept {
        return -std::log(uniform()) / rate;
    }

    double normal() { return normal_quantile(uniform()); }

  private:
    struct FromKey {};
    RngStream(FromKey, std::uint64_t key) : key_(key), counter_(0) {}

    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Label for keying interval-level substreams by a time boundary.
[[nodiscard]] inline std::uint64_t time_label(double t) noexcept {
    return std::bit_cast<std::uint64_t>(t);
}

}  // namespace hawkes
