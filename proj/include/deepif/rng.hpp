#pragma once

#include <cstdint>
#include <string_view>

namespace deepif {

/// Counter-based pseudo-random stream (splitmix64 core).
///
/// A stream is identified by a (seed, stream_id) pair. Identical pairs yield
/// identical value sequences on every platform: the generator uses only
/// 64-bit integer arithmetic plus an explicit bit-to-double conversion, so
/// it does not depend on implementation-defined standard-library
/// distributions.
///
/// Independent substreams are derived from the *identity* of a stream, never
/// from its consumed state, via derive(tag, index). This is what makes
/// parallel construction (one substream per tree / ensemble member / anomaly)
/// bitwise-equal to sequential construction.
///
/// Instances are single-owner: parallel callers must derive children, never
/// share one stream.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Next raw 64-bit value.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal deviate (Box-Muller, two raw draws per value).
    double normal();

    /// Uniform integer in [0, bound), bound >= 1. Unbiased via rejection.
    std::uint64_t below(std::uint64_t bound);

    /// Derive an independent child stream from this stream's identity and a
    /// (tag, index) pair. Deterministic; does not consume from this stream.
    RngStream derive(std::string_view tag, std::uint64_t index = 0) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
};

/// FNV-1a 64-bit hash, used to turn component tags into stream ids.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace deepif
