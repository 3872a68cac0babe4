#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gcml {

/// Philox 4x64 counter-based block cipher, 10 rounds. Streams are cheap to
/// derive and independent draws need no sequential state, which is what makes
/// replicate-level parallelism deterministic: worker b always sees the stream
/// keyed by (seed, label, b) regardless of scheduling.
class Philox4x64 {
public:
    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    Philox4x64(Key key, Block counter) : key_(key), counter_(counter) {}

    static Block block(Block counter, Key key);

    std::uint64_t next_u64();

private:
    Key key_;
    Block counter_;
    Block buffer_{};
    int buffer_pos_ = 4;
};

/// Hash (master seed, label, indices) into a 64-bit sub-seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t i = 0, std::uint64_t j = 0);

/// One independent random stream. All distributions are implemented on top of
/// the raw 64-bit output so results are identical across platforms.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);
    RngStream(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

    std::uint64_t next_u64() { return eng_.next_u64(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    /// Standard normal via Box-Muller (second value cached).
    double normal();

    /// Uniform integer on [0, bound), bias-free. bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform01() < p; }

private:
    Philox4x64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace gcml
