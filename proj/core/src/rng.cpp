#include "gcml/rng.hpp"

#include "gcml/errors.hpp"

#include <cmath>

namespace gcml {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
}

inline std::uint64_t splitmix_mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace

Philox4x64::Block Philox4x64::block(Block c, Key k) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

std::uint64_t Philox4x64::next_u64() {
    if (buffer_pos_ == 4) {
        buffer_ = block(counter_, key_);
        buffer_pos_ = 0;
        for (int i = 0; i < 4; ++i) {
            if (++counter_[i] != 0) break;
        }
    }
    return buffer_[buffer_pos_++];
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t i, std::uint64_t j) {
    std::uint64_t lh = 0xCBF29CE484222325ULL; // FNV-1a over the label bytes
    for (const char ch : label) {
        lh = (lh ^ static_cast<unsigned char>(ch)) * 0x100000001B3ULL;
    }
    std::uint64_t h = splitmix_mix(master ^ (lh * 0x9E3779B97F4A7C15ULL + 1));
    h = splitmix_mix(h ^ (i + 0x9E3779B97F4A7C15ULL));
    h = splitmix_mix(h ^ (j + 0xBB67AE8584CAA73BULL));
    return h;
}

RngStream::RngStream(std::uint64_t seed)
    : eng_({splitmix_mix(seed ^ 0x9E3779B97F4A7C15ULL), splitmix_mix(seed + 0x6A09E667F3BCC909ULL)},
           {0, 0, 0, 0}) {}

RngStream::RngStream(std::uint64_t master, std::string_view label, std::uint64_t index)
    : RngStream(derive_seed(master, label, index)) {}

double RngStream::uniform01() {
    return static_cast<double>(eng_.next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((eng_.next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw DataError("uniform_below: bound must be positive");
    // Lemire's multiply-shift with rejection of the biased low range.
    std::uint64_t x = eng_.next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            x = eng_.next_u64();
            m = static_cast<unsigned __int128>(x) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace gcml
