// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_RNG_HPP
#define DYX_RNG_HPP

#include <array>
#include <cstdint>

namespace dyx {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Output is a pure function of (key, counter), so any draw can be produced
// at any time on any thread and two runs with the same seed are bit
// identical. Streams are addressed as (seed, stream): the 64-bit seed is
// the key, the 64-bit stream id occupies the high counter words, and the
// low counter words enumerate 128-bit blocks within the stream.
class Philox {
  public:
    using block = std::array<std::uint32_t, 4>;

    Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    // Raw keyed block function; the basis of everything else.
    static block apply(const block& ctr, const std::array<std::uint32_t, 2>& key) noexcept {
        block x = ctr;
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * x[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * x[2];
            x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
                 static_cast<std::uint32_t>(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return x;
    }

    // 128-bit block with index `n` of this stream.
    block block_at(std::uint64_t n) const noexcept {
        return apply({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                      stream_[0], stream_[1]},
                     key_);
    }

    // Random-access 64-bit words: two per block.
    std::uint64_t uint64_at(std::uint64_t n) const noexcept {
        const block b = block_at(n >> 1);
        const int half = static_cast<int>(n & 1) * 2;
        return (std::uint64_t{b[half + 1]} << 32) | b[half];
    }

    // Uniform double on the open interval (0, 1), 53-bit resolution.
    double uniform_at(std::uint64_t n) const noexcept {
        return (static_cast<double>(uint64_at(n) >> 11) + 0.5) * 0x1p-53;
    }

    // Sequential convenience interface.
    std::uint64_t next_uint64() { return uint64_at(pos_++); }
    double next_uniform() { return uniform_at(pos_++); }

    void skip(std::uint64_t n) noexcept { pos_ += n; }
    std::uint64_t position() const noexcept { return pos_; }

  private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t pos_ = 0;
};

// Splits one user seed into decorrelated sub-seeds (e.g. per replicate).
// Philox keyed by the seed acts as the mixing function.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return Philox(seed, 0xD1CE5EEDu).uint64_at(index);
}

} // namespace dyx

#endif
