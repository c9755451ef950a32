#pragma once

#include <array>
#include <cstdint>

namespace ergocap {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator for one substream.
///
/// The stream is fully determined by (seed, stream id): the i-th 128-bit
/// block is philox(counter = {stream lo, stream hi, i lo, i hi}, key = seed).
/// Sample k of a Monte Carlo run uses stream k, so any partition of the
/// sample range across threads sees identical numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform in the open interval (0, 1) with 53 random bits.
    double uniform();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace ergocap
