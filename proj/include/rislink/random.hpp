#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace rislink {

/// Identifies an independent random sequence: the same (seed, stream_index)
/// always yields the same samples, whichever thread consumes them.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;

    /// Deterministically derived sub-stream, e.g. one per Monte Carlo chunk.
    [[nodiscard]] SeededStream child(std::uint64_t k) const;

    friend bool operator==(const SeededStream&, const SeededStream&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The key is the
/// stream seed and the upper half of the counter is the stream index, so
/// streams never overlap and need no jump-ahead.
class Philox4x32 {
public:
    /// Two consecutive 32-bit words per output, low word first.
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(const SeededStream& stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (index_ == kBuffered) {
            refill();
        }
        const result_type lo = buffer_[index_];
        const result_type hi = buffer_[index_ + 1];
        index_ += 2;
        return lo | (hi << 32);
    }

    /// Raw bijection, exposed for known-answer tests.
    static Block encrypt(Block counter, Key key);

private:
    static constexpr std::size_t kBlocks = 4;
    static constexpr std::size_t kBuffered = 4 * kBlocks;

    void refill();

    Key key_{};
    std::uint64_t block_ = 0;
    std::uint64_t stream_index_ = 0;
    std::array<std::uint32_t, kBuffered> buffer_{};
    std::size_t index_ = kBuffered;
};

/// Engine plus the two distributions every sampler here needs.
class RandomSource {
public:
    explicit RandomSource(const SeededStream& stream) : engine_(stream) {}

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }
    std::uint64_t bits() { return engine_(); }

    Philox4x32& engine() { return engine_; }

private:
    Philox4x32 engine_;
    boost::random::normal_distribution<double> normal_;
    boost::random::uniform_01<double> uniform_;
};

} // namespace rislink
