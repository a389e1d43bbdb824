#include "rislink/random.hpp"

namespace rislink {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

SeededStream SeededStream::child(std::uint64_t k) const {
    return SeededStream{seed, splitmix64(stream_index ^ splitmix64(k + 0x632BE59BD9B4E019ULL))};
}

Philox4x32::Philox4x32(const SeededStream& stream)
    : key_{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32)},
      stream_index_(stream.stream_index) {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

void Philox4x32::refill() {
    // kBlocks independent counters per refill, laid out lane-major so the
    // round loop vectorizes; output order is still block by block
    std::array<std::uint32_t, kBlocks> c0, c1, c2, c3;
    for (std::size_t b = 0; b < kBlocks; ++b) {
        const std::uint64_t n = block_ + b;
        c0[b] = static_cast<std::uint32_t>(n);
        c1[b] = static_cast<std::uint32_t>(n >> 32);
        c2[b] = static_cast<std::uint32_t>(stream_index_);
        c3[b] = static_cast<std::uint32_t>(stream_index_ >> 32);
    }
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
        for (std::size_t b = 0; b < kBlocks; ++b) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0[b];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2[b];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            c0[b] = hi1 ^ c1[b] ^ k0;
            c1[b] = lo1;
            c2[b] = hi0 ^ c3[b] ^ k1;
            c3[b] = lo0;
        }
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    for (std::size_t b = 0; b < kBlocks; ++b) {
        buffer_[4 * b] = c0[b];
        buffer_[4 * b + 1] = c1[b];
        buffer_[4 * b + 2] = c2[b];
        buffer_[4 * b + 3] = c3[b];
    }
    block_ += kBlocks;
    index_ = 0;
}

} // namespace rislink
