#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rislink {

enum class ModulationFamily { PSK, QAM };

struct ModulationScheme {
    ModulationFamily family = ModulationFamily::PSK;
    int order = 2;

    /// Order must be a power of two; QAM additionally needs a square grid.
    void validate() const;
    [[nodiscard]] int bits_per_symbol() const;
    [[nodiscard]] std::string name() const;

    static ModulationScheme bpsk() { return {ModulationFamily::PSK, 2}; }
};

/// Gray-labelled unit-energy constellation with a fast minimum-distance slicer.
class Constellation {
public:
    explicit Constellation(const ModulationScheme& scheme);

    [[nodiscard]] const ModulationScheme& scheme() const { return scheme_; }
    [[nodiscard]] int bits_per_symbol() const { return bits_; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }

    /// Point with Gray label `label` (bit 0 is the last transmitted bit).
    [[nodiscard]] std::complex<double> point(std::uint32_t label) const { return points_[label]; }
    [[nodiscard]] std::span<const std::complex<double>> points() const { return points_; }

    /// Label of the constellation point nearest to z.
    [[nodiscard]] std::uint32_t detect(std::complex<double> z) const;

private:
    ModulationScheme scheme_;
    int bits_ = 1;
    std::vector<std::complex<double>> points_; ///< indexed by label
    std::vector<std::uint32_t> psk_label_;      ///< PSK: position -> label
    std::vector<std::uint32_t> pam_label_;      ///< QAM: per-axis level -> label bits
    std::vector<std::uint32_t> pam_level_;      ///< QAM: label bits -> level
    double qam_scale_ = 1.0;
};

/// Bits are 0/1 bytes, most significant bit of each symbol first.
std::vector<std::complex<double>> modulate(const ModulationScheme& scheme, std::span<const std::uint8_t> bits);

std::vector<std::uint8_t> demodulate(const ModulationScheme& scheme,
                                     std::span<const std::complex<double>> received);

std::uint32_t gray_encode(std::uint32_t n);
std::uint32_t gray_decode(std::uint32_t g);

} // namespace rislink
