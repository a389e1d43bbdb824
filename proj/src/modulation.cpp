#include "rislink/modulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "rislink/error.hpp"

namespace rislink {

std::uint32_t gray_encode(std::uint32_t n) { return n ^ (n >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t n = g;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) {
        n ^= n >> shift;
    }
    return n;
}

void ModulationScheme::validate() const {
    if (order < 2 || order > (1 << 16) || !std::has_single_bit(static_cast<unsigned>(order))) {
        throw DomainError("modulation order must be a power of two in 2..65536, got " + std::to_string(order));
    }
    if (family == ModulationFamily::QAM && (bits_per_symbol() % 2 != 0)) {
        throw DomainError("QAM order must be a square (4, 16, 64, ...), got " + std::to_string(order));
    }
}

int ModulationScheme::bits_per_symbol() const { return std::countr_zero(static_cast<unsigned>(order)); }

std::string ModulationScheme::name() const {
    if (family == ModulationFamily::PSK && order == 2) {
        return "bpsk";
    }
    return std::to_string(order) + (family == ModulationFamily::PSK ? "psk" : "qam");
}

Constellation::Constellation(const ModulationScheme& scheme) : scheme_(scheme) {
    scheme.validate();
    bits_ = scheme.bits_per_symbol();
    const auto m = static_cast<std::uint32_t>(scheme.order);
    points_.resize(m);
    if (scheme.family == ModulationFamily::PSK) {
        psk_label_.resize(m);
        for (std::uint32_t i = 0; i < m; ++i) {
            const double angle = 2.0 * std::numbers::pi * i / m;
            psk_label_[i] = gray_encode(i);
            // exact values on the axes keep BPSK at exactly +-1
            double re = std::cos(angle);
            double im = std::sin(angle);
            if (4 * i % m == 0) {
                const std::uint32_t quarter = 4 * i / m;
                re = quarter == 0 ? 1.0 : quarter == 2 ? -1.0 : 0.0;
                im = quarter == 1 ? 1.0 : quarter == 3 ? -1.0 : 0.0;
            }
            points_[psk_label_[i]] = {re, im};
        }
        return;
    }
    const std::uint32_t levels = 1u << (bits_ / 2);
    qam_scale_ = 1.0 / std::sqrt(2.0 * (static_cast<double>(m) - 1.0) / 3.0);
    pam_label_.resize(levels);
    pam_level_.resize(levels);
    for (std::uint32_t l = 0; l < levels; ++l) {
        pam_label_[l] = gray_encode(l);
        pam_level_[pam_label_[l]] = l;
    }
    const int half = bits_ / 2;
    for (std::uint32_t label = 0; label < m; ++label) {
        const std::uint32_t li = pam_level_[label >> half];
        const std::uint32_t lq = pam_level_[label & (levels - 1)];
        const double re = 2.0 * li - (levels - 1.0);
        const double im = 2.0 * lq - (levels - 1.0);
        points_[label] = {re * qam_scale_, im * qam_scale_};
    }
}

std::uint32_t Constellation::detect(std::complex<double> z) const {
    const auto m = static_cast<std::uint32_t>(points_.size());
    if (scheme_.family == ModulationFamily::PSK) {
        if (m == 2) {
            return z.real() >= 0.0 ? psk_label_[0] : psk_label_[1];
        }
        const double sector = std::arg(z) * m / (2.0 * std::numbers::pi);
        const auto i = static_cast<std::int64_t>(std::llround(sector));
        const auto pos = static_cast<std::uint32_t>(((i % m) + m) % m);
        return psk_label_[pos];
    }
    const auto levels = static_cast<std::int64_t>(pam_label_.size());
    auto slice = [&](double x) {
        const auto l = std::llround((x / qam_scale_ + static_cast<double>(levels - 1)) / 2.0);
        return pam_label_[static_cast<std::size_t>(std::clamp<std::int64_t>(l, 0, levels - 1))];
    };
    return (slice(z.real()) << (bits_ / 2)) | slice(z.imag());
}

std::vector<std::complex<double>> modulate(const ModulationScheme& scheme, std::span<const std::uint8_t> bits) {
    const Constellation c(scheme);
    const auto k = static_cast<std::size_t>(c.bits_per_symbol());
    if (bits.size() % k != 0) {
        throw DomainError("modulate: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                          std::to_string(k) + " bits per symbol");
    }
    std::vector<std::complex<double>> out;
    out.reserve(bits.size() / k);
    for (std::size_t s = 0; s < bits.size(); s += k) {
        std::uint32_t label = 0;
        for (std::size_t b = 0; b < k; ++b) {
            detail::require(bits[s + b] <= 1, "modulate: bits must be 0 or 1");
            label = (label << 1) | bits[s + b];
        }
        out.push_back(c.point(label));
    }
    return out;
}

std::vector<std::uint8_t> demodulate(const ModulationScheme& scheme,
                                     std::span<const std::complex<double>> received) {
    const Constellation c(scheme);
    const int k = c.bits_per_symbol();
    std::vector<std::uint8_t> out;
    out.reserve(received.size() * static_cast<std::size_t>(k));
    for (const auto& z : received) {
        const std::uint32_t label = c.detect(z);
        for (int b = k - 1; b >= 0; --b) {
            out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
        }
    }
    return out;
}

} // namespace rislink
