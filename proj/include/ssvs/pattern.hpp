#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ssvs/error.hpp"

namespace ssvs {

/// One activation indicator per selectable node, in node order.
class ActivationPattern {
public:
    ActivationPattern() = default;
    explicit ActivationPattern(std::size_t p) : bits_(p, 0) {}
    explicit ActivationPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto& b : bits_) b = b ? 1 : 0;
    }

    /// Pattern whose bit i is the i-th character of `key` ('0' or '1').
    static ActivationPattern from_key(std::string_view key) {
        ActivationPattern out(key.size());
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (key[i] != '0' && key[i] != '1')
                throw Error("pattern key must contain only '0' and '1': '" + std::string(key) + "'");
            out.bits_[i] = key[i] == '1';
        }
        return out;
    }

    /// Pattern for `mask` in lexicographic enumeration order: node 0 is the
    /// most significant bit.
    static ActivationPattern from_mask(std::uint64_t mask, std::size_t p) {
        ActivationPattern out(p);
        for (std::size_t i = 0; i < p; ++i) out.bits_[i] = (mask >> (p - 1 - i)) & 1u;
        return out;
    }

    std::size_t size() const { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, bool on) { bits_[i] = on ? 1 : 0; }
    bool active(std::size_t i) const { return bits_.at(i) != 0; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : bits_) c += b;
        return c;
    }

    std::string key() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;
    friend auto operator<=>(const ActivationPattern& a, const ActivationPattern& b) {
        return a.bits_ <=> b.bits_;
    }

private:
    std::vector<std::uint8_t> bits_;
};

}  // namespace ssvs
