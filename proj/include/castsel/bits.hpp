#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace castsel {

using Word = std::uint64_t;

constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + 63) / 64; }

/// Fixed-width bit vector packed into 64-bit words. Bits past `width` are
/// always zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t width) : width_(width), words_(words_for(width), 0) {}

    std::size_t width() const noexcept { return width_; }
    std::span<const Word> words() const noexcept { return words_; }
    std::span<Word> words() noexcept { return words_; }

    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
    void set(std::size_t i) { words_[i / 64] |= Word{1} << (i % 64); }
    void reset(std::size_t i) { words_[i / 64] &= ~(Word{1} << (i % 64)); }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    BitVector& operator|=(std::span<const Word> other) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other[i];
        return *this;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::size_t width_ = 0;
    std::vector<Word> words_;
};

/// popcount(a AND NOT b), word-wise.
inline std::size_t count_and_not(std::span<const Word> a, std::span<const Word> b) noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & ~b[i]));
    return n;
}

inline std::size_t count_ones(std::span<const Word> a) noexcept {
    std::size_t n = 0;
    for (Word w : a) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

} // namespace castsel
