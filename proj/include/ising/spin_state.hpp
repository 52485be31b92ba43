#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ising/lattice.hpp"

namespace ising {

enum class Spin : std::int8_t { minus = -1, plus = 1 };

inline int value(Spin s) { return static_cast<int>(s); }

/// A full configuration in {-,+}^{V_n}, bit-packed: bit i set means vertex i is +.
class SpinState {
public:
    explicit SpinState(std::size_t num_sites, Spin fill = Spin::minus);

    /// Low 64 sites from a packed word (bit i = vertex i); requires num_sites <= 64.
    static SpinState from_bits(std::size_t num_sites, std::uint64_t bits);

    std::size_t size() const { return size_; }

    bool is_plus(Vertex x) const { return (words_[x >> 6] >> (x & 63)) & 1U; }
    Spin operator[](Vertex x) const { return is_plus(x) ? Spin::plus : Spin::minus; }

    void set(Vertex x, Spin s)
    {
        const std::uint64_t bit = std::uint64_t{1} << (x & 63);
        if (s == Spin::plus) {
            words_[x >> 6] |= bit;
        } else {
            words_[x >> 6] &= ~bit;
        }
    }
    void flip(Vertex x) { words_[x >> 6] ^= std::uint64_t{1} << (x & 63); }

    std::size_t count_plus() const;
    /// Sum of spins.
    long magnetization() const;

    /// First 64 sites packed; the exact enumerator's state encoding.
    std::uint64_t low_bits() const { return words_.empty() ? 0 : words_[0]; }
    const std::vector<std::uint64_t>& words() const { return words_; }

    friend bool operator==(const SpinState&, const SpinState&) = default;

private:
    std::size_t size_;
    std::vector<std::uint64_t> words_;
};

}  // namespace ising
