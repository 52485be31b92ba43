#include "ising/spin_state.hpp"

#include <bit>
#include <stdexcept>

namespace ising {

SpinState::SpinState(std::size_t num_sites, Spin fill)
    : size_(num_sites), words_((num_sites + 63) / 64, 0)
{
    if (fill == Spin::plus) {
        for (auto& w : words_) {
            w = ~std::uint64_t{0};
        }
        if (size_ % 64 != 0) {
            words_.back() = (std::uint64_t{1} << (size_ % 64)) - 1;
        }
    }
}

SpinState SpinState::from_bits(std::size_t num_sites, std::uint64_t bits)
{
    if (num_sites > 64) {
        throw std::invalid_argument("from_bits supports at most 64 sites");
    }
    SpinState s(num_sites);
    if (num_sites < 64) {
        bits &= (std::uint64_t{1} << num_sites) - 1;
    }
    if (!s.words_.empty()) {
        s.words_[0] = bits;
    }
    return s;
}

std::size_t SpinState::count_plus() const
{
    std::size_t total = 0;
    for (auto w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

long SpinState::magnetization() const
{
    return 2 * static_cast<long>(count_plus()) - static_cast<long>(size_);
}

}  // namespace ising
