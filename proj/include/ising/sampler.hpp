#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/patterns.hpp"
#include "ising/spin_state.hpp"

namespace ising {

enum class InitState { all_minus, all_plus, uniform_random };

struct ChainConfig {
    std::size_t sweeps = 0;
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    std::size_t chains = 1;
    std::uint64_t seed = 0;
    InitState init = InitState::all_minus;

    /// burn_in = max(1000, 20 n); heuristic, no mixing-time guarantee.
    static std::size_t default_burn_in(int n);

    /// floor((sweeps - burn_in) / thin) samples per chain.
    std::size_t retained() const;
    /// Throws std::invalid_argument unless at least one sample is retained.
    void validate() const;
};

/// P(s(x) = + | rest) = 1 / (1 + exp(-2 (a + b h))), h the sum of neighbor spins.
double heat_bath_probability(int local_field, const Potentials& pot);

/// Sum of neighbor spins of x.
int local_field(const SpinState& state, const TorusLattice& lattice, Vertex x);

/// Per-chain seed: splitmix64 finalizer applied to seed + (chain + 1) * 0x9E3779B97F4A7C15.
std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain);

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Systematic-scan heat-bath dynamics on one torus.
class HeatBathChain {
public:
    HeatBathChain(const TorusLattice& lattice, const Potentials& pot, std::uint64_t seed,
                  InitState init = InitState::all_minus);

    /// One update of every vertex in index order.
    void sweep();
    const SpinState& state() const { return state_; }

private:
    const TorusLattice* lattice_;
    std::mt19937_64 rng_;
    SpinState state_;
    // p_plus_[(h + V) / 2] for h in -V, -V+2, ..., V.
    std::vector<double> p_plus_;
};

struct CountSample {
    std::uint32_t x = 0;
    std::uint32_t xbar = 0;

    friend bool operator==(const CountSample&, const CountSample&) = default;
};

/// samples[c] holds the retained (X, Xbar) pairs of chain c in sweep order.
struct ChainRun {
    std::vector<std::vector<CountSample>> samples;

    /// All chains concatenated by chain index.
    std::vector<CountSample> merged() const;
};

ChainRun run_chain(const TorusLattice& lattice, const Potentials& pot, const LocalPattern& pattern,
                   const ChainConfig& config, unsigned threads = 0);

}  // namespace ising
