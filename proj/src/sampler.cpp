#include "ising/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ising/parallel.hpp"

namespace ising {

std::size_t ChainConfig::default_burn_in(int n)
{
    return std::max<std::size_t>(1000, 20 * static_cast<std::size_t>(std::max(n, 0)));
}

std::size_t ChainConfig::retained() const
{
    if (thin == 0 || sweeps <= burn_in) {
        return 0;
    }
    return (sweeps - burn_in) / thin;
}

void ChainConfig::validate() const
{
    if (thin == 0) {
        throw std::invalid_argument("thin must be >= 1");
    }
    if (chains == 0) {
        throw std::invalid_argument("chains must be >= 1");
    }
    if (retained() == 0) {
        throw std::invalid_argument("chain configuration retains no samples (sweeps=" +
                                    std::to_string(sweeps) + ", burn_in=" + std::to_string(burn_in) +
                                    ", thin=" + std::to_string(thin) + ")");
    }
}

double heat_bath_probability(int local_field, const Potentials& pot)
{
    const double e = -2.0 * (pot.a() + pot.b() * local_field);
    if (e > 700.0) {
        return 0.0;
    }
    return 1.0 / (1.0 + std::exp(e));
}

int local_field(const SpinState& state, const TorusLattice& lattice, Vertex x)
{
    int h = 0;
    for (Vertex y : lattice.neighbors(x)) {
        h += state.is_plus(y) ? 1 : -1;
    }
    return h;
}

std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain)
{
    std::uint64_t z = seed + (chain + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

HeatBathChain::HeatBathChain(const TorusLattice& lattice, const Potentials& pot, std::uint64_t seed,
                             InitState init)
    : lattice_(&lattice), rng_(seed), state_(lattice.num_vertices(), Spin::minus)
{
    const int v = lattice.degree();
    for (int h = -v; h <= v; h += 2) {
        p_plus_.push_back(heat_bath_probability(h, pot));
    }
    switch (init) {
    case InitState::all_minus:
        break;
    case InitState::all_plus:
        state_ = SpinState(lattice.num_vertices(), Spin::plus);
        break;
    case InitState::uniform_random:
        for (Vertex x = 0; x < lattice.num_vertices(); ++x) {
            state_.set(x, uniform01(rng_) < 0.5 ? Spin::plus : Spin::minus);
        }
        break;
    }
}

void HeatBathChain::sweep()
{
    const auto sites = static_cast<Vertex>(lattice_->num_vertices());
    for (Vertex x = 0; x < sites; ++x) {
        int plus = 0;
        for (Vertex y : lattice_->neighbors(x)) {
            plus += state_.is_plus(y);
        }
        // h = 2 plus - V, so (h + V) / 2 = plus.
        const double p = p_plus_[static_cast<std::size_t>(plus)];
        state_.set(x, uniform01(rng_) < p ? Spin::plus : Spin::minus);
    }
}

std::vector<CountSample> ChainRun::merged() const
{
    std::vector<CountSample> out;
    for (const auto& c : samples) {
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

ChainRun run_chain(const TorusLattice& lattice, const Potentials& pot, const LocalPattern& pattern,
                   const ChainConfig& config, unsigned threads)
{
    config.validate();
    const PatternScanner scanner(pattern, lattice);
    ChainRun run;
    run.samples.resize(config.chains);
    run_shards(config.chains, threads, [&](std::size_t c) {
        HeatBathChain chain(lattice, pot, chain_seed(config.seed, c), config.init);
        auto& out = run.samples[c];
        out.reserve(config.retained());
        for (std::size_t s = 1; s <= config.sweeps; ++s) {
            chain.sweep();
            if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) {
                out.push_back({static_cast<std::uint32_t>(scanner.count_exact(chain.state())),
                               static_cast<std::uint32_t>(scanner.count_upper(chain.state()))});
            }
        }
    });
    return run;
}

}  // namespace ising
