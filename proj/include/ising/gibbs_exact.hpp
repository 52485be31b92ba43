#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/parallel.hpp"
#include "ising/patterns.hpp"
#include "ising/spin_state.hpp"

namespace ising {

/// a * sum_x s(x) + b * sum_{edges} s(x) s(y), each edge once.
double state_log_weight(const SpinState& state, const TorusLattice& lattice, const Potentials& pot);

/// Exhaustive Gibbs measure on a lattice with at most 24 vertices. States are
/// the integers 0 .. 2^N - 1 with bit i the sign of vertex i.
class GibbsEnumerator {
public:
    GibbsEnumerator(const TorusLattice& lattice, const Potentials& pot, unsigned threads = 0);

    const TorusLattice& lattice() const { return *lattice_; }
    const Potentials& potentials() const { return pot_; }
    std::size_t num_sites() const { return sites_; }
    std::uint64_t num_states() const { return std::uint64_t{1} << sites_; }
    unsigned threads() const { return threads_; }
    double log_partition() const { return log_z_; }

    double log_weight(std::uint64_t bits) const
    {
        const auto plus = std::popcount(bits);
        int disagree = 0;
        for (std::size_t i = 0; i < sites_; ++i) {
            const std::uint64_t flip = std::uint64_t{0} - ((bits >> i) & 1U);
            disagree += std::popcount((bits ^ flip) & up_[i]);
        }
        return pot_.a() * (2.0 * plus - static_cast<double>(sites_)) +
               pot_.b() * (static_cast<double>(edges_) - 2.0 * disagree);
    }

    double probability(std::uint64_t bits) const { return std::exp(log_weight(bits) - log_z_); }

    /// visit(acc, bits, probability) over every state; shard accumulators are
    /// merged with combine(into, from) in fixed shard order.
    template <class Acc, class Visit, class Combine>
    Acc reduce(const Acc& init, Visit visit, Combine combine) const
    {
        const std::size_t shards = shard_count();
        std::vector<Acc> partial(shards, init);
        run_shards(shards, threads_, [&](std::size_t s) {
            const auto [lo, hi] = shard_range(s);
            Acc& acc = partial[s];
            for (std::uint64_t bits = lo; bits < hi; ++bits) {
                visit(acc, bits, probability(bits));
            }
        });
        Acc out = std::move(partial[0]);
        for (std::size_t s = 1; s < shards; ++s) {
            combine(out, partial[s]);
        }
        return out;
    }

    std::size_t shard_count() const;
    std::pair<std::uint64_t, std::uint64_t> shard_range(std::size_t shard) const;

private:
    const TorusLattice* lattice_;
    Potentials pot_;
    unsigned threads_;
    std::size_t sites_;
    std::size_t edges_;
    // up_[i]: neighbors of i with a larger index.
    std::vector<std::uint64_t> up_;
    double log_z_ = 0.0;
};

/// Ball and positive-offset masks of one pattern at every center.
struct PlacementMasks {
    std::vector<std::uint64_t> ball;
    std::vector<std::uint64_t> positive;

    PlacementMasks(const LocalPattern& pattern, const TorusLattice& lattice);

    int count_exact(std::uint64_t bits) const
    {
        int c = 0;
        for (std::size_t x = 0; x < ball.size(); ++x) {
            c += (bits & ball[x]) == positive[x];
        }
        return c;
    }
    int count_upper(std::uint64_t bits) const
    {
        int c = 0;
        for (std::size_t x = 0; x < ball.size(); ++x) {
            c += (bits & positive[x]) == positive[x];
        }
        return c;
    }
};

enum class CountMode { exact, upper };

/// Exact law of a pattern count; pmf[m] = P(count = m).
struct ExactLaw {
    double log_z = 0.0;
    std::vector<double> pmf;
    double mean = 0.0;
    double variance = 0.0;
    /// E[X (X - 1)].
    double second_factorial_moment = 0.0;
};

ExactLaw exact_law(const TorusLattice& lattice, const Potentials& pot, const LocalPattern& pattern,
                   CountMode mode, unsigned threads = 0);

/// Both laws from one enumeration.
struct ExactLawPair {
    ExactLaw exact;
    ExactLaw upper;
};

ExactLawPair exact_laws(const GibbsEnumerator& gibbs, const LocalPattern& pattern);

/// P(upper indicator at x and at y), for every ordered pair of centers.
std::vector<std::vector<double>> upper_pair_probabilities(const GibbsEnumerator& gibbs,
                                                          const LocalPattern& pattern);

/// Joint law of the ball B(x, r) and its boundary under the full measure.
/// Ball bit i follows ball offset order, boundary bit j follows ball_boundary order.
class ConditionalTable {
public:
    ConditionalTable(const GibbsEnumerator& gibbs, Vertex x, int radius);

    std::size_t ball_size() const { return ball_.size(); }
    std::size_t boundary_size() const { return boundary_.size(); }
    const std::vector<Vertex>& ball_members() const { return ball_; }
    const std::vector<Vertex>& boundary() const { return boundary_; }

    double joint(std::uint64_t ball_bits, std::uint64_t boundary_bits) const;
    double boundary_marginal(std::uint64_t boundary_bits) const;
    /// P(ball configuration | boundary configuration).
    double conditional(std::uint64_t ball_bits, std::uint64_t boundary_bits) const;

private:
    std::vector<Vertex> ball_;
    std::vector<Vertex> boundary_;
    std::vector<double> joint_;
};

/// Boundary signs listed in ball_boundary order.
std::uint64_t boundary_bits(std::span<const Spin> boundary);

/// mu(I_x = 1 | boundary), by full enumeration when n^d <= 24 and from the
/// local energy of the ball otherwise.
double exact_conditional(const TorusLattice& lattice, const Potentials& pot, const LocalPattern& pattern,
                         Vertex x, std::span<const Spin> boundary, unsigned threads = 0);

/// exp(H^B(eta_x sigma)) / sum over eta' of exp(H^B(eta'_x sigma)).
double conditional_from_local_energy(const TorusLattice& lattice, const Potentials& pot,
                                     const LocalPattern& pattern, Vertex x, std::span<const Spin> boundary);

/// W(eta_x sigma) / sum over eta' of W(eta'_x sigma), weights on the closure.
double weight_ratio_conditional(const LocalPattern& pattern, std::span<const Spin> boundary,
                                const Potentials& pot, const TorusLattice& lattice, Vertex x = 0);

/// Local energy of zeta on V; zeta must be defined on V and its vertex boundary.
double local_energy(std::span<const Vertex> set, const Assignment& zeta, const Potentials& pot,
                    const TorusLattice& lattice);

using StateFunction = std::function<double(std::uint64_t bits)>;

/// Throws unless f(s) <= f(s') whenever s <= s' sitewise.
void require_increasing(const StateFunction& f, std::size_t sites);

/// E[fg] - E[f] E[g] under the exact measure, n^d <= 20.
double fkg_covariance(const TorusLattice& lattice, const Potentials& pot, const StateFunction& f,
                      const StateFunction& g, unsigned threads = 0, bool validate = true);

}  // namespace ising
