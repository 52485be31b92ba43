#include "ising/gibbs_exact.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ising/errors.hpp"

namespace ising {

namespace {

constexpr std::size_t kShards = 64;
constexpr std::size_t kMaxFkgSites = 20;

struct LogSumExp {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double v)
    {
        if (v <= max) {
            sum += std::exp(v - max);
        } else {
            sum = sum * std::exp(max - v) + 1.0;
            max = v;
        }
    }
    void merge(const LogSumExp& other)
    {
        if (other.sum == 0.0) {
            return;
        }
        if (sum == 0.0) {
            *this = other;
            return;
        }
        if (other.max <= max) {
            sum += other.sum * std::exp(other.max - max);
        } else {
            sum = sum * std::exp(max - other.max) + other.sum;
            max = other.max;
        }
    }
    double value() const { return max + std::log(sum); }
};

ExactLaw finish_law(double log_z, std::vector<double> pmf)
{
    while (pmf.size() > 1 && pmf.back() == 0.0) {
        pmf.pop_back();
    }
    ExactLaw law;
    law.log_z = log_z;
    double m1 = 0.0;
    double m2 = 0.0;
    double fact2 = 0.0;
    for (std::size_t m = 0; m < pmf.size(); ++m) {
        const double dm = static_cast<double>(m);
        m1 += dm * pmf[m];
        m2 += dm * dm * pmf[m];
        fact2 += dm * (dm - 1.0) * pmf[m];
    }
    law.pmf = std::move(pmf);
    law.mean = m1;
    law.variance = m2 - m1 * m1;
    law.second_factorial_moment = fact2;
    return law;
}

void add_into(std::vector<double>& into, const std::vector<double>& from)
{
    for (std::size_t i = 0; i < into.size(); ++i) {
        into[i] += from[i];
    }
}

void check_boundary(std::span<const Spin> boundary, std::size_t expected)
{
    if (boundary.size() != expected) {
        throw std::invalid_argument("boundary assignment has " + std::to_string(boundary.size()) +
                                    " signs, ball boundary has " + std::to_string(expected) + " vertices");
    }
}

}  // namespace

double state_log_weight(const SpinState& state, const TorusLattice& lattice, const Potentials& pot)
{
    if (state.size() != lattice.num_vertices()) {
        throw std::invalid_argument("spin state size does not match the lattice");
    }
    long field = state.magnetization();
    long pair = 0;
    for (Vertex x = 0; x < lattice.num_vertices(); ++x) {
        const int sx = value(state[x]);
        for (Vertex y : lattice.neighbors(x)) {
            if (x < y) {
                pair += sx * value(state[y]);
            }
        }
    }
    return pot.a() * static_cast<double>(field) + pot.b() * static_cast<double>(pair);
}

// ---------------------------------------------------------------------------

GibbsEnumerator::GibbsEnumerator(const TorusLattice& lattice, const Potentials& pot, unsigned threads)
    : lattice_(&lattice), pot_(pot), threads_(resolve_threads(threads)), sites_(lattice.num_vertices()),
      edges_(lattice.num_edges())
{
    require_enumerable(sites_, "exact Gibbs enumeration");
    up_.assign(sites_, 0);
    for (Vertex x = 0; x < sites_; ++x) {
        for (Vertex y : lattice.neighbors(x)) {
            if (y > x) {
                up_[x] |= std::uint64_t{1} << y;
            }
        }
    }

    std::vector<LogSumExp> partial(shard_count());
    run_shards(partial.size(), threads_, [&](std::size_t s) {
        const auto [lo, hi] = shard_range(s);
        for (std::uint64_t bits = lo; bits < hi; ++bits) {
            partial[s].add(log_weight(bits));
        }
    });
    LogSumExp total = partial[0];
    for (std::size_t s = 1; s < partial.size(); ++s) {
        total.merge(partial[s]);
    }
    log_z_ = total.value();
}

std::size_t GibbsEnumerator::shard_count() const
{
    return static_cast<std::size_t>(std::min<std::uint64_t>(num_states(), kShards));
}

std::pair<std::uint64_t, std::uint64_t> GibbsEnumerator::shard_range(std::size_t shard) const
{
    const std::uint64_t states = num_states();
    const std::uint64_t shards = shard_count();
    return {states * shard / shards, states * (shard + 1) / shards};
}

PlacementMasks::PlacementMasks(const LocalPattern& pattern, const TorusLattice& lattice)
{
    require_enumerable(lattice.num_vertices(), "placement masks");
    ball.resize(lattice.num_vertices());
    positive.resize(lattice.num_vertices());
    for (Vertex x = 0; x < lattice.num_vertices(); ++x) {
        auto members = pattern.ball_vertices(lattice, x);
        for (std::size_t i = 0; i < members.size(); ++i) {
            ball[x] |= std::uint64_t{1} << members[i];
            if (pattern.mask()[i]) {
                positive[x] |= std::uint64_t{1} << members[i];
            }
        }
    }
}

// ---------------------------------------------------------------------------

ExactLawPair exact_laws(const GibbsEnumerator& gibbs, const LocalPattern& pattern)
{
    const PlacementMasks masks(pattern, gibbs.lattice());
    const std::size_t bins = gibbs.num_sites() + 1;
    struct Acc {
        std::vector<double> x;
        std::vector<double> xbar;
    };
    Acc init{std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0)};
    Acc acc = gibbs.reduce(
        init,
        [&](Acc& a, std::uint64_t bits, double p) {
            a.x[masks.count_exact(bits)] += p;
            a.xbar[masks.count_upper(bits)] += p;
        },
        [](Acc& into, const Acc& from) {
            add_into(into.x, from.x);
            add_into(into.xbar, from.xbar);
        });
    return {finish_law(gibbs.log_partition(), std::move(acc.x)),
            finish_law(gibbs.log_partition(), std::move(acc.xbar))};
}

ExactLaw exact_law(const TorusLattice& lattice, const Potentials& pot, const LocalPattern& pattern,
                   CountMode mode, unsigned threads)
{
    const GibbsEnumerator gibbs(lattice, pot, threads);
    auto laws = exact_laws(gibbs, pattern);
    return mode == CountMode::exact ? std::move(laws.exact) : std::move(laws.upper);
}

std::vector<std::vector<double>> upper_pair_probabilities(const GibbsEnumerator& gibbs,
                                                          const LocalPattern& pattern)
{
    const PlacementMasks masks(pattern, gibbs.lattice());
    const std::size_t n = gibbs.num_sites();
    auto flat = gibbs.reduce(
        std::vector<double>(n * n, 0.0),
        [&](std::vector<double>& acc, std::uint64_t bits, double p) {
            std::uint64_t hits = 0;
            for (std::size_t x = 0; x < n; ++x) {
                if ((bits & masks.positive[x]) == masks.positive[x]) {
                    hits |= std::uint64_t{1} << x;
                }
            }
            for (std::uint64_t i = hits; i != 0; i &= i - 1) {
                const auto x = static_cast<std::size_t>(std::countr_zero(i));
                for (std::uint64_t j = hits; j != 0; j &= j - 1) {
                    acc[x * n + static_cast<std::size_t>(std::countr_zero(j))] += p;
                }
            }
        },
        [](std::vector<double>& into, const std::vector<double>& from) { add_into(into, from); });
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t x = 0; x < n; ++x) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(x * n), n, out[x].begin());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conditionals

ConditionalTable::ConditionalTable(const GibbsEnumerator& gibbs, Vertex x, int radius)
{
    const auto& lattice = gibbs.lattice();
    auto b = ball(lattice, x, radius);
    ball_ = b.members;
    boundary_ = ball_boundary(lattice, b);
    require_enumerable(ball_.size() + boundary_.size(), "conditional table");

    const std::size_t cells = std::size_t{1} << (ball_.size() + boundary_.size());
    const std::size_t shift = ball_.size();
    joint_ = gibbs.reduce(
        std::vector<double>(cells, 0.0),
        [&](std::vector<double>& acc, std::uint64_t bits, double p) {
            std::size_t cell = 0;
            for (std::size_t i = 0; i < ball_.size(); ++i) {
                cell |= ((bits >> ball_[i]) & 1U) << i;
            }
            for (std::size_t j = 0; j < boundary_.size(); ++j) {
                cell |= ((bits >> boundary_[j]) & 1U) << (shift + j);
            }
            acc[cell] += p;
        },
        [](std::vector<double>& into, const std::vector<double>& from) { add_into(into, from); });
}

double ConditionalTable::joint(std::uint64_t ball_bits, std::uint64_t boundary_bits) const
{
    return joint_.at(ball_bits | (boundary_bits << ball_.size()));
}

double ConditionalTable::boundary_marginal(std::uint64_t boundary_bits) const
{
    double total = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << ball_.size()); ++m) {
        total += joint(m, boundary_bits);
    }
    return total;
}

double ConditionalTable::conditional(std::uint64_t ball_bits, std::uint64_t boundary_bits) const
{
    const double marginal = boundary_marginal(boundary_bits);
    if (marginal <= 0.0) {
        throw std::domain_error("conditioning on a boundary configuration of probability zero");
    }
    return joint(ball_bits, boundary_bits) / marginal;
}

std::uint64_t boundary_bits(std::span<const Spin> boundary)
{
    if (boundary.size() > 64) {
        throw std::invalid_argument("boundary too large to pack");
    }
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        if (boundary[j] == Spin::plus) {
            bits |= std::uint64_t{1} << j;
        }
    }
    return bits;
}

namespace {

std::uint64_t pattern_bits(const LocalPattern& pattern)
{
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < pattern.beta(); ++i) {
        if (pattern.mask()[i]) {
            bits |= std::uint64_t{1} << i;
        }
    }
    return bits;
}

// Ball members followed by boundary vertices, with adjacency masks over that list.
struct ClosureGraph {
    std::vector<Vertex> vertices;
    std::size_t ball_size = 0;
    std::vector<std::uint64_t> adjacency;
};

ClosureGraph closure_graph(const LocalPattern& pattern, const TorusLattice& lattice, Vertex x)
{
    pattern.check_lattice(lattice);
    auto b = ball(lattice, x, pattern.radius());
    auto boundary = ball_boundary(lattice, b);
    require_enumerable(b.members.size(), "local configuration enumeration");
    if (b.members.size() + boundary.size() > 64) {
        throw SizeGuardError("ball closure exceeds 64 vertices");
    }
    ClosureGraph g;
    g.vertices = b.members;
    g.ball_size = b.members.size();
    g.vertices.insert(g.vertices.end(), boundary.begin(), boundary.end());
    g.adjacency.assign(g.vertices.size(), 0);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        for (std::size_t j = 0; j < g.vertices.size(); ++j) {
            if (lattice.adjacent(g.vertices[i], g.vertices[j])) {
                g.adjacency[i] |= std::uint64_t{1} << j;
            }
        }
    }
    return g;
}

}  // namespace

double conditional_from_local_energy(const TorusLattice& lattice, const Potentials& pot,
                                     const LocalPattern& pattern, Vertex x, std::span<const Spin> boundary)
{
    const auto g = closure_graph(pattern, lattice, x);
    const std::size_t beta = g.ball_size;
    check_boundary(boundary, g.vertices.size() - beta);
    const std::uint64_t sigma = boundary_bits(boundary) << beta;
    const std::uint64_t ball_mask = (std::uint64_t{1} << beta) - 1;

    // h[i]: sum of boundary spins adjacent to ball vertex i.
    std::vector<int> h(beta, 0);
    for (std::size_t i = 0; i < beta; ++i) {
        const std::uint64_t nb = g.adjacency[i] & ~ball_mask;
        const int plus = std::popcount(nb & sigma);
        h[i] = 2 * plus - std::popcount(nb);
    }

    auto energy = [&](std::uint64_t m) {
        double e = 0.0;
        long pair = 0;
        for (std::size_t i = 0; i < beta; ++i) {
            const int si = ((m >> i) & 1U) ? 1 : -1;
            e += si * (pot.a() + pot.b() * h[i]);
            const std::uint64_t inner = g.adjacency[i] & ball_mask & ~((std::uint64_t{2} << i) - 1);
            const int agree_plus = std::popcount(inner & m);
            const int n_inner = std::popcount(inner);
            pair += si * (2 * agree_plus - n_inner);
        }
        return e + pot.b() * static_cast<double>(pair);
    };

    LogSumExp total;
    for (std::uint64_t m = 0; m <= ball_mask; ++m) {
        total.add(energy(m));
    }
    return std::exp(energy(pattern_bits(pattern)) - total.value());
}

double exact_conditional(const TorusLattice& lattice, const Potentials& pot, const LocalPattern& pattern,
                         Vertex x, std::span<const Spin> boundary, unsigned threads)
{
    pattern.check_lattice(lattice);
    lattice.check_vertex(x);
    if (lattice.num_vertices() > static_cast<std::size_t>(kMaxEnumerationBits)) {
        return conditional_from_local_energy(lattice, pot, pattern, x, boundary);
    }
    const GibbsEnumerator gibbs(lattice, pot, threads);
    const ConditionalTable table(gibbs, x, pattern.radius());
    check_boundary(boundary, table.boundary_size());
    return table.conditional(pattern_bits(pattern), boundary_bits(boundary));
}

double weight_ratio_conditional(const LocalPattern& pattern, std::span<const Spin> boundary,
                                const Potentials& pot, const TorusLattice& lattice, Vertex x)
{
    const auto g = closure_graph(pattern, lattice, x);
    const std::size_t beta = g.ball_size;
    check_boundary(boundary, g.vertices.size() - beta);
    const std::uint64_t sigma = boundary_bits(boundary) << beta;
    const long degree = lattice.degree();

    auto log_w = [&](std::uint64_t positives) {
        long k = std::popcount(positives);
        long twice_edges = 0;
        for (std::uint64_t rest = positives; rest != 0; rest &= rest - 1) {
            twice_edges += std::popcount(g.adjacency[static_cast<std::size_t>(std::countr_zero(rest))] & positives);
        }
        return log_weight(static_cast<std::size_t>(k), degree * k - twice_edges, pot);
    };

    LogSumExp total;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << beta); ++m) {
        total.add(log_w(m | sigma));
    }
    return std::exp(log_w(pattern_bits(pattern) | sigma) - total.value());
}

double local_energy(std::span<const Vertex> set, const Assignment& zeta, const Potentials& pot,
                    const TorusLattice& lattice)
{
    std::vector<Vertex> inside(set.begin(), set.end());
    std::sort(inside.begin(), inside.end());
    inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
    for (Vertex v : closure(lattice, inside)) {
        if (!zeta.contains(v)) {
            throw std::invalid_argument("local energy needs an assignment on the closure; vertex " +
                                        std::to_string(v) + " missing");
        }
    }
    auto in_set = [&](Vertex v) { return std::binary_search(inside.begin(), inside.end(), v); };
    long field = 0;
    long pair = 0;
    for (Vertex y : inside) {
        const int sy = value(zeta.at(y));
        field += sy;
        for (Vertex z : lattice.neighbors(y)) {
            // Internal edges are met from both ends; keep the lower one.
            if (in_set(z) && z < y) {
                continue;
            }
            pair += sy * value(zeta.at(z));
        }
    }
    return pot.a() * static_cast<double>(field) + pot.b() * static_cast<double>(pair);
}

// ---------------------------------------------------------------------------
// FKG

void require_increasing(const StateFunction& f, std::size_t sites)
{
    require_enumerable(sites, "monotonicity check");
    const std::uint64_t states = std::uint64_t{1} << sites;
    for (std::uint64_t s = 0; s < states; ++s) {
        const double fs = f(s);
        for (std::size_t i = 0; i < sites; ++i) {
            const std::uint64_t up = s | (std::uint64_t{1} << i);
            if (up != s && f(up) < fs) {
                throw std::invalid_argument("statistic is not increasing in the spin order");
            }
        }
    }
}

double fkg_covariance(const TorusLattice& lattice, const Potentials& pot, const StateFunction& f,
                      const StateFunction& g, unsigned threads, bool validate)
{
    if (lattice.num_vertices() > kMaxFkgSites) {
        throw SizeGuardError("FKG covariance supports at most 20 vertices");
    }
    if (validate) {
        require_increasing(f, lattice.num_vertices());
        require_increasing(g, lattice.num_vertices());
    }
    const GibbsEnumerator gibbs(lattice, pot, threads);
    using Pair = std::pair<double, double>;
    auto sum = [](Pair& into, const Pair& from) {
        into.first += from.first;
        into.second += from.second;
    };
    const Pair means = gibbs.reduce(
        Pair{0.0, 0.0},
        [&](Pair& acc, std::uint64_t bits, double p) {
            acc.first += p * f(bits);
            acc.second += p * g(bits);
        },
        sum);
    const Pair cov = gibbs.reduce(
        Pair{0.0, 0.0},
        [&](Pair& acc, std::uint64_t bits, double p) {
            acc.first += p * (f(bits) - means.first) * (g(bits) - means.second);
        },
        sum);
    return cov.first;
}

}  // namespace ising
