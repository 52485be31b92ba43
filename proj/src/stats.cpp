#include "ising/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ising/errors.hpp"

namespace ising {

CountDistribution CountDistribution::from_pmf(std::vector<double> pmf, DistributionSource source)
{
    CountDistribution out;
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t m = 0; m < pmf.size(); ++m) {
        const double dm = static_cast<double>(m);
        m1 += dm * pmf[m];
        m2 += dm * dm * pmf[m];
    }
    out.pmf = std::move(pmf);
    out.source = source;
    out.mean = m1;
    out.variance = m2 - m1 * m1;
    return out;
}

CountDistribution from_exact(const ExactLaw& law)
{
    auto out = CountDistribution::from_pmf(law.pmf, DistributionSource::exact);
    out.mean = law.mean;
    out.variance = law.variance;
    return out;
}

CountDistribution poisson_pmf(double lambda, double tail_tol)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("Poisson parameter must be positive and finite");
    }
    if (!(tail_tol > 0.0) || tail_tol > 1e-6) {
        throw std::invalid_argument("Poisson tail tolerance must lie in (0, 1e-6]");
    }
    std::vector<double> pmf;
    double tail = 0.0;
    const double log_lambda = std::log(lambda);
    for (std::size_t m = 0;; ++m) {
        const double dm = static_cast<double>(m);
        pmf.push_back(std::exp(-lambda + dm * log_lambda - std::lgamma(dm + 1.0)));
        // Past the mode, successive ratios are at most r < 1, so the tail
        // beyond m is at most pmf[m] r / (1 - r).
        const double r = lambda / (dm + 2.0);
        if (r < 1.0) {
            tail = pmf.back() * r / (1.0 - r);
            if (tail < tail_tol) {
                break;
            }
        }
    }
    CountDistribution out;
    out.pmf = std::move(pmf);
    out.tail_mass = tail;
    out.source = DistributionSource::poisson;
    out.mean = lambda;
    out.variance = lambda;
    return out;
}

double tv_distance(const CountDistribution& p, const CountDistribution& q)
{
    const std::size_t len = std::max(p.pmf.size(), q.pmf.size());
    double sum = 0.0;
    for (std::size_t m = 0; m < len; ++m) {
        sum += std::abs(p.at(m) - q.at(m));
    }
    return std::clamp(0.5 * (sum + p.tail_mass + q.tail_mass), 0.0, 1.0);
}

CountDistribution empirical_distribution(std::span<const std::uint32_t> samples, std::size_t replicates)
{
    if (samples.empty()) {
        throw std::invalid_argument("empirical distribution of an empty sample");
    }
    const auto top = *std::max_element(samples.begin(), samples.end());
    std::vector<std::size_t> counts(static_cast<std::size_t>(top) + 1, 0);
    for (auto s : samples) {
        ++counts[s];
    }
    const double total = static_cast<double>(samples.size());
    std::vector<double> pmf(counts.size());
    for (std::size_t m = 0; m < counts.size(); ++m) {
        pmf[m] = static_cast<double>(counts[m]) / total;
    }
    auto out = CountDistribution::from_pmf(std::move(pmf), DistributionSource::empirical);
    out.samples = samples.size();
    out.replicates = replicates;
    out.mc_stderr.resize(out.pmf.size());
    for (std::size_t m = 0; m < out.pmf.size(); ++m) {
        out.mc_stderr[m] = std::sqrt(out.pmf[m] * (1.0 - out.pmf[m]) / total);
    }
    return out;
}

double batch_means_stderr(const std::vector<std::vector<double>>& chains, std::size_t batches_per_chain)
{
    if (batches_per_chain == 0) {
        throw std::invalid_argument("batch count must be positive");
    }
    std::vector<double> means;
    for (const auto& chain : chains) {
        const std::size_t len = chain.size() / batches_per_chain;
        if (len == 0) {
            continue;
        }
        for (std::size_t b = 0; b < batches_per_chain; ++b) {
            double s = 0.0;
            for (std::size_t i = b * len; i < (b + 1) * len; ++i) {
                s += chain[i];
            }
            means.push_back(s / static_cast<double>(len));
        }
    }
    if (means.size() < 2) {
        throw std::invalid_argument("batch means need at least two batches");
    }
    double mean = 0.0;
    for (double m : means) {
        mean += m;
    }
    mean /= static_cast<double>(means.size());
    double ss = 0.0;
    for (double m : means) {
        ss += (m - mean) * (m - mean);
    }
    const double k = static_cast<double>(means.size());
    return std::sqrt(ss / (k - 1.0) / k);
}

std::string to_string(Engine engine)
{
    return engine == Engine::exact ? "exact" : "mcmc";
}

namespace {

void fill_distances(ConvergenceRow& row, std::size_t sites)
{
    const auto target = poisson_pmf(row.lambda);
    row.mean_x = row.law_x.mean;
    row.var_x = row.law_x.variance;
    row.lambda_n = row.law_xbar.mean;
    row.var_xbar = row.law_xbar.variance;
    row.dtv_x = tv_distance(row.law_x, target);
    row.dtv_x_xbar = tv_distance(row.law_x, row.law_xbar);
    row.p_nonzero = 1.0 - row.law_x.at(0);
    if (row.lambda_n > 0.0) {
        const auto shifted = poisson_pmf(row.lambda_n);
        row.dtv_xbar = tv_distance(row.law_xbar, shifted);
        row.dtv_lambda = tv_distance(shifted, target);
        row.sc_bound = stein_chen_rhs(row.lambda_n, row.var_xbar, static_cast<double>(sites));
    } else {
        // Xbar is identically 0: its law is the degenerate Poisson(0).
        row.dtv_xbar = 0.0;
        row.dtv_lambda = 1.0 - target.at(0);
    }
}

}  // namespace

ConvergenceTable convergence_table(const Schedule& schedule, const LocalPattern& pattern,
                                   std::span<const int> n_grid, Engine engine,
                                   const std::optional<ChainConfig>& chains, unsigned threads)
{
    if (engine == Engine::mcmc && !chains) {
        throw std::invalid_argument("the mcmc engine needs a chain configuration");
    }
    if (chains) {
        chains->validate();
    }
    if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
        std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
        throw std::invalid_argument("n grid must be strictly increasing");
    }
    const auto& shape = pattern.shape();
    ConvergenceTable table;
    for (int n : n_grid) {
        const auto point = schedule.at(n);
        if (!point.in_regime) {
            table.skipped.push_back(n);
            continue;
        }
        const TorusLattice lattice(n, shape.d, shape.p, shape.rho);
        if (engine == Engine::exact) {
            require_enumerable(lattice.num_vertices(), "exact convergence row");
        }
        const Potentials pot = point.potentials();

        ConvergenceRow row;
        row.n = n;
        row.a = point.a;
        row.b = point.b;
        row.engine = engine;
        row.lambda = schedule.target_mean(n);
        row.log_delta = probability_gap(pattern, pot, lattice).log_gap;
        row.log_m = row.log_delta;
        if (!pattern.covers_ball()) {
            row.log_theta = log_maximality_probability(pattern, pot, lattice);
            row.log_m = std::max(row.log_m, *row.log_theta);
        }

        if (engine == Engine::exact) {
            const GibbsEnumerator gibbs(lattice, pot, threads);
            const auto laws = exact_laws(gibbs, pattern);
            row.law_x = from_exact(laws.exact);
            row.law_xbar = from_exact(laws.upper);
        } else {
            const auto run = run_chain(lattice, pot, pattern, *chains, threads);
            const auto merged = run.merged();
            std::vector<std::uint32_t> xs;
            std::vector<std::uint32_t> xbars;
            xs.reserve(merged.size());
            xbars.reserve(merged.size());
            for (const auto& s : merged) {
                xs.push_back(s.x);
                xbars.push_back(s.xbar);
            }
            row.law_x = empirical_distribution(xs, chains->chains);
            row.law_xbar = empirical_distribution(xbars, chains->chains);
            row.samples = merged.size();
        }
        fill_distances(row, lattice.num_vertices());
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) {
        throw std::invalid_argument("no grid point lies in the rare-positive regime (a(n) < 0)");
    }
    return table;
}

}  // namespace ising
