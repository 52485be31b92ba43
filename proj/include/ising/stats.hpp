#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ising/asymptotics.hpp"
#include "ising/gibbs_exact.hpp"
#include "ising/patterns.hpp"
#include "ising/sampler.hpp"

namespace ising {

enum class DistributionSource { exact, empirical, poisson };

/// A law on the nonnegative integers; pmf[m] = P(m). tail_mass bounds the
/// probability beyond the stored support (nonzero only for truncated laws).
struct CountDistribution {
    std::vector<double> pmf;
    double tail_mass = 0.0;
    DistributionSource source = DistributionSource::exact;
    double mean = 0.0;
    double variance = 0.0;
    std::size_t samples = 0;
    std::size_t replicates = 0;
    /// Binomial standard error per entry (empirical laws only).
    std::vector<double> mc_stderr;

    double at(std::size_t m) const { return m < pmf.size() ? pmf[m] : 0.0; }
    std::size_t support_max() const { return pmf.empty() ? 0 : pmf.size() - 1; }

    /// Mean and variance recomputed from pmf.
    static CountDistribution from_pmf(std::vector<double> pmf, DistributionSource source);
};

CountDistribution from_exact(const ExactLaw& law);

/// Truncated at the first m past the mode whose remaining tail is below tail_tol.
CountDistribution poisson_pmf(double lambda, double tail_tol = 1e-12);

/// 1/2 sum_m |p_m - q_m| over the union support, plus half of both tail masses.
double tv_distance(const CountDistribution& p, const CountDistribution& q);

CountDistribution empirical_distribution(std::span<const std::uint32_t> samples, std::size_t replicates = 1);

/// Standard error of the grand mean from batch means; each chain is cut into
/// `batches_per_chain` equal batches (a trailing remainder is dropped).
double batch_means_stderr(const std::vector<std::vector<double>>& chains, std::size_t batches_per_chain = 20);

enum class Engine { exact, mcmc };

std::string to_string(Engine engine);

struct ConvergenceRow {
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    double log_delta = 0.0;
    std::optional<double> log_theta;
    double log_m = 0.0;
    /// Poisson target lambda n^drift.
    double lambda = 0.0;
    /// E[Xbar].
    double lambda_n = 0.0;
    double mean_x = 0.0;
    double var_x = 0.0;
    double var_xbar = 0.0;
    double dtv_x = 0.0;
    double dtv_xbar = 0.0;
    double dtv_x_xbar = 0.0;
    double dtv_lambda = 0.0;
    std::optional<double> sc_bound;
    double p_nonzero = 0.0;
    Engine engine = Engine::exact;
    /// Retained samples (mcmc); 0 for exact rows.
    std::size_t samples = 0;
    CountDistribution law_x;
    CountDistribution law_xbar;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// Grid points with a(n) >= 0, excluded from the table.
    std::vector<int> skipped;
};

/// Rows in increasing n. The exact engine needs n^d <= 24; mcmc needs a chain config.
ConvergenceTable convergence_table(const Schedule& schedule, const LocalPattern& pattern,
                                   std::span<const int> n_grid, Engine engine,
                                   const std::optional<ChainConfig>& chains = std::nullopt, unsigned threads = 0);

}  // namespace ising
