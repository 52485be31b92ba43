#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ising/lattice.hpp"

namespace ising {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct TorusSpec {
    int n = 8;
    int d = 1;
    NormOrder p = NormOrder::finite(1);
    int rho = 1;
};

struct PotentialGrid {
    std::vector<double> a{-0.5, -1.0, -2.0};
    std::vector<double> b{0.0, 0.3, 1.0};
};

/// Conditional law of a ball given its boundary: full enumeration against the weight ratio.
struct ConditionalCheckParams {
    std::vector<TorusSpec> tori{{8, 1, NormOrder::finite(1), 1}, {4, 2, NormOrder::finite(1), 1}};
    int radius = 1;
    PotentialGrid grid;
    double rel_tol = 1e-10;
};

CheckResult check_conditional_exactness(const ConditionalCheckParams& params);
CheckResult check_conditional_bounds(const ConditionalCheckParams& params);

struct FactorizationCheckParams {
    std::vector<TorusSpec> tori{{8, 1, NormOrder::finite(1), 1},
                                {8, 2, NormOrder::finite(1), 1},
                                {8, 2, NormOrder::infinity(), 1},
                                {9, 2, NormOrder::finite(2), 2},
                                {6, 3, NormOrder::finite(1), 1}};
    int pairs = 1000;
    double tol = 1e-12;
    std::uint64_t seed = 12;
};

CheckResult check_weight_factorization(const FactorizationCheckParams& params);

struct GapCheckParams {
    std::vector<TorusSpec> tori{{8, 1, NormOrder::finite(1), 1}, {8, 2, NormOrder::finite(1), 1}};
    int radius = 1;
    PotentialGrid grid;
    double tol = 1e-12;
};

CheckResult check_gap_closed_form(const GapCheckParams& params);

struct FkgCheckParams {
    TorusSpec torus{10, 1, NormOrder::finite(1), 1};
    int pairs = 200;
    std::vector<double> b{0.0, 0.5, 1.0};
    double a_min = -2.0;
    double a_max = 0.5;
    double tol = 1e-12;
    std::uint64_t seed = 22;
};

CheckResult check_fkg(const FkgCheckParams& params);

/// d = 1, rho = 1 single-+ pattern of radius 1 under the example34 schedule.
struct ExactSeriesParams {
    std::vector<int> n_grid{8, 10, 12};
    double lambda = 1.0;
    double drift = 0.0;
    unsigned threads = 0;
};

CheckResult check_stein_chen_domination(const ExactSeriesParams& params);
CheckResult check_moment_sandwiches(const ExactSeriesParams& params);
CheckResult check_convergence_trend(const ExactSeriesParams& params);
/// drift < 0: P(X > 0) decreasing; drift > 0: increasing.
CheckResult check_threshold(const ExactSeriesParams& params);

struct SamplerCheckParams {
    TorusSpec torus{4, 2, NormOrder::finite(1), 1};
    double a = -1.0;
    double b = 0.3;
    int transitions = 1000;
    double balance_tol = 1e-10;
    std::size_t chains = 4;
    std::size_t retained_per_chain = 25000;
    std::size_t burn_in = 1000;
    double tv_tol = 0.02;
    double stderr_multiple = 4.0;
    std::uint64_t seed = 2024;
    unsigned threads = 0;
};

CheckResult check_detailed_balance(const SamplerCheckParams& params);
CheckResult check_sampler_agreement(const SamplerCheckParams& params);

/// Translation covariance, symmetry and ball constants of small tori.
CheckResult check_lattice_invariants();
/// Perimeter identity 2 gamma = alpha - sum_int eta eta + sum_cross (1 + eta) on all r = 1 patterns.
CheckResult check_perimeter_identity();
/// Ball conditionals unchanged by extra conditioning outside the closure.
CheckResult check_markov_property();
/// E[Xbar (Xbar - 1)] from the pmf against the off-diagonal double sum; sum of squared
/// marginals against lambda_n^2 / n^d.
CheckResult check_second_moment_structure(const ExactSeriesParams& params);
/// d_TV(X, P(lambda)) <= d_TV(X, Xbar) + d_TV(Xbar, P(lambda_n)) + d_TV(P(lambda_n), P(lambda)).
CheckResult check_triangle_assembly(const ExactSeriesParams& params);

enum class VerifyLevel { quick, full };

/// The library checks at the given size; results in a fixed order.
std::vector<CheckResult> run_library_checks(VerifyLevel level, unsigned threads = 0);

}  // namespace ising
