#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/patterns.hpp"

namespace ising {

enum class ScheduleKind { example34, fixed_b, custom_b, constant };

std::string to_string(ScheduleKind kind);

struct SchedulePoint {
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    /// a < 0 and b >= 0.
    bool in_regime = false;
    /// ln(n^d W) - ln(target mean), zero for every calibrated schedule.
    double homogeneity_residual = 0.0;

    Potentials potentials() const { return {a, b}; }
};

/// n -> (a(n), b(n)) calibrated so that n^d W = lambda n^drift. drift = 0 is
/// the homogeneity relation; drift != 0 moves the expected count off lambda.
class Schedule {
public:
    /// b = -a / (2V), a = ln(lambda n^drift / n^d) / (2k + gamma / V).
    static Schedule example34(PatternStats stats, int degree, int d, double lambda, double drift = 0.0);
    /// a = (ln(lambda n^drift / n^d) + 2 b gamma) / (2k) with b constant.
    static Schedule fixed_b(PatternStats stats, int degree, int d, double lambda, double b, double drift = 0.0);
    static Schedule custom_b(PatternStats stats, int degree, int d, double lambda,
                             std::function<double(int)> b_of_n, double drift = 0.0);
    /// Uncalibrated (a, b) for every n.
    static Schedule constant(PatternStats stats, int degree, int d, double a, double b);

    ScheduleKind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double drift() const { return drift_; }
    const PatternStats& stats() const { return stats_; }
    int degree() const { return degree_; }
    int dimension() const { return d_; }

    /// Target mean lambda n^drift.
    double target_mean(int n) const;
    SchedulePoint at(int n) const;

private:
    Schedule() = default;

    ScheduleKind kind_ = ScheduleKind::example34;
    PatternStats stats_;
    int degree_ = 0;
    int d_ = 1;
    double lambda_ = 1.0;
    double drift_ = 0.0;
    double const_a_ = 0.0;
    std::function<double(int)> b_of_n_;
};

struct HypothesisRow {
    SchedulePoint point;
    double a_plus_vb = 0.0;
    double a_plus_2vb = 0.0;
    double log_delta = 0.0;
    /// Empty when the pattern covers the ball.
    std::optional<double> log_theta;
    /// log max(delta, theta).
    double log_m = 0.0;
    /// a + 2Vb <= 0.
    bool h2_condition = false;
    /// exp(2a - 2bV) <= delta <= exp(2a), theta <= exp(2a + 2Vb), W <= delta.
    bool bounds_hold = false;
};

struct HypothesisReport {
    std::vector<HypothesisRow> rows;
    /// a + Vb and M strictly decreasing over the in-regime rows. A finite grid
    /// certifies a trend only.
    bool h1_trend = false;
    bool homogeneity_holds = false;
    std::vector<int> out_of_regime;
};

/// n_grid must be increasing with every n > 2 rho r.
HypothesisReport check_hypotheses(const Schedule& schedule, const LocalPattern& pattern,
                                  std::span<const int> n_grid);

/// log2 C(V), C(V) = 2^{|V u dV|}.
double h2_constant_log2(std::span<const Vertex> set, const TorusLattice& lattice);

/// log2 K(r) = log2 max{ |C_r| + 2^{|dB|} C(dB), |C*_r(eta)| C(B) + 2^{|dB|} C(dB) }.
double sandwich_constant_log2(const LocalPattern& pattern, const TorusLattice& lattice);

/// ln(|C*_r(eta)| C(B)): the constant multiplying lambda Theta in the X / Xbar comparison.
double log_maximality_constant(const LocalPattern& pattern, const TorusLattice& lattice);

/// (1 - e^{-mean}) / mean * (variance - mean + 2 mean^2 / sites).
double stein_chen_rhs(double mean, double variance, double sites);

}  // namespace ising
