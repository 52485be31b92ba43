#include "ising/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ising {

namespace {

double log2_add(double x, double y)
{
    const double hi = std::max(x, y);
    const double lo = std::min(x, y);
    if (lo == -std::numeric_limits<double>::infinity()) {
        return hi;
    }
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

// log2(2^m - 1), -inf for m = 0.
double log2_pow2_minus_one(std::size_t m)
{
    if (m == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(m) + std::log2(-std::expm1(-static_cast<double>(m) * std::numbers::ln2));
}

void require_calibratable(const PatternStats& stats, double lambda)
{
    if (stats.k < 1) {
        throw std::invalid_argument("calibrated schedules need a pattern with at least one positive vertex");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be positive and finite");
    }
}

}  // namespace

std::string to_string(ScheduleKind kind)
{
    switch (kind) {
    case ScheduleKind::example34:
        return "example34";
    case ScheduleKind::fixed_b:
        return "fixed_b";
    case ScheduleKind::custom_b:
        return "custom_b";
    case ScheduleKind::constant:
        return "constant";
    }
    return "unknown";
}

Schedule Schedule::example34(PatternStats stats, int degree, int d, double lambda, double drift)
{
    require_calibratable(stats, lambda);
    if (stats.gamma < 1) {
        throw std::invalid_argument("example34 schedule needs a positive perimeter");
    }
    Schedule s;
    s.kind_ = ScheduleKind::example34;
    s.stats_ = stats;
    s.degree_ = degree;
    s.d_ = d;
    s.lambda_ = lambda;
    s.drift_ = drift;
    return s;
}

Schedule Schedule::fixed_b(PatternStats stats, int degree, int d, double lambda, double b, double drift)
{
    if (!(b >= 0.0)) {
        throw std::invalid_argument("pair potential b must be nonnegative");
    }
    auto s = custom_b(stats, degree, d, lambda, [b](int) { return b; }, drift);
    s.kind_ = ScheduleKind::fixed_b;
    return s;
}

Schedule Schedule::custom_b(PatternStats stats, int degree, int d, double lambda,
                            std::function<double(int)> b_of_n, double drift)
{
    require_calibratable(stats, lambda);
    Schedule s;
    s.kind_ = ScheduleKind::custom_b;
    s.stats_ = stats;
    s.degree_ = degree;
    s.d_ = d;
    s.lambda_ = lambda;
    s.drift_ = drift;
    s.b_of_n_ = std::move(b_of_n);
    return s;
}

Schedule Schedule::constant(PatternStats stats, int degree, int d, double a, double b)
{
    Schedule s;
    s.kind_ = ScheduleKind::constant;
    s.stats_ = stats;
    s.degree_ = degree;
    s.d_ = d;
    s.const_a_ = a;
    s.b_of_n_ = [b](int) { return b; };
    return s;
}

double Schedule::target_mean(int n) const
{
    return lambda_ * std::pow(static_cast<double>(n), drift_);
}

SchedulePoint Schedule::at(int n) const
{
    if (n < 2) {
        throw std::invalid_argument("schedule evaluated at n < 2");
    }
    const double k = static_cast<double>(stats_.k);
    const double gamma = static_cast<double>(stats_.gamma);
    const double ln_n = std::log(static_cast<double>(n));
    const double log_target = std::log(lambda_) + drift_ * ln_n - d_ * ln_n;

    SchedulePoint p;
    p.n = n;
    switch (kind_) {
    case ScheduleKind::example34:
        p.a = log_target / (2.0 * k + gamma / degree_);
        p.b = -p.a / (2.0 * degree_);
        break;
    case ScheduleKind::fixed_b:
    case ScheduleKind::custom_b:
        p.b = b_of_n_(n);
        if (!(p.b >= 0.0) || !std::isfinite(p.b)) {
            throw std::invalid_argument("schedule produced an invalid pair potential at n = " + std::to_string(n));
        }
        p.a = (log_target + 2.0 * p.b * gamma) / (2.0 * k);
        break;
    case ScheduleKind::constant:
        p.a = const_a_;
        p.b = b_of_n_(n);
        break;
    }
    p.in_regime = p.a < 0.0 && p.b >= 0.0;
    const double log_mean = d_ * ln_n + 2.0 * p.a * k - 2.0 * p.b * gamma;
    p.homogeneity_residual = kind_ == ScheduleKind::constant
                                 ? log_mean - std::log(target_mean(n))
                                 : log_mean - (std::log(lambda_) + drift_ * ln_n);
    return p;
}

HypothesisReport check_hypotheses(const Schedule& schedule, const LocalPattern& pattern,
                                  std::span<const int> n_grid)
{
    if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
        std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
        throw std::invalid_argument("n grid must be strictly increasing");
    }
    HypothesisReport report;
    report.homogeneity_holds = true;
    const auto& shape = pattern.shape();
    for (int n : n_grid) {
        const TorusLattice lattice(n, shape.d, shape.p, shape.rho);
        HypothesisRow row;
        row.point = schedule.at(n);
        const double scale = std::max(1.0, std::abs(std::log(static_cast<double>(n)) * shape.d));
        if (std::abs(row.point.homogeneity_residual) > 1e-12 * scale) {
            report.homogeneity_holds = false;
        }
        if (!row.point.in_regime) {
            report.out_of_regime.push_back(n);
            report.rows.push_back(row);
            continue;
        }
        const double a = row.point.a;
        const double b = row.point.b;
        const double v = lattice.degree();
        const Potentials pot = row.point.potentials();
        row.a_plus_vb = a + v * b;
        row.a_plus_2vb = a + 2.0 * v * b;
        row.h2_condition = row.a_plus_2vb <= 0.0;
        row.log_delta = probability_gap(pattern, pot, lattice).log_gap;
        row.log_m = row.log_delta;
        if (!pattern.covers_ball()) {
            row.log_theta = log_maximality_probability(pattern, pot, lattice);
            row.log_m = std::max(row.log_m, *row.log_theta);
        }
        const double tol = 1e-12;
        const auto st = pattern_stats(pattern, lattice);
        const double log_w = log_weight(st.k, st.gamma, pot);
        row.bounds_hold = row.log_delta >= 2.0 * a - 2.0 * b * v - tol && row.log_delta <= 2.0 * a + tol &&
                          (!row.log_theta || *row.log_theta <= 2.0 * a + 2.0 * v * b + tol) &&
                          (pattern.is_null() || log_w <= row.log_delta + tol);
        report.rows.push_back(row);
    }

    const HypothesisRow* prev = nullptr;
    bool trend = true;
    std::size_t in_regime = 0;
    for (const auto& row : report.rows) {
        if (!row.point.in_regime) {
            continue;
        }
        ++in_regime;
        if (prev && !(row.a_plus_vb < prev->a_plus_vb && row.log_m < prev->log_m)) {
            trend = false;
        }
        prev = &row;
    }
    report.h1_trend = trend && in_regime >= 2;
    return report;
}

double h2_constant_log2(std::span<const Vertex> set, const TorusLattice& lattice)
{
    return static_cast<double>(closure(lattice, set).size());
}

double sandwich_constant_log2(const LocalPattern& pattern, const TorusLattice& lattice)
{
    pattern.check_lattice(lattice);
    const auto b = ball(lattice, 0, pattern.radius());
    const auto boundary = ball_boundary(lattice, b);
    const double beta = static_cast<double>(b.beta());
    const double boundary_term = static_cast<double>(boundary.size()) + h2_constant_log2(boundary, lattice);
    const double first = log2_add(beta, boundary_term);
    const double second = log2_add(log2_pow2_minus_one(b.beta() - pattern.k()) + h2_constant_log2(b.members, lattice),
                                   boundary_term);
    return std::max(first, second);
}

double log_maximality_constant(const LocalPattern& pattern, const TorusLattice& lattice)
{
    pattern.check_lattice(lattice);
    const auto b = ball(lattice, 0, pattern.radius());
    return (log2_pow2_minus_one(b.beta() - pattern.k()) + h2_constant_log2(b.members, lattice)) *
           std::numbers::ln2;
}

double stein_chen_rhs(double mean, double variance, double sites)
{
    if (!(mean > 0.0)) {
        throw std::invalid_argument("Stein-Chen bound needs a positive mean");
    }
    if (!(sites > 0.0)) {
        throw std::invalid_argument("Stein-Chen bound needs a positive site count");
    }
    return -std::expm1(-mean) / mean * (variance - mean + 2.0 * mean * mean / sites);
}

}  // namespace ising
