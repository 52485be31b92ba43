#include "ising/checks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ising/asymptotics.hpp"
#include "ising/gibbs_exact.hpp"
#include "ising/patterns.hpp"
#include "ising/sampler.hpp"
#include "ising/stats.hpp"

namespace ising {

namespace {

TorusLattice make_lattice(const TorusSpec& t)
{
    return {t.n, t.d, t.p, t.rho};
}

std::string describe(const TorusSpec& t)
{
    std::ostringstream out;
    out << "d=" << t.d << " n=" << t.n << " p=" << t.p.to_string() << " rho=" << t.rho;
    return out.str();
}

std::ostringstream detail_stream()
{
    std::ostringstream out;
    out.precision(6);
    return out;
}

// " n=8: x; n=10: y;" -> "n=8: x; n=10: y"
std::string tidy(std::string text)
{
    const auto first = text.find_first_not_of(' ');
    text.erase(0, first == std::string::npos ? text.size() : first);
    while (!text.empty() && text.back() == ';') {
        text.pop_back();
    }
    return text;
}

double relative_gap(double x, double y)
{
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

std::vector<Spin> signs_from_bits(std::uint64_t bits, std::size_t count)
{
    std::vector<Spin> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = ((bits >> j) & 1U) ? Spin::plus : Spin::minus;
    }
    return out;
}

LocalPattern single_plus_line()
{
    return {LatticeShape{1, NormOrder::finite(1), 1}, 1, {{0}}};
}

Schedule line_schedule(const ExactSeriesParams& params)
{
    const TorusLattice probe(8, 1, NormOrder::finite(1), 1);
    return Schedule::example34(pattern_stats(single_plus_line(), probe), probe.degree(), 1, params.lambda,
                               params.drift);
}

struct LineInstance {
    int n;
    SchedulePoint point;
    TorusLattice lattice;
    ExactLawPair laws;
};

std::vector<LineInstance> line_instances(const ExactSeriesParams& params)
{
    const auto pattern = single_plus_line();
    const auto schedule = line_schedule(params);
    std::vector<LineInstance> out;
    for (int n : params.n_grid) {
        TorusLattice lattice(n, 1, NormOrder::finite(1), 1);
        const auto point = schedule.at(n);
        if (!point.in_regime) {
            continue;
        }
        const GibbsEnumerator gibbs(lattice, point.potentials(), params.threads);
        auto laws = exact_laws(gibbs, pattern);
        out.push_back({n, point, std::move(lattice), std::move(laws)});
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CheckResult check_conditional_exactness(const ConditionalCheckParams& params)
{
    CheckResult res{"conditional law equals weight ratio", true, {}};
    double worst = 0.0;
    std::size_t cases = 0;
    for (const auto& spec : params.tori) {
        const auto lattice = make_lattice(spec);
        const auto patterns = LocalPattern::all(lattice.shape(), params.radius);
        for (double a : params.grid.a) {
            for (double b : params.grid.b) {
                const Potentials pot(a, b);
                const GibbsEnumerator gibbs(lattice, pot);
                const ConditionalTable table(gibbs, 0, params.radius);
                const std::size_t m = table.boundary_size();
                for (std::uint64_t bd = 0; bd < (std::uint64_t{1} << m); ++bd) {
                    const auto sigma = signs_from_bits(bd, m);
                    for (std::size_t idx = 0; idx < patterns.size(); ++idx) {
                        const double exact = table.conditional(idx, bd);
                        const double ratio = weight_ratio_conditional(patterns[idx], sigma, pot, lattice);
                        const double rel = relative_gap(exact, ratio);
                        worst = std::max(worst, rel);
                        ++cases;
                        if (!(rel <= params.rel_tol)) {
                            res.passed = false;
                        }
                    }
                }
            }
        }
    }
    auto out = detail_stream();
    out << cases << " (pattern, boundary, a, b) cases; max relative gap " << worst << " (tol " << params.rel_tol
        << ")";
    res.detail = out.str();
    return res;
}

CheckResult check_conditional_bounds(const ConditionalCheckParams& params)
{
    CheckResult res{"conditional law within its weight bounds", true, {}};
    double lower_slack = std::numeric_limits<double>::infinity();
    double upper_slack = std::numeric_limits<double>::infinity();
    std::size_t cases = 0;
    std::size_t null_cases = 0;
    std::size_t vacuous_lower = 0;
    for (const auto& spec : params.tori) {
        const auto lattice = make_lattice(spec);
        const auto patterns = LocalPattern::all(lattice.shape(), params.radius);
        const double num_local = std::ldexp(1.0, static_cast<int>(patterns.front().beta()));
        for (double a : params.grid.a) {
            for (double b : params.grid.b) {
                const Potentials pot(a, b);
                const GibbsEnumerator gibbs(lattice, pot);
                const ConditionalTable table(gibbs, 0, params.radius);
                const std::size_t m = table.boundary_size();
                std::vector<double> sigma_weight(std::size_t{1} << m);
                for (std::uint64_t bd = 0; bd < sigma_weight.size(); ++bd) {
                    std::vector<Vertex> plus;
                    for (std::size_t j = 0; j < m; ++j) {
                        if ((bd >> j) & 1U) {
                            plus.push_back(table.boundary()[j]);
                        }
                    }
                    sigma_weight[bd] = std::exp(log_weight(lattice, plus, pot));
                }
                for (std::size_t idx = 0; idx < patterns.size(); ++idx) {
                    const auto st = pattern_stats(patterns[idx], lattice);
                    const double w = std::exp(log_weight(st.k, st.gamma, pot));
                    const double delta = probability_gap(patterns[idx], pot, lattice).value();
                    for (std::uint64_t bd = 0; bd < sigma_weight.size(); ++bd) {
                        const double v = table.conditional(idx, bd);
                        const double lower = bd == 0 ? w * (1.0 - num_local * delta) : 0.0;
                        const double upper = bd == 0 ? w : w * (1.0 + delta / sigma_weight[bd]);
                        if (bd == 0) {
                            ++null_cases;
                            if (lower <= 0.0) {
                                ++vacuous_lower;
                            } else {
                                lower_slack = std::min(lower_slack, (v - lower) / w);
                            }
                        }
                        upper_slack = std::min(upper_slack, (upper - v) / upper);
                        ++cases;
                        if (v < lower - 1e-12 * std::abs(lower) || v > upper * (1.0 + 1e-12)) {
                            res.passed = false;
                        }
                    }
                }
            }
        }
    }
    auto out = detail_stream();
    out << cases << " cases; min relative upper slack " << upper_slack << "; null boundary: " << null_cases
        << " cases, lower bound nonpositive in " << vacuous_lower << ", min relative lower slack " << lower_slack;
    res.detail = out.str();
    return res;
}

CheckResult check_weight_factorization(const FactorizationCheckParams& params)
{
    CheckResult res{"weight factorization through conn", true, {}};
    std::mt19937_64 rng(params.seed);
    double worst = 0.0;
    long connected = 0;
    std::size_t cases = 0;
    for (const auto& spec : params.tori) {
        const auto lattice = make_lattice(spec);
        const bool local = lattice.size() > 4 * lattice.range();
        std::uniform_int_distribution<Vertex> any_vertex(0, static_cast<Vertex>(lattice.num_vertices() - 1));
        std::uniform_int_distribution<int> size_dist(1, 6);
        std::uniform_real_distribution<double> a_dist(-3.0, 0.0);
        std::uniform_real_distribution<double> b_dist(0.0, 2.0);
        std::bernoulli_distribution coin(0.6);
        for (int i = 0; i < params.pairs; ++i) {
            std::vector<Vertex> pool;
            if (local) {
                pool = ball(lattice, any_vertex(rng), 2).members;
            } else {
                for (Vertex v = 0; v < lattice.num_vertices(); ++v) {
                    pool.push_back(v);
                }
            }
            std::shuffle(pool.begin(), pool.end(), rng);
            const auto sa = std::min<std::size_t>(size_dist(rng), pool.size() / 2);
            const auto sb = std::min<std::size_t>(size_dist(rng), pool.size() - sa);
            Assignment za;
            Assignment zb;
            for (std::size_t j = 0; j < sa + sb; ++j) {
                (j < sa ? za : zb).set(pool[j], coin(rng) ? Spin::plus : Spin::minus);
            }
            const Potentials pot(a_dist(rng), b_dist(rng));
            const auto pa = za.positives();
            const auto pb = zb.positives();
            const auto pab = za.joined(zb).positives();
            const auto conn = static_cast<long>(connection(za, zb, lattice));
            const double lhs = log_weight(lattice, pab, pot);
            const double rhs = log_weight(lattice, pa, pot) + log_weight(lattice, pb, pot) + 4.0 * pot.b() * conn;
            const double gap = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
            worst = std::max(worst, gap);
            const bool perimeter_ok =
                perimeter(lattice, pab) + 2 * conn == perimeter(lattice, pa) + perimeter(lattice, pb);
            if (!(gap <= params.tol) || !perimeter_ok || pab.size() != pa.size() + pb.size()) {
                res.passed = false;
            }
            connected += conn > 0;
            ++cases;
        }
    }
    auto out = detail_stream();
    out << cases << " pairs over " << params.tori.size() << " geometries (" << connected
        << " with conn > 0); max scaled log gap " << worst << " (tol " << params.tol << ")";
    res.detail = out.str();
    return res;
}

CheckResult check_gap_closed_form(const GapCheckParams& params)
{
    CheckResult res{"probability gap closed form vs exhaustive", true, {}};
    double worst = 0.0;
    std::size_t cases = 0;
    std::ostringstream sizes;
    for (const auto& spec : params.tori) {
        const auto lattice = make_lattice(spec);
        const auto patterns = LocalPattern::all(lattice.shape(), params.radius);
        const auto boundary = ball_boundary(lattice, ball(lattice, 0, params.radius)).size();
        sizes << " [" << describe(spec) << ": " << patterns.size() << " patterns, "
              << ((std::uint64_t{1} << boundary) - 1) << " boundary states]";
        for (double a : params.grid.a) {
            for (double b : params.grid.b) {
                const Potentials pot(a, b);
                for (const auto& pattern : patterns) {
                    const auto gap = probability_gap(pattern, pot, lattice, 0);
                    const double brute = log_probability_gap_bruteforce(pattern, pot, lattice);
                    const double diff = std::abs(gap.log_closed_form - brute) / std::max(1.0, std::abs(brute));
                    worst = std::max(worst, diff);
                    ++cases;
                    if (!(diff <= params.tol)) {
                        res.passed = false;
                    }
                }
            }
        }
    }
    auto out = detail_stream();
    out << cases << " cases;" << sizes.str() << "; max scaled log gap " << worst;
    res.detail = out.str();
    return res;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t random_subset(std::mt19937_64& rng, std::size_t sites, double density)
{
    std::bernoulli_distribution pick(density);
    std::uniform_int_distribution<std::size_t> any(0, sites - 1);
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < sites; ++i) {
        if (pick(rng)) {
            s |= std::uint64_t{1} << i;
        }
    }
    return s != 0 ? s : std::uint64_t{1} << any(rng);
}

// Upper indicators, monotone DNF formulas and thresholds are all increasing.
StateFunction random_increasing_indicator(std::mt19937_64& rng, std::size_t sites)
{
    std::uniform_int_distribution<int> kind(0, 2);
    switch (kind(rng)) {
    case 0: {
        const auto s = random_subset(rng, sites, 0.25);
        return [s](std::uint64_t bits) { return (bits & s) == s ? 1.0 : 0.0; };
    }
    case 1: {
        std::uniform_int_distribution<int> terms(1, 3);
        std::vector<std::uint64_t> clauses(static_cast<std::size_t>(terms(rng)));
        for (auto& c : clauses) {
            c = random_subset(rng, sites, 0.2);
        }
        return [clauses](std::uint64_t bits) {
            for (auto c : clauses) {
                if ((bits & c) == c) {
                    return 1.0;
                }
            }
            return 0.0;
        };
    }
    default: {
        const auto s = random_subset(rng, sites, 0.5);
        std::uniform_int_distribution<int> t_dist(1, std::popcount(s));
        const int t = t_dist(rng);
        return [s, t](std::uint64_t bits) { return std::popcount(bits & s) >= t ? 1.0 : 0.0; };
    }
    }
}

}  // namespace

CheckResult check_fkg(const FkgCheckParams& params)
{
    CheckResult res{"FKG covariance of increasing indicators", true, {}};
    const auto lattice = make_lattice(params.torus);
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> a_dist(params.a_min, params.a_max);
    double least = std::numeric_limits<double>::infinity();
    std::size_t cases = 0;
    for (int i = 0; i < params.pairs; ++i) {
        const auto f = random_increasing_indicator(rng, lattice.num_vertices());
        const auto g = random_increasing_indicator(rng, lattice.num_vertices());
        require_increasing(f, lattice.num_vertices());
        require_increasing(g, lattice.num_vertices());
        for (double b : params.b) {
            const double cov = fkg_covariance(lattice, Potentials(a_dist(rng), b), f, g, 1, false);
            least = std::min(least, cov);
            ++cases;
            if (!(cov >= -params.tol)) {
                res.passed = false;
            }
        }
    }
    auto out = detail_stream();
    out << cases << " (pair, b) cases on " << describe(params.torus) << "; least covariance " << least;
    res.detail = out.str();
    return res;
}

CheckResult check_stein_chen_domination(const ExactSeriesParams& params)
{
    CheckResult res{"Stein-Chen bound dominates d_TV(Xbar, P(lambda_n))", true, {}};
    auto out = detail_stream();
    for (const auto& inst : line_instances(params)) {
        const auto upper = from_exact(inst.laws.upper);
        const double lambda_n = upper.mean;
        const double dtv = tv_distance(upper, poisson_pmf(lambda_n));
        const double bound = stein_chen_rhs(lambda_n, upper.variance, static_cast<double>(inst.lattice.num_vertices()));
        out << " n=" << inst.n << ": " << dtv << " <= " << bound << ";";
        if (!(dtv <= bound)) {
            res.passed = false;
        }
    }
    res.detail = tidy(out.str());
    return res;
}

CheckResult check_moment_sandwiches(const ExactSeriesParams& params)
{
    CheckResult res{"first-moment inequality and K(r) sandwich", true, {}};
    const auto pattern = single_plus_line();
    auto out = detail_stream();
    for (const auto& inst : line_instances(params)) {
        const auto pot = inst.point.potentials();
        const auto st = pattern_stats(pattern, inst.lattice);
        const double lambda = static_cast<double>(inst.lattice.num_vertices()) * std::exp(log_weight(st.k, st.gamma, pot));
        const double mean_x = inst.laws.exact.mean;
        const double lambda_n = inst.laws.upper.mean;
        const double log_theta = log_maximality_probability(pattern, pot, inst.lattice);
        const double excess = std::exp(log_maximality_constant(pattern, inst.lattice) + log_theta) * lambda;
        const bool first = mean_x < lambda_n && lambda_n < mean_x + excess;

        const double log_m = std::max(probability_gap(pattern, pot, inst.lattice).log_gap, log_theta);
        const double km = std::exp2(sandwich_constant_log2(pattern, inst.lattice) + log_m / std::numbers::ln2);
        const bool sandwich = lambda * (1.0 - km) <= lambda_n && lambda_n <= lambda * (1.0 + km);
        out << " n=" << inst.n << ": " << mean_x << " < " << lambda_n << " < " << mean_x + excess << (first ? "" : " FAIL")
            << ", K*M=" << km << (km >= 1.0 ? " (vacuous)" : "") << (sandwich ? "" : " FAIL") << ";";
        if (!first || !sandwich) {
            res.passed = false;
        }
    }
    res.detail = tidy(out.str());
    return res;
}

CheckResult check_convergence_trend(const ExactSeriesParams& params)
{
    CheckResult res{"d_TV(X, P(lambda)) decreasing and O(M_n)", true, {}};
    const auto table = convergence_table(line_schedule(params), single_plus_line(), params.n_grid, Engine::exact,
                                         std::nullopt, params.threads);
    auto out = detail_stream();
    const auto& rows = table.rows;
    const double anchor = rows.front().dtv_x / std::exp(rows.front().log_m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double ratio = rows[i].dtv_x / std::exp(rows[i].log_m);
        out << " n=" << rows[i].n << ": dtv=" << rows[i].dtv_x << " ratio=" << ratio << ";";
        if (i > 0 && !(rows[i].dtv_x < rows[i - 1].dtv_x)) {
            res.passed = false;
        }
        if (!(ratio <= anchor)) {
            res.passed = false;
        }
    }
    if (rows.size() != params.n_grid.size()) {
        res.passed = false;
        out << " some grid points out of regime;";
    }
    res.detail = tidy(out.str());
    return res;
}

CheckResult check_threshold(const ExactSeriesParams& params)
{
    const bool rising = params.drift > 0.0;
    CheckResult res{rising ? "P(X > 0) increasing when n^d W grows" : "P(X > 0) decreasing when n^d W vanishes", true,
                    {}};
    const auto table = convergence_table(line_schedule(params), single_plus_line(), params.n_grid, Engine::exact,
                                         std::nullopt, params.threads);
    auto out = detail_stream();
    const auto& rows = table.rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << (i ? "; " : "") << "n=" << rows[i].n << ": " << rows[i].p_nonzero;
        if (i > 0) {
            const bool ok = rising ? rows[i].p_nonzero > rows[i - 1].p_nonzero
                                   : rows[i].p_nonzero < rows[i - 1].p_nonzero;
            if (!ok) {
                res.passed = false;
            }
        }
    }
    if (rows.size() != params.n_grid.size() || params.drift == 0.0) {
        res.passed = false;
    }
    res.detail = out.str();
    return res;
}

// ---------------------------------------------------------------------------

CheckResult check_detailed_balance(const SamplerCheckParams& params)
{
    CheckResult res{"heat-bath detailed balance", true, {}};
    const auto lattice = make_lattice(params.torus);
    const Potentials pot(params.a, params.b);
    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<Vertex> site(0, static_cast<Vertex>(lattice.num_vertices() - 1));
    double worst = 0.0;
    for (int i = 0; i < params.transitions; ++i) {
        SpinState s(lattice.num_vertices());
        for (Vertex x = 0; x < lattice.num_vertices(); ++x) {
            s.set(x, uniform01(rng) < 0.5 ? Spin::plus : Spin::minus);
        }
        const Vertex x = site(rng);
        SpinState t = s;
        t.flip(x);
        const double p_plus = heat_bath_probability(local_field(s, lattice, x), pot);
        const double forward = s.is_plus(x) ? 1.0 - p_plus : p_plus;
        const double backward = 1.0 - forward;
        const double lhs = state_log_weight(s, lattice, pot) + std::log(forward);
        const double rhs = state_log_weight(t, lattice, pot) + std::log(backward);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    if (!(worst <= params.balance_tol)) {
        res.passed = false;
    }
    auto out = detail_stream();
    out << params.transitions << " transitions on " << describe(params.torus) << "; max log-scale gap " << worst;
    res.detail = out.str();
    return res;
}

CheckResult check_sampler_agreement(const SamplerCheckParams& params)
{
    CheckResult res{"sampler matches exact law", true, {}};
    const auto lattice = make_lattice(params.torus);
    const Potentials pot(params.a, params.b);
    const LocalPattern pattern(lattice.shape(), 1, {Offset(static_cast<std::size_t>(lattice.dimension()), 0)});
    const auto exact = from_exact(exact_law(lattice, pot, pattern, CountMode::exact, params.threads));

    ChainConfig config;
    config.burn_in = params.burn_in;
    config.sweeps = params.burn_in + params.retained_per_chain;
    config.chains = params.chains;
    config.seed = params.seed;
    const auto run = run_chain(lattice, pot, pattern, config, params.threads);

    std::vector<std::uint32_t> xs;
    std::vector<std::vector<double>> per_chain;
    for (const auto& chain : run.samples) {
        per_chain.emplace_back();
        for (const auto& s : chain) {
            xs.push_back(s.x);
            per_chain.back().push_back(s.x);
        }
    }
    const auto empirical = empirical_distribution(xs, params.chains);
    const double tv = tv_distance(empirical, exact);
    const double se = batch_means_stderr(per_chain, 20);
    const double z = std::abs(empirical.mean - exact.mean) / se;
    if (!(tv <= params.tv_tol) || !(z <= params.stderr_multiple)) {
        res.passed = false;
    }
    auto out = detail_stream();
    out << xs.size() << " samples on " << describe(params.torus) << " (a=" << params.a << ", b=" << params.b
        << "); tv=" << tv << " (tol " << params.tv_tol << "), mean " << empirical.mean << " vs " << exact.mean
        << " = " << z << " batch-means standard errors";
    res.detail = out.str();
    return res;
}

// ---------------------------------------------------------------------------

CheckResult check_lattice_invariants()
{
    CheckResult res{"lattice invariants", true, {}};
    const std::vector<TorusSpec> tori{{9, 1, NormOrder::finite(1), 1},
                                      {7, 2, NormOrder::finite(1), 1},
                                      {8, 2, NormOrder::infinity(), 1},
                                      {11, 2, NormOrder::finite(2), 2},
                                      {5, 3, NormOrder::finite(1), 1}};
    std::mt19937_64 rng(5);
    std::size_t cases = 0;
    auto fail = [&](const std::string& what) {
        res.passed = false;
        res.detail += what + "; ";
    };
    for (const auto& spec : tori) {
        const auto lattice = make_lattice(spec);
        std::uniform_int_distribution<Vertex> any(0, static_cast<Vertex>(lattice.num_vertices() - 1));
        for (Vertex x = 0; x < lattice.num_vertices(); ++x) {
            for (Vertex y : lattice.neighbors(x)) {
                if (!lattice.adjacent(y, x)) {
                    fail("asymmetric adjacency on " + describe(spec));
                }
            }
        }
        for (int i = 0; i < 20; ++i) {
            const Vertex x = any(rng);
            const Vertex y = any(rng);
            const auto cy = lattice.coordinates(y);
            std::vector<Vertex> moved;
            for (Vertex z : lattice.neighbors(x)) {
                moved.push_back(lattice.translate(z, cy));
            }
            const Vertex xy = lattice.translate(x, cy);
            std::vector<Vertex> direct(lattice.neighbors(xy).begin(), lattice.neighbors(xy).end());
            if (moved != direct) {
                fail("translation covariance on " + describe(spec));
            }
            ++cases;
        }
        const int r = 1;
        const auto b0 = ball(lattice, 0, r);
        for (int i = 0; i < 10; ++i) {
            const auto bx = ball(lattice, any(rng), r);
            if (bx.beta() != b0.beta() || bx.alpha != b0.alpha) {
                fail("ball constants vary with the center on " + describe(spec));
            }
        }
        TorusSpec bigger = spec;
        bigger.n += 2;
        const auto b1 = ball(make_lattice(bigger), 0, r);
        if (b1.beta() != b0.beta() || b1.alpha != b0.alpha) {
            fail("ball constants vary with n on " + describe(spec));
        }
        if (lattice.size() > 2 * lattice.range() * (r + 1)) {
            const auto outer = ball(lattice, 0, r + 1);
            std::vector<Vertex> shell;
            for (Vertex v : outer.members) {
                if (std::find(b0.members.begin(), b0.members.end(), v) == b0.members.end()) {
                    shell.push_back(v);
                }
            }
            auto boundary = ball_boundary(lattice, b0);
            std::sort(shell.begin(), shell.end());
            std::sort(boundary.begin(), boundary.end());
            if (shell != boundary) {
                fail("boundary differs from the next shell on " + describe(spec));
            }
        }
    }
    if (res.passed) {
        res.detail = std::to_string(tori.size()) + " tori, " + std::to_string(cases) + " translations";
    }
    return res;
}

CheckResult check_perimeter_identity()
{
    CheckResult res{"perimeter identity over ball edges", true, {}};
    const std::vector<TorusSpec> tori{{8, 1, NormOrder::finite(1), 1},
                                      {8, 2, NormOrder::finite(1), 1},
                                      {8, 2, NormOrder::infinity(), 1},
                                      {11, 2, NormOrder::finite(2), 2}};
    std::size_t cases = 0;
    for (const auto& spec : tori) {
        const auto lattice = make_lattice(spec);
        const auto b = ball(lattice, 0, 1);
        for (const auto& pattern : LocalPattern::all(lattice.shape(), 1)) {
            auto sign = [&](Vertex v) {
                const auto it = std::find(b.members.begin(), b.members.end(), v);
                return pattern.mask()[static_cast<std::size_t>(it - b.members.begin())] ? 1 : -1;
            };
            auto inside = [&](Vertex v) { return std::find(b.members.begin(), b.members.end(), v) != b.members.end(); };
            long internal = 0;
            long crossing = 0;
            for (Vertex y : b.members) {
                for (Vertex z : lattice.neighbors(y)) {
                    if (inside(z)) {
                        if (y < z) {
                            internal += sign(y) * sign(z);
                        }
                    } else {
                        crossing += 1 + sign(y);
                    }
                }
            }
            const long rhs = static_cast<long>(b.alpha) - internal + crossing;
            if (2 * pattern_stats(pattern, lattice).gamma != rhs) {
                res.passed = false;
            }
            ++cases;
        }
    }
    res.detail = std::to_string(cases) + " radius-1 patterns over " + std::to_string(tori.size()) + " geometries";
    return res;
}

CheckResult check_markov_property()
{
    CheckResult res{"ball conditional ignores vertices beyond the boundary", true, {}};
    const TorusLattice lattice(8, 1, NormOrder::finite(1), 1);
    const Potentials pot(-0.7, 0.6);
    const GibbsEnumerator gibbs(lattice, pot, 1);
    const auto b = ball(lattice, 0, 1);
    const auto boundary = ball_boundary(lattice, b);
    const auto cl = closure(lattice, b.members);
    std::vector<Vertex> outside;
    for (Vertex v = 0; v < lattice.num_vertices(); ++v) {
        if (std::find(cl.begin(), cl.end(), v) == cl.end()) {
            outside.push_back(v);
        }
    }
    std::vector<Vertex> order = b.members;
    order.insert(order.end(), boundary.begin(), boundary.end());
    order.insert(order.end(), outside.begin(), outside.end());
    const auto joint = gibbs.reduce(
        std::vector<double>(std::size_t{1} << order.size(), 0.0),
        [&](std::vector<double>& acc, std::uint64_t bits, double p) {
            std::size_t cell = 0;
            for (std::size_t i = 0; i < order.size(); ++i) {
                cell |= ((bits >> order[i]) & 1U) << i;
            }
            acc[cell] += p;
        },
        [](std::vector<double>& into, const std::vector<double>& from) {
            for (std::size_t i = 0; i < into.size(); ++i) {
                into[i] += from[i];
            }
        });
    const std::size_t nb = b.members.size();
    const std::size_t nd = boundary.size();
    const std::size_t no = outside.size();
    double worst = 0.0;
    for (std::size_t bd = 0; bd < (std::size_t{1} << nd); ++bd) {
        std::vector<double> coarse(std::size_t{1} << nb, 0.0);
        for (std::size_t o = 0; o < (std::size_t{1} << no); ++o) {
            for (std::size_t m = 0; m < coarse.size(); ++m) {
                coarse[m] += joint[m | (bd << nb) | (o << (nb + nd))];
            }
        }
        double coarse_total = 0.0;
        for (double c : coarse) {
            coarse_total += c;
        }
        for (std::size_t o = 0; o < (std::size_t{1} << no); ++o) {
            double fine_total = 0.0;
            for (std::size_t m = 0; m < coarse.size(); ++m) {
                fine_total += joint[m | (bd << nb) | (o << (nb + nd))];
            }
            for (std::size_t m = 0; m < coarse.size(); ++m) {
                const double fine = joint[m | (bd << nb) | (o << (nb + nd))] / fine_total;
                worst = std::max(worst, relative_gap(fine, coarse[m] / coarse_total));
            }
        }
    }
    res.passed = worst <= 1e-10;
    auto out = detail_stream();
    out << "d=1 n=8, " << no << " outside vertices; max relative gap " << worst;
    res.detail = out.str();
    return res;
}

CheckResult check_second_moment_structure(const ExactSeriesParams& params)
{
    CheckResult res{"second factorial moment as an off-diagonal double sum", true, {}};
    const auto pattern = single_plus_line();
    const auto schedule = line_schedule(params);
    auto out = detail_stream();
    for (int n : params.n_grid) {
        const TorusLattice lattice(n, 1, NormOrder::finite(1), 1);
        const auto point = schedule.at(n);
        if (!point.in_regime) {
            continue;
        }
        const GibbsEnumerator gibbs(lattice, point.potentials(), params.threads);
        const auto laws = exact_laws(gibbs, pattern);
        const auto pairs = upper_pair_probabilities(gibbs, pattern);
        double off = 0.0;
        double squares = 0.0;
        for (std::size_t x = 0; x < pairs.size(); ++x) {
            for (std::size_t y = 0; y < pairs.size(); ++y) {
                if (x != y) {
                    off += pairs[x][y];
                }
            }
            squares += pairs[x][x] * pairs[x][x];
        }
        const double lambda_n = laws.upper.mean;
        const double gap_m2 = relative_gap(off, laws.upper.second_factorial_moment);
        const double gap_sq = relative_gap(squares, lambda_n * lambda_n / static_cast<double>(pairs.size()));
        out << " n=" << n << ": " << gap_m2 << ", " << gap_sq << ";";
        if (!(gap_m2 <= 1e-12) || !(gap_sq <= 1e-12)) {
            res.passed = false;
        }
    }
    res.detail = "relative gaps " + tidy(out.str());
    return res;
}

CheckResult check_triangle_assembly(const ExactSeriesParams& params)
{
    CheckResult res{"triangle assembly of the three distances", true, {}};
    const auto table = convergence_table(line_schedule(params), single_plus_line(), params.n_grid, Engine::exact,
                                         std::nullopt, params.threads);
    auto out = detail_stream();
    for (const auto& row : table.rows) {
        const double sum = row.dtv_x_xbar + row.dtv_xbar + row.dtv_lambda;
        out << " n=" << row.n << ": " << row.dtv_x << " <= " << sum << ";";
        if (!(row.dtv_x <= sum + 1e-12)) {
            res.passed = false;
        }
    }
    res.detail = tidy(out.str());
    return res;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> run_library_checks(VerifyLevel level, unsigned threads)
{
    const bool full = level == VerifyLevel::full;
    std::vector<CheckResult> out;
    out.push_back(check_lattice_invariants());
    out.push_back(check_perimeter_identity());
    out.push_back(check_markov_property());

    ConditionalCheckParams conditional;
    if (!full) {
        conditional.tori.resize(1);
        conditional.grid = PotentialGrid{{-1.0}, {0.0, 0.3}};
    }
    out.push_back(check_conditional_exactness(conditional));
    out.push_back(check_conditional_bounds(conditional));

    FactorizationCheckParams factorization;
    factorization.pairs = full ? 1000 : 100;
    out.push_back(check_weight_factorization(factorization));

    GapCheckParams gap;
    if (!full) {
        gap.grid = PotentialGrid{{-1.0}, {0.3}};
    }
    out.push_back(check_gap_closed_form(gap));

    FkgCheckParams fkg;
    if (!full) {
        fkg.torus.n = 8;
        fkg.pairs = 20;
    }
    out.push_back(check_fkg(fkg));

    ExactSeriesParams series;
    series.threads = threads;
    if (!full) {
        series.n_grid = {8, 10};
    }
    out.push_back(check_stein_chen_domination(series));
    out.push_back(check_moment_sandwiches(series));
    out.push_back(check_second_moment_structure(series));
    out.push_back(check_triangle_assembly(series));

    ExactSeriesParams trend = series;
    trend.n_grid = full ? std::vector<int>{8, 12, 16, 20} : std::vector<int>{8, 10, 12};
    out.push_back(check_convergence_trend(trend));
    trend.drift = -0.5;
    out.push_back(check_threshold(trend));
    trend.drift = 0.5;
    out.push_back(check_threshold(trend));

    SamplerCheckParams sampler;
    sampler.threads = threads;
    if (!full) {
        sampler.transitions = 200;
        sampler.retained_per_chain = 5000;
        sampler.tv_tol = 0.05;
    }
    out.push_back(check_detailed_balance(sampler));
    out.push_back(check_sampler_agreement(sampler));
    return out;
}

}  // namespace ising
