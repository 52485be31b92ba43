#include "ising/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "ising/asymptotics.hpp"
#include "ising/checks.hpp"
#include "ising/errors.hpp"
#include "ising/gibbs_exact.hpp"
#include "ising/pattern_io.hpp"
#include "ising/patterns.hpp"
#include "ising/sampler.hpp"
#include "ising/stats.hpp"
#include "ising/table.hpp"

namespace ising {

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunSpec {
    std::string pattern_file;
    std::optional<int> n;
    std::optional<int> d;
    std::optional<std::string> p;
    std::optional<int> rho;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> lambda;
    std::string schedule = "example34";
    std::optional<double> b_fixed;
    std::string n_grid;
    double drift = 0.0;
    std::string engine = "exact";
    std::optional<std::size_t> sweeps;
    std::optional<std::size_t> burn_in;
    std::size_t thin = 1;
    std::size_t chains = 1;
    std::uint64_t seed = 1;
    bool upper = false;
    std::string format = "csv";
    unsigned threads = 0;
    std::string level = "quick";
};

std::string real(double v)
{
    return format_real(v);
}

std::string flag(bool v)
{
    return v ? "true" : "false";
}

std::string oor()
{
    return std::string(kOutOfRegime);
}

// ---------------------------------------------------------------------------

LocalPattern resolve_pattern(const RunSpec& spec)
{
    if (spec.pattern_file.empty()) {
        LatticeShape shape;
        shape.d = spec.d.value_or(1);
        shape.p = spec.p ? NormOrder::parse(*spec.p) : NormOrder::finite(1);
        shape.rho = spec.rho.value_or(1);
        return {shape, 1, {Offset(static_cast<std::size_t>(std::max(shape.d, 1)), 0)}};
    }
    auto pattern = load_pattern(spec.pattern_file);
    const auto& shape = pattern.shape();
    if ((spec.d && *spec.d != shape.d) || (spec.p && !(NormOrder::parse(*spec.p) == shape.p)) ||
        (spec.rho && *spec.rho != shape.rho)) {
        throw UsageError("--d/--p/--rho disagree with the geometry in " + spec.pattern_file);
    }
    return pattern;
}

int default_n(const LocalPattern& pattern)
{
    return 2 * pattern.shape().rho * (pattern.radius() + 2) + 1;
}

TorusLattice lattice_for(const LocalPattern& pattern, int n)
{
    const auto& s = pattern.shape();
    return {n, s.d, s.p, s.rho};
}

Schedule resolve_schedule(const RunSpec& spec, const LocalPattern& pattern)
{
    const auto probe = lattice_for(pattern, default_n(pattern));
    const auto stats = pattern_stats(pattern, probe);
    const double lambda = spec.lambda.value();
    if (spec.schedule == "example34") {
        if (spec.b_fixed) {
            throw UsageError("--b-fixed applies to --schedule fixed_b only");
        }
        return Schedule::example34(stats, probe.degree(), probe.dimension(), lambda, spec.drift);
    }
    if (spec.schedule == "fixed_b") {
        if (!spec.b_fixed) {
            throw UsageError("--schedule fixed_b needs --b-fixed");
        }
        return Schedule::fixed_b(stats, probe.degree(), probe.dimension(), lambda, *spec.b_fixed, spec.drift);
    }
    throw UsageError("unknown schedule '" + spec.schedule + "' (example34 or fixed_b)");
}

ChainConfig resolve_chain(const RunSpec& spec, int largest_n)
{
    ChainConfig c;
    c.burn_in = spec.burn_in.value_or(ChainConfig::default_burn_in(largest_n));
    c.sweeps = spec.sweeps.value_or(c.burn_in + 10000);
    c.thin = spec.thin;
    c.chains = spec.chains;
    c.seed = spec.seed;
    c.validate();
    return c;
}

void warn_outside_regime(const Potentials& pot, std::ostream& err)
{
    if (!pot.rare_positive_regime()) {
        err << "note: a >= 0 lies outside the rare-positive regime; results are still exact\n";
    }
}

// ---------------------------------------------------------------------------

int run_pattern(const RunSpec& spec, std::ostream& out, std::ostream& err)
{
    const auto pattern = resolve_pattern(spec);
    const int n = spec.n.value_or(default_n(pattern));
    const auto lattice = lattice_for(pattern, n);
    const Potentials pot(spec.a.value(), spec.b.value());
    warn_outside_regime(pot, err);

    const auto report = analyze_pattern(pattern, pot, lattice);
    if (report.gap.mismatch) {
        err << report.gap.diagnostic << '\n';
    }
    const auto b = ball(lattice, 0, pattern.radius());
    const double log_m = report.log_theta ? std::max(report.gap.log_gap, *report.log_theta) : report.gap.log_gap;

    TableWriter t(out, parse_table_format(spec.format));
    t.header({"n", "d", "p", "rho", "r", "k", "gamma", "beta", "alpha", "V", "log_weight", "weight", "delta",
              "delta_closed_form", "delta_method", "theta", "m", "clean"});
    t.row({std::to_string(n), std::to_string(lattice.dimension()), lattice.norm().to_string(),
           std::to_string(lattice.range()), std::to_string(pattern.radius()), std::to_string(report.stats.k),
           std::to_string(report.stats.gamma), std::to_string(b.beta()), std::to_string(b.alpha),
           std::to_string(lattice.degree()), real(report.log_weight), real(std::exp(report.log_weight)),
           real(report.gap.value()), real(std::exp(report.gap.log_closed_form)), report.gap.exhaustive ? "exhaustive" : "min_cut",
           report.log_theta ? real(std::exp(*report.log_theta)) : "0", real(std::exp(log_m)), flag(report.clean)});
    return kExitOk;
}

int run_schedule(const RunSpec& spec, std::ostream& out, std::ostream&)
{
    const auto pattern = resolve_pattern(spec);
    const auto schedule = resolve_schedule(spec, pattern);
    const auto grid = parse_n_grid(spec.n_grid);
    const auto report = check_hypotheses(schedule, pattern, grid);

    TableWriter t(out, parse_table_format(spec.format));
    t.header({"n", "a", "b", "a_plus_vb", "a_plus_2vb", "delta", "theta", "m", "homogeneity_residual", "h2_condition",
              "bounds_hold", "h1_trend"});
    for (const auto& row : report.rows) {
        const auto& p = row.point;
        if (!p.in_regime) {
            t.row({std::to_string(p.n), real(p.a), real(p.b), oor(), oor(), oor(), oor(), oor(),
                   real(p.homogeneity_residual), oor(), oor(), flag(report.h1_trend)});
            continue;
        }
        t.row({std::to_string(p.n), real(p.a), real(p.b), real(row.a_plus_vb), real(row.a_plus_2vb),
               real(std::exp(row.log_delta)), row.log_theta ? real(std::exp(*row.log_theta)) : "0",
               real(std::exp(row.log_m)), real(p.homogeneity_residual), flag(row.h2_condition),
               flag(row.bounds_hold), flag(report.h1_trend)});
    }
    return kExitOk;
}

int run_exact(const RunSpec& spec, std::ostream& out, std::ostream& err)
{
    const auto pattern = resolve_pattern(spec);
    const auto lattice = lattice_for(pattern, spec.n.value());
    const Potentials pot(spec.a.value(), spec.b.value());
    warn_outside_regime(pot, err);
    const auto law = exact_law(lattice, pot, pattern, spec.upper ? CountMode::upper : CountMode::exact, spec.threads);

    TableWriter t(out, parse_table_format(spec.format));
    t.header({"count", "probability", "log_z", "mean", "variance", "m2"});
    for (std::size_t m = 0; m < law.pmf.size(); ++m) {
        t.row({std::to_string(m), real(law.pmf[m]), real(law.log_z), real(law.mean), real(law.variance),
               real(law.second_factorial_moment)});
    }
    return kExitOk;
}

int run_sample(const RunSpec& spec, std::ostream& out, std::ostream& err)
{
    const auto pattern = resolve_pattern(spec);
    const int n = spec.n.value();
    const auto lattice = lattice_for(pattern, n);
    const Potentials pot(spec.a.value(), spec.b.value());
    warn_outside_regime(pot, err);
    const auto config = resolve_chain(spec, n);
    const auto run = run_chain(lattice, pot, pattern, config, spec.threads);

    std::vector<std::uint32_t> values;
    std::vector<std::vector<double>> per_chain;
    for (const auto& chain : run.samples) {
        per_chain.emplace_back();
        for (const auto& s : chain) {
            const auto v = spec.upper ? s.xbar : s.x;
            values.push_back(v);
            per_chain.back().push_back(v);
        }
    }
    const auto law = empirical_distribution(values, config.chains);
    std::string mean_se = oor();
    const std::size_t batches = std::min<std::size_t>(20, config.retained());
    if (batches * config.chains >= 2) {
        mean_se = real(batch_means_stderr(per_chain, batches));
    } else {
        err << "note: too few samples for a batch-means standard error\n";
    }

    TableWriter t(out, parse_table_format(spec.format));
    t.header({"count", "probability", "stderr", "mean", "variance", "mean_stderr", "samples"});
    for (std::size_t m = 0; m < law.pmf.size(); ++m) {
        t.row({std::to_string(m), real(law.pmf[m]), real(law.mc_stderr[m]), real(law.mean), real(law.variance),
               mean_se, std::to_string(law.samples)});
    }
    return kExitOk;
}

int run_converge(const RunSpec& spec, std::ostream& out, std::ostream&)
{
    const auto pattern = resolve_pattern(spec);
    const auto schedule = resolve_schedule(spec, pattern);
    const auto grid = parse_n_grid(spec.n_grid);
    Engine engine;
    std::optional<ChainConfig> chains;
    if (spec.engine == "exact") {
        engine = Engine::exact;
    } else if (spec.engine == "mcmc") {
        engine = Engine::mcmc;
        chains = resolve_chain(spec, *std::max_element(grid.begin(), grid.end()));
    } else {
        throw UsageError("unknown engine '" + spec.engine + "' (exact or mcmc)");
    }
    const auto table = convergence_table(schedule, pattern, grid, engine, chains, spec.threads);

    TableWriter t(out, parse_table_format(spec.format));
    t.header({"n", "a", "b", "delta", "theta", "m", "lambda", "lambda_n", "dtv_x", "dtv_xbar", "dtv_x_xbar",
              "dtv_lambda", "sc_bound", "p_nonzero", "engine", "samples"});
    auto row_it = table.rows.begin();
    for (int n : grid) {
        if (std::find(table.skipped.begin(), table.skipped.end(), n) != table.skipped.end()) {
            const auto p = schedule.at(n);
            t.row({std::to_string(n), real(p.a), real(p.b), oor(), oor(), oor(), real(schedule.target_mean(n)), oor(),
                   oor(), oor(), oor(), oor(), oor(), oor(), to_string(engine), "0"});
            continue;
        }
        const auto& r = *row_it++;
        t.row({std::to_string(r.n), real(r.a), real(r.b), real(std::exp(r.log_delta)),
               r.log_theta ? real(std::exp(*r.log_theta)) : "0", real(std::exp(r.log_m)), real(r.lambda),
               real(r.lambda_n), real(r.dtv_x), real(r.dtv_xbar), real(r.dtv_x_xbar), real(r.dtv_lambda),
               r.sc_bound ? real(*r.sc_bound) : oor(), real(r.p_nonzero), to_string(r.engine),
               std::to_string(r.samples)});
    }
    return kExitOk;
}

int run_verify(const RunSpec& spec, std::ostream& out, std::ostream& err)
{
    VerifyLevel level;
    if (spec.level == "quick") {
        level = VerifyLevel::quick;
    } else if (spec.level == "full") {
        level = VerifyLevel::full;
    } else {
        throw UsageError("unknown level '" + spec.level + "' (quick or full)");
    }
    const auto results = run_library_checks(level, spec.threads);
    TableWriter t(out, parse_table_format(spec.format));
    t.header({"check", "result", "detail"});
    bool all = true;
    for (const auto& r : results) {
        t.row({r.name, r.passed ? "pass" : "FAIL", r.detail});
        all = all && r.passed;
    }
    if (!all) {
        err << "verification failed\n";
    }
    return all ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, RunSpec& spec)
{
    sub->add_option("--format", spec.format, "Output format: csv or tsv")->capture_default_str();
    sub->add_option("--threads", spec.threads, "Worker cap, 0 = machine parallelism")->capture_default_str();
}

void add_geometry(CLI::App* sub, RunSpec& spec)
{
    sub->add_option("--file", spec.pattern_file, "Pattern file (default: single + at the center, r = 1)");
    sub->add_option("--d", spec.d, "Dimension");
    sub->add_option("--p", spec.p, "Norm order: integer >= 1 or inf");
    sub->add_option("--rho", spec.rho, "Range");
}

void add_potentials(CLI::App* sub, RunSpec& spec)
{
    sub->add_option("--a", spec.a, "Magnetic field")->required();
    sub->add_option("--b", spec.b, "Pair potential (>= 0)")->required();
}

void add_schedule(CLI::App* sub, RunSpec& spec)
{
    sub->add_option("--lambda", spec.lambda, "Target mean count")->required();
    sub->add_option("--schedule", spec.schedule, "example34 or fixed_b")->capture_default_str();
    sub->add_option("--b-fixed", spec.b_fixed, "Constant pair potential for fixed_b");
    sub->add_option("--n-grid", spec.n_grid, "start:stop:step or a comma list")->required();
    sub->add_option("--drift", spec.drift, "Calibrate n^d W to lambda n^drift")->capture_default_str();
}

void add_chain(CLI::App* sub, RunSpec& spec)
{
    sub->add_option("--sweeps", spec.sweeps, "Total sweeps per chain (default burn-in + 10000)");
    sub->add_option("--burn-in", spec.burn_in, "Discarded sweeps (default max(1000, 20 n))");
    sub->add_option("--thin", spec.thin, "Sweeps between retained samples")->capture_default_str();
    sub->add_option("--chains", spec.chains, "Independent chains")->capture_default_str();
    sub->add_option("--seed", spec.seed, "Base seed")->capture_default_str();
}

}  // namespace

std::vector<int> parse_n_grid(const std::string& text)
{
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size()) {
            throw UsageError("bad n grid '" + text + "'");
        }
        return v;
    };
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream in(text);
        for (std::string part; std::getline(in, part, ':');) {
            parts.push_back(part);
        }
        if (parts.size() != 3) {
            throw UsageError("n grid range must be start:stop:step");
        }
        const int start = to_int(parts[0]);
        const int stop = to_int(parts[1]);
        const int step = to_int(parts[2]);
        if (step <= 0 || start > stop) {
            throw UsageError("n grid range needs start <= stop and step > 0");
        }
        for (int n = start; n <= stop; n += step) {
            out.push_back(n);
        }
    } else {
        std::stringstream in(text);
        for (std::string part; std::getline(in, part, ',');) {
            out.push_back(to_int(part));
        }
    }
    if (out.empty()) {
        throw UsageError("empty n grid");
    }
    if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw UsageError("n grid must be strictly increasing");
    }
    return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pattern counts of the ferromagnetic Ising model on a torus and their Poisson limit",
                 "ising-poisson"};
    app.require_subcommand(1);
    RunSpec spec;

    auto* pattern = app.add_subcommand("pattern", "Weight, perimeter, gap and maximality of one pattern");
    add_geometry(pattern, spec);
    pattern->add_option("--n", spec.n, "Torus side (default 2 rho (r + 2) + 1)");
    add_potentials(pattern, spec);
    add_common(pattern, spec);

    auto* schedule = app.add_subcommand("schedule", "Potential schedule and hypothesis report over an n grid");
    add_geometry(schedule, spec);
    add_schedule(schedule, spec);
    add_common(schedule, spec);

    auto* exact = app.add_subcommand("exact", "Exact law of the pattern count by enumeration (n^d <= 24)");
    add_geometry(exact, spec);
    exact->add_option("--n", spec.n, "Torus side")->required();
    add_potentials(exact, spec);
    exact->add_flag("--upper", spec.upper, "Count x + V+(eta) all positive instead of exact matches");
    add_common(exact, spec);

    auto* sample = app.add_subcommand("sample", "Empirical law of the pattern count from heat-bath chains");
    add_geometry(sample, spec);
    sample->add_option("--n", spec.n, "Torus side")->required();
    add_potentials(sample, spec);
    add_chain(sample, spec);
    sample->add_flag("--upper", spec.upper, "Count x + V+(eta) all positive instead of exact matches");
    add_common(sample, spec);

    auto* converge = app.add_subcommand("converge", "Distance to the Poisson law along a schedule");
    add_geometry(converge, spec);
    add_schedule(converge, spec);
    converge->add_option("--engine", spec.engine, "exact or mcmc")->capture_default_str();
    add_chain(converge, spec);
    add_common(converge, spec);

    auto* verify = app.add_subcommand("verify", "Self-checks on built-in tiny instances");
    verify->add_option("--level", spec.level, "quick or full")->capture_default_str();
    add_common(verify, spec);

    if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
        bool known = false;
        for (const auto* sub : app.get_subcommands({})) {
            known = known || sub->get_name() == args.front();
        }
        if (!known) {
            err << "error: unknown command '" << args.front() << "'\n" << app.help();
            return kExitUsage;
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitUsage;
    }

    try {
        if (*pattern) {
            return run_pattern(spec, out, err);
        }
        if (*schedule) {
            return run_schedule(spec, out, err);
        }
        if (*exact) {
            return run_exact(spec, out, err);
        }
        if (*sample) {
            return run_sample(spec, out, err);
        }
        if (*converge) {
            return run_converge(spec, out, err);
        }
        return run_verify(spec, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace ising
