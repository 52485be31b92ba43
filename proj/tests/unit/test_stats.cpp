#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ising/stats.hpp"

using namespace ising;

namespace {

const LatticeShape kLine{1, NormOrder::finite(1), 1};

double total(const CountDistribution& d)
{
    double s = d.tail_mass;
    for (double p : d.pmf) {
        s += p;
    }
    return s;
}

}  // namespace

TEST_CASE("Poisson pmf")
{
    auto one = poisson_pmf(1.0);
    CHECK(one.pmf[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(one.pmf[1] == doctest::Approx(one.pmf[0]).epsilon(1e-15));
    CHECK(one.pmf[3] == doctest::Approx(std::exp(-1.0) / 6));
    CHECK(one.tail_mass < 1e-12);
    CHECK(one.source == DistributionSource::poisson);

    auto four = poisson_pmf(4.0);
    CHECK(total(four) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(four.pmf[3] == doctest::Approx(four.pmf[4]));
    CHECK(four.mean == 4.0);

    auto big = poisson_pmf(200.0);
    CHECK(total(big) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(big.support_max() > 250);

    auto loose = poisson_pmf(1.0, 1e-6);
    CHECK(loose.pmf.size() < one.pmf.size());

    CHECK_THROWS_AS(poisson_pmf(0.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_pmf(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_pmf(INFINITY), std::invalid_argument);
    CHECK_THROWS_AS(poisson_pmf(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_pmf(1.0, 1e-3), std::invalid_argument);
}

TEST_CASE("total variation distance")
{
    auto point = CountDistribution::from_pmf({1.0}, DistributionSource::exact);
    auto one = poisson_pmf(1.0);
    CHECK(tv_distance(point, one) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-11));
    CHECK(tv_distance(one, point) == tv_distance(point, one));
    CHECK(tv_distance(one, one) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

    auto p = CountDistribution::from_pmf({0.5, 0.5}, DistributionSource::exact);
    auto q = CountDistribution::from_pmf({0.0, 0.0, 1.0}, DistributionSource::exact);
    CHECK(tv_distance(p, q) == 1.0);

    auto r = CountDistribution::from_pmf({0.25, 0.25, 0.5}, DistributionSource::exact);
    CHECK(tv_distance(p, r) == doctest::Approx(0.5));
    CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r));
}

TEST_CASE("distributions from pmfs")
{
    auto d = CountDistribution::from_pmf({0.2, 0.5, 0.3}, DistributionSource::exact);
    CHECK(d.mean == doctest::Approx(1.1));
    CHECK(d.variance == doctest::Approx(0.5 + 1.2 - 1.21));
    CHECK(d.at(7) == 0.0);
    CHECK(d.support_max() == 2);
}

TEST_CASE("empirical distributions")
{
    std::vector<std::uint32_t> xs{0, 0, 1, 3};
    auto e = empirical_distribution(xs);
    CHECK(e.pmf == std::vector<double>{0.5, 0.25, 0.0, 0.25});
    CHECK(e.mean == doctest::Approx(1.0));
    CHECK(e.samples == 4);
    CHECK(e.mc_stderr[0] == doctest::Approx(0.25));
    CHECK(e.source == DistributionSource::empirical);
    CHECK_THROWS_AS(empirical_distribution({}), std::invalid_argument);

    std::mt19937_64 rng(2718);
    std::poisson_distribution<std::uint32_t> draw(1.5);
    std::vector<std::uint32_t> sample(100000);
    for (auto& s : sample) {
        s = draw(rng);
    }
    auto emp = empirical_distribution(sample);
    CHECK(tv_distance(emp, poisson_pmf(1.5)) < 0.01);
    CHECK(emp.mean == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("batch means")
{
    std::vector<std::vector<double>> flat{std::vector<double>(100, 2.0), std::vector<double>(100, 2.0)};
    CHECK(batch_means_stderr(flat) == 0.0);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::vector<double>> iid(4, std::vector<double>(10000));
    for (auto& c : iid) {
        for (auto& v : c) {
            v = z(rng);
        }
    }
    // Independent draws: close to 1 / sqrt(total).
    CHECK(batch_means_stderr(iid) == doctest::Approx(0.005).epsilon(0.3));
    CHECK_THROWS_AS(batch_means_stderr(iid, 0), std::invalid_argument);
    CHECK_THROWS_AS(batch_means_stderr({{1.0}}, 1), std::invalid_argument);
}

TEST_CASE("exact convergence table")
{
    auto pattern = LocalPattern(kLine, 1, {{0}});
    auto s = Schedule::example34({1, 2}, 2, 1, 1.0);
    std::vector<int> grid{8, 10, 12};
    auto table = convergence_table(s, pattern, grid, Engine::exact);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.skipped.empty());
    for (const auto& row : table.rows) {
        CHECK(row.engine == Engine::exact);
        CHECK(row.samples == 0);
        CHECK(row.lambda == 1.0);
        CHECK(row.lambda_n == doctest::Approx(row.law_xbar.mean));
        CHECK(row.mean_x == doctest::Approx(row.law_x.mean));
        CHECK(row.dtv_x == doctest::Approx(tv_distance(row.law_x, poisson_pmf(1.0))));
        CHECK(row.dtv_lambda == doctest::Approx(tv_distance(poisson_pmf(row.lambda_n), poisson_pmf(1.0))));
        CHECK(row.dtv_x <= row.dtv_x_xbar + row.dtv_xbar + row.dtv_lambda + 1e-12);
        CHECK(row.p_nonzero == doctest::Approx(1.0 - row.law_x.pmf[0]));
        REQUIRE(row.sc_bound.has_value());
        CHECK(row.dtv_xbar <= *row.sc_bound);
    }
    CHECK(table.rows[0].n == 8);
    CHECK(table.rows[2].dtv_x < table.rows[0].dtv_x);

    auto threads4 = convergence_table(s, pattern, grid, Engine::exact, std::nullopt, 4);
    CHECK(threads4.rows[1].law_x.pmf == table.rows[1].law_x.pmf);
}

TEST_CASE("mcmc convergence table")
{
    auto pattern = LocalPattern(kLine, 1, {{0}});
    auto s = Schedule::example34({1, 2}, 2, 1, 1.0);
    std::vector<int> grid{10};
    CHECK_THROWS_AS(convergence_table(s, pattern, grid, Engine::mcmc), std::invalid_argument);

    ChainConfig c;
    c.burn_in = 200;
    c.sweeps = 20200;
    c.chains = 2;
    c.seed = 5;
    auto table = convergence_table(s, pattern, grid, Engine::mcmc, c);
    REQUIRE(table.rows.size() == 1);
    const auto& row = table.rows[0];
    CHECK(row.samples == 40000);
    CHECK(row.law_x.source == DistributionSource::empirical);

    auto exact = convergence_table(s, pattern, grid, Engine::exact).rows[0];
    CHECK(tv_distance(row.law_x, exact.law_x) < 0.02);
    CHECK(row.lambda_n == doctest::Approx(exact.lambda_n).epsilon(0.05));
}

TEST_CASE("grid points out of the regime")
{
    auto pattern = LocalPattern(kLine, 1, {{0}});
    auto s = Schedule::example34({1, 2}, 2, 1, 10.0);
    std::vector<int> grid{8, 10, 12};
    auto table = convergence_table(s, pattern, grid, Engine::exact);
    CHECK(table.skipped == std::vector<int>{8, 10});
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].n == 12);

    std::vector<int> low{8, 10};
    CHECK_THROWS_AS(convergence_table(s, pattern, low, Engine::exact), std::invalid_argument);
    std::vector<int> unsorted{10, 8};
    CHECK_THROWS_AS(convergence_table(Schedule::example34({1, 2}, 2, 1, 1.0), pattern, unsorted, Engine::exact),
                    std::invalid_argument);
    CHECK(to_string(Engine::mcmc) == "mcmc");
}
