#include <doctest.h>

#include <cmath>
#include <random>

#include "ising/errors.hpp"
#include "ising/gibbs_exact.hpp"
#include "oracle.hpp"

using namespace ising;

namespace {

const LatticeShape kLine{1, NormOrder::finite(1), 1};
const LatticeShape kSquare{2, NormOrder::finite(1), 1};

// Law of the exact or upper count, from coordinates and direct sums only.
std::vector<double> naive_law(const oracle::Torus& t, double a, double b, const std::vector<Offset>& ball,
                              const std::vector<bool>& mask, bool upper, double* log_z)
{
    const int sites = t.volume();
    std::vector<double> logw(std::size_t{1} << sites);
    double top = -1e300;
    for (std::uint64_t s = 0; s < logw.size(); ++s) {
        int mag = 2 * std::popcount(s) - sites;
        logw[s] = a * mag + b * static_cast<double>(t.edge_sum(s));
        top = std::max(top, logw[s]);
    }
    double z = 0.0;
    for (double w : logw) {
        z += std::exp(w - top);
    }
    *log_z = top + std::log(z);

    std::vector<double> pmf(static_cast<std::size_t>(sites) + 1, 0.0);
    for (std::uint64_t s = 0; s < logw.size(); ++s) {
        int count = 0;
        for (int x = 0; x < sites; ++x) {
            auto cx = t.coords(x);
            bool hit = true;
            for (std::size_t i = 0; i < ball.size() && hit; ++i) {
                auto c = cx;
                for (std::size_t j = 0; j < c.size(); ++j) {
                    c[j] += ball[i][j];
                }
                bool plus = (s >> t.index(c)) & 1U;
                hit = upper ? (!mask[i] || plus) : plus == mask[i];
            }
            count += hit;
        }
        pmf[static_cast<std::size_t>(count)] += std::exp(logw[s] - *log_z);
    }
    while (pmf.size() > 1 && pmf.back() == 0.0) {
        pmf.pop_back();
    }
    return pmf;
}

void check_pmf(const std::vector<double>& got, const std::vector<double>& want)
{
    for (std::size_t m = 0; m < std::max(got.size(), want.size()); ++m) {
        double g = m < got.size() ? got[m] : 0.0;
        double w = m < want.size() ? want[m] : 0.0;
        CHECK(g == doctest::Approx(w).epsilon(1e-12).scale(1.0));
    }
}

std::vector<Spin> random_boundary(std::size_t size, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(0.5);
    std::vector<Spin> out(size);
    for (auto& s : out) {
        s = coin(rng) ? Spin::plus : Spin::minus;
    }
    return out;
}

}  // namespace

TEST_CASE("state log weight")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    Potentials pot(-0.7, 0.3);
    CHECK(state_log_weight(SpinState(8), line, pot) == doctest::Approx(-8 * -0.7 + 8 * 0.3));

    SpinState alt(8);
    for (Vertex v = 0; v < 8; v += 2) {
        alt.set(v, Spin::plus);
    }
    CHECK(state_log_weight(alt, line, Potentials(-0.7, 0.0)) == 0.0);
    CHECK(state_log_weight(alt, line, pot) == doctest::Approx(-8 * 0.3));

    auto sq = build_lattice(4, 2, NormOrder::finite(1), 1);
    SpinState checker(16);
    for (Vertex v = 0; v < 16; ++v) {
        if ((v / 4 + v % 4) % 2 == 0) {
            checker.set(v, Spin::plus);
        }
    }
    CHECK(state_log_weight(checker, sq, Potentials(-0.3, 1.0)) == doctest::Approx(-32.0));

    GibbsEnumerator g(sq, Potentials(-0.3, 1.0), 1);
    CHECK(g.log_weight(checker.low_bits()) == doctest::Approx(-32.0));
}

TEST_CASE("three-site line at zero potentials")
{
    auto line = build_lattice(3, 1, NormOrder::finite(1), 1);
    auto single = LocalPattern(kLine, 1, {{0}});
    auto law = exact_law(line, Potentials(0.0, 0.0), single, CountMode::exact, 1);
    CHECK(law.log_z == doctest::Approx(3 * std::log(2.0)));
    REQUIRE(law.pmf.size() == 2);
    CHECK(law.pmf[0] == doctest::Approx(0.625));
    CHECK(law.pmf[1] == doctest::Approx(0.375));
    CHECK(law.mean == doctest::Approx(0.375));

    auto upper = exact_law(line, Potentials(0.0, 0.0), single, CountMode::upper, 1);
    CHECK(upper.mean == doctest::Approx(1.5));
    CHECK(upper.variance == doctest::Approx(0.75));
    CHECK(upper.second_factorial_moment == doctest::Approx(1.5));
}

TEST_CASE("partition function at zero potentials")
{
    for (int n : {3, 5, 8}) {
        auto line = build_lattice(n, 1, NormOrder::finite(1), 1);
        GibbsEnumerator g(line, Potentials(0.0, 0.0));
        CHECK(g.log_partition() == doctest::Approx(n * std::log(2.0)));
    }
    // b = 0: Z = (2 cosh a)^N.
    auto sq = build_lattice(4, 2, NormOrder::finite(1), 1);
    GibbsEnumerator g(sq, Potentials(-1.2, 0.0));
    CHECK(g.log_partition() == doctest::Approx(16 * std::log(2 * std::cosh(1.2))));
}

TEST_CASE("exact laws match a coordinate-level enumeration")
{
    struct Case {
        oracle::Torus t;
        LocalPattern pattern;
        double a;
        double b;
    };
    std::vector<Case> cases{
        {{8, 1, 1, 1}, LocalPattern(kLine, 1, {{0}}), -0.8, 0.4},
        {{9, 1, 1, 1}, LocalPattern(kLine, 2, {{0}, {1}}), -0.3, 0.9},
        {{4, 2, 1, 1}, LocalPattern(kSquare, 1, {{0, 0}}), -1.1, 0.2},
        {{4, 2, 0, 1}, LocalPattern({2, NormOrder::infinity(), 1}, 1, {{0, 0}, {1, 1}}), -0.5, 0.1},
        {{10, 1, 1, 2}, LocalPattern({1, NormOrder::finite(1), 2}, 1, {{0}, {-2}}), -0.6, 0.3},
    };
    for (const auto& c : cases) {
        auto p = c.t.p == 0 ? NormOrder::infinity() : NormOrder::finite(c.t.p);
        auto lat = build_lattice(c.t.n, c.t.d, p, c.t.rho);
        Potentials pot(c.a, c.b);
        GibbsEnumerator g(lat, pot, 2);
        auto laws = exact_laws(g, c.pattern);
        for (bool upper : {false, true}) {
            double log_z = 0.0;
            auto want = naive_law(c.t, c.a, c.b, c.pattern.ball_offsets(), c.pattern.mask(), upper, &log_z);
            const auto& got = upper ? laws.upper : laws.exact;
            CHECK(got.log_z == doctest::Approx(log_z).epsilon(1e-13));
            check_pmf(got.pmf, want);
            double mean = 0.0;
            for (std::size_t m = 0; m < want.size(); ++m) {
                mean += static_cast<double>(m) * want[m];
            }
            CHECK(got.mean == doctest::Approx(mean).epsilon(1e-11));
        }
        auto single = exact_law(lat, pot, c.pattern, CountMode::exact, 1);
        check_pmf(single.pmf, laws.exact.pmf);
    }
}

TEST_CASE("results do not depend on the thread count")
{
    auto sq = build_lattice(4, 2, NormOrder::finite(1), 1);
    auto pattern = LocalPattern(kSquare, 1, {{0, 0}});
    Potentials pot(-0.9, 0.35);
    auto one = exact_law(sq, pot, pattern, CountMode::exact, 1);
    auto four = exact_law(sq, pot, pattern, CountMode::exact, 4);
    CHECK(one.log_z == four.log_z);
    CHECK(one.pmf == four.pmf);
    CHECK(one.mean == four.mean);
    CHECK(one.variance == four.variance);

    GibbsEnumerator g1(sq, pot, 1);
    GibbsEnumerator g3(sq, pot, 3);
    CHECK(upper_pair_probabilities(g1, pattern) == upper_pair_probabilities(g3, pattern));
}

TEST_CASE("upper pair probabilities")
{
    auto line = build_lattice(6, 1, NormOrder::finite(1), 1);
    auto pattern = LocalPattern(kLine, 1, {{0}});
    GibbsEnumerator g(line, Potentials(-0.4, 0.0));
    auto pairs = upper_pair_probabilities(g, pattern);
    const double q = std::exp(-0.4) / (2 * std::cosh(0.4));
    CHECK(pairs[0][0] == doctest::Approx(q));
    CHECK(pairs[0][3] == doctest::Approx(q * q));
    CHECK(pairs[2][5] == doctest::Approx(pairs[5][2]));
}

TEST_CASE("conditional tables")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);

    SUBCASE("zero coupling factorizes over sites")
    {
        const double a = -0.6;
        GibbsEnumerator g(line, Potentials(a, 0.0));
        ConditionalTable table(g, 0, 1);
        REQUIRE(table.ball_size() == 3);
        REQUIRE(table.boundary_size() == 2);
        const double q = std::exp(a) / (2 * std::cosh(a));
        for (std::uint64_t sigma = 0; sigma < 4; ++sigma) {
            for (std::uint64_t eta = 0; eta < 8; ++eta) {
                int k = std::popcount(eta);
                CHECK(table.conditional(eta, sigma) == doctest::Approx(std::pow(q, k) * std::pow(1 - q, 3 - k)));
            }
        }
    }

    SUBCASE("conditionals are distributions")
    {
        auto sq = build_lattice(4, 2, NormOrder::finite(1), 1);
        GibbsEnumerator g(sq, Potentials(-0.5, 0.7));
        ConditionalTable table(g, 5, 1);
        double total = 0.0;
        for (std::uint64_t sigma = 0; sigma < (std::uint64_t{1} << table.boundary_size()); ++sigma) {
            double sum = 0.0;
            for (std::uint64_t eta = 0; eta < 32; ++eta) {
                sum += table.conditional(eta, sigma);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            total += table.boundary_marginal(sigma);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("conditional routes agree")
{
    std::mt19937_64 rng(31);
    Potentials pot(-0.8, 0.45);

    auto small = build_lattice(8, 1, NormOrder::finite(1), 1);
    for (const auto& pattern : LocalPattern::all(kLine, 1)) {
        auto sigma = random_boundary(2, rng);
        double full = exact_conditional(small, pot, pattern, 3, sigma);
        CHECK(full == doctest::Approx(conditional_from_local_energy(small, pot, pattern, 3, sigma)).epsilon(1e-12));
        CHECK(full == doctest::Approx(weight_ratio_conditional(pattern, sigma, pot, small, 3)).epsilon(1e-12));
    }

    // 36 sites: beyond full enumeration.
    auto big = build_lattice(6, 2, NormOrder::finite(1), 1);
    for (int i = 0; i < 10; ++i) {
        auto pattern = LocalPattern::from_mask(kSquare, 1, {i % 2 == 0, i % 3 == 0, true, false, i % 5 == 0});
        auto sigma = random_boundary(8, rng);
        double local = exact_conditional(big, pot, pattern, 14, sigma);
        CHECK(local == doctest::Approx(weight_ratio_conditional(pattern, sigma, pot, big, 14)).epsilon(1e-12));
        CHECK(local > 0.0);
        CHECK(local < 1.0);
    }

    CHECK_THROWS(exact_conditional(small, pot, LocalPattern(kLine, 1, {{0}}), 0, std::vector<Spin>(3)));
}

TEST_CASE("local energy")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    Potentials pot(-0.5, 0.25);
    std::vector<Vertex> centre{0};
    std::vector<Vertex> support{7, 0, 1};
    std::vector<Vertex> plus{0};
    auto zeta = Assignment::from_positives(support, plus);
    // Field +1, two disagreeing edges.
    CHECK(local_energy(centre, zeta, pot, line) == doctest::Approx(-0.5 - 2 * 0.25));

    std::vector<Vertex> pair{0, 1};
    std::vector<Vertex> wider{7, 0, 1, 2};
    std::vector<Vertex> both{0, 1};
    auto z2 = Assignment::from_positives(wider, both);
    // Field +2; edges 7-0 and 1-2 disagree, 0-1 agrees.
    CHECK(local_energy(pair, z2, pot, line) == doctest::Approx(2 * -0.5 + 0.25 * (1 - 2)));

    CHECK_THROWS_AS(local_energy(pair, zeta, pot, line), std::invalid_argument);
}

TEST_CASE("local energy carries every state dependence on the set")
{
    std::mt19937_64 rng(8);
    auto sq = build_lattice(5, 2, NormOrder::finite(1), 1);
    Potentials pot(-0.35, 0.6);
    auto region = ball(sq, 12, 1).members;
    auto shell = closure(sq, region);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 20; ++trial) {
        SpinState s(25);
        for (Vertex v = 0; v < 25; ++v) {
            s.set(v, coin(rng) ? Spin::plus : Spin::minus);
        }
        SpinState t = s;
        for (Vertex v : region) {
            t.set(v, coin(rng) ? Spin::plus : Spin::minus);
        }
        auto assign = [&](const SpinState& st) {
            Assignment out;
            for (Vertex v : shell) {
                out.set(v, st[v]);
            }
            return out;
        };
        double lhs = state_log_weight(s, sq, pot) - state_log_weight(t, sq, pot);
        double rhs = local_energy(region, assign(s), pot, sq) - local_energy(region, assign(t), pot, sq);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("positive association")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    StateFunction plus0 = [](std::uint64_t s) { return static_cast<double>(s & 1U); };
    StateFunction plus4 = [](std::uint64_t s) { return static_cast<double>((s >> 4) & 1U); };
    StateFunction count = [](std::uint64_t s) { return static_cast<double>(std::popcount(s)); };
    StateFunction minus0 = [](std::uint64_t s) { return 1.0 - static_cast<double>(s & 1U); };

    CHECK(std::abs(fkg_covariance(line, Potentials(-0.7, 0.0), plus0, plus4)) < 1e-15);
    CHECK(fkg_covariance(line, Potentials(-0.7, 0.5), plus0, plus4) > 0.0);
    CHECK(fkg_covariance(line, Potentials(-0.7, 0.5), count, count) > 0.0);
    CHECK_THROWS_AS(fkg_covariance(line, Potentials(-0.7, 0.5), minus0, plus4), std::invalid_argument);
    CHECK_NOTHROW(require_increasing(count, 8));

    auto big = build_lattice(21, 1, NormOrder::finite(1), 1);
    CHECK_THROWS_AS(fkg_covariance(big, Potentials(-0.7, 0.5), plus0, plus4), SizeGuardError);
}

TEST_CASE("size guard")
{
    auto big = build_lattice(5, 2, NormOrder::finite(1), 1);
    CHECK_THROWS_AS(GibbsEnumerator(big, Potentials(-1.0, 0.0)), SizeGuardError);
    CHECK_THROWS_AS(exact_law(big, Potentials(-1.0, 0.0), LocalPattern(kSquare, 1, {{0, 0}}), CountMode::exact),
                    SizeGuardError);
    CHECK_NOTHROW(require_enumerable(24, "t"));
    CHECK_THROWS_AS(require_enumerable(25, "t"), SizeGuardError);
}
