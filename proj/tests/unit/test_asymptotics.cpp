#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ising/asymptotics.hpp"
#include "ising/gibbs_exact.hpp"
#include "ising/stats.hpp"

using namespace ising;

namespace {

const LatticeShape kLine{1, NormOrder::finite(1), 1};
const LatticeShape kSquare{2, NormOrder::finite(1), 1};
const PatternStats kSingleLine{1, 2};

}  // namespace

TEST_CASE("example schedule")
{
    auto s = Schedule::example34(kSingleLine, 2, 1, 1.0);
    auto p = s.at(10);
    CHECK(p.a == doctest::Approx(std::log(0.1) / 3));
    CHECK(p.a == doctest::Approx(-0.7675283643313485));
    CHECK(p.b == doctest::Approx(-p.a / 4));
    CHECK(p.a + 2 * 2 * p.b == doctest::Approx(0.0).scale(1.0));
    CHECK(p.in_regime);
    CHECK(std::abs(p.homogeneity_residual) < 1e-12);
    // n^d W = lambda.
    CHECK(10 * std::exp(2 * p.a - 4 * p.b) == doctest::Approx(1.0));
    CHECK(s.kind() == ScheduleKind::example34);
    CHECK(to_string(s.kind()) == "example34");

    auto sq = Schedule::example34({1, 4}, 4, 2, 2.0);
    auto q = sq.at(6);
    CHECK(36 * std::exp(2 * q.a - 8 * q.b) == doctest::Approx(2.0));
    CHECK(q.a + 8 * q.b == doctest::Approx(0.0).scale(1.0));

    CHECK_THROWS_AS(Schedule::example34({1, 0}, 2, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::example34(kSingleLine, 2, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(s.at(1), std::invalid_argument);
}

TEST_CASE("drifted targets")
{
    auto s = Schedule::example34(kSingleLine, 2, 1, 1.0, 0.5);
    CHECK(s.target_mean(16) == doctest::Approx(4.0));
    auto p = s.at(16);
    CHECK(16 * std::exp(2 * p.a - 4 * p.b) == doctest::Approx(4.0));
    CHECK(std::abs(p.homogeneity_residual) < 1e-12);
}

TEST_CASE("fixed and custom pair potentials")
{
    auto fixed = Schedule::fixed_b(kSingleLine, 2, 1, 1.0, 0.1);
    CHECK(fixed.at(8).a == doctest::Approx(-0.8397207708399179));
    CHECK(fixed.at(8).b == 0.1);

    auto pure = Schedule::fixed_b(kSingleLine, 2, 1, 3.0, 0.0);
    CHECK(pure.at(12).a == doctest::Approx(std::log(3.0 / 12.0) / 2));

    auto slow = Schedule::custom_b(kSingleLine, 2, 1, 1.0, [](int n) { return 0.1 * std::sqrt(std::log(n)); });
    for (int n : {8, 16, 32}) {
        auto p = slow.at(n);
        CHECK(p.b == doctest::Approx(0.1 * std::sqrt(std::log(n))));
        CHECK(p.a == doctest::Approx((std::log(1.0 / n) + 4 * p.b) / 2));
        CHECK(std::abs(p.homogeneity_residual) < 1e-12);
    }
    auto pattern = LocalPattern(kLine, 1, {{0}});
    std::vector<int> grid{8, 16, 32, 64};
    CHECK(check_hypotheses(slow, pattern, grid).h1_trend);

    CHECK_THROWS_AS(Schedule::fixed_b(kSingleLine, 2, 1, 1.0, -0.1), std::invalid_argument);
    auto bad = Schedule::custom_b(kSingleLine, 2, 1, 1.0, [](int) { return -1.0; });
    CHECK_THROWS_AS(bad.at(8), std::invalid_argument);
}

TEST_CASE("constant schedules are not calibrated")
{
    auto c = Schedule::constant(kSingleLine, 2, 1, -1.0, 0.2);
    auto p = c.at(10);
    CHECK(p.a == -1.0);
    CHECK(p.b == 0.2);
    CHECK(std::abs(p.homogeneity_residual) > 0.1);
    auto pattern = LocalPattern(kLine, 1, {{0}});
    std::vector<int> grid{8, 10};
    CHECK_FALSE(check_hypotheses(c, pattern, grid).homogeneity_holds);
}

TEST_CASE("hypothesis report")
{
    auto pattern = LocalPattern(kLine, 1, {{0}});
    auto s = Schedule::example34(kSingleLine, 2, 1, 1.0);
    std::vector<int> grid{8, 12, 16, 20, 40};
    auto report = check_hypotheses(s, pattern, grid);
    REQUIRE(report.rows.size() == 5);
    CHECK(report.h1_trend);
    CHECK(report.homogeneity_holds);
    CHECK(report.out_of_regime.empty());
    for (const auto& row : report.rows) {
        const double a = row.point.a;
        const double b = row.point.b;
        CHECK(row.h2_condition);
        CHECK(row.bounds_hold);
        CHECK(row.a_plus_vb == doctest::Approx(a + 2 * b));
        CHECK(row.a_plus_2vb == doctest::Approx(0.0).scale(1.0));
        CHECK(row.log_delta == doctest::Approx(2 * a - 4 * b));
        REQUIRE(row.log_theta.has_value());
        CHECK(*row.log_theta == doctest::Approx(2 * a));
        CHECK(row.log_m == doctest::Approx(std::max(row.log_delta, *row.log_theta)));
    }
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].log_m < report.rows[i - 1].log_m);
    }

    std::vector<int> unsorted{12, 8};
    CHECK_THROWS_AS(check_hypotheses(s, pattern, unsorted), std::invalid_argument);
    std::vector<int> tiny{2, 8};
    CHECK_THROWS_AS(check_hypotheses(s, pattern, tiny), std::invalid_argument);
}

TEST_CASE("targets at the torus volume leave the regime")
{
    auto pattern = LocalPattern(kLine, 1, {{0}});
    auto s = Schedule::example34(kSingleLine, 2, 1, 10.0);
    std::vector<int> grid{8, 10, 12};
    auto report = check_hypotheses(s, pattern, grid);
    CHECK(report.out_of_regime == std::vector<int>{8, 10});
    CHECK_FALSE(s.at(10).in_regime);
    CHECK(s.at(12).in_regime);
}

TEST_CASE("closure constants")
{
    auto line = build_lattice(10, 1, NormOrder::finite(1), 1);
    auto b = ball(line, 0, 1);
    CHECK(h2_constant_log2(b.members, line) == 5);
    std::vector<Vertex> one{4};
    CHECK(h2_constant_log2(one, line) == 1 + line.degree());

    auto sq = build_lattice(8, 2, NormOrder::finite(1), 1);
    CHECK(h2_constant_log2(ball(sq, 0, 1).members, sq) == 13);
    std::vector<Vertex> single{9};
    CHECK(h2_constant_log2(single, sq) == 1 + sq.degree());

    auto pattern = LocalPattern(kLine, 1, {{0}});
    CHECK(sandwich_constant_log2(pattern, line) == doctest::Approx(std::log2(352.0)));
    CHECK(log_maximality_constant(pattern, line) == doctest::Approx(std::log(3.0 * 32.0)));
}

TEST_CASE("Stein-Chen right-hand side")
{
    CHECK(stein_chen_rhs(1.0, 1.1, 20.0) == doctest::Approx(0.12642411176571153));
    CHECK(stein_chen_rhs(1e-12, 1e-12, 10.0) == doctest::Approx(2e-12).epsilon(1e-6));

    // Bound dominates the exact distance at n = 10.
    auto line = build_lattice(10, 1, NormOrder::finite(1), 1);
    auto pattern = LocalPattern(kLine, 1, {{0}});
    auto p = Schedule::example34(kSingleLine, 2, 1, 1.0).at(10);
    auto law = exact_law(line, p.potentials(), pattern, CountMode::upper);
    double rhs = stein_chen_rhs(law.mean, law.variance, 10.0);
    double dtv = tv_distance(from_exact(law), poisson_pmf(law.mean));
    CHECK(dtv <= rhs);
    CHECK(dtv > 0.0);
}
