#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rae/eff.hpp"
#include "rae/eq.hpp"

using namespace rae;

namespace {

Mechanism fpa(int n, TieBreakPolicy tie) {
  return winner_pays_bid(AllocationRule::highest_bids_win(Environment::single_item(n), tie));
}

}  // namespace

TEST_CASE("best response against fixed bids") {
  Mechanism mech = fpa(2, TieBreakPolicy::from_order({1, 0}));  // ties against agent 0
  BidGrid grid{1.0, 101};
  SUBCASE("outbidding a fixed threshold") {
    BestResponse br = best_response(mech, {0.3}, 0, 1.0, grid);
    CHECK(br.bid == doctest::Approx(0.3));
    CHECK(br.utility == doctest::Approx(0.7));
    CHECK_FALSE(br.attained);  // the tie goes against; 0.7 is a limit
    BestResponse grid_br = best_response_on_grid(mech, {0.3}, 0, 1.0, grid);
    CHECK(grid_br.bid == doctest::Approx(0.31));
    CHECK(grid_br.utility == doctest::Approx(0.69));
  }
  SUBCASE("favorable ties attain the threshold") {
    Mechanism fav = fpa(2, TieBreakPolicy::identity(2));
    BestResponse br = best_response(fav, {0.3}, 0, 1.0, grid);
    CHECK(br.bid == doctest::Approx(0.3));
    CHECK(br.utility == doctest::Approx(0.7));
    CHECK(br.attained);
  }
}

TEST_CASE("best response against interim rules") {
  SUBCASE("equal-revenue shape makes every bid optimal") {
    BestResponse br = best_response(InterimRule::er_shape(), 1.0, PaymentFormat::WinnerPaysBid);
    CHECK(br.bid == doctest::Approx(0.0));  // ties resolve to the lowest bid
    CHECK(br.utility == doctest::Approx(1.0 / kE).epsilon(1e-12));
  }
  SUBCASE("all-pay against the linear rule is worthless") {
    BestResponse br = best_response(InterimRule::linear_bid(), 1.0, PaymentFormat::AllPay);
    CHECK(br.bid == doctest::Approx(0.0));
    CHECK(br.utility == doctest::Approx(0.0));
  }
}

TEST_CASE("regret of the symmetric uniform BNE") {
  const int n = 2;
  BneResult bne = symmetric_bne(ValueDistribution::uniform(0, 1), n,
                                PaymentFormat::WinnerPaysBid, 200);
  // The closed form for two uniform agents is b(v) = v/2.
  for (const auto& [v, b] : bne.profile.table(0))
    CHECK(b == doctest::Approx(v / 2).epsilon(1e-9));
  Mechanism mech = fpa(n, TieBreakPolicy::identity(n));
  RegretReport rep = regret(mech, bne_joint(bne, n), BidGrid{1.0, 201});
  CHECK(rep.max_gap <= 0.02);
}

TEST_CASE("correlated lower-bound play has zero regret") {
  CanonicalExample ex = canonical_example("cor-welfare", 300);
  RegretReport rep = regret(ex.mech, ex.joint, BidGrid{1.0, 101});
  CHECK(rep.max_eps <= 1e-9);
}

TEST_CASE("truthful bidding in a first-price auction has large regret") {
  Mechanism mech = fpa(2, TieBreakPolicy::identity(2));
  JointScenario joint(std::vector<Scenario>{{1.0, {1.0, 0.0}, {1.0, 0.0}}});
  RegretReport rep = regret(mech, joint, BidGrid{1.0, 101});
  CHECK(rep.max_eps > 0.9);
}

TEST_CASE("best-response dynamics") {
  SUBCASE("complete-information first-price auction") {
    Mechanism mech = fpa(2, TieBreakPolicy::identity(2));
    DynamicsResult result = br_dynamics(mech, {1.0, 0.5}, BidGrid{1.0, 101});
    CHECK(result.converged);
    CHECK(result.regret.max_eps <= 0.011);
    JointScenario joint(std::vector<Scenario>{{1.0, {1.0, 0.5}, result.profile}});
    CHECK(expected_welfare(mech, joint) == doctest::Approx(1.0));
  }
  SUBCASE("CA lower-bound instance stays at the inefficient equilibrium") {
    Environment env = Environment::single_minded_ca(3, {{0}, {1}, {2}, {0, 1, 2}});
    Mechanism mech = winner_pays_bid(
        AllocationRule::highest_bids_win(env, TieBreakPolicy::favoring(4, {3})),
        {1.0, 1.0, 1.0, 1.0});
    ValueProfile values{1.0, 1.0, 1.0, 1.0};
    DynamicsOptions opts;
    opts.start = BidProfile{0, 0, 0, 1.0};
    DynamicsResult result = br_dynamics(mech, values, BidGrid{2.0, 201}, opts);
    CHECK(result.converged);
    CHECK(result.regret.max_eps <= 1e-9);
    JointScenario joint(std::vector<Scenario>{{1.0, values, result.profile}});
    double welfare = expected_welfare(mech, joint);
    double opt = optimal_expected_welfare(env, joint);
    CHECK(welfare / opt == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("single agent bids the reserve") {
    Mechanism mech = winner_pays_bid(
        AllocationRule::highest_bids_win(Environment::single_item(1),
                                         TieBreakPolicy::identity(1)),
        {0.5});
    DynamicsResult result = br_dynamics(mech, {1.0}, BidGrid{1.0, 101});
    CHECK(result.converged);
    CHECK(result.profile[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("symmetric BNE oracles") {
  SUBCASE("winner pays bid: b(v) = v/2, revenue 1/3") {
    BneResult bne = symmetric_bne(ValueDistribution::uniform(0, 1), 2,
                                  PaymentFormat::WinnerPaysBid, 2000);
    double rev = symmetric_bne_revenue(bne, 2, PaymentFormat::WinnerPaysBid);
    CHECK(rev == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  }
  SUBCASE("all-pay: b(v) = v^2/2, revenue matches by revenue equivalence") {
    BneResult bne = symmetric_bne(ValueDistribution::uniform(0, 1), 2,
                                  PaymentFormat::AllPay, 2000);
    for (const auto& [v, b] : bne.profile.table(0))
      CHECK(b == doctest::Approx(v * v / 2).epsilon(1e-8));
    double rev = symmetric_bne_revenue(bne, 2, PaymentFormat::AllPay);
    CHECK(rev == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  }
  SUBCASE("degenerate prior flagged, bids zero") {
    BneResult bne = symmetric_bne(ValueDistribution::degenerate(2.0), 2,
                                  PaymentFormat::WinnerPaysBid, 10);
    CHECK(bne.degenerate);
    CHECK(bne.profile.bid_for(0, 2.0) == doctest::Approx(0.0));
  }
  SUBCASE("atoms rejected") {
    CHECK_THROWS_AS(symmetric_bne(ValueDistribution::equal_revenue(10), 2,
                                  PaymentFormat::WinnerPaysBid, 10),
                    input_error);
  }
}

TEST_CASE("canonical example: cor-welfare") {
  CanonicalExample ex = canonical_example("cor-welfare", 2000);
  // Exact piecewise integration: atom at value 1 plus the continuous mean.
  CHECK(ex.expected.at("welfare") ==
        doctest::Approx((kE - 1.0) / kE).epsilon(1e-12));
  CHECK(ex.expected.at("welfare") ==
        doctest::Approx(1.0 / kE + (kE - 2.0) / kE).epsilon(1e-12));
  double disc_welfare = expected_welfare(ex.mech, ex.joint);
  CHECK(disc_welfare == doctest::Approx((kE - 1.0) / kE).epsilon(1e-3));
  CHECK(optimal_expected_welfare(ex.env, ex.joint) == doctest::Approx(1.0));
}

TEST_CASE("canonical example: rev-half") {
  CanonicalExample ex = canonical_example("rev-half", 2000);
  CHECK(std::fabs(expected_revenue(ex.mech, ex.joint) - 1.0) <= 1e-12);
  double opt = myerson_optimal_revenue(ex.env, ex.value_dists);
  CHECK(opt == doctest::Approx(1.99).epsilon(1e-12));
  RegretReport rep = regret(ex.mech, ex.joint, BidGrid{2.0, 101});
  CHECK(rep.max_eps <= 1e-9);
}

TEST_CASE("canonical example: partial-alloc") {
  CanonicalExample ex = canonical_example("partial-alloc", 3000);
  double welfare = expected_welfare(ex.mech, ex.joint);
  CHECK(welfare == doctest::Approx((kE - 1.0) / kE).epsilon(1e-3));
}

TEST_CASE("bid grid shape") {
  BidGrid grid{1.0, 11};
  auto v = grid.values();
  REQUIRE(v.size() == 11);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == doctest::Approx(1.0));
  CHECK(grid.spacing() == doctest::Approx(0.1));
  CHECK_THROWS_AS((BidGrid{1.0, 1}.values()), input_error);
}
