#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "wiretap/bounds.hpp"
#include "wiretap/optimizer.hpp"
#include "wiretap/simplex.hpp"

using namespace wiretap;

namespace {
constexpr double kOneMinusH01 = 0.5310044064107188;
constexpr double kYamamotoValue = 0.35293250129808107;  // H(0.2)-H(0.1)+0.1

ChannelWithState criterion4_channel() {
  const double q = binary_entropy_inverse(0.1);
  return testutil::bsc_pair_channel(0.1, 0.2, {1.0 - q, q});
}
}  // namespace

TEST_CASE("simplex grid enumeration") {
  CHECK(simplex_grid(1, 5) == std::vector<std::vector<double>>{{1.0}});

  const auto g = simplex_grid(2, 2);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == std::vector<double>{0.0, 1.0});
  CHECK(g[1] == std::vector<double>{0.5, 0.5});
  CHECK(g[2] == std::vector<double>{1.0, 0.0});

  CHECK(simplex_grid_size(3, 4) == 15);  // C(6,2)
  CHECK(simplex_grid(3, 4).size() == 15);

  CHECK_THROWS_AS(simplex_grid(4, 4000, /*cap=*/1000), resource_error);
  CHECK_THROWS_AS(simplex_grid_size(0, 4), validation_error);
}

TEST_CASE("maximize_lower_bound finds the key branch on the example channel") {
  SearchConfig cfg;
  cfg.card_v = 2;
  cfg.grid_resolution = 16;
  cfg.refine_rounds = 1;
  cfg.restarts = 1;
  const auto res = maximize_lower_bound(example_channel(), cfg);
  CHECK(res.report.r_csi_2 >= kOneMinusH01 - 1e-9);
  CHECK(res.report.lower_bound == std::max(res.report.r_csi_1, res.report.r_csi_2));
  CHECK(res.report.r_csi_1 <= kOneMinusH01 - 1e-3);  // strict separation
  // Witness consistency: the stored values reproduce exactly.
  CHECK(rate_csi_1_value(example_channel(), res.report.witness_csi_1) == res.csi1.value);
  CHECK(rate_csi_2_value(example_channel(), res.report.witness_csi_2) == res.csi2.value);
  // Dominance over the noncausal bound at the embedded witness.
  REQUIRE(res.report.liu_chen.has_value());
  CHECK(res.report.lower_bound >= *res.report.liu_chen - 1e-10);
  CHECK(res.csi1.evaluations > 0);
}

TEST_CASE("no secrecy when the eavesdropper sees the channel output") {
  // |S| = 1 and Z = Y.
  const auto ch = testutil::make_channel(
      2, 2, {1.0}, {{{0.9, 0, 0, 0.1}, {0.1, 0, 0, 0.9}}});
  SearchConfig cfg;
  cfg.card_v = 2;
  cfg.grid_resolution = 8;
  cfg.refine_rounds = 1;
  const auto res = maximize_lower_bound(ch, cfg);
  CHECK(res.report.lower_bound == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("determinism across worker counts") {
  Rng rng(515);
  const auto ch = testutil::random_channel(rng, 2, 2, 2, 2);
  SearchConfig cfg;
  cfg.card_v = 2;
  cfg.grid_resolution = 6;
  cfg.refine_rounds = 1;
  cfg.restarts = 2;
  cfg.seed = 99;
  const auto a = maximize_lower_bound(ch, cfg, 1);
  const auto b = maximize_lower_bound(ch, cfg, 4);
  CHECK(a.report.r_csi_1 == b.report.r_csi_1);
  CHECK(a.report.r_csi_2 == b.report.r_csi_2);
  CHECK(a.csi1.evaluations == b.csi1.evaluations);
  CHECK(a.report.witness_csi_1.p_v_given_s == b.report.witness_csi_1.p_v_given_s);
  CHECK(a.report.witness_csi_1.p_x_given_vs == b.report.witness_csi_1.p_x_given_vs);
  CHECK(a.report.witness_csi_2.p_v_given_s == b.report.witness_csi_2.p_v_given_s);
}

TEST_CASE("nested grids are monotone at refine_rounds = 0") {
  Rng rng(616);
  for (int trial = 0; trial < 3; ++trial) {
    const auto ch = testutil::random_channel(rng, 2, 2, 2, 2);
    SearchConfig coarse;
    coarse.card_v = 2;
    coarse.grid_resolution = 4;
    coarse.refine_rounds = 0;
    coarse.restarts = 0;
    SearchConfig fine = coarse;
    fine.grid_resolution = 8;
    const auto lo = maximize_lower_bound(ch, coarse);
    const auto hi = maximize_lower_bound(ch, fine);
    CHECK(hi.report.r_csi_1 >= lo.report.r_csi_1 - 1e-12);
    CHECK(hi.report.r_csi_2 >= lo.report.r_csi_2 - 1e-12);
  }
}

TEST_CASE("evaluation cap is enforced up front") {
  SearchConfig cfg;
  cfg.card_v = 4;
  cfg.grid_resolution = 16;
  cfg.eval_cap = 1000;
  CHECK_THROWS_AS(maximize_lower_bound(example_channel(), cfg), resource_error);
}

TEST_CASE("maximize_special_case") {
  SECTION("z-less-noisy value on the example channel") {
    const auto res = z_less_noisy_capacity(example_channel(), 256);
    CHECK(res.value == Catch::Approx(kOneMinusH01).margin(1e-6));
    CHECK(special_objective_value(example_channel(), SpecialCase::ZLessNoisy,
                                  res.witness) == Catch::Approx(res.value).margin(1e-12));
  }
  SECTION("identical outputs collapse the first Thm3 term") {
    // Y = Z = X, S uniform independent: value = min{H(S|Z), I(X;Y|S)} = 1.
    const auto ch = testutil::make_channel(
        2, 2, {0.5, 0.5},
        {{{1, 0, 0, 0}, {0, 0, 0, 1}}, {{1, 0, 0, 0}, {0, 0, 0, 1}}});
    const auto res = less_noisy_capacity(ch, 8);
    CHECK(res.value == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("stateless Thm3 reduces to channel capacity with a blind eavesdropper") {
    const auto ch = testutil::make_channel(
        2, 1, {1.0}, {{{0.9, 0.1}, {0.1, 0.9}}});
    const auto res = less_noisy_capacity(ch, 64);
    CHECK(res.value == Catch::Approx(kOneMinusH01).margin(1e-9));
  }
  SECTION("yamamoto configuration") {
    const auto ch = criterion4_channel();
    const auto res = maximize_special_case(ch, SpecialCase::Yamamoto, 64);
    CHECK(res.value == Catch::Approx(kYamamotoValue).margin(1e-9));
    CHECK(special_objective_value(ch, SpecialCase::Yamamoto, res.witness) ==
          Catch::Approx(res.value).margin(1e-12));
  }
  SECTION("structural preconditions") {
    auto ch = example_channel();
    ch.p_yz_given_xs[0] = 0.8;
    ch.p_yz_given_xs[1] = 0.1;
    ch.p_yz_given_xs[2] = 0.0;
    ch.p_yz_given_xs[3] = 0.1;
    CHECK_THROWS_AS(maximize_special_case(ch, SpecialCase::Yamamoto, 8),
                    validation_error);
    CHECK_THROWS_AS(z_less_noisy_capacity(ch, 8), validation_error);
    CHECK_THROWS_AS(less_noisy_capacity(example_channel(), 1), validation_error);
  }
}

TEST_CASE("theorem-3 consistency on a degraded state-independent channel") {
  const auto ch = criterion4_channel();
  const auto special = less_noisy_capacity(ch, 16);
  SearchConfig cfg;
  cfg.card_v = 2;
  cfg.grid_resolution = 16;
  cfg.refine_rounds = 1;
  const auto general = maximize_lower_bound(ch, cfg);
  CHECK(std::abs(special.value - general.report.lower_bound) <= 2.0 / 16.0);
}

TEST_CASE("tightness classification") {
  SECTION("blind eavesdropper is CaseII") {
    const std::vector<std::vector<std::vector<double>>> rows(
        2, {{1, 0}, {0, 1}});
    const auto ch = testutil::make_channel(2, 1, {0.5, 0.5}, rows);
    SearchConfig cfg;
    cfg.card_v = 2;
    cfg.grid_resolution = 4;
    cfg.refine_rounds = 0;
    const auto res = maximize_lower_bound(ch, cfg);
    CHECK(tightness_classify(ch, res.report, 4) == Tightness::CaseII);
  }
  SECTION("the example channel stays unknown at coarse resolution") {
    const auto ch = example_channel();
    SearchConfig cfg;
    cfg.card_v = 2;
    cfg.grid_resolution = 4;
    cfg.refine_rounds = 0;
    const auto res = maximize_lower_bound(ch, cfg);
    CHECK(tightness_classify(ch, res.report, 4) == Tightness::Unknown);
  }
  SECTION("degraded wiretap with a large key is CaseII") {
    const auto ch = testutil::bsc_pair_channel(0.1, 0.2, {0.5, 0.5});
    SearchConfig cfg;
    cfg.card_v = 2;
    cfg.grid_resolution = 4;
    cfg.refine_rounds = 0;
    const auto res = maximize_lower_bound(ch, cfg);
    CHECK(tightness_classify(ch, res.report, 4) == Tightness::CaseII);
  }
}
