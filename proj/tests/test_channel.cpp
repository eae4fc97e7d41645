#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "wiretap/bounds.hpp"
#include "wiretap/channel.hpp"
#include "wiretap/info.hpp"

using namespace wiretap;

namespace {

constexpr double kOneMinusH01 = 0.5310044064107188;   // 1 - H(0.1)
constexpr double kOneMinus2H01 = 0.06200881282143755;  // 1 - 2 H(0.1)

// Y = X exactly, Z stuck at symbol 0.
ChannelWithState noiseless_y_blind_z(const std::vector<double>& p_s) {
  const std::vector<std::vector<std::vector<double>>> rows(
      p_s.size(), {{1, 0}, {0, 1}});
  return testutil::make_channel(2, 1, p_s, rows);
}

}  // namespace

TEST_CASE("example channel construction") {
  const ChannelWithState ch = example_channel();
  CHECK(entropy_of_table(ch.p_s) == Catch::Approx(kOneMinusH01).margin(1e-9));
  CHECK(ch.p_s[1] == Catch::Approx(0.1205725500128).margin(1e-9));
  CHECK(ch.p_s[1] < 0.5);  // smaller root
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < 2; ++x) {
      double p_z_eq_x = 0.0;
      const auto slice = ch.yz_slice(s, x);
      for (int y = 0; y < 2; ++y) p_z_eq_x += slice[y * 2 + x];
      CHECK(p_z_eq_x == Catch::Approx(1.0).margin(1e-15));
    }
  CHECK(ch.state_independent());
}

TEST_CASE("induce_joint") {
  SECTION("singleton alphabets give a point mass") {
    const auto ch = testutil::make_channel(1, 1, {1.0}, {{{1.0}}});
    const auto pol = make_policy(1, {{1.0}}, {{{{1.0}}}});
    const auto j = induce_joint(ch, pol);
    REQUIRE(j.table().size() == 1);
    CHECK(j.table()[0] == Catch::Approx(1.0).margin(1e-15));
  }
  SECTION("marginal p(s) preserved and I(X;Y) matches on the example channel") {
    const auto ch = example_channel();
    const auto pol = testutil::uniform_identity_policy();
    const auto j = induce_joint(ch, pol);
    const auto ms = j.marginalize({"S"});
    CHECK(ms.table()[0] == Catch::Approx(ch.p_s[0]).margin(1e-12));
    CHECK(ms.table()[1] == Catch::Approx(ch.p_s[1]).margin(1e-12));
    CHECK(j.mutual_information({"X"}, {"Y"}) ==
          Catch::Approx(kOneMinusH01).margin(1e-9));
    // I(V;Z|S) = H(X|S) = 1 for this joint
    CHECK(j.conditional_mutual_information({"V"}, {"Z"}, {"S"}) ==
          Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("dimension mismatch is rejected") {
    const auto ch = example_channel();
    const auto pol = make_policy(1, {{1.0}}, {{{{1.0}}}});
    CHECK_THROWS_AS(induce_joint(ch, pol), validation_error);
  }
}

TEST_CASE("rate_csi_1_value") {
  SECTION("example channel at the uniform identity policy") {
    CHECK(rate_csi_1_value(example_channel(), testutil::uniform_identity_policy()) ==
          Catch::Approx(kOneMinus2H01).margin(1e-9));
  }
  SECTION("symmetric eavesdropper with |S| = 1") {
    // Z = Y = BSC(0.2)(X), no state.
    const auto ch = testutil::make_channel(
        2, 2, {1.0},
        {{{0.8, 0.0, 0.0, 0.2}, {0.2, 0.0, 0.0, 0.8}}});
    const auto pol = make_independent_policy(1, 2, {0.5, 0.5},
                                             {{{{1, 0}}}, {{{0, 1}}}});
    CHECK(rate_csi_1_value(ch, pol) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("noiseless legitimate channel, blind eavesdropper") {
    const auto ch = noiseless_y_blind_z({0.5, 0.5});
    const auto pol = make_independent_policy(2, 2, {0.5, 0.5},
                                             {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}});
    CHECK(rate_csi_1_value(ch, pol) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("rate_csi_2_value") {
  SECTION("example channel at the uniform identity policy") {
    CHECK(rate_csi_2_value(example_channel(), testutil::uniform_identity_policy()) ==
          Catch::Approx(kOneMinusH01).margin(1e-9));
  }
  SECTION("deterministic state gives zero") {
    auto ch = example_channel();
    ch.p_s = {1.0, 0.0};
    CHECK(rate_csi_2_value(ch, testutil::uniform_identity_policy()) ==
          Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("blind eavesdropper, noiseless legitimate channel") {
    const auto ch = noiseless_y_blind_z({0.5, 0.5});
    const auto pol = make_independent_policy(2, 2, {0.5, 0.5},
                                             {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}});
    CHECK(rate_csi_2_value(ch, pol) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("requires the independent-V branch") {
    auto pol = testutil::uniform_identity_policy();
    pol.independent_v = false;
    CHECK_THROWS_AS(rate_csi_2_value(example_channel(), pol), validation_error);
  }
}

TEST_CASE("liu_chen_value") {
  SECTION("constant auxiliary gives zero") {
    const auto ch = example_channel();
    NoncausalPolicy nc;
    nc.u = {"U", 1};
    nc.s_size = 2;
    nc.x_size = 2;
    nc.p_u_given_s = {1.0, 1.0};
    nc.p_x_given_us = {0.5, 0.5, 0.5, 0.5};
    CHECK(liu_chen_value(ch, nc) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("embedded example policy reproduces the first branch") {
    const auto ch = example_channel();
    const auto pol = testutil::uniform_identity_policy();
    const auto nc = embed_policy(pol);
    CHECK(liu_chen_value(ch, nc) == Catch::Approx(kOneMinus2H01).margin(1e-9));
    CHECK(liu_chen_value(ch, nc) ==
          Catch::Approx(rate_csi_1_value(ch, pol)).margin(1e-10));
  }
  SECTION("degraded binary pair with no state") {
    const auto ch = testutil::bsc_pair_channel(0.1, 0.2, {1.0});
    NoncausalPolicy nc;
    nc.u = {"U", 2};
    nc.s_size = 1;
    nc.x_size = 2;
    nc.p_u_given_s = {0.5, 0.5};
    nc.p_x_given_us = {1.0, 0.0, 0.0, 1.0};
    const double expected = binary_entropy(0.2) - binary_entropy(0.1);
    CHECK(expected == Catch::Approx(0.2529325012980811).margin(1e-12));
    CHECK(liu_chen_value(ch, nc) == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("embed_policy") {
  SECTION("singleton embedding is the identity") {
    const auto pol = make_policy(1, {{1.0}}, {{{{1.0}}}});
    const auto nc = embed_policy(pol);
    CHECK(nc.u.size == 1);
    CHECK(nc.p_u_given_s == std::vector<double>{1.0});
  }
  SECTION("example policy satisfies H(S|Z,U) = 0") {
    const auto ch = example_channel();
    const auto nc = embed_policy(testutil::uniform_identity_policy());
    const auto j = induce_noncausal_joint(ch, nc);
    CHECK(j.conditional_entropy({"S"}, {"Z", "U"}) <= 1e-12);
  }
  SECTION("equivalence with the first branch on random policies") {
    Rng rng(777);
    for (int trial = 0; trial < 200; ++trial) {
      const int nv = 2 + static_cast<int>(rng.next_below(2));
      const int ns = 2 + static_cast<int>(rng.next_below(2));
      const int nx = 2 + static_cast<int>(rng.next_below(2));
      const int ny = 2 + static_cast<int>(rng.next_below(2));
      const int nz = 2 + static_cast<int>(rng.next_below(2));
      const auto ch = testutil::random_channel(rng, nx, ns, ny, nz);
      const auto pol = testutil::random_policy(rng, nv, ns, nx);
      const auto nc = embed_policy(pol);
      CHECK(liu_chen_value(ch, nc) ==
            Catch::Approx(rate_csi_1_value(ch, pol)).margin(1e-10));
      const auto j = induce_noncausal_joint(ch, nc);
      CHECK(j.conditional_entropy({"S"}, {"Z", "U"}) <= 1e-12);
    }
  }
}

TEST_CASE("shannon_strategy_value") {
  const auto ch = example_channel();
  SECTION("constant U gives zero") {
    ShannonStrategy st;
    st.u = {"U", 1};
    st.s_size = 2;
    st.v_size = 1;
    st.x_size = 2;
    st.p_u = {1.0};
    st.v_of_us = {0, 0};
    st.p_x_given_vs = {0.5, 0.5, 0.5, 0.5};
    st.validate();
    CHECK(shannon_strategy_value(ch, st) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("identity strategy matches the first branch on the example channel") {
    const auto st = make_identity_strategy(2, {0.5, 0.5});
    CHECK(shannon_strategy_value(ch, st) ==
          Catch::Approx(kOneMinus2H01).margin(1e-9));
  }
  SECTION("collapse equivalence on random strategies") {
    Rng rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
      const int nu = 2 + static_cast<int>(rng.next_below(2));
      const int nv = 2 + static_cast<int>(rng.next_below(2));
      const auto chr = testutil::random_channel(rng, 2, 2, 2, 2);
      const auto st = testutil::random_strategy(rng, nu, nv, 2, 2);
      const auto collapsed = collapse_strategy(st);
      CHECK(shannon_strategy_value(chr, st) ==
            Catch::Approx(rate_csi_1_value(chr, collapsed)).margin(1e-10));
    }
  }
  SECTION("no state reduces to the stateless expression") {
    Rng rng(5150);
    const auto chr = testutil::random_channel(rng, 2, 1, 2, 2);
    const auto st = testutil::random_strategy(rng, 2, 2, 1, 2);
    const auto j = induce_strategy_joint(chr, st);
    const double expected =
        std::min(j.mutual_information({"U"}, {"Y"}) - j.mutual_information({"U"}, {"Z"}),
                 j.mutual_information({"U"}, {"Y"}));
    CHECK(shannon_strategy_value(chr, st) == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("upper_bound_value") {
  const auto ch = example_channel();
  SECTION("all-constant chain collapses to zero") {
    AuxChain chain;
    chain.u = {"U", 1};
    chain.v1 = {"V1", 1};
    chain.v2 = {"V2", 1};
    chain.s_size = 2;
    chain.x_size = 2;
    chain.p_u_given_s = {1.0, 1.0};
    chain.p_v1_given_us = {1.0, 1.0};
    chain.p_v2_given_v1s = {1.0, 1.0};
    chain.p_x_given_v2s = {0.5, 0.5, 0.5, 0.5};
    CHECK(upper_bound_value(ch, chain) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("constant U with V1 = V2 = X uniform on the example channel") {
    AuxChain chain;
    chain.u = {"U", 1};
    chain.v1 = {"V1", 2};
    chain.v2 = {"V2", 2};
    chain.s_size = 2;
    chain.x_size = 2;
    chain.p_u_given_s = {1.0, 1.0};
    chain.p_v1_given_us = {0.5, 0.5, 0.5, 0.5};
    // v2 = v1, then x = v2
    chain.p_v2_given_v1s = {1, 0, 1, 0, 0, 1, 0, 1};
    chain.p_x_given_v2s = {1, 0, 1, 0, 0, 1, 0, 1};
    CHECK(upper_bound_value(ch, chain) == Catch::Approx(kOneMinus2H01).margin(1e-9));
  }
  SECTION("useless channel gives zero through the second term") {
    // (Y,Z) independent of X.
    const std::vector<std::vector<std::vector<double>>> rows(
        2, {{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}});
    const auto chu = testutil::make_channel(2, 2, {0.5, 0.5}, rows);
    AuxChain chain;
    chain.u = {"U", 1};
    chain.v1 = {"V1", 2};
    chain.v2 = {"V2", 2};
    chain.s_size = 2;
    chain.x_size = 2;
    chain.p_u_given_s = {1.0, 1.0};
    chain.p_v1_given_us = {0.5, 0.5, 0.5, 0.5};
    chain.p_v2_given_v1s = {1, 0, 1, 0, 0, 1, 0, 1};
    chain.p_x_given_v2s = {1, 0, 1, 0, 0, 1, 0, 1};
    CHECK(upper_bound_value(chu, chain) == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("check_less_noisy certificates") {
  SECTION("blind eavesdropper is always concave") {
    const auto ch = noiseless_y_blind_z({1.0});
    const auto mc = state_independent_slice(ch);
    CHECK(check_less_noisy(mc, 16).concave_on_grid);
  }
  SECTION("identical outputs give the zero function") {
    const auto ch = testutil::make_channel(
        2, 2, {1.0}, {{{0.9, 0, 0, 0.1}, {0.1, 0, 0, 0.9}}});
    // here y and z are wired identically: p(y,z|x) has y == z
    const auto mc = state_independent_slice(ch);
    CHECK(check_less_noisy(mc, 16).concave_on_grid);
  }
  SECTION("the example channel fails toward Y and certifies toward Z") {
    const auto ch = example_channel();
    const auto mc = state_independent_slice(ch);
    // Y less noisy than Z would need I(X;Y) - H(X) concave; the midpoint scan
    // finds a gross violation (f(1/2) = -H(0.1) against a zero chord).
    const auto toward_y = check_less_noisy(mc, 64);
    CHECK_FALSE(toward_y.concave_on_grid);
    CHECK(toward_y.gap > 1e-9);  // first violating pair in lex order
    // Swapping the outputs asks whether Z is less noisy than Y: concave.
    MarginalChannel swapped;
    swapped.x_size = 2;
    swapped.y_size = 2;
    swapped.z_size = 2;
    swapped.p_yz_given_x.assign(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
          swapped.p_yz_given_x[(static_cast<std::size_t>(x) * 2 + z) * 2 + y] =
              mc.slice(x)[y * 2 + z];
    CHECK(check_less_noisy(swapped, 64).concave_on_grid);
  }
  SECTION("state-dependent channels are rejected") {
    auto ch = example_channel();
    ch.p_yz_given_xs[0] = 0.8;
    ch.p_yz_given_xs[2] = 0.2;
    CHECK_THROWS_AS(state_independent_slice(ch), validation_error);
  }
}

TEST_CASE("null-state reduction") {
  Rng rng(404);
  const auto ch = testutil::random_channel(rng, 2, 1, 2, 2);
  const auto pol = testutil::random_policy(rng, 2, 1, 2, true);
  const auto j = induce_joint(ch, pol);
  const double expected =
      std::min(j.mutual_information({"V"}, {"Y"}) - j.mutual_information({"V"}, {"Z"}),
               j.mutual_information({"V"}, {"Y"}));
  CHECK(rate_csi_1_value(ch, pol) == Catch::Approx(expected).margin(1e-10));
  CHECK(rate_csi_2_value(ch, pol) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("fused evaluator agrees with the generic measure path") {
  Rng rng(8888);
  for (int trial = 0; trial < 50; ++trial) {
    const int nv = 2 + static_cast<int>(rng.next_below(2));
    const auto ch = testutil::random_channel(rng, 2, 2, 2, 2);
    const auto pol = testutil::random_policy(rng, nv, 2, 2, trial % 2 == 0);
    const auto j = induce_joint(ch, pol);
    const double csi1_generic = std::min(
        j.conditional_mutual_information({"V"}, {"Y"}, {"S"}) -
            j.conditional_mutual_information({"V"}, {"Z"}, {"S"}) +
            j.conditional_entropy({"S"}, {"Z"}),
        j.conditional_mutual_information({"V"}, {"Y"}, {"S"}));
    CHECK(rate_csi_1_value(ch, pol) == Catch::Approx(csi1_generic).margin(1e-12));
    if (pol.independent_v) {
      const double csi2_generic =
          std::min(j.conditional_entropy({"S"}, {"Z", "V"}),
                   j.conditional_mutual_information({"V"}, {"Y"}, {"S"}));
      CHECK(rate_csi_2_value(ch, pol) == Catch::Approx(csi2_generic).margin(1e-12));
    }
  }
}
