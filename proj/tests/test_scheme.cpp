#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "test_util.hpp"
#include "wiretap/bounds.hpp"
#include "wiretap/scheme.hpp"
#include "wiretap/session.hpp"

using namespace wiretap;

namespace {

SchemeConfig case3_config(int n, int log2_messages, std::uint64_t seed,
                          double epsilon = 0.5) {
  SchemeConfig cfg;
  cfg.scheme_case = SchemeCase::Case3;
  cfg.n = n;
  cfg.b = 2;
  cfg.log2_total = log2_messages;
  cfg.log2_key = log2_messages;
  cfg.epsilon = epsilon;
  cfg.master_seed = seed;
  return cfg;
}

// Y = X and Z = X, deterministic.
ChannelWithState noiseless_channel(const std::vector<double>& p_s) {
  const std::vector<std::vector<std::vector<double>>> rows(
      p_s.size(), {{1, 0, 0, 0}, {0, 0, 0, 1}});
  return testutil::make_channel(2, 2, p_s, rows);
}

}  // namespace

TEST_CASE("scheme config validation") {
  SchemeConfig cfg = case3_config(4, 1, 7);
  CHECK_NOTHROW(cfg.validate());

  SECTION("case 3 requires matching total and key sizes") {
    cfg.log2_key = 2;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
  }
  SECTION("case 1 enforces R1 <= RK") {
    SchemeConfig c1;
    c1.scheme_case = SchemeCase::Case1;
    c1.n = 4;
    c1.b = 2;
    c1.log2_total = 3;
    c1.log2_bins = 1;
    c1.log2_subbins = 2;
    c1.log2_key = 1;  // subbins > key
    c1.master_seed = 1;
    CHECK_THROWS_WITH(c1.validate(),
                      Catch::Matchers::ContainsSubstring("R1 <= RK"));
    c1.log2_key = 2;
    CHECK_NOTHROW(c1.validate());
  }
  SECTION("case 2 couples bins to the key split") {
    SchemeConfig c2;
    c2.scheme_case = SchemeCase::Case2;
    c2.n = 4;
    c2.b = 2;
    c2.log2_total = 2;
    c2.log2_bins = 1;
    c2.log2_keyd = 1;
    c2.log2_subbins = 1;
    c2.log2_key = 2;
    c2.master_seed = 1;
    CHECK_NOTHROW(c2.validate());
    c2.log2_key = 1;  // messages > key/keyd
    CHECK_THROWS_AS(c2.validate(), validation_error);
  }
  SECTION("b must allow at least one message block") {
    cfg.b = 1;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
  }
}

TEST_CASE("generate_codebook") {
  const std::vector<double> uniform = {0.5, 0.5};
  SECTION("single codeword") {
    const auto cfg = case3_config(4, 0, 3);
    const auto cb = generate_codebook(cfg, uniform, 11);
    CHECK(cb.total() == 1);
    CHECK(cb.bin_of(0) == 0);
    CHECK(cb.subbin_of(0) == 0);
  }
  SECTION("deterministic in the seed") {
    const auto cfg = case3_config(4, 2, 3);
    const auto a = generate_codebook(cfg, uniform, 42);
    const auto b = generate_codebook(cfg, uniform, 42);
    const auto c = generate_codebook(cfg, uniform, 43);
    CHECK(a.symbols == b.symbols);
    CHECK(a.symbols != c.symbols);
  }
  SECTION("empirical symbol frequency matches the binomial oracle") {
    SchemeConfig cfg = case3_config(4, 4, 3);
    std::uint64_t ones = 0, draws = 0;
    for (int seed = 0; seed < 1000; ++seed) {
      const auto cb = generate_codebook(cfg, uniform, static_cast<std::uint64_t>(seed));
      for (auto sym : cb.symbols) {
        ones += sym;
        ++draws;
      }
    }
    const double freq = static_cast<double>(ones) / static_cast<double>(draws);
    const double sigma = 0.5 / std::sqrt(static_cast<double>(draws));
    CHECK(std::abs(freq - 0.5) <= 4.0 * sigma);
  }
  SECTION("partition is exact and invertible") {
    SchemeConfig c1;
    c1.scheme_case = SchemeCase::Case1;
    c1.n = 4;
    c1.b = 2;
    c1.log2_total = 4;
    c1.log2_bins = 1;
    c1.log2_subbins = 2;
    c1.log2_key = 2;
    c1.master_seed = 5;
    const auto cb = generate_codebook(c1, uniform, 5);
    CHECK(cb.rest_bits == 1);
    for (std::uint64_t l = 0; l < cb.total(); ++l) {
      const std::uint64_t rest = l & ((std::uint64_t{1} << cb.rest_bits) - 1);
      CHECK(cb.compose(cb.bin_of(l), cb.subbin_of(l), rest) == l);
      CHECK(cb.bin_of(l) < 2);
      CHECK(cb.subbin_of(l) < 4);
    }
  }
}

TEST_CASE("key binning") {
  SECTION("single bin") {
    const KeyBinning kb{123, 1};
    const std::vector<std::uint16_t> seq = {0, 1, 0, 1};
    CHECK(kb.bin_of(seq) == 0);
  }
  SECTION("stable under a fixed seed") {
    const KeyBinning kb{99, 4};
    const std::vector<std::uint16_t> seq = {1, 0, 1, 1, 0, 0, 1, 0};
    const auto first = kb.bin_of(seq);
    CHECK(kb.bin_of(seq) == first);
  }
  SECTION("bin loads match the multinomial oracle") {
    // 256 uniform sequences into 4 bins; exact multinomial probability that
    // every bin lands in [48, 80], then a 3-sigma band over 1000 seeds.
    const int lo = 48, hi = 80;
    double p_all = 0.0;
    const double log_quarter = std::log(0.25);
    for (int c1 = lo; c1 <= hi; ++c1)
      for (int c2 = lo; c2 <= hi; ++c2)
        for (int c3 = lo; c3 <= hi; ++c3) {
          const int c4 = 256 - c1 - c2 - c3;
          if (c4 < lo || c4 > hi) continue;
          const double log_p = testutil::log_factorial(256) -
                               testutil::log_factorial(c1) -
                               testutil::log_factorial(c2) -
                               testutil::log_factorial(c3) -
                               testutil::log_factorial(c4) + 256 * log_quarter;
          p_all += std::exp(log_p);
        }
    int hits = 0;
    std::vector<std::uint16_t> seq(8);
    for (int seed = 0; seed < 1000; ++seed) {
      const KeyBinning kb{static_cast<std::uint64_t>(seed), 4};
      int counts[4] = {0, 0, 0, 0};
      for (int i = 0; i < 256; ++i) {
        for (int b = 0; b < 8; ++b) seq[b] = static_cast<std::uint16_t>((i >> b) & 1);
        ++counts[kb.bin_of(seq)];
      }
      bool ok = true;
      for (int b = 0; b < 4; ++b) ok &= counts[b] >= lo && counts[b] <= hi;
      hits += ok ? 1 : 0;
    }
    const double observed = hits / 1000.0;
    const double sigma = std::sqrt(p_all * (1.0 - p_all) / 1000.0);
    INFO("oracle " << p_all << " observed " << observed);
    CHECK(std::abs(observed - p_all) <= 3.0 * sigma);
    CHECK(observed >= 0.90);
  }
}

TEST_CASE("encode_block") {
  const auto st = make_identity_strategy(2, {0.5, 0.5});
  const auto cfg = case3_config(4, 1, 7);
  const auto cb = realize_codebook(cfg, st);

  SECTION("deterministic strategy maps the codeword straight through") {
    Rng rng(1);
    const std::vector<std::uint16_t> s_seq = {0, 1, 0, 1};
    const auto enc = encode_block(cfg, cb, st, /*m=*/0, /*key=*/0, s_seq, rng);
    const auto cw = cb.sequence(enc.codeword);
    for (int i = 0; i < 4; ++i) CHECK(enc.x_seq[i] == cw[i]);
  }
  SECTION("modular pad indexes the codeword") {
    Rng rng(1);
    const std::vector<std::uint16_t> s_seq = {0, 0, 0, 0};
    const auto enc = encode_block(cfg, cb, st, /*m=*/1, /*key=*/1, s_seq, rng);
    CHECK(enc.codeword == 0);  // (1 + 1) mod 2
  }
  SECTION("state is consumed causally") {
    // Same randomness, two state streams sharing a prefix: identical x prefix.
    for (int t = 1; t < 4; ++t) {
      Rng rng_a(9), rng_b(9);
      std::vector<std::uint16_t> sa = {0, 1, 1, 0};
      std::vector<std::uint16_t> sb = sa;
      for (int i = t; i < 4; ++i) sb[i] = static_cast<std::uint16_t>(1 - sb[i]);
      const auto ea = encode_block(cfg, cb, st, 0, 0, sa, rng_a);
      const auto eb = encode_block(cfg, cb, st, 0, 0, sb, rng_b);
      for (int i = 0; i < t; ++i) CHECK(ea.x_seq[i] == eb.x_seq[i]);
    }
  }
  SECTION("out-of-range inputs are rejected") {
    Rng rng(1);
    const std::vector<std::uint16_t> s_seq = {0, 0, 0, 0};
    CHECK_THROWS_AS(encode_block(cfg, cb, st, 2, 0, s_seq, rng), validation_error);
    CHECK_THROWS_AS(encode_block(cfg, cb, st, 0, 2, s_seq, rng), validation_error);
  }
}

TEST_CASE("typicality_check") {
  SECTION("point-mass joint accepts its own draws and rejects others") {
    const JointPmf joint({{"A", 2}}, {1.0, 0.0});
    const std::vector<std::uint16_t> zeros(10, 0);
    const std::vector<std::uint16_t> with_one = {0, 0, 1, 0, 0, 0, 0, 0, 0, 0};
    CHECK(typicality_check({std::span<const std::uint16_t>(zeros)}, joint, 0.1));
    CHECK_FALSE(typicality_check({std::span<const std::uint16_t>(with_one)}, joint, 0.1));
  }
  SECTION("length mismatch is rejected") {
    const JointPmf joint({{"A", 2}, {"B", 2}}, {0.25, 0.25, 0.25, 0.25});
    const std::vector<std::uint16_t> a(4, 0), b(5, 0);
    CHECK_THROWS_AS(typicality_check({std::span<const std::uint16_t>(a),
                                      std::span<const std::uint16_t>(b)},
                                     joint, 0.1),
                    validation_error);
  }
  SECTION("acceptance rate matches the binomial oracle") {
    const JointPmf joint({{"A", 2}}, {0.5, 0.5});
    // |freq(1) - 1/2| <= 0.2 * 1/2 at n = 100 means #ones in [40, 60].
    const double p_typ = testutil::binomial_interval(100, 0.5, 40, 60);
    Rng rng(7);
    const int trials = 10000;
    int accepted = 0;
    std::vector<std::uint16_t> seq(100);
    for (int t = 0; t < trials; ++t) {
      for (auto& s : seq) s = static_cast<std::uint16_t>(rng.next_below(2));
      accepted += typicality_check({std::span<const std::uint16_t>(seq)}, joint, 0.2);
    }
    const double observed = accepted / static_cast<double>(trials);
    const double sigma = std::sqrt(p_typ * (1.0 - p_typ) / trials);
    CHECK(std::abs(observed - p_typ) <= 2.0 * sigma);
  }
}

TEST_CASE("decode_block") {
  const auto st = make_identity_strategy(2, {0.5, 0.5});
  const auto ch = noiseless_channel({0.5, 0.5});
  const auto design = design_joint_usy(ch, st);
  SchemeConfig cfg = case3_config(2, 1, 7, /*epsilon=*/10.0);

  MessageCodebook cb;
  cb.n = 2;
  cb.symbol_count = 2;
  cb.bin_bits = 0;
  cb.subbin_bits = 1;
  cb.rest_bits = 0;
  cb.symbols = {0, 1, 1, 0};  // two distinct codewords

  SECTION("noiseless channel decodes every message") {
    for (std::uint64_t m = 0; m < 2; ++m)
      for (std::uint64_t key = 0; key < 2; ++key) {
        Rng rng(55);
        const std::vector<std::uint16_t> s_seq = {0, 1};
        const auto enc = encode_block(cfg, cb, st, m, key, s_seq, rng);
        // Y = X exactly.
        const auto decoded =
            decode_block(cfg, cb, key, enc.x_seq, s_seq, design, cfg.epsilon);
        REQUIRE(decoded.has_value());
        CHECK(*decoded == m);
      }
  }
  SECTION("duplicate codewords force an ambiguity error") {
    MessageCodebook dup = cb;
    dup.symbols = {0, 1, 0, 1};
    const std::vector<std::uint16_t> s_seq = {0, 1};
    const std::vector<std::uint16_t> y_seq = {0, 1};
    CHECK_FALSE(decode_block(cfg, dup, 0, y_seq, s_seq, design, cfg.epsilon));
  }
}

TEST_CASE("run_session") {
  const auto ch = noiseless_channel({0.5, 0.5});
  const auto st = make_identity_strategy(2, {0.5, 0.5});

  SECTION("noiseless channel with distinct codewords is error free") {
    SchemeConfig cfg = case3_config(2, 1, /*seed=*/2, /*epsilon=*/10.0);
    REQUIRE(realize_codebook(cfg, st).symbols !=
            std::vector<std::uint16_t>({0, 0, 0, 0}));
    const auto cb = realize_codebook(cfg, st);
    REQUIRE(std::vector<std::uint16_t>(cb.sequence(0).begin(), cb.sequence(0).end()) !=
            std::vector<std::uint16_t>(cb.sequence(1).begin(), cb.sequence(1).end()));
    const auto rep = run_session(ch, cfg, st, 200);
    CHECK(rep.empirical_pe == 0.0);
    CHECK(rep.message_blocks == 200);
  }
  SECTION("same seed reproduces the report; workers do not matter") {
    SchemeConfig cfg = case3_config(4, 1, 77, 0.5);
    const auto a = run_session(example_channel(), cfg, st, 300, 1);
    const auto b = run_session(example_channel(), cfg, st, 300, 4);
    CHECK(a.error_blocks == b.error_blocks);
    CHECK(a.block_errors == b.block_errors);
    CHECK(a.key_histogram == b.key_histogram);
  }
  SECTION("key histogram counts the consumed keys") {
    SchemeConfig cfg = case3_config(4, 1, 8, 0.5);
    cfg.b = 3;
    const auto rep = run_session(example_channel(), cfg, st, 100);
    std::uint64_t total = 0;
    for (auto c : rep.key_histogram) total += c;
    CHECK(total == 100 * 2);  // trials * (b-1)
  }
  SECTION("decoder and encoder agree on every declared key") {
    SchemeConfig cfg = case3_config(4, 1, 21, 0.5);
    const auto kb = realize_binning(cfg);
    SessionTrace trace;
    (void)run_session(example_channel(), cfg, st, 10, 1, &trace);
    REQUIRE(trace.blocks.size() == 2);
    for (const auto& blk : trace.blocks)
      CHECK(kb.bin_of(blk.s_seq) == blk.key_declared);
  }
  SECTION("case 3 rejects non-identity strategies") {
    SchemeConfig cfg = case3_config(4, 1, 7);
    auto bad = make_identity_strategy(2, {0.5, 0.5});
    bad.v_of_us[2] = 0;  // v(u=1, s=0) no longer the identity
    CHECK_THROWS_AS(run_session(example_channel(), cfg, bad, 10), validation_error);
  }
}

TEST_CASE("pad arithmetic is invertible") {
  for (std::uint64_t modulus : {1ull, 2ull, 4ull, 8ull})
    for (std::uint64_t m = 0; m < modulus; ++m)
      for (std::uint64_t k = 0; k < 2 * modulus; ++k)
        CHECK(pad_sub(pad_add(m, k, modulus), k, modulus) == m);
}
