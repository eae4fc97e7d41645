#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/info.hpp"
#include "wiretap/scheme.hpp"

namespace wiretap {

// Cap on enumerated joint configurations; enumeration aborts before
// exceeding it.
struct EnumerationBudget {
  std::uint64_t max_terms = 100000000ull;
};

struct KeyStats {
  double key_entropy_bits = 0.0;        // H(K_j | C)
  double key_block_leakage_bits = 0.0;  // I(K_j; Z(j) | C)
  double key_chain_leakage_bits = 0.0;  // I(K_j; Z^j | C)
};

struct OracleReport {
  double exact_pe = 0.0;
  double leakage_bits_per_symbol = 0.0;  // I(M_2..b; Z^b | C) / ((b-1) n)
  std::vector<KeyStats> key_stats;       // per j = 1..b-1
  bool crosscheck_ok = false;
};

namespace oracle_detail {

inline void charge_budget(std::uint64_t terms, const EnumerationBudget& budget,
                          const char* what) {
  if (terms > budget.max_terms)
    throw resource_error(std::string(what) + " needs " + std::to_string(terms) +
                         " enumerated terms; raise the budget to at least " +
                         std::to_string(terms));
}

inline std::uint64_t mul_u64(std::uint64_t a, std::uint64_t b, const char* what) {
  if (a != 0 && b > UINT64_MAX / a)
    throw resource_error(std::string(what) + ": enumeration size overflows");
  return a * b;
}

inline std::uint64_t pow_u64(std::uint64_t base, int exp, const char* what) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r = mul_u64(r, base, what);
  return r;
}

// All length-n sequences over an alphabet, addressed by index
// (most-significant symbol first).
struct SequenceSpace {
  int n = 0;
  int alphabet = 0;
  std::uint64_t count = 0;

  SequenceSpace(int n_, int alphabet_, const char* what = "sequence space")
      : n(n_), alphabet(alphabet_), count(pow_u64(alphabet_, n_, what)) {}

  void decompose(std::uint64_t idx, std::vector<std::uint16_t>& out) const {
    out.resize(static_cast<std::size_t>(n));
    for (int i = n; i-- > 0;) {
      out[i] = static_cast<std::uint16_t>(idx % alphabet);
      idx /= alphabet;
    }
  }
};

inline double iid_prob(std::span<const std::uint16_t> seq, std::span<const double> pmf) {
  double p = 1.0;
  for (auto sym : seq) p *= pmf[sym];
  return p;
}

// Per-symbol output tables for a strategy against a channel:
// out[v][s][y] = p(y|v,s), eav[v][s][z] = p(z|v,s).
struct SymbolTables {
  int nv = 0, ns = 0, ny = 0, nz = 0;
  std::vector<double> out, eav;

  SymbolTables(const ChannelWithState& ch, const ShannonStrategy& st)
      : nv(st.v_size), ns(ch.s.size), ny(ch.y.size), nz(ch.z.size) {
    out.assign(static_cast<std::size_t>(nv) * ns * ny, 0.0);
    eav.assign(static_cast<std::size_t>(nv) * ns * nz, 0.0);
    for (int v = 0; v < nv; ++v)
      for (int s = 0; s < ns; ++s)
        for (int x = 0; x < ch.x.size; ++x) {
          const double px = st.x_slice(v, s)[x];
          const auto slice = ch.yz_slice(s, x);
          for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
              out[(static_cast<std::size_t>(v) * ns + s) * ny + y] +=
                  px * slice[y * nz + z];
              eav[(static_cast<std::size_t>(v) * ns + s) * nz + z] +=
                  px * slice[y * nz + z];
            }
        }
  }

  double p_y(int v, int s, int y) const {
    return out[(static_cast<std::size_t>(v) * ns + s) * ny + y];
  }
  double p_z(int v, int s, int z) const {
    return eav[(static_cast<std::size_t>(v) * ns + s) * nz + z];
  }
};

inline double sequence_output_prob(const ShannonStrategy& st, const SymbolTables& tabs,
                                   std::span<const std::uint16_t> u_seq,
                                   std::span<const std::uint16_t> s_seq,
                                   std::span<const std::uint16_t> y_seq) {
  double p = 1.0;
  for (std::size_t i = 0; i < u_seq.size(); ++i)
    p *= tabs.p_y(st.v_of(u_seq[i], s_seq[i]), s_seq[i], y_seq[i]);
  return p;
}

// Eavesdropper product distribution over all |Z|^n sequences for one
// (codeword, state sequence) pair.
inline void eavesdropper_product(const ShannonStrategy& st, const SymbolTables& tabs,
                                 std::span<const std::uint16_t> u_seq,
                                 std::span<const std::uint16_t> s_seq,
                                 std::vector<double>& out) {
  out.assign(1, 1.0);
  std::vector<double> next;
  for (std::size_t i = 0; i < u_seq.size(); ++i) {
    const int v = st.v_of(u_seq[i], s_seq[i]);
    next.assign(out.size() * tabs.nz, 0.0);
    for (std::size_t a = 0; a < out.size(); ++a)
      for (int z = 0; z < tabs.nz; ++z)
        next[a * tabs.nz + z] = out[a] * tabs.p_z(v, s_seq[i], z);
    out.swap(next);
  }
}

// Distribution of the key index induced by the state process and a binning.
inline std::vector<double> key_pmf(const ChannelWithState& ch, const SchemeConfig& cfg,
                                   const KeyBinning& kb, const EnumerationBudget& budget) {
  SequenceSpace space(cfg.n, ch.s.size, "key pmf");
  charge_budget(space.count, budget, "key pmf");
  std::vector<double> pmf(static_cast<std::size_t>(kb.bins), 0.0);
  std::vector<std::uint16_t> seq;
  for (std::uint64_t i = 0; i < space.count; ++i) {
    space.decompose(i, seq);
    pmf[kb.bin_of(seq)] += iid_prob(seq, ch.p_s);
  }
  return pmf;
}

// Transmission contexts: for Case 2 the decoder restricts attention to the
// key-indexed bin, so the error probability is a mixture over the bin part
// of the key; Cases 1 and 3 have a single context covering all codewords.
struct Context {
  std::uint64_t begin = 0, end = 0;
  double weight = 1.0;
};

inline std::vector<Context> decode_contexts(const ChannelWithState& ch,
                                            const SchemeConfig& cfg,
                                            const MessageCodebook& cb, const KeyBinning& kb,
                                            const EnumerationBudget& budget) {
  if (cfg.scheme_case != SchemeCase::Case2)
    return {Context{0, cb.total(), 1.0}};
  const auto pmf = key_pmf(ch, cfg, kb, budget);
  const std::uint64_t nd = std::uint64_t{1} << cfg.log2_keyd;
  std::vector<Context> ctx(static_cast<std::size_t>(nd));
  for (std::uint64_t kd = 0; kd < nd; ++kd)
    ctx[static_cast<std::size_t>(kd)] = {cb.bin_begin(kd), cb.bin_begin(kd) + cb.bin_size(), 0.0};
  for (std::uint64_t k = 0; k < kb.bins; ++k)
    ctx[static_cast<std::size_t>(key_part_d(k, cfg))].weight += pmf[static_cast<std::size_t>(k)];
  return ctx;
}

inline double mutual_information_of_table(std::span<const double> table,
                                          std::size_t rows, std::size_t cols) {
  std::vector<double> row(rows, 0.0), col(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      row[r] += table[r * cols + c];
      col[c] += table[r * cols + c];
    }
  const double i = entropy_of_table(row) + entropy_of_table(col) -
                   entropy_of_table(table);
  return clamp_information(i, "enumerated mutual information");
}

}  // namespace oracle_detail

// Exact probability that a message block decodes wrong under the realized
// codebook and binning, by full enumeration of states and channel outputs.
// Iterates outputs first and classifies the unique-typicality decision once
// per (state, output) pair.
inline double exact_error_probability(const ChannelWithState& ch, const SchemeConfig& cfg,
                                      const MessageCodebook& cb, const KeyBinning& kb,
                                      const ShannonStrategy& st,
                                      const EnumerationBudget& budget = {}) {
  validate_scheme_strategy(ch, cfg, st);
  using namespace oracle_detail;
  const SymbolTables tabs(ch, st);
  const JointPmf design = design_joint_usy(ch, st);
  const auto contexts = decode_contexts(ch, cfg, cb, kb, budget);
  SequenceSpace s_space(cfg.n, ch.s.size, "error probability");
  SequenceSpace y_space(cfg.n, ch.y.size, "error probability");
  {
    std::uint64_t terms = 0;
    for (const auto& c : contexts) terms += (c.end - c.begin) * s_space.count * y_space.count;
    charge_budget(terms, budget, "exact error probability");
  }
  detail::TypicalityScanner scan(design, cfg.n, cfg.epsilon);
  double correct = 0.0;
  std::vector<std::uint16_t> s_seq, y_seq;
  for (const auto& c : contexts) {
    if (c.weight == 0.0) continue;
    const double inv_cands = 1.0 / static_cast<double>(c.end - c.begin);
    for (std::uint64_t si = 0; si < s_space.count; ++si) {
      s_space.decompose(si, s_seq);
      const double ps = iid_prob(s_seq, ch.p_s);
      if (ps == 0.0) continue;
      for (std::uint64_t yi = 0; yi < y_space.count; ++yi) {
        y_space.decompose(yi, y_seq);
        std::optional<std::uint64_t> hit;
        bool ambiguous = false;
        for (std::uint64_t l = c.begin; l < c.end && !ambiguous; ++l)
          if (scan.typical(cb.sequence(l), s_seq, y_seq)) {
            if (hit) ambiguous = true;
            else hit = l;
          }
        if (!hit || ambiguous) continue;  // every transmitted codeword errs
        // Correct decoding happens exactly when the transmitted codeword
        // shares (bin, sub-bin) with the unique hit.
        const std::uint64_t first =
            cb.compose(cb.bin_of(*hit), cb.subbin_of(*hit), 0);
        double p_same = 0.0;
        for (std::uint64_t l = first; l < first + cb.rest_count(); ++l)
          p_same += sequence_output_prob(st, tabs, cb.sequence(l), s_seq, y_seq);
        correct += c.weight * ps * inv_cands * p_same;
      }
    }
  }
  return 1.0 - correct;
}

// Exact session leakage I(M_2..b; Z^b | C) in bits per transmitted symbol of
// the message-bearing blocks. State-first enumeration with per-block product
// distributions.
inline double exact_leakage(const ChannelWithState& ch, const SchemeConfig& cfg,
                            const MessageCodebook& cb, const KeyBinning& kb,
                            const ShannonStrategy& st, const EnumerationBudget& budget = {}) {
  validate_scheme_strategy(ch, cfg, st);
  using namespace oracle_detail;
  const SymbolTables tabs(ch, st);
  SequenceSpace s_space(cfg.n, ch.s.size, "leakage");
  const std::uint64_t z_block = pow_u64(ch.z.size, cfg.n, "leakage");
  const std::uint64_t z_total = pow_u64(z_block, cfg.b, "leakage");
  const std::uint64_t messages = cfg.message_count();
  const std::uint64_t m_rows = pow_u64(messages, cfg.b - 1, "leakage");
  {
    std::uint64_t paths = mul_u64(s_space.count, cb.total(), "leakage");
    for (int j = 2; j <= cfg.b; ++j)
      paths = mul_u64(paths, mul_u64(s_space.count, cb.rest_count(), "leakage"),
                      "leakage");
    charge_budget(mul_u64(mul_u64(m_rows, paths, "leakage"), z_total, "leakage"),
                  budget, "exact leakage");
  }
  std::vector<double> table(m_rows * z_total, 0.0);
  std::vector<std::vector<double>> q(static_cast<std::size_t>(cfg.b));
  std::vector<std::uint16_t> s_seq;
  const double inv_m = 1.0 / static_cast<double>(m_rows);

  // Accumulates the outer product of the per-block z-distributions.
  auto deposit = [&](std::uint64_t m_row, double weight) {
    const std::size_t base = static_cast<std::size_t>(m_row * z_total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.b), 0);
    std::size_t flat = 0;
    while (true) {
      double p = weight;
      for (int j = 0; j < cfg.b; ++j) p *= q[j][idx[j]];
      table[base + flat] += p;
      int j = cfg.b;
      while (j-- > 0) {
        if (++idx[j] < q[j].size()) break;
        idx[j] = 0;
      }
      ++flat;
      if (j < 0) break;
    }
  };

  std::function<void(int, std::uint64_t, std::uint64_t, double)> walk =
      [&](int j, std::uint64_t m_row, std::uint64_t key_prev, double weight) {
        if (j > cfg.b) {
          deposit(m_row, weight);
          return;
        }
        for (std::uint64_t si = 0; si < s_space.count; ++si) {
          s_space.decompose(si, s_seq);
          const double ps = iid_prob(s_seq, ch.p_s);
          if (ps == 0.0) continue;
          const std::uint64_t key_j = kb.bin_of(s_seq);
          if (j == 1) {
            const double w_l = 1.0 / static_cast<double>(cb.total());
            for (std::uint64_t l = 0; l < cb.total(); ++l) {
              eavesdropper_product(st, tabs, cb.sequence(l), s_seq, q[0]);
              walk(2, m_row, key_j, weight * ps * w_l);
            }
          } else {
            const std::uint64_t m_j =
                (m_row / pow_u64(messages, cfg.b - j, "leakage")) % messages;
            const double w_r = 1.0 / static_cast<double>(cb.rest_count());
            for (std::uint64_t r = 0; r < cb.rest_count(); ++r) {
              const std::uint64_t n_sub = std::uint64_t{1} << cb.subbin_bits;
              std::uint64_t l = 0;
              switch (cfg.scheme_case) {
                case SchemeCase::Case1:
                  l = cb.compose(m_j >> cfg.log2_subbins,
                                 pad_add(m_j & (n_sub - 1), key_prev, n_sub), r);
                  break;
                case SchemeCase::Case2:
                  l = cb.compose(key_part_d(key_prev, cfg),
                                 pad_add(m_j, key_part_m(key_prev, cfg), n_sub), r);
                  break;
                case SchemeCase::Case3:
                  l = cb.compose(0, pad_add(m_j, key_prev, n_sub), r);
                  break;
              }
              eavesdropper_product(st, tabs, cb.sequence(l), s_seq,
                                   q[static_cast<std::size_t>(j - 1)]);
              walk(j + 1, m_row, key_j, weight * ps * w_r);
            }
          }
        }
      };

  for (std::uint64_t m_row = 0; m_row < m_rows; ++m_row) walk(1, m_row, 0, inv_m);
  const double mi =
      oracle_detail::mutual_information_of_table(table, m_rows, z_total);
  return mi / (static_cast<double>(cfg.b - 1) * cfg.n);
}

// H(K_j | C): entropy of the key index under the realized binning (the same
// for every block, states being i.i.d.).
inline double exact_key_entropy(const ChannelWithState& ch, const SchemeConfig& cfg,
                                const KeyBinning& kb,
                                const EnumerationBudget& budget = {}) {
  return entropy_of_table(oracle_detail::key_pmf(ch, cfg, kb, budget));
}

// Exact key statistics for block j under the realized binning and codebook:
// H(K_j | C), I(K_j; Z(j) | C) and  I(K_j; Z^j | C).
inline KeyStats key_statistics(const ChannelWithState& ch, const SchemeConfig& cfg,
                               const MessageCodebook& cb, const KeyBinning& kb,
                               const ShannonStrategy& st, int j,
                               const EnumerationBudget& budget = {}) {
  validate_scheme_strategy(ch, cfg, st);
  if (j < 1 || j >= cfg.b)
    throw validation_error("key_statistics: j must lie in [1, b-1]");
  using namespace oracle_detail;
  const SymbolTables tabs(ch, st);
  SequenceSpace s_space(cfg.n, ch.s.size, "key statistics");
  const std::uint64_t z_block = pow_u64(ch.z.size, cfg.n, "key statistics");

  KeyStats stats;
  const auto pmf = key_pmf(ch, cfg, kb, budget);
  stats.key_entropy_bits = entropy_of_table(pmf);

  // Codeword weights in block j: uniform over everything in block 1; for
  // later blocks the pad makes the selection uniform over each context's
  // candidate range, mixed over contexts.
  std::vector<Context> contexts;
  if (j == 1)
    contexts = {Context{0, cb.total(), 1.0}};
  else
    contexts = decode_contexts(ch, cfg, cb, kb, budget);

  {
    std::uint64_t terms = 0;
    for (const auto& c : contexts)
      terms += (c.end - c.begin) * s_space.count * z_block;
    charge_budget(terms, budget, "key block leakage");
  }
  std::vector<double> joint(static_cast<std::size_t>(kb.bins) * z_block, 0.0);
  std::vector<double> q;
  std::vector<std::uint16_t> s_seq;
  for (const auto& c : contexts) {
    if (c.weight == 0.0) continue;
    const double w_l = 1.0 / static_cast<double>(c.end - c.begin);
    for (std::uint64_t si = 0; si < s_space.count; ++si) {
      s_space.decompose(si, s_seq);
      const double ps = iid_prob(s_seq, ch.p_s);
      if (ps == 0.0) continue;
      const std::uint64_t k = kb.bin_of(s_seq);
      for (std::uint64_t l = c.begin; l < c.end; ++l) {
        eavesdropper_product(st, tabs, cb.sequence(l), s_seq, q);
        const double w = c.weight * ps * w_l;
        double* row = joint.data() + static_cast<std::size_t>(k) * z_block;
        for (std::uint64_t zi = 0; zi < z_block; ++zi) row[zi] += w * q[zi];
      }
    }
  }
  stats.key_block_leakage_bits = mutual_information_of_table(
      joint, static_cast<std::size_t>(kb.bins), static_cast<std::size_t>(z_block));

  // Chain leakage I(K_j; Z^j | C): walk blocks 1..j, message-averaged.
  const std::uint64_t z_chain = pow_u64(z_block, j, "key chain leakage");
  const std::uint64_t messages = cfg.message_count();
  {
    std::uint64_t paths = mul_u64(s_space.count, cb.total(), "key chain leakage");
    for (int t = 2; t <= j; ++t)
      paths = mul_u64(paths,
                      mul_u64(mul_u64(s_space.count, cb.rest_count(), "key chain leakage"),
                              messages, "key chain leakage"),
                      "key chain leakage");
    charge_budget(mul_u64(paths, z_chain, "key chain leakage"), budget,
                  "key chain leakage");
  }
  std::vector<double> chain(static_cast<std::size_t>(kb.bins) * z_chain, 0.0);
  std::vector<std::vector<double>> qs(static_cast<std::size_t>(j));
  auto deposit = [&](std::uint64_t key_j, double weight) {
    double* row = chain.data() + static_cast<std::size_t>(key_j) * z_chain;
    std::vector<std::size_t> idx(static_cast<std::size_t>(j), 0);
    std::size_t flat = 0;
    while (true) {
      double p = weight;
      for (int t = 0; t < j; ++t) p *= qs[t][idx[t]];
      row[flat] += p;
      int t = j;
      while (t-- > 0) {
        if (++idx[t] < qs[t].size()) break;
        idx[t] = 0;
      }
      ++flat;
      if (t < 0) break;
    }
  };
  std::function<void(int, std::uint64_t, double)> walk = [&](int t, std::uint64_t key_prev,
                                                             double weight) {
    if (t > j) {
      deposit(key_prev, weight);
      return;
    }
    for (std::uint64_t si = 0; si < s_space.count; ++si) {
      s_space.decompose(si, s_seq);
      const double ps = iid_prob(s_seq, ch.p_s);
      if (ps == 0.0) continue;
      const std::uint64_t key_t = kb.bin_of(s_seq);
      if (t == 1) {
        const double w_l = 1.0 / static_cast<double>(cb.total());
        for (std::uint64_t l = 0; l < cb.total(); ++l) {
          eavesdropper_product(st, tabs, cb.sequence(l), s_seq, qs[0]);
          walk(2, key_t, weight * ps * w_l);
        }
      } else {
        const double w = 1.0 / static_cast<double>(messages * cb.rest_count());
        const std::uint64_t n_sub = std::uint64_t{1} << cb.subbin_bits;
        for (std::uint64_t m = 0; m < messages; ++m)
          for (std::uint64_t r = 0; r < cb.rest_count(); ++r) {
            std::uint64_t l = 0;
            switch (cfg.scheme_case) {
              case SchemeCase::Case1:
                l = cb.compose(m >> cfg.log2_subbins,
                               pad_add(m & (n_sub - 1), key_prev, n_sub), r);
                break;
              case SchemeCase::Case2:
                l = cb.compose(key_part_d(key_prev, cfg),
                               pad_add(m, key_part_m(key_prev, cfg), n_sub), r);
                break;
              case SchemeCase::Case3:
                l = cb.compose(0, pad_add(m, key_prev, n_sub), r);
                break;
            }
            eavesdropper_product(st, tabs, cb.sequence(l), s_seq,
                                 qs[static_cast<std::size_t>(t - 1)]);
            walk(t + 1, key_t, weight * ps * w);
          }
      }
    }
  };
  walk(1, 0, 1.0);
  stats.key_chain_leakage_bits = mutual_information_of_table(
      chain, static_cast<std::size_t>(kb.bins), static_cast<std::size_t>(z_chain));
  return stats;
}

namespace oracle_detail {

// Second, independently structured enumerators (codeword-first iteration,
// generic typicality machinery) used only to cross-check the primary ones.

inline double exact_error_probability_alt(const ChannelWithState& ch,
                                          const SchemeConfig& cfg,
                                          const MessageCodebook& cb, const KeyBinning& kb,
                                          const ShannonStrategy& st,
                                          const EnumerationBudget& budget) {
  const SymbolTables tabs(ch, st);
  const JointPmf design = design_joint_usy(ch, st);
  const auto contexts = decode_contexts(ch, cfg, cb, kb, budget);
  SequenceSpace s_space(cfg.n, ch.s.size, "error probability (alt)");
  SequenceSpace y_space(cfg.n, ch.y.size, "error probability (alt)");
  {
    std::uint64_t terms = 0;
    for (const auto& c : contexts)
      terms += (c.end - c.begin) * (c.end - c.begin) * s_space.count * y_space.count;
    charge_budget(terms, budget, "exact error probability (alt)");
  }
  double pe = 0.0;
  std::vector<std::uint16_t> s_seq, y_seq;
  for (const auto& c : contexts) {
    if (c.weight == 0.0) continue;
    const double inv_cands = 1.0 / static_cast<double>(c.end - c.begin);
    for (std::uint64_t l = c.begin; l < c.end; ++l) {
      for (std::uint64_t si = 0; si < s_space.count; ++si) {
        s_space.decompose(si, s_seq);
        const double ps = iid_prob(s_seq, ch.p_s);
        if (ps == 0.0) continue;
        for (std::uint64_t yi = 0; yi < y_space.count; ++yi) {
          y_space.decompose(yi, y_seq);
          const double py = sequence_output_prob(st, tabs, cb.sequence(l), s_seq, y_seq);
          if (py == 0.0) continue;
          std::optional<std::uint64_t> hit;
          bool ambiguous = false;
          for (std::uint64_t cand = c.begin; cand < c.end && !ambiguous; ++cand) {
            const auto u_seq = cb.sequence(cand);
            const bool typ = typicality_check(
                {std::span<const std::uint16_t>(u_seq),
                 std::span<const std::uint16_t>(s_seq),
                 std::span<const std::uint16_t>(y_seq)},
                design, cfg.epsilon);
            if (typ) {
              if (hit) ambiguous = true;
              else hit = cand;
            }
          }
          const bool err = ambiguous || !hit || cb.bin_of(*hit) != cb.bin_of(l) ||
                           cb.subbin_of(*hit) != cb.subbin_of(l);
          if (err) pe += c.weight * ps * inv_cands * py;
        }
      }
    }
  }
  return pe;
}

inline double exact_leakage_alt(const ChannelWithState& ch, const SchemeConfig& cfg,
                                const MessageCodebook& cb, const KeyBinning& kb,
                                const ShannonStrategy& st, const EnumerationBudget& budget) {
  const SymbolTables tabs(ch, st);
  SequenceSpace s_space(cfg.n, ch.s.size, "leakage (alt)");
  SequenceSpace z_space(cfg.n, ch.z.size, "leakage (alt)");
  const std::uint64_t messages = cfg.message_count();
  const std::uint64_t m_rows = pow_u64(messages, cfg.b - 1, "leakage (alt)");
  const std::uint64_t z_total = pow_u64(z_space.count, cfg.b, "leakage (alt)");
  {
    std::uint64_t paths = mul_u64(s_space.count, cb.total(), "leakage (alt)");
    for (int t = 2; t <= cfg.b; ++t)
      paths = mul_u64(paths, mul_u64(s_space.count, cb.rest_count(), "leakage (alt)"),
                      "leakage (alt)");
    charge_budget(mul_u64(mul_u64(m_rows, z_total, "leakage (alt)"), paths,
                          "leakage (alt)"),
                  budget, "exact leakage (alt)");
  }
  std::vector<double> table(m_rows * z_total, 0.0);
  const double inv_m = 1.0 / static_cast<double>(m_rows);
  std::vector<std::vector<std::uint16_t>> z_seqs(static_cast<std::size_t>(cfg.b));
  std::vector<std::uint16_t> s_seq;

  std::function<double(int, std::uint64_t, std::uint64_t)> prob =
      [&](int t, std::uint64_t m_row, std::uint64_t key_prev) -> double {
    if (t > cfg.b) return 1.0;
    double total = 0.0;
    for (std::uint64_t si = 0; si < s_space.count; ++si) {
      s_space.decompose(si, s_seq);
      const double ps = iid_prob(s_seq, ch.p_s);
      if (ps == 0.0) continue;
      const std::uint64_t key_t = kb.bin_of(s_seq);
      const auto& z_seq = z_seqs[static_cast<std::size_t>(t - 1)];
      auto symbol_prob = [&](std::uint64_t l) {
        double p = 1.0;
        const auto u_seq = cb.sequence(l);
        for (int i = 0; i < cfg.n; ++i)
          p *= tabs.p_z(st.v_of(u_seq[i], s_seq[i]), s_seq[i], z_seq[i]);
        return p;
      };
      if (t == 1) {
        for (std::uint64_t l = 0; l < cb.total(); ++l)
          total += ps / static_cast<double>(cb.total()) * symbol_prob(l) *
                   prob(2, m_row, key_t);
      } else {
        const std::uint64_t m_t =
            (m_row / pow_u64(messages, cfg.b - t, "leakage (alt)")) % messages;
        const std::uint64_t n_sub = std::uint64_t{1} << cb.subbin_bits;
        for (std::uint64_t r = 0; r < cb.rest_count(); ++r) {
          std::uint64_t l = 0;
          switch (cfg.scheme_case) {
            case SchemeCase::Case1:
              l = cb.compose(m_t >> cfg.log2_subbins,
                             pad_add(m_t & (n_sub - 1), key_prev, n_sub), r);
              break;
            case SchemeCase::Case2:
              l = cb.compose(key_part_d(key_prev, cfg),
                             pad_add(m_t, key_part_m(key_prev, cfg), n_sub), r);
              break;
            case SchemeCase::Case3:
              l = cb.compose(0, pad_add(m_t, key_prev, n_sub), r);
              break;
          }
          total += ps / static_cast<double>(cb.rest_count()) * symbol_prob(l) *
                   prob(t + 1, m_row, key_t);
        }
      }
    }
    return total;
  };

  for (std::uint64_t zi = 0; zi < z_total; ++zi) {
    std::uint64_t rest = zi;
    for (int t = cfg.b; t-- > 0;) {
      z_space.decompose(rest % z_space.count, z_seqs[static_cast<std::size_t>(t)]);
      rest /= z_space.count;
    }
    for (std::uint64_t m_row = 0; m_row < m_rows; ++m_row)
      table[m_row * z_total + zi] = inv_m * prob(1, m_row, 0);
  }
  const double mi = mutual_information_of_table(table, m_rows, z_total);
  return mi / (static_cast<double>(cfg.b - 1) * cfg.n);
}

}  // namespace oracle_detail

// Recomputes error probability and leakage through the independently
// structured enumerators and checks agreement.
inline bool second_enumerator_crosscheck(const ChannelWithState& ch, const SchemeConfig& cfg,
                                         const MessageCodebook& cb, const KeyBinning& kb,
                                         const ShannonStrategy& st,
                                         const EnumerationBudget& budget = {},
                                         double tol = 1e-10) {
  const double pe = exact_error_probability(ch, cfg, cb, kb, st, budget);
  const double pe_alt = oracle_detail::exact_error_probability_alt(ch, cfg, cb, kb, st, budget);
  const double lk = exact_leakage(ch, cfg, cb, kb, st, budget);
  const double lk_alt = oracle_detail::exact_leakage_alt(ch, cfg, cb, kb, st, budget);
  if (std::abs(pe - pe_alt) > tol)
    throw consistency_error("oracle cross-check failed: P_e " + std::to_string(pe) +
                            " vs " + std::to_string(pe_alt));
  if (std::abs(lk - lk_alt) > tol)
    throw consistency_error("oracle cross-check failed: leakage " + std::to_string(lk) +
                            " vs " + std::to_string(lk_alt));
  return true;
}

// Full oracle run against the code realized from the scheme's master seed
// (the same realization the simulator uses).
inline OracleReport oracle_report(const ChannelWithState& ch, const SchemeConfig& cfg,
                                  const ShannonStrategy& st,
                                  const EnumerationBudget& budget = {}) {
  validate_scheme_strategy(ch, cfg, st);
  const MessageCodebook cb = realize_codebook(cfg, st);
  const KeyBinning kb = realize_binning(cfg);
  OracleReport rep;
  rep.exact_pe = exact_error_probability(ch, cfg, cb, kb, st, budget);
  rep.leakage_bits_per_symbol = exact_leakage(ch, cfg, cb, kb, st, budget);
  for (int j = 1; j < cfg.b; ++j)
    rep.key_stats.push_back(key_statistics(ch, cfg, cb, kb, st, j, budget));
  rep.crosscheck_ok = second_enumerator_crosscheck(ch, cfg, cb, kb, st, budget);
  return rep;
}

}  // namespace wiretap
