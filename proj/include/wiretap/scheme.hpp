#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/info.hpp"
#include "wiretap/rng.hpp"

namespace wiretap {

enum class SchemeCase { Case1 = 1, Case2 = 2, Case3 = 3 };

// Block-Markov code sizes, all exact powers of two (stored as exponents):
//   total   = codewords in the message codebook
//   bins    = outer bins (Case 1: m0; Case 2 the bin layer is keyd)
//   subbins = sub-bins per bin (Case 1: m1; Case 2: the message layer)
//   key     = key bins of the state binning
//   keyd    = decodability part of the key (Case 2 only)
struct SchemeConfig {
  SchemeCase scheme_case = SchemeCase::Case3;
  int n = 0;  // block length
  int b = 0;  // blocks; b-1 messages are sent
  int log2_total = 0;
  int log2_bins = 0;
  int log2_subbins = 0;
  int log2_key = 0;
  int log2_keyd = 0;
  double epsilon = 0.25;
  std::uint64_t master_seed = 0;
  std::uint64_t trials = 0;

  std::uint64_t total() const { return std::uint64_t{1} << log2_total; }
  std::uint64_t key_count() const { return std::uint64_t{1} << log2_key; }

  int message_bits() const {
    switch (scheme_case) {
      case SchemeCase::Case1: return log2_bins + log2_subbins;
      case SchemeCase::Case2: return log2_subbins;
      case SchemeCase::Case3: return log2_total;
    }
    return 0;
  }
  std::uint64_t message_count() const { return std::uint64_t{1} << message_bits(); }

  void validate() const {
    if (n < 1) throw validation_error("scheme: n must be >= 1");
    if (b < 2) throw validation_error("scheme: b must be >= 2");
    if (log2_total < 0 || log2_bins < 0 || log2_subbins < 0 || log2_key < 0 ||
        log2_keyd < 0)
      throw validation_error("scheme: log2 sizes must be nonnegative");
    if (log2_total > 30) throw validation_error("scheme: total codebook too large");
    if (!(epsilon > 0.0)) throw validation_error("scheme: epsilon must be positive");
    switch (scheme_case) {
      case SchemeCase::Case1:
        if (log2_bins + log2_subbins > log2_total)
          throw validation_error(
              "scheme case 1: bins*subbins must divide total (R0 + R1 <= Rtilde)");
        if (log2_subbins > log2_key)
          throw validation_error(
              "scheme case 1: subbins must not exceed key bins (R1 <= RK)");
        if (log2_keyd != 0)
          throw validation_error("scheme case 1: keyd is unused and must be 0");
        break;
      case SchemeCase::Case2:
        if (log2_bins != log2_keyd)
          throw validation_error(
              "scheme case 2: bins must equal keyd (bins are indexed by the key part)");
        if (log2_keyd + log2_subbins > log2_total)
          throw validation_error(
              "scheme case 2: keyd*messages must not exceed total (R + Rd <= Rtilde)");
        if (log2_subbins > log2_key - log2_keyd)
          throw validation_error(
              "scheme case 2: messages must not exceed key/keyd (R <= RK - Rd)");
        break;
      case SchemeCase::Case3:
        if (log2_total != log2_key)
          throw validation_error("scheme case 3: total must equal key (R = RK)");
        if (log2_bins != 0 || log2_subbins != 0 || log2_keyd != 0)
          throw validation_error(
              "scheme case 3: bins, subbins and keyd are unused and must be 0");
        break;
    }
  }
};

// Codeword list with a bit-field (bin, sub-bin, rest) layout. Every index
// belongs to exactly one (bin, sub-bin) and the inverse maps are exact.
struct MessageCodebook {
  int n = 0;
  int symbol_count = 0;  // codeword alphabet size
  int bin_bits = 0, subbin_bits = 0, rest_bits = 0;
  std::vector<std::uint16_t> symbols;  // [l*n + i]

  std::uint64_t total() const { return std::uint64_t{1} << (bin_bits + subbin_bits + rest_bits); }
  std::span<const std::uint16_t> sequence(std::uint64_t l) const {
    return {symbols.data() + l * static_cast<std::uint64_t>(n),
            static_cast<std::size_t>(n)};
  }
  std::uint64_t bin_of(std::uint64_t l) const { return l >> (subbin_bits + rest_bits); }
  std::uint64_t subbin_of(std::uint64_t l) const {
    return (l >> rest_bits) & ((std::uint64_t{1} << subbin_bits) - 1);
  }
  std::uint64_t compose(std::uint64_t bin, std::uint64_t subbin, std::uint64_t rest) const {
    return (((bin << subbin_bits) | subbin) << rest_bits) | rest;
  }
  std::uint64_t rest_count() const { return std::uint64_t{1} << rest_bits; }
  // Codewords of one bin form a contiguous index range.
  std::uint64_t bin_begin(std::uint64_t bin) const { return bin << (subbin_bits + rest_bits); }
  std::uint64_t bin_size() const { return std::uint64_t{1} << (subbin_bits + rest_bits); }
};

// i.i.d. codewords from p(u), deterministic in the seed. The (bin, sub-bin)
// layout follows the scheme case.
inline MessageCodebook generate_codebook(const SchemeConfig& cfg,
                                         std::span<const double> p_u,
                                         std::uint64_t seed) {
  cfg.validate();
  MessageCodebook cb;
  cb.n = cfg.n;
  cb.symbol_count = static_cast<int>(p_u.size());
  switch (cfg.scheme_case) {
    case SchemeCase::Case1:
      cb.bin_bits = cfg.log2_bins;
      cb.subbin_bits = cfg.log2_subbins;
      break;
    case SchemeCase::Case2:
      cb.bin_bits = cfg.log2_keyd;
      cb.subbin_bits = cfg.log2_subbins;
      break;
    case SchemeCase::Case3:
      cb.bin_bits = 0;
      cb.subbin_bits = cfg.log2_total;
      break;
  }
  cb.rest_bits = cfg.log2_total - cb.bin_bits - cb.subbin_bits;
  const std::uint64_t total = cfg.total();
  cb.symbols.resize(total * static_cast<std::uint64_t>(cfg.n));
  Rng rng(derive_seed(seed, /*stream=*/0xC0DEB00C, 0));
  for (std::uint64_t l = 0; l < total; ++l)
    for (int i = 0; i < cfg.n; ++i)
      cb.symbols[l * cfg.n + i] = static_cast<std::uint16_t>(rng.sample(p_u));
  return cb;
}

// Uniformly random binning of state sequences, realized lazily as a keyed
// hash; a fixed seed fixes the whole partition.
struct KeyBinning {
  std::uint64_t prf_seed = 0;
  std::uint64_t bins = 1;  // power of two

  std::uint64_t bin_of(std::span<const std::uint16_t> s_seq) const {
    return sequence_hash(prf_seed, s_seq) & (bins - 1);
  }
};

inline std::uint64_t key_bin(std::span<const std::uint16_t> s_seq, const KeyBinning& kb) {
  return kb.bin_of(s_seq);
}

// One-time-pad arithmetic on power-of-two index spaces. The key is reduced
// modulo the message modulus; uniformity is preserved because the moduli
// divide.
inline std::uint64_t pad_add(std::uint64_t m, std::uint64_t key, std::uint64_t modulus) {
  return (m + (key & (modulus - 1))) & (modulus - 1);
}
inline std::uint64_t pad_sub(std::uint64_t m, std::uint64_t key, std::uint64_t modulus) {
  return (m + modulus - (key & (modulus - 1))) & (modulus - 1);
}

// Case-2 key split: the top keyd bits select the bin, the next message-width
// bits form the pad.
inline std::uint64_t key_part_d(std::uint64_t key, const SchemeConfig& cfg) {
  return key >> (cfg.log2_key - cfg.log2_keyd);
}
inline std::uint64_t key_part_m(std::uint64_t key, const SchemeConfig& cfg) {
  return (key >> (cfg.log2_key - cfg.log2_keyd - cfg.log2_subbins)) &
         ((std::uint64_t{1} << cfg.log2_subbins) - 1);
}

// Codeword index transmitted for message m under key_prev, plus the
// uniformly random within-sub-bin choice.
inline std::uint64_t select_codeword(const SchemeConfig& cfg, const MessageCodebook& cb,
                                     std::uint64_t m, std::uint64_t key_prev, Rng& rng) {
  if (m >= cfg.message_count()) throw validation_error("encode: message out of range");
  if (key_prev >= cfg.key_count()) throw validation_error("encode: key out of range");
  const std::uint64_t rest = rng.next_below(cb.rest_count());
  const std::uint64_t n_sub = std::uint64_t{1} << cb.subbin_bits;
  switch (cfg.scheme_case) {
    case SchemeCase::Case1: {
      const std::uint64_t m0 = m >> cfg.log2_subbins;
      const std::uint64_t m1 = m & (n_sub - 1);
      return cb.compose(m0, pad_add(m1, key_prev, n_sub), rest);
    }
    case SchemeCase::Case2:
      return cb.compose(key_part_d(key_prev, cfg),
                        pad_add(m, key_part_m(key_prev, cfg), n_sub), rest);
    case SchemeCase::Case3:
      return cb.compose(0, pad_add(m, key_prev, n_sub), rest);
  }
  throw validation_error("encode: bad scheme case");
}

// Per-symbol Shannon-strategy transmission: v_i = v(u_i, s_i), then
// x_i ~ p(x|v_i, s_i). State is consumed strictly causally (one symbol and
// one random draw per time index).
inline std::vector<std::uint16_t> transmit_symbols(const ShannonStrategy& st,
                                                   std::span<const std::uint16_t> u_seq,
                                                   std::span<const std::uint16_t> s_seq,
                                                   Rng& rng) {
  if (u_seq.size() != s_seq.size())
    throw validation_error("transmit: sequence length mismatch");
  std::vector<std::uint16_t> x_seq(u_seq.size());
  for (std::size_t i = 0; i < u_seq.size(); ++i) {
    const int v = st.v_of(u_seq[i], s_seq[i]);
    x_seq[i] = static_cast<std::uint16_t>(rng.sample(st.x_slice(v, s_seq[i])));
  }
  return x_seq;
}

struct EncodeResult {
  std::vector<std::uint16_t> x_seq;
  std::uint64_t codeword = 0;
};

inline EncodeResult encode_block(const SchemeConfig& cfg, const MessageCodebook& cb,
                                 const ShannonStrategy& st, std::uint64_t m,
                                 std::uint64_t key_prev,
                                 std::span<const std::uint16_t> s_seq, Rng& rng) {
  EncodeResult out;
  out.codeword = select_codeword(cfg, cb, m, key_prev, rng);
  out.x_seq = transmit_symbols(st, cb.sequence(out.codeword), s_seq, rng);
  return out;
}

// Block 1 carries no message: a uniformly random codeword.
inline EncodeResult encode_block_first(const SchemeConfig& cfg, const MessageCodebook& cb,
                                       const ShannonStrategy& st,
                                       std::span<const std::uint16_t> s_seq, Rng& rng) {
  EncodeResult out;
  out.codeword = rng.next_below(cb.total());
  out.x_seq = transmit_symbols(st, cb.sequence(out.codeword), s_seq, rng);
  return out;
}

// Robust typicality: every symbol tuple a satisfies |freq(a) - p(a)| <=
// epsilon * p(a); tuples with p(a) = 0 must not occur.
inline bool typicality_check(const std::vector<std::span<const std::uint16_t>>& sequences,
                             const JointPmf& joint, double epsilon) {
  const auto& vars = joint.variables();
  if (sequences.size() != vars.size())
    throw validation_error("typicality_check: sequence count does not match joint arity");
  const std::size_t n = sequences.empty() ? 0 : sequences[0].size();
  for (const auto& s : sequences)
    if (s.size() != n) throw validation_error("typicality_check: length mismatch");
  if (n == 0) throw validation_error("typicality_check: empty sequences");
  std::vector<std::uint32_t> counts(joint.cells(), 0);
  std::vector<std::size_t> strides(vars.size(), 1);
  for (std::size_t i = vars.size(); i-- > 1;)
    strides[i - 1] = strides[i] * static_cast<std::size_t>(vars[i].size);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (sequences[v][t] >= vars[v].size)
        throw validation_error("typicality_check: symbol outside alphabet");
      idx += strides[v] * sequences[v][t];
    }
    ++counts[idx];
  }
  const auto& p = joint.table();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double freq = static_cast<double>(counts[i]) / static_cast<double>(n);
    if (std::abs(freq - p[i]) > epsilon * p[i]) return false;
  }
  return true;
}

// Decoding design distribution p(u, s, y) induced by the strategy:
// p(u) p(s) sum_x p(x|v(u,s),s) p(y|x,s).
inline JointPmf design_joint_usy(const ChannelWithState& ch, const ShannonStrategy& st) {
  const int nu = st.u.size, ns = ch.s.size, ny = ch.y.size, nz = ch.z.size;
  std::vector<double> table(static_cast<std::size_t>(nu) * ns * ny, 0.0);
  for (int u = 0; u < nu; ++u)
    for (int s = 0; s < ns; ++s) {
      const int v = st.v_of(u, s);
      const double w0 = st.p_u[u] * ch.p_s[s];
      for (int x = 0; x < ch.x.size; ++x) {
        const double w = w0 * st.x_slice(v, s)[x];
        const auto slice = ch.yz_slice(s, x);
        for (int y = 0; y < ny; ++y) {
          double py = 0.0;
          for (int z = 0; z < nz; ++z) py += slice[y * nz + z];
          table[(static_cast<std::size_t>(u) * ns + s) * ny + y] += w * py;
        }
      }
    }
  return JointPmf::unchecked({st.u, ch.s, ch.y}, std::move(table));
}

namespace detail {

// Fast typicality over (u, s, y) triples against a flat design table.
class TypicalityScanner {
 public:
  TypicalityScanner(const JointPmf& design, int n, double epsilon)
      : p_(design.table()),
        nu_(design.variables()[0].size),
        ns_(design.variables()[1].size),
        ny_(design.variables()[2].size),
        n_(n),
        epsilon_(epsilon),
        counts_(p_.size(), 0) {}

  bool typical(std::span<const std::uint16_t> u_seq, std::span<const std::uint16_t> s_seq,
               std::span<const std::uint16_t> y_seq) {
    std::fill(counts_.begin(), counts_.end(), 0);
    for (int t = 0; t < n_; ++t)
      ++counts_[(static_cast<std::size_t>(u_seq[t]) * ns_ + s_seq[t]) * ny_ + y_seq[t]];
    const double inv_n = 1.0 / n_;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      const double freq = counts_[i] * inv_n;
      if (std::abs(freq - p_[i]) > epsilon_ * p_[i]) return false;
    }
    return true;
  }

 private:
  std::span<const double> p_;
  int nu_, ns_, ny_, n_;
  double epsilon_;
  std::vector<std::uint32_t> counts_;
};

}  // namespace detail

// Jointly typical decoding over the allowed candidate set (the key-indexed
// bin for Case 2, everything otherwise). A unique hit inverts the binning
// and strips the pad; zero or multiple hits are a decoding error (nullopt).
inline std::optional<std::uint64_t> decode_block(const SchemeConfig& cfg,
                                                 const MessageCodebook& cb,
                                                 std::uint64_t key_prev,
                                                 std::span<const std::uint16_t> y_seq,
                                                 std::span<const std::uint16_t> s_seq,
                                                 const JointPmf& design, double epsilon) {
  detail::TypicalityScanner scan(design, cfg.n, epsilon);
  std::uint64_t begin = 0, end = cb.total();
  if (cfg.scheme_case == SchemeCase::Case2) {
    const std::uint64_t kd = key_part_d(key_prev, cfg);
    begin = cb.bin_begin(kd);
    end = begin + cb.bin_size();
  }
  std::optional<std::uint64_t> hit;
  for (std::uint64_t l = begin; l < end; ++l) {
    if (scan.typical(cb.sequence(l), s_seq, y_seq)) {
      if (hit) return std::nullopt;  // ambiguous
      hit = l;
    }
  }
  if (!hit) return std::nullopt;
  const std::uint64_t n_sub = std::uint64_t{1} << cb.subbin_bits;
  switch (cfg.scheme_case) {
    case SchemeCase::Case1:
      return (cb.bin_of(*hit) << cfg.log2_subbins) |
             pad_sub(cb.subbin_of(*hit), key_prev, n_sub);
    case SchemeCase::Case2:
      return pad_sub(cb.subbin_of(*hit), key_part_m(key_prev, cfg), n_sub);
    case SchemeCase::Case3:
      return pad_sub(cb.subbin_of(*hit), key_prev, n_sub);
  }
  return std::nullopt;
}

// Seed streams hanging off the scheme's master seed. The simulator and the
// exact oracle must realize the identical code for a given config, so the
// derivations live here.
namespace seed_stream {
inline constexpr std::uint64_t kCodebook = 0x10;
inline constexpr std::uint64_t kBinning = 0x20;
inline constexpr std::uint64_t kTrial = 0x30;
}  // namespace seed_stream

inline MessageCodebook realize_codebook(const SchemeConfig& cfg, const ShannonStrategy& st) {
  return generate_codebook(cfg, st.p_u,
                           derive_seed(cfg.master_seed, seed_stream::kCodebook, 0));
}

inline KeyBinning realize_binning(const SchemeConfig& cfg) {
  return KeyBinning{derive_seed(cfg.master_seed, seed_stream::kBinning, 0),
                    cfg.key_count()};
}

// Strategy/scheme pairing rules: the codebook alphabet is U; Case 3 requires
// the plain codeword form v(u,s) = u.
inline void validate_scheme_strategy(const ChannelWithState& ch, const SchemeConfig& cfg,
                                     const ShannonStrategy& st) {
  cfg.validate();
  st.validate();
  if (st.s_size != ch.s.size || st.x_size != ch.x.size)
    throw validation_error("strategy does not match channel alphabets");
  if (cfg.scheme_case == SchemeCase::Case3) {
    if (st.v_size != st.u.size)
      throw validation_error("scheme case 3 requires V = U (codewords over V)");
    for (int u = 0; u < st.u.size; ++u)
      for (int s = 0; s < st.s_size; ++s)
        if (st.v_of(u, s) != u)
          throw validation_error("scheme case 3 requires the identity map v(u,s) = u");
  }
}

}  // namespace wiretap
