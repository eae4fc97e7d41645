#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/parallel.hpp"
#include "wiretap/rng.hpp"
#include "wiretap/scheme.hpp"

namespace wiretap {

struct BlockTrace {
  std::vector<std::uint16_t> s_seq, x_seq, y_seq, z_seq;
  std::uint64_t codeword = 0;
  std::uint64_t key_declared = 0;
  std::optional<std::uint64_t> message_sent;
  std::optional<std::uint64_t> message_decoded;
  bool error = false;
};

struct SessionTrace {
  std::vector<BlockTrace> blocks;
};

struct SimulationReport {
  std::uint64_t trials = 0;
  std::uint64_t message_blocks = 0;  // trials * (b-1)
  std::uint64_t error_blocks = 0;
  double empirical_pe = 0.0;
  std::vector<std::uint64_t> block_errors;   // per block j = 2..b
  std::vector<std::uint64_t> key_histogram;  // keys consumed, k_1..k_{b-1}
};

namespace detail {

inline std::vector<std::uint16_t> draw_iid(std::span<const double> pmf, int n, Rng& rng) {
  std::vector<std::uint16_t> seq(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) seq[i] = static_cast<std::uint16_t>(rng.sample(pmf));
  return seq;
}

struct ChannelOutput {
  std::vector<std::uint16_t> y, z;
};

inline ChannelOutput push_through_channel(const ChannelWithState& ch,
                                          std::span<const std::uint16_t> x_seq,
                                          std::span<const std::uint16_t> s_seq, Rng& rng) {
  ChannelOutput out;
  out.y.resize(x_seq.size());
  out.z.resize(x_seq.size());
  const int nz = ch.z.size;
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    const int yz = rng.sample(ch.yz_slice(s_seq[i], x_seq[i]));
    out.y[i] = static_cast<std::uint16_t>(yz / nz);
    out.z[i] = static_cast<std::uint16_t>(yz % nz);
  }
  return out;
}

}  // namespace detail

// Runs `trials` independent sessions of b blocks against one realized
// codebook and key binning (codebook-conditional measurement). Per-trial
// seeds are derived by counter, so the report is independent of the worker
// count and of execution order.
inline SimulationReport run_session(const ChannelWithState& ch, const SchemeConfig& cfg,
                                    const ShannonStrategy& st, std::uint64_t trials,
                                    int workers = 1, SessionTrace* trace = nullptr) {
  validate_scheme_strategy(ch, cfg, st);
  const MessageCodebook cb = realize_codebook(cfg, st);
  const KeyBinning kb = realize_binning(cfg);
  const JointPmf design = design_joint_usy(ch, st);

  const int blocks = cfg.b;
  const std::uint64_t n_keys = cfg.key_count();
  struct Tally {
    std::uint64_t errors = 0;
    std::vector<std::uint64_t> per_block;
    std::vector<std::uint64_t> keys;
  };
  const int chunk_count = std::max(1, workers);
  std::vector<Tally> tallies(static_cast<std::size_t>(chunk_count));
  for (auto& t : tallies) {
    t.per_block.assign(static_cast<std::size_t>(blocks - 1), 0);
    t.keys.assign(static_cast<std::size_t>(n_keys), 0);
  }

  parallel_chunks(trials, chunk_count, [&](std::uint64_t c, std::uint64_t begin,
                                           std::uint64_t end) {
    Tally& tally = tallies[static_cast<std::size_t>(c)];
    for (std::uint64_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(cfg.master_seed, seed_stream::kTrial, t));
      const bool tracing = trace != nullptr && t == 0;
      std::uint64_t key_prev = 0;
      for (int j = 1; j <= blocks; ++j) {
        const auto s_seq = detail::draw_iid(ch.p_s, cfg.n, rng);
        std::uint64_t message = 0;
        EncodeResult enc;
        if (j == 1) {
          enc = encode_block_first(cfg, cb, st, s_seq, rng);
        } else {
          message = rng.next_below(cfg.message_count());
          enc = encode_block(cfg, cb, st, message, key_prev, s_seq, rng);
        }
        const auto out = detail::push_through_channel(ch, enc.x_seq, s_seq, rng);
        std::optional<std::uint64_t> decoded;
        bool error = false;
        if (j > 1) {
          decoded = decode_block(cfg, cb, key_prev, out.y, s_seq, design, cfg.epsilon);
          error = !decoded || *decoded != message;
          if (error) {
            ++tally.errors;
            ++tally.per_block[static_cast<std::size_t>(j - 2)];
          }
        }
        const std::uint64_t key_j = kb.bin_of(s_seq);
        if (j < blocks) ++tally.keys[static_cast<std::size_t>(key_j)];
        if (tracing) {
          BlockTrace bt;
          bt.s_seq = s_seq;
          bt.x_seq = enc.x_seq;
          bt.y_seq = out.y;
          bt.z_seq = out.z;
          bt.codeword = enc.codeword;
          bt.key_declared = key_j;
          if (j > 1) {
            bt.message_sent = message;
            bt.message_decoded = decoded;
            bt.error = error;
          }
          trace->blocks.push_back(std::move(bt));
        }
        key_prev = key_j;
      }
    }
  });

  SimulationReport rep;
  rep.trials = trials;
  rep.message_blocks = trials * static_cast<std::uint64_t>(blocks - 1);
  rep.block_errors.assign(static_cast<std::size_t>(blocks - 1), 0);
  rep.key_histogram.assign(static_cast<std::size_t>(n_keys), 0);
  for (const auto& t : tallies) {
    rep.error_blocks += t.errors;
    for (std::size_t i = 0; i < t.per_block.size(); ++i)
      rep.block_errors[i] += t.per_block[i];
    for (std::size_t i = 0; i < t.keys.size(); ++i) rep.key_histogram[i] += t.keys[i];
  }
  rep.empirical_pe = rep.message_blocks == 0
                         ? 0.0
                         : static_cast<double>(rep.error_blocks) /
                               static_cast<double>(rep.message_blocks);
  return rep;
}

}  // namespace wiretap
