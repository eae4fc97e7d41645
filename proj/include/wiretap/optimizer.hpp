#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wiretap/bounds.hpp"
#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/parallel.hpp"
#include "wiretap/rng.hpp"
#include "wiretap/simplex.hpp"

namespace wiretap {

enum class Objective { Csi1, Csi2, TermA, TermB, Thm3, Yamamoto, ZLessNoisy };
enum class SpecialCase { Thm3, Yamamoto, ZLessNoisy };
enum class Tightness { CaseI, CaseII, Unknown };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::Csi1: return "csi1";
    case Objective::Csi2: return "csi2";
    case Objective::TermA: return "term_a";
    case Objective::TermB: return "term_b";
    case Objective::Thm3: return "thm3";
    case Objective::Yamamoto: return "yamamoto";
    case Objective::ZLessNoisy: return "z_less_noisy";
  }
  return "?";
}

struct SearchConfig {
  int card_v = 0;  // 0 resolves to |X||S| + 1
  int grid_resolution = 4;
  int refine_rounds = 2;
  int restarts = 1;
  std::uint64_t seed = 0;
  // Evaluation cap; exceeding the projection requires an explicit override.
  std::uint64_t eval_cap = 100000000ull;
};

struct OptimResult {
  double value = 0.0;
  CausalPolicy witness;
  Objective objective = Objective::Csi1;
  std::uint64_t evaluations = 0;
};

struct MaximizeResult {
  BoundReport report;
  OptimResult csi1;
  OptimResult csi2;
};

namespace detail {

inline constexpr int kMaxSweeps = 8;

inline std::uint64_t mul_saturating(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline std::uint64_t pow_saturating(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r = mul_saturating(r, base);
  return r;
}

// Deterministic grid maximization of one bound expression over
// p(v|s) x p(x|v,s) (or p(v) x p(x|v,s) when the branch requires V
// independent of S). Stage 1 is exhaustive over the v-simplex grids crossed
// with all deterministic x-maps; each v-point is then polished by coordinate
// ascent over the x-slices from the best deterministic map plus seeded
// stochastic restarts. Refinement shrinks the grids around the incumbent by
// a factor of 4 per round. Results are independent of the worker count:
// per-point work is self-contained and the reduction is a fixed-order max
// with ties broken toward the earliest enumerated point.
class BranchSearch {
 public:
  BranchSearch(const ChannelWithState& ch, const SearchConfig& cfg, Objective obj,
               bool shared_v, int workers)
      : ch_(ch), cfg_(cfg), obj_(obj), shared_v_(shared_v), workers_(workers) {
    if (cfg_.card_v < 1) throw validation_error("SearchConfig: card_v < 1");
    if (cfg_.grid_resolution < 2)
      throw validation_error("SearchConfig: grid_resolution < 2");
    if (cfg_.refine_rounds < 0 || cfg_.restarts < 0)
      throw validation_error("SearchConfig: negative refine_rounds or restarts");
    nv_ = cfg_.card_v;
    ns_ = ch.s.size;
    nx_ = ch.x.size;
    v_factors_ = shared_v_ ? 1 : ns_;
    slices_ = nv_ * ns_;
    v_grid_ = simplex_grid(nv_, cfg_.grid_resolution, cfg_.eval_cap);
    x_grid_ = simplex_grid(nx_, cfg_.grid_resolution, cfg_.eval_cap);
    v_combos_ = pow_saturating(v_grid_.size(), v_factors_);
    det_maps_ = pow_saturating(static_cast<std::uint64_t>(nx_), slices_);
    check_cap();
  }

  OptimResult run() {
    struct ChunkBest {
      double value = -std::numeric_limits<double>::infinity();
      CausalPolicy policy;
      bool set = false;
      std::uint64_t evals = 0;
    };
    const int chunk_count = std::max(1, workers_);
    std::vector<ChunkBest> chunks(static_cast<std::size_t>(chunk_count));
    parallel_chunks(v_combos_, chunk_count,
                    [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                      ChunkBest& best = chunks[static_cast<std::size_t>(c)];
                      PolicyEvaluator ev(ch_, nv_);
                      CausalPolicy pol = blank_policy();
                      for (std::uint64_t a = begin; a < end; ++a) {
                        load_v_point(a, pol);
                        const double val = optimize_x(ev, pol, a, best.evals);
                        if (!best.set || val > best.value) {
                          best.value = val;
                          best.policy = pol;
                          best.set = true;
                        }
                      }
                    });
    OptimResult out;
    out.objective = obj_;
    bool have = false;
    for (auto& cb : chunks) {
      out.evaluations += cb.evals;
      if (cb.set && (!have || cb.value > out.value)) {
        out.value = cb.value;
        out.witness = std::move(cb.policy);
        have = true;
      }
    }
    if (!have) throw consistency_error("branch search produced no candidate");
    refine(out);
    return out;
  }

 private:
  void check_cap() const {
    const std::uint64_t ascent_bound = mul_saturating(
        static_cast<std::uint64_t>(kMaxSweeps) * slices_, x_grid_.size());
    const std::uint64_t per_point =
        det_maps_ + mul_saturating(1 + cfg_.restarts, ascent_bound);
    const std::uint64_t stage = mul_saturating(v_combos_, per_point);
    const std::uint64_t refine_bound = mul_saturating(
        static_cast<std::uint64_t>(cfg_.refine_rounds) * kMaxSweeps,
        mul_saturating(v_factors_, v_grid_.size()) +
            mul_saturating(slices_, x_grid_.size()));
    const std::uint64_t projected = mul_saturating(1, stage) + refine_bound;
    if (projected > cfg_.eval_cap || stage == std::numeric_limits<std::uint64_t>::max())
      throw resource_error(
          "grid search projects " + std::to_string(projected) +
          " evaluations, over the cap of " + std::to_string(cfg_.eval_cap) +
          "; raise eval_cap or shrink card_v/resolution");
  }

  CausalPolicy blank_policy() const {
    CausalPolicy pol;
    pol.v = Alphabet{"V", nv_};
    pol.s_size = ns_;
    pol.x_size = nx_;
    pol.p_v_given_s.assign(static_cast<std::size_t>(ns_) * nv_, 0.0);
    pol.p_x_given_vs.assign(static_cast<std::size_t>(nv_) * ns_ * nx_, 0.0);
    pol.independent_v = shared_v_;
    return pol;
  }

  // Factor 0 is the most significant digit so point order is lexicographic.
  void load_v_point(std::uint64_t a, CausalPolicy& pol) const {
    const std::uint64_t g = v_grid_.size();
    std::vector<std::uint64_t> digit(static_cast<std::size_t>(v_factors_));
    for (int f = v_factors_; f-- > 0;) {
      digit[f] = a % g;
      a /= g;
    }
    for (int s = 0; s < ns_; ++s) {
      const auto& pt = v_grid_[static_cast<std::size_t>(digit[shared_v_ ? 0 : s])];
      std::copy(pt.begin(), pt.end(), pol.v_slice_mut(s).begin());
    }
  }

  double eval(PolicyEvaluator& ev, const CausalPolicy& pol, std::uint64_t& count) const {
    ++count;
    switch (obj_) {
      case Objective::Csi1: return ev.csi1(pol);
      case Objective::Csi2: return ev.csi2(pol);
      case Objective::TermA: {
        const auto t = ev.terms(pol);
        return t.i_vy_given_s - t.i_vz_given_s + t.h_s_given_z;
      }
      case Objective::TermB: return ev.terms(pol).i_vy_given_s;
      default:
        throw validation_error("objective not searchable over policies");
    }
  }

  void set_det_map(std::uint64_t m, CausalPolicy& pol) const {
    for (int k = slices_ - 1; k >= 0; --k) {
      const int x = static_cast<int>(m % nx_);
      m /= nx_;
      auto slice = pol.x_slice_mut(k / ns_, k % ns_);
      std::fill(slice.begin(), slice.end(), 0.0);
      slice[x] = 1.0;
    }
  }

  // Stage 2 for one v-point: best deterministic map, then coordinate ascent
  // from it and from seeded random starts.
  double optimize_x(PolicyEvaluator& ev, CausalPolicy& pol, std::uint64_t a,
                    std::uint64_t& count) const {
    double best_val = -std::numeric_limits<double>::infinity();
    std::uint64_t best_m = 0;
    for (std::uint64_t m = 0; m < det_maps_; ++m) {
      set_det_map(m, pol);
      const double val = eval(ev, pol, count);
      if (val > best_val) {
        best_val = val;
        best_m = m;
      }
    }
    std::vector<double> best_x;
    set_det_map(best_m, pol);
    double incumbent = ascend(ev, pol, count);
    best_val = std::max(best_val, incumbent);
    best_x = pol.p_x_given_vs;
    for (int r = 0; r < cfg_.restarts; ++r) {
      Rng rng(derive_seed(cfg_.seed, 0x9077 + static_cast<std::uint64_t>(obj_),
                          a * (cfg_.restarts + 1) + r + 1));
      random_x(rng, pol);
      const double val = ascend(ev, pol, count);
      if (val > best_val) {
        best_val = val;
        best_x = pol.p_x_given_vs;
      }
    }
    pol.p_x_given_vs = best_x;
    return best_val;
  }

  void random_x(Rng& rng, CausalPolicy& pol) const {
    for (int k = 0; k < slices_; ++k) {
      auto slice = pol.x_slice_mut(k / ns_, k % ns_);
      double sum = 0.0;
      for (auto& p : slice) {
        p = -std::log(1.0 - rng.next_double());
        sum += p;
      }
      for (auto& p : slice) p /= sum;
    }
  }

  // Greedy sweeps over the x-slices; strictly-improving moves only.
  double ascend(PolicyEvaluator& ev, CausalPolicy& pol, std::uint64_t& count) const {
    double value = eval(ev, pol, count);
    std::vector<double> saved(static_cast<std::size_t>(nx_));
    std::vector<double> best(static_cast<std::size_t>(nx_));
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      bool improved = false;
      for (int k = 0; k < slices_; ++k) {
        auto slice = pol.x_slice_mut(k / ns_, k % ns_);
        std::copy(slice.begin(), slice.end(), saved.begin());
        bool found = false;
        for (const auto& g : x_grid_) {
          std::copy(g.begin(), g.end(), slice.begin());
          const double val = eval(ev, pol, count);
          if (val > value) {
            value = val;
            std::copy(g.begin(), g.end(), best.begin());
            found = true;
          }
        }
        std::copy((found ? best : saved).begin(), (found ? best : saved).end(),
                  slice.begin());
        improved |= found;
      }
      if (!improved) break;
    }
    return value;
  }

  // Local polish around the incumbent: candidate slices are convex blends
  // (1-t) w + t g with t = 4^-round, so the incumbent is never lost.
  void refine(OptimResult& out) const {
    PolicyEvaluator ev(ch_, nv_);
    CausalPolicy& pol = out.witness;
    std::vector<double> saved, best, cand;
    for (int round = 1; round <= cfg_.refine_rounds; ++round) {
      const double t = std::pow(0.25, round);
      for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool improved = false;
        for (int f = 0; f < v_factors_; ++f) {
          saved.assign(pol.v_slice(shared_v_ ? 0 : f).begin(),
                       pol.v_slice(shared_v_ ? 0 : f).end());
          bool found = false;
          for (const auto& g : v_grid_) {
            cand.resize(saved.size());
            for (std::size_t i = 0; i < saved.size(); ++i)
              cand[i] = (1.0 - t) * saved[i] + t * g[i];
            write_v_factor(pol, f, cand);
            const double val = eval(ev, pol, out.evaluations);
            if (val > out.value) {
              out.value = val;
              best = cand;
              found = true;
            }
          }
          write_v_factor(pol, f, found ? best : saved);
          improved |= found;
        }
        for (int k = 0; k < slices_; ++k) {
          auto slice = pol.x_slice_mut(k / ns_, k % ns_);
          saved.assign(slice.begin(), slice.end());
          bool found = false;
          for (const auto& g : x_grid_) {
            for (std::size_t i = 0; i < saved.size(); ++i)
              slice[i] = (1.0 - t) * saved[i] + t * g[i];
            const double val = eval(ev, pol, out.evaluations);
            if (val > out.value) {
              out.value = val;
              best.assign(slice.begin(), slice.end());
              found = true;
            }
          }
          std::copy((found ? best : saved).begin(), (found ? best : saved).end(),
                    slice.begin());
          improved |= found;
        }
        if (!improved) break;
      }
    }
  }

  void write_v_factor(CausalPolicy& pol, int f, const std::vector<double>& values) const {
    if (shared_v_) {
      for (int s = 0; s < ns_; ++s)
        std::copy(values.begin(), values.end(), pol.v_slice_mut(s).begin());
    } else {
      std::copy(values.begin(), values.end(), pol.v_slice_mut(f).begin());
    }
  }

  const ChannelWithState& ch_;
  SearchConfig cfg_;
  Objective obj_;
  bool shared_v_;
  int workers_;
  int nv_ = 0, ns_ = 0, nx_ = 0, v_factors_ = 0, slices_ = 0;
  std::vector<std::vector<double>> v_grid_, x_grid_;
  std::uint64_t v_combos_ = 0, det_maps_ = 0;
};

}  // namespace detail

inline SearchConfig resolve_search_config(const ChannelWithState& ch, SearchConfig cfg) {
  if (cfg.card_v == 0) cfg.card_v = ch.x.size * ch.s.size + 1;
  return cfg;
}

// Maximizes both lower-bound branches independently and reports the larger,
// with the noncausal bound evaluated at the embedded first-branch witness.
inline MaximizeResult maximize_lower_bound(const ChannelWithState& ch,
                                           const SearchConfig& cfg_in,
                                           int workers = 1) {
  const SearchConfig cfg = resolve_search_config(ch, cfg_in);
  MaximizeResult r;
  r.csi1 = detail::BranchSearch(ch, cfg, Objective::Csi1, /*shared_v=*/false, workers).run();
  r.csi2 = detail::BranchSearch(ch, cfg, Objective::Csi2, /*shared_v=*/true, workers).run();
  r.report.r_csi_1 = r.csi1.value;
  r.report.r_csi_2 = r.csi2.value;
  r.report.lower_bound = std::max(r.csi1.value, r.csi2.value);
  r.report.witness_csi_1 = r.csi1.witness;
  r.report.witness_csi_2 = r.csi2.witness;
  r.report.liu_chen = liu_chen_value(ch, embed_policy(r.csi1.witness));
  return r;
}

namespace detail {

// min{ I(X;Y) - I(X;Z) + H(S), I(X;Y) } on a state-independent channel.
inline double yamamoto_objective(const MarginalChannel& mc, std::span<const double> p_x,
                                 double h_s) {
  const auto pi = pair_information(mc, p_x);
  return std::min(pi.i_xy - pi.i_xz + h_s, pi.i_xy);
}

// min{ H(S), I(X;Y) } on a state-independent channel.
inline double z_less_noisy_objective(const MarginalChannel& mc,
                                     std::span<const double> p_x, double h_s) {
  return std::min(h_s, pair_information(mc, p_x).i_xy);
}

}  // namespace detail

// Grid maximization of the closed-form special-case objectives. Thm3 searches
// one input simplex per state; Yamamoto and ZLessNoisy require a
// state-independent channel and search a single input simplex.
inline OptimResult maximize_special_case(const ChannelWithState& ch, SpecialCase which,
                                         int resolution, int workers = 1) {
  if (resolution < 2) throw validation_error("maximize_special_case: resolution < 2");
  const auto grid = simplex_grid(ch.x.size, resolution);
  OptimResult out;
  out.objective = which == SpecialCase::Thm3       ? Objective::Thm3
                  : which == SpecialCase::Yamamoto ? Objective::Yamamoto
                                                   : Objective::ZLessNoisy;
  if (which == SpecialCase::Thm3) {
    const int ns = ch.s.size;
    const std::uint64_t combos =
        detail::pow_saturating(grid.size(), ns);
    struct Best {
      double value = -std::numeric_limits<double>::infinity();
      std::uint64_t a = 0;
      bool set = false;
      std::uint64_t evals = 0;
    };
    const int chunk_count = std::max(1, workers);
    std::vector<Best> bests(static_cast<std::size_t>(chunk_count));
    parallel_chunks(combos, chunk_count,
                    [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                      Best& b = bests[static_cast<std::size_t>(c)];
                      PolicyEvaluator ev(ch, ch.x.size);
                      std::vector<std::vector<double>> rows(
                          static_cast<std::size_t>(ns));
                      for (std::uint64_t a = begin; a < end; ++a) {
                        std::uint64_t rest = a;
                        for (int s = ns; s-- > 0;) {
                          rows[s] = grid[static_cast<std::size_t>(rest % grid.size())];
                          rest /= grid.size();
                        }
                        CausalPolicy pol = make_identity_policy(ch.x.size, rows);
                        ++b.evals;
                        const double val = ev.csi1(pol);
                        if (!b.set || val > b.value) {
                          b.value = val;
                          b.a = a;
                          b.set = true;
                        }
                      }
                    });
    std::uint64_t best_a = 0;
    bool have = false;
    for (auto& b : bests) {
      out.evaluations += b.evals;
      if (b.set && (!have || b.value > out.value)) {
        out.value = b.value;
        best_a = b.a;
        have = true;
      }
    }
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(ns));
    for (int s = ns; s-- > 0;) {
      rows[s] = grid[static_cast<std::size_t>(best_a % grid.size())];
      best_a /= grid.size();
    }
    out.witness = make_identity_policy(ch.x.size, rows);
    return out;
  }
  const MarginalChannel mc = state_independent_slice(ch);
  const double h_s = entropy_of_table(ch.p_s);
  std::size_t best_i = 0;
  bool have = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ++out.evaluations;
    const double val = which == SpecialCase::Yamamoto
                           ? detail::yamamoto_objective(mc, grid[i], h_s)
                           : detail::z_less_noisy_objective(mc, grid[i], h_s);
    if (!have || val > out.value) {
      out.value = val;
      best_i = i;
      have = true;
    }
  }
  out.witness = make_identity_policy(
      ch.x.size, std::vector<std::vector<double>>(ch.s.size, grid[best_i]));
  return out;
}

// Re-evaluates a special-case witness through its own objective; used to
// check the value/witness invariant.
inline double special_objective_value(const ChannelWithState& ch, SpecialCase which,
                                      const CausalPolicy& witness) {
  if (which == SpecialCase::Thm3) return rate_csi_1_value(ch, witness);
  const MarginalChannel mc = state_independent_slice(ch);
  const double h_s = entropy_of_table(ch.p_s);
  std::vector<double> p_x(witness.v_slice(0).begin(), witness.v_slice(0).end());
  return which == SpecialCase::Yamamoto
             ? detail::yamamoto_objective(mc, p_x, h_s)
             : detail::z_less_noisy_objective(mc, p_x, h_s);
}

// Theorem-3 capacity under the caller-asserted less-noisy hypothesis:
// max over p(x|s) of min{ I(X;Y|S) - I(X;Z|S) + H(S|Z), I(X;Y|S) }.
inline OptimResult less_noisy_capacity(const ChannelWithState& ch, int resolution,
                                       int workers = 1) {
  return maximize_special_case(ch, SpecialCase::Thm3, resolution, workers);
}

// Capacity when the eavesdropper is less noisy (caller-asserted) on a
// state-independent channel: max over p(x) of min{ H(S), I(X;Y) }.
inline OptimResult z_less_noisy_capacity(const ChannelWithState& ch, int resolution,
                                         int workers = 1) {
  return maximize_special_case(ch, SpecialCase::ZLessNoisy, resolution, workers);
}

// Grid test of the two sufficient conditions under which the lower bound is
// the secrecy capacity. CaseI: the maximizer of the keyed wiretap term also
// satisfies term <= I(V;Y|S). CaseII: the maximizer of I(V;Y|S) satisfies
// I(V;Y|S) <= term.
inline Tightness tightness_classify(const ChannelWithState& ch, const BoundReport& report,
                                    int resolution, int workers = 1) {
  SearchConfig cfg;
  cfg.card_v = std::max(1, report.witness_csi_1.v.size);
  cfg.grid_resolution = resolution;
  cfg.refine_rounds = 1;
  cfg.restarts = 1;
  cfg.seed = 0;
  PolicyEvaluator ev(ch, cfg.card_v);
  const OptimResult a =
      detail::BranchSearch(ch, cfg, Objective::TermA, /*shared_v=*/false, workers).run();
  const auto ta = ev.terms(a.witness);
  if (ta.i_vy_given_s - ta.i_vz_given_s + ta.h_s_given_z <= ta.i_vy_given_s + 1e-12)
    return Tightness::CaseI;
  const OptimResult b =
      detail::BranchSearch(ch, cfg, Objective::TermB, /*shared_v=*/false, workers).run();
  const auto tb = ev.terms(b.witness);
  if (tb.i_vy_given_s <= tb.i_vy_given_s - tb.i_vz_given_s + tb.h_s_given_z + 1e-12)
    return Tightness::CaseII;
  return Tightness::Unknown;
}

}  // namespace wiretap
