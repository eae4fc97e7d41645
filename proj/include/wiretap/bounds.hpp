#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/info.hpp"
#include "wiretap/simplex.hpp"

namespace wiretap {

// Joint distribution over (V,S,X,Y,Z) induced by a channel and a causal
// policy: p(s) p(v|s) p(x|v,s) p(y,z|x,s).
inline JointPmf induce_joint(const ChannelWithState& ch, const CausalPolicy& pol) {
  if (pol.s_size != ch.s.size || pol.x_size != ch.x.size)
    throw validation_error("induce_joint: policy dimensions do not match channel");
  const int nv = pol.v.size, ns = ch.s.size, nx = ch.x.size, ny = ch.y.size,
            nz = ch.z.size;
  std::vector<double> table(static_cast<std::size_t>(nv) * ns * nx * ny * nz, 0.0);
  std::size_t idx = 0;
  for (int v = 0; v < nv; ++v)
    for (int s = 0; s < ns; ++s) {
      const double pvs = ch.p_s[s] * pol.v_slice(s)[v];
      for (int x = 0; x < nx; ++x) {
        const double w = pvs * pol.x_slice(v, s)[x];
        const auto slice = ch.yz_slice(s, x);
        for (int y = 0; y < ny; ++y)
          for (int z = 0; z < nz; ++z) table[idx++] = w * slice[y * nz + z];
      }
    }
  return JointPmf::unchecked({pol.v, ch.s, ch.x, ch.y, ch.z}, std::move(table));
}

// Evaluates the lower-bound terms for many policies against one channel with
// reusable scratch. The public rate functions below route through this class,
// so an optimizer witness re-evaluates to the exact same value.
class PolicyEvaluator {
 public:
  PolicyEvaluator(const ChannelWithState& ch, int card_v)
      : ch_(&ch),
        nv_(card_v),
        ns_(ch.s.size),
        nx_(ch.x.size),
        ny_(ch.y.size),
        nz_(ch.z.size),
        m_vs_(static_cast<std::size_t>(nv_) * ns_),
        m_ys_(static_cast<std::size_t>(ny_) * ns_),
        m_vys_(static_cast<std::size_t>(nv_) * ny_ * ns_),
        m_s_(ns_),
        m_zs_(static_cast<std::size_t>(nz_) * ns_),
        m_vzs_(static_cast<std::size_t>(nv_) * nz_ * ns_),
        m_z_(nz_),
        m_vz_(static_cast<std::size_t>(nv_) * nz_) {
    if (card_v < 1) throw validation_error("PolicyEvaluator: card_v < 1");
  }

  struct Terms {
    double i_vy_given_s;  // I(V;Y|S)
    double i_vz_given_s;  // I(V;Z|S)
    double h_s_given_z;   // H(S|Z)
    double h_s_given_zv;  // H(S|Z,V)
  };

  Terms terms(const CausalPolicy& pol) {
    accumulate(pol);
    const double h_vs = entropy_of_table(m_vs_);
    const double h_ys = entropy_of_table(m_ys_);
    const double h_vys = entropy_of_table(m_vys_);
    const double h_s = entropy_of_table(m_s_);
    const double h_zs = entropy_of_table(m_zs_);
    const double h_vzs = entropy_of_table(m_vzs_);
    const double h_z = entropy_of_table(m_z_);
    const double h_vz = entropy_of_table(m_vz_);
    Terms t;
    t.i_vy_given_s = clamp_information(h_vs + h_ys - h_vys - h_s, "I(V;Y|S)");
    t.i_vz_given_s = clamp_information(h_vs + h_zs - h_vzs - h_s, "I(V;Z|S)");
    t.h_s_given_z = clamp_information(h_zs - h_z, "H(S|Z)");
    t.h_s_given_zv = clamp_information(h_vzs - h_vz, "H(S|Z,V)");
    return t;
  }

  // min{ I(V;Y|S) - I(V;Z|S) + H(S|Z), I(V;Y|S) }; may be negative.
  double csi1(const CausalPolicy& pol) {
    const Terms t = terms(pol);
    return std::min(t.i_vy_given_s - t.i_vz_given_s + t.h_s_given_z, t.i_vy_given_s);
  }

  // min{ H(S|Z,V), I(V;Y|S) }; requires p(v) independent of s.
  double csi2(const CausalPolicy& pol) {
    if (!pol.independent_v)
      throw validation_error(
          "rate_csi_2_value requires a policy with independent_v set (p(v) free of s)");
    const Terms t = terms(pol);
    return std::min(t.h_s_given_zv, t.i_vy_given_s);
  }

 private:
  void accumulate(const CausalPolicy& pol) {
    if (pol.v.size != nv_ || pol.s_size != ns_ || pol.x_size != nx_)
      throw validation_error("PolicyEvaluator: policy dimensions changed");
    std::fill(m_vs_.begin(), m_vs_.end(), 0.0);
    std::fill(m_ys_.begin(), m_ys_.end(), 0.0);
    std::fill(m_vys_.begin(), m_vys_.end(), 0.0);
    std::fill(m_s_.begin(), m_s_.end(), 0.0);
    std::fill(m_zs_.begin(), m_zs_.end(), 0.0);
    std::fill(m_vzs_.begin(), m_vzs_.end(), 0.0);
    std::fill(m_z_.begin(), m_z_.end(), 0.0);
    std::fill(m_vz_.begin(), m_vz_.end(), 0.0);
    const double* ps = ch_->p_s.data();
    for (int v = 0; v < nv_; ++v)
      for (int s = 0; s < ns_; ++s) {
        const double pvs = ps[s] * pol.p_v_given_s[static_cast<std::size_t>(s) * nv_ + v];
        if (pvs == 0.0) continue;
        for (int x = 0; x < nx_; ++x) {
          const double w = pvs * pol.p_x_given_vs[(static_cast<std::size_t>(v) * ns_ + s) * nx_ + x];
          if (w == 0.0) continue;
          const auto slice = ch_->yz_slice(s, x);
          for (int y = 0; y < ny_; ++y)
            for (int z = 0; z < nz_; ++z) {
              const double t = w * slice[y * nz_ + z];
              m_vs_[static_cast<std::size_t>(v) * ns_ + s] += t;
              m_ys_[static_cast<std::size_t>(y) * ns_ + s] += t;
              m_vys_[(static_cast<std::size_t>(v) * ny_ + y) * ns_ + s] += t;
              m_s_[s] += t;
              m_zs_[static_cast<std::size_t>(z) * ns_ + s] += t;
              m_vzs_[(static_cast<std::size_t>(v) * nz_ + z) * ns_ + s] += t;
              m_z_[z] += t;
              m_vz_[static_cast<std::size_t>(v) * nz_ + z] += t;
            }
        }
      }
  }

  const ChannelWithState* ch_;
  int nv_, ns_, nx_, ny_, nz_;
  std::vector<double> m_vs_, m_ys_, m_vys_, m_s_, m_zs_, m_vzs_, m_z_, m_vz_;
};

inline Bits rate_csi_1_value(const ChannelWithState& ch, const CausalPolicy& pol) {
  return PolicyEvaluator(ch, pol.v.size).csi1(pol);
}

inline Bits rate_csi_2_value(const ChannelWithState& ch, const CausalPolicy& pol) {
  return PolicyEvaluator(ch, pol.v.size).csi2(pol);
}

// Embeds a causal policy into the noncausal auxiliary form with
// |U| = |V||S|: for u = v + s|V|, p(u|s) = p(v|s) and p(x|u,s) = p(x|v,s).
// On the induced joint H(S|Z,U) = 0, and the noncausal bound value equals
// the first-branch causal value.
inline NoncausalPolicy embed_policy(const CausalPolicy& pol) {
  NoncausalPolicy nc;
  const int nv = pol.v.size, ns = pol.s_size, nx = pol.x_size;
  nc.u = Alphabet{"U", nv * ns};
  nc.s_size = ns;
  nc.x_size = nx;
  nc.p_u_given_s.assign(static_cast<std::size_t>(ns) * nc.u.size, 0.0);
  nc.p_x_given_us.assign(static_cast<std::size_t>(nc.u.size) * ns * nx, 0.0);
  for (int s = 0; s < ns; ++s)
    for (int v = 0; v < nv; ++v)
      nc.p_u_given_s[static_cast<std::size_t>(s) * nc.u.size + (v + s * nv)] =
          pol.v_slice(s)[v];
  // Off-support u rows still need valid pmf slices; reuse the v = u mod |V| rule.
  for (int u = 0; u < nc.u.size; ++u) {
    const int v = u % nv;
    for (int s = 0; s < ns; ++s)
      for (int x = 0; x < nx; ++x)
        nc.p_x_given_us[(static_cast<std::size_t>(u) * ns + s) * nx + x] =
            pol.x_slice(v, s)[x];
  }
  nc.validate();
  return nc;
}

// Joint over (U,S,X,Y,Z) induced by a noncausal auxiliary description.
inline JointPmf induce_noncausal_joint(const ChannelWithState& ch,
                                       const NoncausalPolicy& nc) {
  if (nc.s_size != ch.s.size || nc.x_size != ch.x.size)
    throw validation_error("liu_chen: policy dimensions do not match channel");
  const int nu = nc.u.size, ns = ch.s.size, nx = ch.x.size, ny = ch.y.size,
            nz = ch.z.size;
  std::vector<double> table(static_cast<std::size_t>(nu) * ns * nx * ny * nz, 0.0);
  std::size_t idx = 0;
  for (int u = 0; u < nu; ++u)
    for (int s = 0; s < ns; ++s) {
      const double pus = ch.p_s[s] * nc.u_slice(s)[u];
      for (int x = 0; x < nx; ++x) {
        const double w = pus * nc.x_slice(u, s)[x];
        const auto slice = ch.yz_slice(s, x);
        for (int y = 0; y < ny; ++y)
          for (int z = 0; z < nz; ++z) table[idx++] = w * slice[y * nz + z];
      }
    }
  return JointPmf::unchecked({nc.u, ch.s, ch.x, ch.y, ch.z}, std::move(table));
}

// Noncausal lower bound:
// min{ I(U;Y|S) - I(U;Z|S) + I(S;U|Z), I(U;Y|S) } on p(s)p(u|s)p(x|u,s)p(y,z|x,s).
inline Bits liu_chen_value(const ChannelWithState& ch, const NoncausalPolicy& nc) {
  const JointPmf j = induce_noncausal_joint(ch, nc);
  const std::string u = nc.u.name, s = ch.s.name, y = ch.y.name, z = ch.z.name;
  const double i_uy_s = j.conditional_mutual_information({u}, {y}, {s});
  const double i_uz_s = j.conditional_mutual_information({u}, {z}, {s});
  const double i_su_z = j.conditional_mutual_information({s}, {u}, {z});
  return std::min(i_uy_s - i_uz_s + i_su_z, i_uy_s);
}

// Joint over (U,S,V,X,Y,Z) induced by a Shannon strategy:
// p(u) p(s) [v = v(u,s)] p(x|v,s) p(y,z|x,s).
inline JointPmf induce_strategy_joint(const ChannelWithState& ch,
                                      const ShannonStrategy& st) {
  if (st.s_size != ch.s.size || st.x_size != ch.x.size)
    throw validation_error("strategy dimensions do not match channel");
  const int nu = st.u.size, ns = ch.s.size, nv = st.v_size, nx = ch.x.size,
            ny = ch.y.size, nz = ch.z.size;
  std::vector<double> table(
      static_cast<std::size_t>(nu) * ns * nv * nx * ny * nz, 0.0);
  for (int u = 0; u < nu; ++u)
    for (int s = 0; s < ns; ++s) {
      const int v = st.v_of(u, s);
      const double pus = st.p_u[u] * ch.p_s[s];
      for (int x = 0; x < nx; ++x) {
        const double w = pus * st.x_slice(v, s)[x];
        const auto slice = ch.yz_slice(s, x);
        for (int y = 0; y < ny; ++y)
          for (int z = 0; z < nz; ++z) {
            const std::size_t idx =
                ((((static_cast<std::size_t>(u) * ns + s) * nv + v) * nx + x) * ny + y) * nz + z;
            table[idx] = w * slice[y * nz + z];
          }
      }
    }
  return JointPmf::unchecked({st.u, ch.s, Alphabet{"V", nv}, ch.x, ch.y, ch.z},
                             std::move(table));
}

// Equivalent characterization of the first branch over Shannon strategies:
// min{ I(U;Y,S) - I(U;Z,S) + H(S|Z), I(U;Y,S) }.
inline Bits shannon_strategy_value(const ChannelWithState& ch,
                                   const ShannonStrategy& st) {
  const JointPmf j = induce_strategy_joint(ch, st);
  const std::string u = st.u.name, s = ch.s.name, y = ch.y.name, z = ch.z.name;
  const double i_uys = j.mutual_information({u}, {y, s});
  const double i_uzs = j.mutual_information({u}, {z, s});
  const double h_s_z = j.conditional_entropy({s}, {z});
  return std::min(i_uys - i_uzs + h_s_z, i_uys);
}

// Collapses a strategy to the causal policy p(v|s) = sum_{u: v(u,s)=v} p(u)
// with the same input rule.
inline CausalPolicy collapse_strategy(const ShannonStrategy& st) {
  CausalPolicy pol;
  pol.v = Alphabet{"V", st.v_size};
  pol.s_size = st.s_size;
  pol.x_size = st.x_size;
  pol.p_v_given_s.assign(static_cast<std::size_t>(st.s_size) * st.v_size, 0.0);
  for (int u = 0; u < st.u.size; ++u)
    for (int s = 0; s < st.s_size; ++s)
      pol.p_v_given_s[static_cast<std::size_t>(s) * st.v_size + st.v_of(u, s)] += st.p_u[u];
  pol.p_x_given_vs = st.p_x_given_vs;
  pol.independent_v = false;
  pol.validate();
  return pol;
}

// Upper bound on an auxiliary chain:
// min{ I(V1;Y|U,S) - I(V1;Z|U,S) + H(S|Z,U), I(V2;Y|S) } on
// p(s) p(u|s) p(v1|u,s) p(v2|v1,s) p(x|v2,s) p(y,z|x,s).
inline Bits upper_bound_value(const ChannelWithState& ch, const AuxChain& chain) {
  if (chain.s_size != ch.s.size || chain.x_size != ch.x.size)
    throw validation_error("upper_bound_value: chain dimensions do not match channel");
  chain.validate();
  const int nu = chain.u.size, n1 = chain.v1.size, n2 = chain.v2.size,
            ns = ch.s.size, nx = ch.x.size, ny = ch.y.size, nz = ch.z.size;
  std::vector<double> table(
      static_cast<std::size_t>(nu) * n1 * n2 * ns * nx * ny * nz, 0.0);
  std::size_t idx = 0;
  for (int u = 0; u < nu; ++u)
    for (int v1 = 0; v1 < n1; ++v1)
      for (int v2 = 0; v2 < n2; ++v2)
        for (int s = 0; s < ns; ++s) {
          const double w0 =
              ch.p_s[s] *
              chain.p_u_given_s[static_cast<std::size_t>(s) * nu + u] *
              chain.p_v1_given_us[(static_cast<std::size_t>(u) * ns + s) * n1 + v1] *
              chain.p_v2_given_v1s[(static_cast<std::size_t>(v1) * ns + s) * n2 + v2];
          for (int x = 0; x < nx; ++x) {
            const double w =
                w0 * chain.p_x_given_v2s[(static_cast<std::size_t>(v2) * ns + s) * nx + x];
            const auto slice = ch.yz_slice(s, x);
            for (int y = 0; y < ny; ++y)
              for (int z = 0; z < nz; ++z) table[idx++] = w * slice[y * nz + z];
          }
        }
  const JointPmf j = JointPmf::unchecked(
      {chain.u, chain.v1, chain.v2, ch.s, ch.x, ch.y, ch.z}, std::move(table));
  const std::string u = chain.u.name, a = chain.v1.name, b = chain.v2.name,
                    s = ch.s.name, y = ch.y.name, z = ch.z.name;
  const double i1 = j.conditional_mutual_information({a}, {y}, {u, s});
  const double i2 = j.conditional_mutual_information({a}, {z}, {u, s});
  const double h = j.conditional_entropy({s}, {z, u});
  const double second = j.conditional_mutual_information({b}, {y}, {s});
  return std::min(i1 - i2 + h, second);
}

// State-independent view of a channel: p(y,z|x) shared by all states.
struct MarginalChannel {
  int x_size = 0, y_size = 0, z_size = 0;
  std::vector<double> p_yz_given_x;  // [x*|Y||Z| + y*|Z| + z]

  std::span<const double> slice(int xi) const {
    const std::size_t n = static_cast<std::size_t>(y_size) * z_size;
    return {p_yz_given_x.data() + xi * n, n};
  }
};

inline MarginalChannel state_independent_slice(const ChannelWithState& ch) {
  if (!ch.state_independent())
    throw validation_error("channel is state-dependent: p(y,z|x,s) varies with s");
  MarginalChannel mc;
  mc.x_size = ch.x.size;
  mc.y_size = ch.y.size;
  mc.z_size = ch.z.size;
  mc.p_yz_given_x.assign(ch.p_yz_given_xs.begin(),
                         ch.p_yz_given_xs.begin() +
                             static_cast<std::size_t>(ch.x.size) * ch.y.size * ch.z.size);
  return mc;
}

namespace detail {
// I(X;Y) and I(X;Z) of p(x) p(y,z|x).
struct PairInformation {
  double i_xy, i_xz;
};
inline PairInformation pair_information(const MarginalChannel& mc,
                                        std::span<const double> p_x) {
  const int nx = mc.x_size, ny = mc.y_size, nz = mc.z_size;
  std::vector<double> m_xy(static_cast<std::size_t>(nx) * ny, 0.0);
  std::vector<double> m_xz(static_cast<std::size_t>(nx) * nz, 0.0);
  std::vector<double> m_y(ny, 0.0), m_z(nz, 0.0), m_x(nx, 0.0);
  for (int x = 0; x < nx; ++x) {
    const auto slice = mc.slice(x);
    for (int y = 0; y < ny; ++y)
      for (int z = 0; z < nz; ++z) {
        const double t = p_x[x] * slice[y * nz + z];
        m_xy[static_cast<std::size_t>(x) * ny + y] += t;
        m_xz[static_cast<std::size_t>(x) * nz + z] += t;
        m_y[y] += t;
        m_z[z] += t;
        m_x[x] += t;
      }
  }
  const double h_x = entropy_of_table(m_x);
  PairInformation r;
  r.i_xy = clamp_information(h_x + entropy_of_table(m_y) - entropy_of_table(m_xy),
                             "I(X;Y)");
  r.i_xz = clamp_information(h_x + entropy_of_table(m_z) - entropy_of_table(m_xz),
                             "I(X;Z)");
  return r;
}
}  // namespace detail

// Grid certificate that f(p(x)) = I(X;Y) - I(X;Z) is midpoint-concave, the
// numerical surrogate for "Y less noisy than Z" on a state-independent
// channel. A true result certifies the grid only, not the continuum.
struct LessNoisyCheck {
  bool concave_on_grid = true;
  std::vector<double> p, q;  // first violating pair, if any
  double gap = 0.0;          // chord value minus midpoint value
};

inline LessNoisyCheck check_less_noisy(const MarginalChannel& mc, int resolution) {
  if (resolution < 2) throw validation_error("check_less_noisy: resolution < 2");
  const auto grid = simplex_grid(mc.x_size, resolution);
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto pi = detail::pair_information(mc, grid[i]);
    f[i] = pi.i_xy - pi.i_xz;
  }
  std::vector<double> mid(mc.x_size);
  LessNoisyCheck out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      for (int k = 0; k < mc.x_size; ++k) mid[k] = 0.5 * (grid[i][k] + grid[j][k]);
      const auto pm = detail::pair_information(mc, mid);
      const double f_mid = pm.i_xy - pm.i_xz;
      const double chord = 0.5 * (f[i] + f[j]);
      if (f_mid < chord - 1e-9) {
        out.concave_on_grid = false;
        out.p = grid[i];
        out.q = grid[j];
        out.gap = chord - f_mid;
        return out;
      }
    }
  return out;
}

// The two-state binary example channel: Z = X, Y = X flipped with probability
// 0.1, and S Bernoulli(q*) with H(q*) = 1 - H(0.1) (smaller root).
inline ChannelWithState example_channel() {
  ChannelWithState ch;
  ch.x = {"X", 2};
  ch.s = {"S", 2};
  ch.y = {"Y", 2};
  ch.z = {"Z", 2};
  const double q = binary_entropy_inverse(1.0 - binary_entropy(0.1));
  ch.p_s = {1.0 - q, q};
  ch.p_yz_given_xs.assign(2 * 2 * 2 * 2, 0.0);
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < 2; ++x) {
      double* slice = ch.p_yz_given_xs.data() + (static_cast<std::size_t>(s) * 2 + x) * 4;
      slice[x * 2 + x] = 0.9;          // y = x, z = x
      slice[(1 - x) * 2 + x] = 0.1;    // y flipped, z = x
    }
  ch.validate();
  return ch;
}

}  // namespace wiretap
