#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/rng.hpp"

namespace testutil {

// Uniform-on-the-simplex draw (normalized exponentials).
inline std::vector<double> random_pmf(wiretap::Rng& rng, int size) {
  std::vector<double> p(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (auto& v : p) {
    v = -std::log(1.0 - rng.next_double());
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

inline wiretap::ChannelWithState random_channel(wiretap::Rng& rng, int nx, int ns,
                                                int ny, int nz) {
  wiretap::ChannelWithState ch;
  ch.x = {"X", nx};
  ch.s = {"S", ns};
  ch.y = {"Y", ny};
  ch.z = {"Z", nz};
  ch.p_s = random_pmf(rng, ns);
  for (int s = 0; s < ns; ++s)
    for (int x = 0; x < nx; ++x) {
      const auto slice = random_pmf(rng, ny * nz);
      ch.p_yz_given_xs.insert(ch.p_yz_given_xs.end(), slice.begin(), slice.end());
    }
  ch.validate();
  return ch;
}

inline wiretap::CausalPolicy random_policy(wiretap::Rng& rng, int nv, int ns, int nx,
                                           bool independent_v = false) {
  wiretap::CausalPolicy pol;
  pol.v = {"V", nv};
  pol.s_size = ns;
  pol.x_size = nx;
  pol.independent_v = independent_v;
  if (independent_v) {
    const auto p_v = random_pmf(rng, nv);
    for (int s = 0; s < ns; ++s)
      pol.p_v_given_s.insert(pol.p_v_given_s.end(), p_v.begin(), p_v.end());
  } else {
    for (int s = 0; s < ns; ++s) {
      const auto p_v = random_pmf(rng, nv);
      pol.p_v_given_s.insert(pol.p_v_given_s.end(), p_v.begin(), p_v.end());
    }
  }
  for (int v = 0; v < nv; ++v)
    for (int s = 0; s < ns; ++s) {
      const auto p_x = random_pmf(rng, nx);
      pol.p_x_given_vs.insert(pol.p_x_given_vs.end(), p_x.begin(), p_x.end());
    }
  pol.validate();
  return pol;
}

inline wiretap::ShannonStrategy random_strategy(wiretap::Rng& rng, int nu, int nv,
                                                int ns, int nx) {
  wiretap::ShannonStrategy st;
  st.u = {"U", nu};
  st.s_size = ns;
  st.v_size = nv;
  st.x_size = nx;
  st.p_u = random_pmf(rng, nu);
  st.v_of_us.resize(static_cast<std::size_t>(nu) * ns);
  for (auto& v : st.v_of_us) v = static_cast<int>(rng.next_below(nv));
  for (int v = 0; v < nv; ++v)
    for (int s = 0; s < ns; ++s) {
      const auto p_x = random_pmf(rng, nx);
      st.p_x_given_vs.insert(st.p_x_given_vs.end(), p_x.begin(), p_x.end());
    }
  st.validate();
  return st;
}

// The uniform V = X policy for a binary channel: p(v) = [1/2, 1/2], x = v.
inline wiretap::CausalPolicy uniform_identity_policy() {
  return wiretap::make_independent_policy(
      2, 2, {0.5, 0.5}, {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}});
}

// Channel from nested tables: p_yz[s][x] is a flattened pmf over (Y,Z).
inline wiretap::ChannelWithState make_channel(
    int ny, int nz, const std::vector<double>& p_s,
    const std::vector<std::vector<std::vector<double>>>& p_yz) {
  wiretap::ChannelWithState ch;
  ch.s = {"S", static_cast<int>(p_s.size())};
  ch.x = {"X", static_cast<int>(p_yz[0].size())};
  ch.y = {"Y", ny};
  ch.z = {"Z", nz};
  ch.p_s = p_s;
  for (const auto& per_x : p_yz)
    for (const auto& slice : per_x)
      ch.p_yz_given_xs.insert(ch.p_yz_given_xs.end(), slice.begin(), slice.end());
  ch.validate();
  return ch;
}

// Binary channel with Y = BSC(py)(X) and Z = BSC(pz)(X), conditionally
// independent given X; state does not touch the channel.
inline wiretap::ChannelWithState bsc_pair_channel(double py, double pz,
                                                  const std::vector<double>& p_s) {
  std::vector<std::vector<std::vector<double>>> rows;
  for (std::size_t s = 0; s < p_s.size(); ++s) {
    std::vector<std::vector<double>> per_x;
    for (int x = 0; x < 2; ++x) {
      std::vector<double> slice(4, 0.0);
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) {
          const double qy = (y == x) ? 1.0 - py : py;
          const double qz = (z == x) ? 1.0 - pz : pz;
          slice[static_cast<std::size_t>(y) * 2 + z] = qy * qz;
        }
      per_x.push_back(slice);
    }
    rows.push_back(per_x);
  }
  return make_channel(2, 2, p_s, rows);
}

inline double log_factorial(int n) {
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_binomial_pmf(int n, int k, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

// P(lo <= Binomial(n, p) <= hi), exact summation.
inline double binomial_interval(int n, double p, int lo, int hi) {
  double total = 0.0;
  for (int k = std::max(0, lo); k <= std::min(n, hi); ++k)
    total += std::exp(log_binomial_pmf(n, k, p));
  return total;
}

}  // namespace testutil
