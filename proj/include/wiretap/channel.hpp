#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/info.hpp"

namespace wiretap {

namespace detail {
inline void check_pmf_slice(std::span<const double> slice, const std::string& what) {
  double sum = 0.0;
  for (double p : slice) {
    if (p < 0.0) throw validation_error(what + " has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTol)
    throw validation_error(what + " not normalized: sum = " + std::to_string(sum));
}
}  // namespace detail

// Discrete memoryless wiretap channel with i.i.d. state: p(s) and p(y,z|x,s)
// over finite alphabets. The conditional table is flattened row-major as
// [s][x][y*|Z| + z].
struct ChannelWithState {
  Alphabet x, s, y, z;
  std::vector<double> p_s;           // [s]
  std::vector<double> p_yz_given_xs; // [((s*|X|)+x)*|Y||Z| + y*|Z| + z]

  std::span<const double> yz_slice(int si, int xi) const {
    const std::size_t n = static_cast<std::size_t>(y.size) * z.size;
    return {p_yz_given_xs.data() + (static_cast<std::size_t>(si) * x.size + xi) * n, n};
  }

  void validate() const {
    validate_alphabet(x);
    validate_alphabet(s);
    validate_alphabet(y);
    validate_alphabet(z);
    if (p_s.size() != static_cast<std::size_t>(s.size))
      throw validation_error("p_s size does not match |S|");
    detail::check_pmf_slice(p_s, "p_s");
    const std::size_t expected =
        static_cast<std::size_t>(s.size) * x.size * y.size * z.size;
    if (p_yz_given_xs.size() != expected)
      throw validation_error("p_yz_given_xs size does not match |S||X||Y||Z|");
    for (int si = 0; si < s.size; ++si)
      for (int xi = 0; xi < x.size; ++xi)
        detail::check_pmf_slice(yz_slice(si, xi),
                                "p_yz_given_xs slice (s=" + std::to_string(si) +
                                    ", x=" + std::to_string(xi) + ")");
  }

  // True when p(y,z|x,s) does not depend on s (within tolerance).
  bool state_independent(double tol = kNormTol) const {
    for (int si = 1; si < s.size; ++si)
      for (int xi = 0; xi < x.size; ++xi) {
        const auto a = yz_slice(0, xi);
        const auto b = yz_slice(si, xi);
        for (std::size_t k = 0; k < a.size(); ++k)
          if (std::abs(a[k] - b[k]) > tol) return false;
      }
    return true;
  }
};

// Causal encoding policy: an auxiliary V with p(v|s) and a per-symbol input
// rule p(x|v,s). With independent_v set, p(v|s) must not depend on s (the
// domain of the key-only rate branch).
struct CausalPolicy {
  Alphabet v;
  int s_size = 0;
  int x_size = 0;
  std::vector<double> p_v_given_s;  // [s*|V| + v]
  std::vector<double> p_x_given_vs; // [(v*|S| + s)*|X| + x]
  bool independent_v = false;

  std::span<const double> v_slice(int si) const {
    return {p_v_given_s.data() + static_cast<std::size_t>(si) * v.size,
            static_cast<std::size_t>(v.size)};
  }
  std::span<double> v_slice_mut(int si) {
    return {p_v_given_s.data() + static_cast<std::size_t>(si) * v.size,
            static_cast<std::size_t>(v.size)};
  }
  std::span<const double> x_slice(int vi, int si) const {
    return {p_x_given_vs.data() +
                (static_cast<std::size_t>(vi) * s_size + si) * x_size,
            static_cast<std::size_t>(x_size)};
  }
  std::span<double> x_slice_mut(int vi, int si) {
    return {p_x_given_vs.data() +
                (static_cast<std::size_t>(vi) * s_size + si) * x_size,
            static_cast<std::size_t>(x_size)};
  }

  void validate() const {
    validate_alphabet(v);
    if (s_size < 1 || x_size < 1)
      throw validation_error("CausalPolicy has empty S or X dimension");
    if (p_v_given_s.size() != static_cast<std::size_t>(s_size) * v.size)
      throw validation_error("p_v_given_s size mismatch");
    if (p_x_given_vs.size() != static_cast<std::size_t>(v.size) * s_size * x_size)
      throw validation_error("p_x_given_vs size mismatch");
    for (int si = 0; si < s_size; ++si)
      detail::check_pmf_slice(v_slice(si), "p_v_given_s slice s=" + std::to_string(si));
    for (int vi = 0; vi < v.size; ++vi)
      for (int si = 0; si < s_size; ++si)
        detail::check_pmf_slice(x_slice(vi, si),
                                "p_x_given_vs slice (v=" + std::to_string(vi) +
                                    ", s=" + std::to_string(si) + ")");
    if (independent_v) {
      for (int si = 1; si < s_size; ++si)
        for (int vi = 0; vi < v.size; ++vi)
          if (std::abs(v_slice(si)[vi] - v_slice(0)[vi]) > kNormTol)
            throw validation_error(
                "independent_v is set but p(v|s) depends on s");
    }
  }
};

// Convenience constructors from nested tables.
inline CausalPolicy make_policy(int x_size,
                                const std::vector<std::vector<double>>& p_v_given_s,
                                const std::vector<std::vector<std::vector<double>>>& p_x_given_vs,
                                bool independent_v = false,
                                std::string v_name = "V") {
  CausalPolicy pol;
  pol.s_size = static_cast<int>(p_v_given_s.size());
  pol.v = Alphabet{std::move(v_name),
                   pol.s_size > 0 ? static_cast<int>(p_v_given_s[0].size()) : 0};
  pol.x_size = x_size;
  pol.independent_v = independent_v;
  for (const auto& row : p_v_given_s) {
    if (static_cast<int>(row.size()) != pol.v.size)
      throw validation_error("make_policy: ragged p_v_given_s");
    pol.p_v_given_s.insert(pol.p_v_given_s.end(), row.begin(), row.end());
  }
  if (static_cast<int>(p_x_given_vs.size()) != pol.v.size)
    throw validation_error("make_policy: p_x_given_vs first dimension must be |V|");
  for (const auto& per_v : p_x_given_vs) {
    if (static_cast<int>(per_v.size()) != pol.s_size)
      throw validation_error("make_policy: p_x_given_vs second dimension must be |S|");
    for (const auto& row : per_v) {
      if (static_cast<int>(row.size()) != x_size)
        throw validation_error("make_policy: ragged p_x_given_vs");
      pol.p_x_given_vs.insert(pol.p_x_given_vs.end(), row.begin(), row.end());
    }
  }
  pol.validate();
  return pol;
}

// Policy with p(v) free of s, replicated across states.
inline CausalPolicy make_independent_policy(
    int s_size, int x_size, const std::vector<double>& p_v,
    const std::vector<std::vector<std::vector<double>>>& p_x_given_vs,
    std::string v_name = "V") {
  std::vector<std::vector<double>> rows(s_size, p_v);
  return make_policy(x_size, rows, p_x_given_vs, /*independent_v=*/true,
                     std::move(v_name));
}

// The identity policy V = X with a given input rule p(x|s): p(v|s) = p(x|s)
// and x = v deterministically.
inline CausalPolicy make_identity_policy(int x_size,
                                         const std::vector<std::vector<double>>& p_x_given_s) {
  const int s_size = static_cast<int>(p_x_given_s.size());
  std::vector<std::vector<std::vector<double>>> x_rule(
      x_size, std::vector<std::vector<double>>(s_size, std::vector<double>(x_size, 0.0)));
  for (int vi = 0; vi < x_size; ++vi)
    for (int si = 0; si < s_size; ++si) x_rule[vi][si][vi] = 1.0;
  bool independent = true;
  for (int si = 1; si < s_size && independent; ++si)
    for (int xi = 0; xi < x_size; ++xi)
      if (std::abs(p_x_given_s[si][xi] - p_x_given_s[0][xi]) > kNormTol) {
        independent = false;
        break;
      }
  return make_policy(x_size, p_x_given_s, x_rule, independent);
}

// Shannon-strategy form of a causal policy: U independent of S, a map
// v(u,s), and the input rule p(x|v,s).
struct ShannonStrategy {
  Alphabet u;
  int s_size = 0;
  int v_size = 0;
  int x_size = 0;
  std::vector<double> p_u;          // [u]
  std::vector<int> v_of_us;         // [u*|S| + s] -> v
  std::vector<double> p_x_given_vs; // [(v*|S| + s)*|X| + x]

  int v_of(int ui, int si) const { return v_of_us[static_cast<std::size_t>(ui) * s_size + si]; }
  std::span<const double> x_slice(int vi, int si) const {
    return {p_x_given_vs.data() +
                (static_cast<std::size_t>(vi) * s_size + si) * x_size,
            static_cast<std::size_t>(x_size)};
  }

  void validate() const {
    validate_alphabet(u);
    if (s_size < 1 || v_size < 1 || x_size < 1)
      throw validation_error("ShannonStrategy has an empty dimension");
    if (p_u.size() != static_cast<std::size_t>(u.size))
      throw validation_error("p_u size mismatch");
    detail::check_pmf_slice(p_u, "p_u");
    if (v_of_us.size() != static_cast<std::size_t>(u.size) * s_size)
      throw validation_error("v_of_us size mismatch");
    for (int v : v_of_us)
      if (v < 0 || v >= v_size)
        throw validation_error("v_of_us maps outside [0,|V|)");
    if (p_x_given_vs.size() != static_cast<std::size_t>(v_size) * s_size * x_size)
      throw validation_error("p_x_given_vs size mismatch");
    for (int vi = 0; vi < v_size; ++vi)
      for (int si = 0; si < s_size; ++si)
        detail::check_pmf_slice(x_slice(vi, si), "p_x_given_vs slice");
  }
};

inline ShannonStrategy make_strategy(int s_size, int v_size, int x_size,
                                     std::vector<double> p_u,
                                     std::vector<int> v_of_us,
                                     const std::vector<std::vector<std::vector<double>>>& p_x_given_vs) {
  ShannonStrategy st;
  st.u = Alphabet{"U", static_cast<int>(p_u.size())};
  st.s_size = s_size;
  st.v_size = v_size;
  st.x_size = x_size;
  st.p_u = std::move(p_u);
  st.v_of_us = std::move(v_of_us);
  for (const auto& per_v : p_x_given_vs)
    for (const auto& row : per_v)
      st.p_x_given_vs.insert(st.p_x_given_vs.end(), row.begin(), row.end());
  st.validate();
  return st;
}

// Identity strategy over a given codeword distribution: V = U, x = v.
inline ShannonStrategy make_identity_strategy(int s_size, std::vector<double> p_u) {
  const int n = static_cast<int>(p_u.size());
  ShannonStrategy st;
  st.u = Alphabet{"U", n};
  st.s_size = s_size;
  st.v_size = n;
  st.x_size = n;
  st.p_u = std::move(p_u);
  st.v_of_us.assign(static_cast<std::size_t>(n) * s_size, 0);
  for (int ui = 0; ui < n; ++ui)
    for (int si = 0; si < s_size; ++si) st.v_of_us[static_cast<std::size_t>(ui) * s_size + si] = ui;
  st.p_x_given_vs.assign(static_cast<std::size_t>(n) * s_size * n, 0.0);
  for (int vi = 0; vi < n; ++vi)
    for (int si = 0; si < s_size; ++si)
      st.p_x_given_vs[(static_cast<std::size_t>(vi) * s_size + si) * n + vi] = 1.0;
  st.validate();
  return st;
}

// Auxiliary chain of the upper bound: p(u|s) p(v1|u,s) p(v2|v1,s) p(x|v2,s).
struct AuxChain {
  Alphabet u, v1, v2;
  int s_size = 0;
  int x_size = 0;
  std::vector<double> p_u_given_s;    // [s*|U| + u]
  std::vector<double> p_v1_given_us;  // [(u*|S| + s)*|V1| + v1]
  std::vector<double> p_v2_given_v1s; // [(v1*|S| + s)*|V2| + v2]
  std::vector<double> p_x_given_v2s;  // [(v2*|S| + s)*|X| + x]

  void validate() const {
    validate_alphabet(u);
    validate_alphabet(v1);
    validate_alphabet(v2);
    if (s_size < 1 || x_size < 1) throw validation_error("AuxChain has an empty dimension");
    auto check = [&](const std::vector<double>& t, std::size_t slices, int width,
                     const char* what) {
      if (t.size() != slices * width)
        throw validation_error(std::string(what) + " size mismatch");
      for (std::size_t i = 0; i < slices; ++i)
        detail::check_pmf_slice({t.data() + i * width, static_cast<std::size_t>(width)},
                                what);
    };
    check(p_u_given_s, static_cast<std::size_t>(s_size), u.size, "p_u_given_s");
    check(p_v1_given_us, static_cast<std::size_t>(u.size) * s_size, v1.size, "p_v1_given_us");
    check(p_v2_given_v1s, static_cast<std::size_t>(v1.size) * s_size, v2.size, "p_v2_given_v1s");
    check(p_x_given_v2s, static_cast<std::size_t>(v2.size) * s_size, x_size, "p_x_given_v2s");
  }
};

// Auxiliary description for the noncausal lower bound: p(u|s), p(x|u,s).
struct NoncausalPolicy {
  Alphabet u;
  int s_size = 0;
  int x_size = 0;
  std::vector<double> p_u_given_s;  // [s*|U| + u]
  std::vector<double> p_x_given_us; // [(u*|S| + s)*|X| + x]

  std::span<const double> u_slice(int si) const {
    return {p_u_given_s.data() + static_cast<std::size_t>(si) * u.size,
            static_cast<std::size_t>(u.size)};
  }
  std::span<const double> x_slice(int ui, int si) const {
    return {p_x_given_us.data() +
                (static_cast<std::size_t>(ui) * s_size + si) * x_size,
            static_cast<std::size_t>(x_size)};
  }

  void validate() const {
    validate_alphabet(u);
    if (s_size < 1 || x_size < 1)
      throw validation_error("NoncausalPolicy has an empty dimension");
    if (p_u_given_s.size() != static_cast<std::size_t>(s_size) * u.size)
      throw validation_error("p_u_given_s size mismatch");
    if (p_x_given_us.size() != static_cast<std::size_t>(u.size) * s_size * x_size)
      throw validation_error("p_x_given_us size mismatch");
    for (int si = 0; si < s_size; ++si)
      detail::check_pmf_slice(u_slice(si), "p_u_given_s slice");
    for (int ui = 0; ui < u.size; ++ui)
      for (int si = 0; si < s_size; ++si)
        detail::check_pmf_slice(x_slice(ui, si), "p_x_given_us slice");
  }
};

// Values of the lower-bound expressions with the policies achieving them.
struct BoundReport {
  Bits r_csi_1 = 0.0;
  Bits r_csi_2 = 0.0;
  Bits lower_bound = 0.0;  // max of the two branches
  std::optional<Bits> liu_chen;
  CausalPolicy witness_csi_1;
  CausalPolicy witness_csi_2;
};

}  // namespace wiretap
