#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"

namespace mdim {

inline constexpr int kMaxBag = 8;

// Fixed-capacity integer vector indexed by bag position.
class SmallVec {
 public:
  SmallVec() = default;
  SmallVec(std::initializer_list<int> xs) {
    if (xs.size() > kMaxBag) throw std::length_error("vector longer than bag capacity");
    for (int x : xs) push_back(x);
  }
  static SmallVec filled(int k, int value) {
    SmallVec r;
    for (int i = 0; i < k; ++i) r.push_back(value);
    return r;
  }

  int size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }
  int operator[](int i) const { return v_[i]; }
  void set(int i, int x) { v_[i] = narrow(x); }

  void push_back(int x) {
    if (n_ == kMaxBag) throw std::length_error("vector longer than bag capacity");
    v_[n_++] = narrow(x);
  }

  int min() const {
    int m = v_[0];
    for (int i = 1; i < n_; ++i) m = std::min<int>(m, v_[i]);
    return m;
  }
  int max() const {
    int m = v_[0];
    for (int i = 1; i < n_; ++i) m = std::max<int>(m, v_[i]);
    return m;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) s += (i ? "," : "") + std::to_string(v_[i]);
    return s + ")";
  }

  friend auto operator<=>(const SmallVec&, const SmallVec&) = default;
  friend bool operator==(const SmallVec&, const SmallVec&) = default;

  std::size_t hash() const noexcept {
    std::size_t h = n_;
    for (int i = 0; i < n_; ++i) h = h * 1000003u ^ v_[i];
    return h;
  }

 private:
  static std::uint16_t narrow(int x) {
    if (x < 0 || x > 0xffff) throw std::out_of_range("vector entry out of range");
    return static_cast<std::uint16_t>(x);
  }

  std::uint8_t n_ = 0;
  // entries past n_ stay zero so the defaulted comparisons are exact
  std::array<std::uint16_t, kMaxBag> v_{};
};

struct SmallVecHash {
  std::size_t operator()(const SmallVec& v) const noexcept { return v.hash(); }
};

using DistVec = SmallVec;
using TraceVec = SmallVec;
using VecPair = std::pair<DistVec, DistVec>;

template <typename Range>
DistVec distance_vector(Vertex x, const Range& bag, const DistanceMatrix& d) {
  DistVec r;
  for (Vertex v : bag) r.push_back(d(x, v));
  return r;
}

inline bool is_all_ones(const SmallVec& r) {
  for (int i = 0; i < r.size(); ++i)
    if (r[i] != 1) return false;
  return true;
}

// Subtracts the minimum; the window property of a clique keeps the result binary and never all-ones.
inline TraceVec trace_from_distvec(const DistVec& r) {
  const int m = r.min();
  TraceVec t;
  for (int i = 0; i < r.size(); ++i) t.push_back(r[i] - m);
  if (t.max() > 1 || is_all_ones(t)) throw std::logic_error("trace of " + r.str() + " is not a valid trace");
  return t;
}

template <typename Range>
TraceVec trace_of(Vertex x, const Range& bag, const DistanceMatrix& d) {
  return trace_from_distvec(distance_vector(x, bag, d));
}

inline bool vector_resolves(const SmallVec& r1, const SmallVec& r2, const SmallVec& r3) {
  if (r1.size() != r2.size() || r1.size() != r3.size()) throw std::invalid_argument("vector sizes differ");
  int a = r1[0] + r3[0], b = r2[0] + r3[0];
  for (int i = 1; i < r1.size(); ++i) {
    a = std::min(a, r1[i] + r3[i]);
    b = std::min(b, r2[i] + r3[i]);
  }
  return a != b;
}

template <typename Range, typename VecRange>
bool pair_resolved_by_vectors(Vertex x, Vertex y, const Range& bag, const VecRange& m, const DistanceMatrix& d) {
  const auto rx = distance_vector(x, bag, d);
  const auto ry = distance_vector(y, bag, d);
  for (const auto& r : m)
    if (vector_resolves(rx, ry, r)) return true;
  return false;
}

inline SmallVec lift(const SmallVec& r, int m, int at) {
  if (at < 0 || at > r.size()) throw std::out_of_range("lift index");
  SmallVec out;
  for (int i = 0; i < at; ++i) out.push_back(r[i]);
  out.push_back(m);
  for (int i = at; i < r.size(); ++i) out.push_back(r[i]);
  return out;
}

inline SmallVec drop(const SmallVec& r, int at) {
  if (r.size() < 2) throw std::invalid_argument("drop needs length at least 2");
  if (at < 0 || at >= r.size()) throw std::out_of_range("drop index");
  SmallVec out;
  for (int i = 0; i < r.size(); ++i)
    if (i != at) out.push_back(r[i]);
  return out;
}

enum class Extend { Minus, Flat, Plus };

inline DistVec extend_vector(const DistVec& r, Extend mode, int at) {
  if (r.empty()) throw std::invalid_argument("extend_vector needs a non-empty vector");
  const int lo = r.min(), hi = r.max();
  if (lo != hi) return lift(r, mode == Extend::Plus ? hi : lo, at);
  if (mode == Extend::Minus) {
    if (lo == 0) throw std::invalid_argument("minus extension of a constant zero vector");
    return lift(r, lo - 1, at);
  }
  return lift(r, mode == Extend::Flat ? lo : lo + 1, at);
}

// Binary vectors of length k <= 7 are also handled as bitmask codes (bit j = coordinate j), so
// sets of traces fit in one 128-bit word.
using TraceSet = unsigned __int128;
inline constexpr int kMaxDpBag = 7;
inline constexpr std::uint32_t kMaxTraceCodes = 1u << kMaxDpBag;

inline std::uint32_t all_ones_code(int k) { return (1u << k) - 1u; }

inline std::uint32_t trace_code(const TraceVec& t) {
  std::uint32_t c = 0;
  for (int i = 0; i < t.size(); ++i) {
    if (t[i] > 1) throw std::invalid_argument("not a binary vector: " + t.str());
    if (t[i]) c |= 1u << i;
  }
  return c;
}

inline TraceVec trace_from_code(std::uint32_t code, int k) {
  TraceVec t;
  for (int i = 0; i < k; ++i) t.push_back((code >> i) & 1u);
  return t;
}

// Inserts bit `b` at position `at`, shifting higher bits up.
inline std::uint32_t code_lift(std::uint32_t c, int b, int at) {
  const std::uint32_t low = c & ((1u << at) - 1u);
  return low | (static_cast<std::uint32_t>(b) << at) | ((c >> at) << (at + 1));
}

inline std::uint32_t code_drop(std::uint32_t c, int at) {
  const std::uint32_t low = c & ((1u << at) - 1u);
  return low | ((c >> (at + 1)) << at);
}

// The all-ones vector resolves exactly what the all-zeros vector resolves.
inline std::uint32_t code_normalize(std::uint32_t c, int k) { return c == all_ones_code(k) ? 0u : c; }

inline std::vector<TraceVec> traces_of_set(TraceSet s, int k) {
  std::vector<TraceVec> out;
  for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c)
    if ((s >> c) & 1u) out.push_back(trace_from_code(c, k));
  return out;
}

inline TraceSet trace_set_of(const std::vector<TraceVec>& ts) {
  TraceSet s = 0;
  for (const auto& t : ts) s |= TraceSet{1} << trace_code(t);
  return s;
}

}  // namespace mdim

template <>
struct std::hash<mdim::SmallVec> {
  std::size_t operator()(const mdim::SmallVec& v) const noexcept { return v.hash(); }
};
