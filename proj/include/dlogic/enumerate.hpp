#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "dlogic/kripke.hpp"
#include "dlogic/relation.hpp"

namespace dlogic {

/// A rooted S4D-frame shape: preorder r plus the set of rd-reflexive worlds.
/// rd is (W×W − Id) ∪ Id_reflexive, which makes rd symmetric,
/// pseudo-transitive and rd ∪ Id universal for any choice of the set.
struct FrameShape {
  Relation r;
  WorldSet reflexive;
  bool t1 = false;
  bool ds = false;

  Frame frame() const { return frameFromPreorder(r, reflexive); }
};

inline FrameShape makeShape(Relation r, WorldSet reflexive) {
  FrameShape s{std::move(r), reflexive};
  s.t1 = true;
  s.ds = true;
  for (World w = 0; w < s.r.size(); ++w) {
    if (reflexive.contains(w)) continue;
    const WorldSet self = WorldSet::single(w);
    if (!(s.r.predecessors(w) - self).empty()) s.t1 = false;
    if ((s.r.successors(w) - self).empty()) s.ds = false;
  }
  return s;
}

/// Every preorder on n labeled worlds, by brute force over the off-diagonal
/// bits. Intended for n ≤ 5.
inline std::vector<Relation> labeledPreorders(std::size_t n) {
  if (n == 0 || n > 5) throw std::invalid_argument("labeledPreorders: n must be between 1 and 5");
  std::vector<std::pair<World, World>> off;
  for (World x = 0; x < n; ++x)
    for (World y = 0; y < n; ++y)
      if (x != y) off.emplace_back(x, y);
  std::vector<Relation> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << off.size()); ++m) {
    Relation r = Relation::identity(n);
    for (std::size_t i = 0; i < off.size(); ++i)
      if ((m >> i) & 1U) r.insert(off[i].first, off[i].second);
    if (r.isTransitive()) out.push_back(std::move(r));
  }
  return out;
}

/// Every (r, reflexive-set) pair on n labeled worlds.
inline std::vector<FrameShape> labeledShapes(std::size_t n) {
  std::vector<FrameShape> out;
  for (const auto& r : labeledPreorders(n))
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) out.push_back(makeShape(r, WorldSet(s)));
  return out;
}

namespace detail {

inline std::uint64_t shapeCode(const Relation& r, WorldSet refl, const std::vector<World>& order) {
  const std::size_t n = order.size();
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (r.contains(order[i], order[j])) code |= std::uint64_t{1} << (i * n + j);
  for (std::size_t i = 0; i < n; ++i)
    if (refl.contains(order[i])) code |= std::uint64_t{1} << (n * n + i);
  return code;
}

/// Least code over the relabelings that sort worlds by an isomorphism
/// invariant; equal for isomorphic shapes.
inline std::uint64_t canonicalCode(const Relation& r, WorldSet refl) {
  const std::size_t n = r.size();
  std::vector<std::uint32_t> inv(n);
  for (World x = 0; x < n; ++x)
    inv[x] = (refl.contains(x) ? 1U << 16 : 0U) | static_cast<std::uint32_t>(r.successors(x).count() << 8) |
             static_cast<std::uint32_t>(r.predecessors(x).count());
  std::vector<World> order(n);
  std::iota(order.begin(), order.end(), World{0});
  std::stable_sort(order.begin(), order.end(), [&](World a, World b) { return inv[a] < inv[b]; });
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [begin, end)
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && inv[order[j]] == inv[order[i]]) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  std::uint64_t best = ~std::uint64_t{0};
  auto rec = [&](auto&& self, std::size_t b) -> void {
    if (b == blocks.size()) {
      best = std::min(best, shapeCode(r, refl, order));
      return;
    }
    auto first = order.begin() + static_cast<std::ptrdiff_t>(blocks[b].first);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(blocks[b].second);
    std::sort(first, last);
    do {
      self(self, b + 1);
    } while (std::next_permutation(first, last));
  };
  rec(rec, 0);
  return best;
}

inline std::vector<FrameShape> generateCanonicalShapes(std::size_t n) {
  std::vector<FrameShape> out;
  std::unordered_set<std::uint64_t> seen;
  // Worlds grouped into contiguous clusters, clusters ordered along a linear
  // extension of the cluster order; every isomorphism type has such a form.
  for (std::uint64_t cuts = 0; cuts < (std::uint64_t{1} << (n - 1)); ++cuts) {
    std::vector<std::size_t> cluster(n, 0);
    for (std::size_t i = 1; i < n; ++i) cluster[i] = cluster[i - 1] + (((cuts >> (i - 1)) & 1U) ? 1 : 0);
    const std::size_t k = cluster[n - 1] + 1;
    std::vector<std::pair<std::size_t, std::size_t>> above;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) above.emplace_back(i, j);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << above.size()); ++m) {
      Relation order = Relation::identity(k);
      for (std::size_t e = 0; e < above.size(); ++e)
        if ((m >> e) & 1U) order.insert(above[e].first, above[e].second);
      if (!order.isTransitive()) continue;
      Relation r(n);
      for (World x = 0; x < n; ++x)
        for (World y = 0; y < n; ++y)
          if (order.contains(cluster[x], cluster[y])) r.insert(x, y);
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        if (seen.insert(canonicalCode(r, WorldSet(s))).second) out.push_back(makeShape(r, WorldSet(s)));
      }
    }
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kMaxSearchWorlds = 7;

/// One representative per isomorphism class of rooted S4D-frames with n
/// worlds, in a fixed order. Computed once per n.
inline const std::vector<FrameShape>& canonicalShapes(std::size_t n) {
  if (n == 0 || n > kMaxSearchWorlds) throw std::invalid_argument("canonicalShapes: n must be between 1 and 7");
  static std::mutex mu;
  static std::map<std::size_t, std::vector<FrameShape>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::generateCanonicalShapes(n)).first;
  return it->second;
}

}  // namespace dlogic
