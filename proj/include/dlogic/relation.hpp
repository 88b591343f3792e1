#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dlogic {

using World = std::size_t;

/// Worlds (or points) are indices into a fixed ordering; sets of them are
/// single 64-bit words.
inline constexpr std::size_t kMaxWorlds = 64;

class WorldSet {
 public:
  class iterator {
   public:
    using value_type = World;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    explicit iterator(std::uint64_t rest) : rest_(rest) {}
    World operator*() const { return static_cast<World>(std::countr_zero(rest_)); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr WorldSet() = default;
  constexpr explicit WorldSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr WorldSet full(std::size_t n) {
    return WorldSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }
  static constexpr WorldSet single(World w) { return WorldSet(std::uint64_t{1} << w); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool contains(World w) const { return w < 64 && ((bits_ >> w) & 1U) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool subsetOf(WorldSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(WorldSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr World first() const { return static_cast<World>(std::countr_zero(bits_)); }

  constexpr void insert(World w) { bits_ |= std::uint64_t{1} << w; }
  constexpr void erase(World w) { bits_ &= ~(std::uint64_t{1} << w); }

  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

  constexpr WorldSet& operator|=(WorldSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr WorldSet& operator&=(WorldSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  constexpr WorldSet& operator-=(WorldSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }
  friend constexpr WorldSet operator|(WorldSet a, WorldSet b) { return a |= b; }
  friend constexpr WorldSet operator&(WorldSet a, WorldSet b) { return a &= b; }
  friend constexpr WorldSet operator-(WorldSet a, WorldSet b) { return a -= b; }
  friend constexpr bool operator==(WorldSet, WorldSet) = default;
  friend constexpr auto operator<=>(WorldSet a, WorldSet b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint64_t bits_ = 0;
};

/// Binary relation on {0..n-1} stored as a bit-matrix of successor rows.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n) : rows_(checkedSize(n)) {}
  Relation(std::size_t n, std::initializer_list<std::pair<World, World>> pairs) : Relation(n) {
    for (auto [x, y] : pairs) insert(x, y);
  }

  static Relation identity(std::size_t n) {
    Relation r(n);
    for (World x = 0; x < n; ++x) r.insert(x, x);
    return r;
  }
  static Relation universal(std::size_t n) {
    Relation r(n);
    for (auto& row : r.rows_) row = WorldSet::full(n);
    return r;
  }
  static Relation inequality(std::size_t n) {
    Relation r = universal(n);
    for (World x = 0; x < n; ++x) r.erase(x, x);
    return r;
  }

  std::size_t size() const { return rows_.size(); }
  WorldSet domain() const { return WorldSet::full(size()); }

  bool contains(World x, World y) const { return rows_[x].contains(y); }
  void insert(World x, World y) {
    check(x);
    check(y);
    rows_[x].insert(y);
  }
  void erase(World x, World y) {
    check(x);
    check(y);
    rows_[x].erase(y);
  }

  WorldSet successors(World x) const { return rows_[x]; }
  WorldSet predecessors(World y) const {
    WorldSet out;
    for (World x = 0; x < size(); ++x)
      if (rows_[x].contains(y)) out.insert(x);
    return out;
  }
  void setSuccessors(World x, WorldSet s) {
    check(x);
    rows_[x] = s & domain();
  }

  /// R(V): everything reachable in one step from V.
  WorldSet image(WorldSet v) const {
    WorldSet out;
    for (World x : v) out |= rows_[x];
    return out;
  }
  /// R^{-1}(V).
  WorldSet preimage(WorldSet v) const {
    WorldSet out;
    for (World x = 0; x < size(); ++x)
      if (rows_[x].intersects(v)) out.insert(x);
    return out;
  }

  std::size_t pairCount() const {
    std::size_t c = 0;
    for (auto row : rows_) c += row.count();
    return c;
  }
  std::vector<std::pair<World, World>> pairs() const {
    std::vector<std::pair<World, World>> out;
    for (World x = 0; x < size(); ++x)
      for (World y : rows_[x]) out.emplace_back(x, y);
    return out;
  }

  bool isReflexive() const {
    for (World x = 0; x < size(); ++x)
      if (!contains(x, x)) return false;
    return true;
  }
  bool isIrreflexiveAt(World x) const { return !contains(x, x); }
  bool isSymmetric() const { return *this == converse(); }
  bool isTransitive() const {
    for (World x = 0; x < size(); ++x)
      if (!image(rows_[x]).subsetOf(rows_[x])) return false;
    return true;
  }
  /// R ∪ Id is transitive.
  bool isPseudoTransitive() const { return (*this | identity(size())).isTransitive(); }
  bool isPreorder() const { return isReflexive() && isTransitive(); }

  Relation converse() const {
    Relation out(size());
    for (World x = 0; x < size(); ++x)
      for (World y : rows_[x]) out.rows_[y].insert(x);
    return out;
  }

  /// R ∘ S = {(x,z) | ∃y. xRy and ySz}.
  Relation compose(const Relation& s) const {
    sameSize(s);
    Relation out(size());
    for (World x = 0; x < size(); ++x) out.rows_[x] = s.image(rows_[x]);
    return out;
  }

  /// R* = union of R^n for n >= 1 (no diagonal added).
  Relation transitiveClosure() const {
    Relation out = *this;
    const std::size_t n = size();
    for (World k = 0; k < n; ++k)
      for (World i = 0; i < n; ++i)
        if (out.rows_[i].contains(k)) out.rows_[i] |= out.rows_[k];
    return out;
  }

  /// R* − (Id − R): transitive closure that keeps irreflexive points
  /// irreflexive.
  Relation pseudoTransitiveClosure() const {
    Relation out = transitiveClosure();
    for (World x = 0; x < size(); ++x)
      if (!contains(x, x)) out.rows_[x].erase(x);
    return out;
  }

  Relation reflexiveTransitiveClosure() const { return (*this | identity(size())).transitiveClosure(); }

  /// Restriction to `worlds`, re-indexed in the given order.
  Relation restrict(const std::vector<World>& worlds) const {
    Relation out(worlds.size());
    for (std::size_t i = 0; i < worlds.size(); ++i)
      for (std::size_t j = 0; j < worlds.size(); ++j)
        if (contains(worlds[i], worlds[j])) out.insert(i, j);
    return out;
  }

  friend Relation operator|(Relation a, const Relation& b) {
    a.sameSize(b);
    for (World x = 0; x < a.size(); ++x) a.rows_[x] |= b.rows_[x];
    return a;
  }
  friend Relation operator&(Relation a, const Relation& b) {
    a.sameSize(b);
    for (World x = 0; x < a.size(); ++x) a.rows_[x] &= b.rows_[x];
    return a;
  }
  friend Relation operator-(Relation a, const Relation& b) {
    a.sameSize(b);
    for (World x = 0; x < a.size(); ++x) a.rows_[x] -= b.rows_[x];
    return a;
  }
  bool subsetOf(const Relation& b) const {
    sameSize(b);
    for (World x = 0; x < size(); ++x)
      if (!rows_[x].subsetOf(b.rows_[x])) return false;
    return true;
  }
  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  static std::size_t checkedSize(std::size_t n) {
    if (n > kMaxWorlds) throw std::length_error("relation: at most 64 worlds are supported");
    return n;
  }
  void check(World x) const {
    if (x >= size()) throw std::out_of_range("relation: world index out of range");
  }
  void sameSize(const Relation& o) const {
    if (o.size() != size()) throw std::invalid_argument("relation: size mismatch");
  }

  std::vector<WorldSet> rows_;
};

}  // namespace dlogic
