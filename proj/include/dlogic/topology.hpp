#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlogic/formula.hpp"
#include "dlogic/kripke.hpp"
#include "dlogic/relation.hpp"

namespace dlogic {

using Point = World;
using PointSet = WorldSet;

/// Finite topological space given by its full family of open sets.
class FiniteSpace {
 public:
  FiniteSpace(std::size_t n, std::vector<PointSet> opens, std::vector<std::string> names = {})
      : n_(n), opens_(std::move(opens)), names_(std::move(names)) {
    if (n_ == 0 || n_ > kMaxWorlds) throw std::invalid_argument("space: need between 1 and 64 points");
    std::sort(opens_.begin(), opens_.end());
    opens_.erase(std::unique(opens_.begin(), opens_.end()), opens_.end());
    const PointSet all = PointSet::full(n_);
    for (PointSet u : opens_)
      if (!u.subsetOf(all)) throw std::invalid_argument("space: open set is not a subset of X");
    if (!isOpen(PointSet{})) throw std::invalid_argument("space: the empty set must be open");
    if (!isOpen(all)) throw std::invalid_argument("space: X must be open");
    for (PointSet u : opens_)
      for (PointSet v : opens_) {
        if (!isOpen(u | v)) throw std::invalid_argument("space: opens are not closed under union");
        if (!isOpen(u & v)) throw std::invalid_argument("space: opens are not closed under intersection");
      }
    if (names_.empty())
      for (Point x = 0; x < n_; ++x) names_.push_back("x" + std::to_string(x));
    if (names_.size() != n_) throw std::invalid_argument("space: wrong number of point names");
  }

  std::size_t size() const { return n_; }
  PointSet points() const { return PointSet::full(n_); }
  const std::vector<PointSet>& opens() const { return opens_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Point x) const { return names_.at(x); }

  bool isOpen(PointSet a) const { return std::binary_search(opens_.begin(), opens_.end(), a); }
  bool isClosed(PointSet a) const { return isOpen(points() - a); }

  /// Largest open subset of a.
  PointSet interior(PointSet a) const {
    requireSubset(a);
    PointSet out;
    for (PointSet u : opens_)
      if (u.subsetOf(a)) out |= u;
    return out;
  }
  /// Smallest closed superset of a.
  PointSet closure(PointSet a) const {
    requireSubset(a);
    return points() - interior(points() - a);
  }

 private:
  void requireSubset(PointSet a) const {
    if (!a.subsetOf(points())) throw std::invalid_argument("space: set is not a subset of X");
  }

  std::size_t n_;
  std::vector<PointSet> opens_;
  std::vector<std::string> names_;
};

inline FiniteSpace discreteSpace(std::size_t n) {
  std::vector<PointSet> opens;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) opens.emplace_back(m);
  return FiniteSpace(n, std::move(opens));
}

inline FiniteSpace indiscreteSpace(std::size_t n) { return FiniteSpace(n, {PointSet{}, PointSet::full(n)}); }

class TopoModel {
 public:
  TopoModel(FiniteSpace space, Valuation val) : space_(std::move(space)), val_(std::move(val)) {
    for (const auto& [p, s] : val_)
      if (!s.subsetOf(space_.points()))
        throw std::invalid_argument("topological model: valuation of '" + p + "' is not a subset of X");
  }
  const FiniteSpace& space() const { return space_; }
  const Valuation& valuation() const { return val_; }

 private:
  FiniteSpace space_;
  Valuation val_;
};

/// □ is interior; Dφ holds at x iff φ holds at every y ≠ x.
struct TopoSemantics {
  const FiniteSpace& space;
  const Valuation& val;

  PointSet universe() const { return space.points(); }
  PointSet letter(const std::string& p) const {
    auto it = val.find(p);
    return it == val.end() ? PointSet{} : it->second;
  }
  PointSet box(PointSet s) const { return space.interior(s); }
  PointSet diff(PointSet s) const {
    PointSet out;
    for (Point x = 0; x < space.size(); ++x)
      if ((space.points() - PointSet::single(x)).subsetOf(s)) out.insert(x);
    return out;
  }
};

inline PointSet topoTruthSet(const TopoModel& m, const Formula& f) {
  return CompiledFormula(f).truthSet(TopoSemantics{m.space(), m.valuation()});
}

inline bool checkTopo(const TopoModel& m, Point x, const Formula& f) {
  if (x >= m.space().size()) throw std::out_of_range("checkTopo: unknown point " + std::to_string(x));
  return topoTruthSet(m, f).contains(x);
}

/// X ⊨ f: true at every point under every valuation of the letters of f.
inline bool validInSpace(const FiniteSpace& s, const Formula& f, std::uint64_t cap = kDefaultValuationCap) {
  const auto ls = letters(f);
  const std::vector<std::string> names(ls.begin(), ls.end());
  const auto total = valuationCount(names.size(), s.size());
  if (!total || *total > cap) throw SearchSpaceTooLarge("validInSpace: too many valuations");
  const CompiledFormula prog(f);
  for (std::uint64_t code = 0; code < *total; ++code) {
    const Valuation v = decodeValuation(names, s.size(), code);
    if (prog.truthSet(TopoSemantics{s, v}) != s.points()) return false;
  }
  return true;
}

struct SpaceReport {
  bool t1 = false;              // singletons closed
  bool denseInItself = false;   // no isolated points
  bool zeroDimensional = false; // clopens form a base
  bool connected = false;       // only ∅ and X are clopen
};

inline SpaceReport spaceProperties(const FiniteSpace& s) {
  SpaceReport rep;
  rep.t1 = true;
  rep.denseInItself = true;
  for (Point x = 0; x < s.size(); ++x) {
    if (!s.isClosed(PointSet::single(x))) rep.t1 = false;
    if (s.isOpen(PointSet::single(x))) rep.denseInItself = false;
  }
  std::vector<PointSet> clopens;
  for (PointSet u : s.opens())
    if (s.isClosed(u)) clopens.push_back(u);
  rep.connected = clopens.size() == 2;
  rep.zeroDimensional = true;
  for (PointSet u : s.opens()) {
    PointSet covered;
    for (PointSet c : clopens)
      if (c.subsetOf(u)) covered |= c;
    if (covered != u) rep.zeroDimensional = false;
  }
  return rep;
}

/// Top(F): the up-sets of the preorder r. Built as all unions of the
/// principal up-sets R(x).
inline FiniteSpace topOf(const Frame& f) {
  if (!f.r().isPreorder()) throw std::invalid_argument("topOf: r is not reflexive and transitive");
  std::set<PointSet> opens{PointSet{}};
  for (World x = 0; x < f.size(); ++x) {
    const PointSet up = f.r().successors(x);
    std::vector<PointSet> cur(opens.begin(), opens.end());
    for (PointSet u : cur) opens.insert(u | up);
  }
  return FiniteSpace(f.size(), {opens.begin(), opens.end()}, f.names());
}

struct CdViolation {
  enum class Kind { RCf, RDf };
  Kind kind;
  World world = 0;
  PointSet lhs;
  PointSet rhs;
  std::string diagnosis;
};

/// Checks Cf f⁻¹(w) = f⁻¹(R⁻¹(w)) and ≠⁻¹(f⁻¹(w)) = f⁻¹(R_D⁻¹(w)) for every
/// world w, in world order. `map` sends points to worlds.
inline std::optional<CdViolation> checkCdPMorphism(const FiniteSpace& s, const Frame& f,
                                                   const std::vector<World>& map) {
  if (map.size() != s.size()) throw std::invalid_argument("checkCdPMorphism: map is not total on the space");
  WorldSet hit;
  for (World w : map) {
    if (w >= f.size()) throw std::invalid_argument("checkCdPMorphism: map leaves the frame");
    hit.insert(w);
  }
  if (hit != f.worlds()) throw std::invalid_argument("checkCdPMorphism: map is not surjective");

  auto pre = [&](WorldSet ws) {
    PointSet out;
    for (Point x = 0; x < s.size(); ++x)
      if (ws.contains(map[x])) out.insert(x);
    return out;
  };
  // ≠⁻¹(A) in the space: points different from some member of A.
  auto notEqualPre = [&](PointSet a) {
    if (a.empty()) return PointSet{};
    if (a.count() == 1) return s.points() - a;
    return s.points();
  };

  for (World w = 0; w < f.size(); ++w) {
    const PointSet fiber = pre(WorldSet::single(w));
    const PointSet lhs = s.closure(fiber);
    const PointSet rhs = pre(f.r().predecessors(w));
    if (lhs != rhs) return CdViolation{CdViolation::Kind::RCf, w, lhs, rhs, "closure of the fiber differs from the preimage of R^-1(w)"};
  }
  for (World w = 0; w < f.size(); ++w) {
    const PointSet fiber = pre(WorldSet::single(w));
    const PointSet lhs = notEqualPre(fiber);
    const PointSet rhs = pre(f.rd().predecessors(w));
    if (lhs != rhs) {
      std::string why = f.rd().contains(w, w) ? "rd-reflexive world has a one-point fiber"
                                              : "rd-irreflexive world has a fiber with " + std::to_string(fiber.count()) + " points";
      return CdViolation{CdViolation::Kind::RDf, w, lhs, rhs, why};
    }
  }
  return std::nullopt;
}

/// Kripke truth on F agrees with topological truth on Top(F) at every world.
/// Requires rd to be inequality.
inline bool modelAgreement(const Frame& f, const Valuation& val, const Formula& g) {
  if (f.rd() != Relation::inequality(f.size()))
    throw std::invalid_argument("modelAgreement: rd must be the inequality relation");
  const FiniteSpace top = topOf(f);
  const CompiledFormula prog(g);
  return prog.truthSet(KripkeSemantics{f, val}) == prog.truthSet(TopoSemantics{top, val});
}

}  // namespace dlogic
