#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlogic/formula.hpp"
#include "dlogic/relation.hpp"

namespace dlogic {

/// Finite bimodal frame (W, R, R_D). R interprets □, R_D interprets D.
/// No frame conditions are assumed; see frameProperties().
class Frame {
 public:
  Frame(Relation r, Relation rd, std::vector<std::string> names = {})
      : r_(std::move(r)), rd_(std::move(rd)), names_(std::move(names)) {
    if (r_.size() == 0) throw std::invalid_argument("frame: the set of worlds must be non-empty");
    if (rd_.size() != r_.size()) throw std::invalid_argument("frame: r and rd have different sizes");
    if (names_.empty()) {
      for (World w = 0; w < size(); ++w) names_.push_back("w" + std::to_string(w));
    }
    if (names_.size() != size()) throw std::invalid_argument("frame: wrong number of world names");
  }

  std::size_t size() const { return r_.size(); }
  WorldSet worlds() const { return WorldSet::full(size()); }
  const Relation& r() const { return r_; }
  const Relation& rd() const { return rd_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(World w) const { return names_.at(w); }
  std::optional<World> find(const std::string& n) const {
    for (World w = 0; w < size(); ++w)
      if (names_[w] == n) return w;
    return std::nullopt;
  }

  /// World set of the rd-reflexive worlds.
  WorldSet rdReflexive() const {
    WorldSet s;
    for (World w = 0; w < size(); ++w)
      if (rd_.contains(w, w)) s.insert(w);
    return s;
  }

  friend bool operator==(const Frame& a, const Frame& b) { return a.r_ == b.r_ && a.rd_ == b.rd_; }

 private:
  Relation r_;
  Relation rd_;
  std::vector<std::string> names_;
};

/// Frame with rd = (W×W − Id) ∪ {(x,x) | x ∈ reflexive}: the general shape of
/// a rooted S4D-frame once r is a preorder.
inline Frame frameFromPreorder(Relation r, WorldSet reflexive, std::vector<std::string> names = {}) {
  const std::size_t n = r.size();
  Relation rd = Relation::inequality(n);
  for (World w : reflexive) rd.insert(w, w);
  return Frame(std::move(r), std::move(rd), std::move(names));
}

/// Missing letters denote the empty set.
using Valuation = std::map<std::string, WorldSet>;

class KripkeModel {
 public:
  KripkeModel(Frame frame, Valuation val) : frame_(std::move(frame)), val_(std::move(val)) {
    for (const auto& [p, s] : val_)
      if (!s.subsetOf(frame_.worlds()))
        throw std::invalid_argument("model: valuation of '" + p + "' is not a subset of W");
  }

  const Frame& frame() const { return frame_; }
  const Valuation& valuation() const { return val_; }
  WorldSet letter(const std::string& p) const {
    auto it = val_.find(p);
    return it == val_.end() ? WorldSet{} : it->second;
  }

 private:
  Frame frame_;
  Valuation val_;
};

/// Set algebra for CompiledFormula::evaluate under Kripke semantics.
struct KripkeSemantics {
  const Frame& frame;
  const Valuation& val;

  WorldSet universe() const { return frame.worlds(); }
  WorldSet letter(const std::string& p) const {
    auto it = val.find(p);
    return it == val.end() ? WorldSet{} : it->second;
  }
  /// {w | R(w) ⊆ s}
  WorldSet box(WorldSet s) const { return necessity(frame.r(), s); }
  /// {w | R_D(w) ⊆ s}
  WorldSet diff(WorldSet s) const { return necessity(frame.rd(), s); }

  static WorldSet necessity(const Relation& rel, WorldSet s) {
    WorldSet out;
    for (World w = 0; w < rel.size(); ++w)
      if (rel.successors(w).subsetOf(s)) out.insert(w);
    return out;
  }
};

inline WorldSet truthSet(const KripkeModel& m, const Formula& f) {
  return CompiledFormula(f).truthSet(KripkeSemantics{m.frame(), m.valuation()});
}

inline bool checkModel(const KripkeModel& m, World w, const Formula& f) {
  if (w >= m.frame().size()) throw std::out_of_range("checkModel: unknown world " + std::to_string(w));
  return truthSet(m, f).contains(w);
}

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Countermodel {
  Valuation valuation;
  World world = 0;
};

struct FrameValidity {
  bool valid = true;
  std::optional<Countermodel> counter;
  std::uint64_t valuationsTried = 0;
};

inline constexpr std::uint64_t kDefaultValuationCap = std::uint64_t{1} << 24;

/// Decodes valuation number `code`: letter i owns bits [i·n, (i+1)·n).
inline Valuation decodeValuation(const std::vector<std::string>& names, std::size_t n, std::uint64_t code) {
  Valuation v;
  for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = WorldSet((code >> (i * n)) & WorldSet::full(n).bits());
  return v;
}

/// Number of valuations of `letterCount` letters over n worlds, or nullopt
/// when it does not fit in 64 bits.
inline std::optional<std::uint64_t> valuationCount(std::size_t letterCount, std::size_t n) {
  const std::size_t bits = letterCount * n;
  if (bits >= 64) return std::nullopt;
  return std::uint64_t{1} << bits;
}

/// F ⊨ f: true at every world under every valuation of the letters of f.
/// Valuations are tried in increasing code order; the first falsifying one
/// is returned together with the least falsifying world.
inline FrameValidity validInFrame(const Frame& frame, const Formula& f, std::uint64_t cap = kDefaultValuationCap) {
  const auto ls = letters(f);
  const std::vector<std::string> names(ls.begin(), ls.end());
  const std::size_t n = frame.size();
  const auto total = valuationCount(names.size(), n);
  if (!total || *total > cap)
    throw SearchSpaceTooLarge("validInFrame: 2^(" + std::to_string(names.size() * n) +
                              ") valuations exceed the cap of " + std::to_string(cap));
  const CompiledFormula prog(f);
  FrameValidity out;
  for (std::uint64_t code = 0; code < *total; ++code) {
    Valuation v = decodeValuation(names, n, code);
    ++out.valuationsTried;
    WorldSet truth = prog.truthSet(KripkeSemantics{frame, v});
    if (truth != frame.worlds()) {
      out.valid = false;
      out.counter = Countermodel{std::move(v), (frame.worlds() - truth).first()};
      return out;
    }
  }
  return out;
}

struct FrameReport {
  bool reflexive = false;
  bool transitive = false;
  bool rdSymmetric = false;
  bool rdPseudoTransitive = false;
  bool inclusion = false;  // r ⊆ rd ∪ Id
  bool rdPlusIdUniversal = false;
  bool t1Frame = false;  // rd-irreflexive worlds are r-minimal
  bool dsFrame = false;  // rd-irreflexive worlds have an r-successor other than themselves
  bool rooted = false;

  bool isS4D() const { return reflexive && transitive && rdSymmetric && rdPseudoTransitive && inclusion; }
};

inline FrameReport frameProperties(const Frame& f) {
  const std::size_t n = f.size();
  const Relation id = Relation::identity(n);
  FrameReport rep;
  rep.reflexive = f.r().isReflexive();
  rep.transitive = f.r().isTransitive();
  rep.rdSymmetric = f.rd().isSymmetric();
  rep.rdPseudoTransitive = f.rd().isPseudoTransitive();
  rep.inclusion = f.r().subsetOf(f.rd() | id);
  rep.rdPlusIdUniversal = (f.rd() | id) == Relation::universal(n);
  rep.t1Frame = true;
  rep.dsFrame = true;
  for (World w = 0; w < n; ++w) {
    if (f.rd().contains(w, w)) continue;
    if (!(f.r().predecessors(w) - WorldSet::single(w)).empty()) rep.t1Frame = false;
    if ((f.r().successors(w) - WorldSet::single(w)).empty()) rep.dsFrame = false;
  }
  const Relation reach = (f.r() | f.rd()).reflexiveTransitiveClosure();
  for (World w = 0; w < n && !rep.rooted; ++w) rep.rooted = reach.successors(w) == f.worlds();
  return rep;
}

/// Generated subframe with the embedding back into the source frame.
struct Subframe {
  Frame frame;
  std::vector<World> embedding;  // cone world i is source world embedding[i]
  World root = 0;
};

/// F^x: restriction to everything (R ∪ R_D)-reachable from x, x included.
inline Subframe cone(const Frame& f, World x) {
  if (x >= f.size()) throw std::out_of_range("cone: unknown world " + std::to_string(x));
  const WorldSet reach = (f.r() | f.rd()).reflexiveTransitiveClosure().successors(x);
  std::vector<World> ws(reach.begin(), reach.end());
  std::vector<std::string> names;
  World root = 0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    names.push_back(f.name(ws[i]));
    if (ws[i] == x) root = i;
  }
  return Subframe{Frame(f.r().restrict(ws), f.rd().restrict(ws), std::move(names)), std::move(ws), root};
}

/// F ⊔ G with G's worlds shifted after F's.
inline Frame disjointUnion(const Frame& a, const Frame& b) {
  const std::size_t n = a.size() + b.size();
  Relation r(n), rd(n);
  std::vector<std::string> names = a.names();
  for (auto [x, y] : a.r().pairs()) r.insert(x, y);
  for (auto [x, y] : a.rd().pairs()) rd.insert(x, y);
  for (auto [x, y] : b.r().pairs()) r.insert(a.size() + x, a.size() + y);
  for (auto [x, y] : b.rd().pairs()) rd.insert(a.size() + x, a.size() + y);
  for (const auto& nm : b.names()) names.push_back(nm);
  return Frame(std::move(r), std::move(rd), std::move(names));
}

struct PMorphismViolation {
  enum class Kind { NotSurjective, ForthR, ForthRd, BackR, BackRd };
  Kind kind;
  World source = 0;  // x in F (unused for NotSurjective)
  World other = 0;   // y in F for forth, z in G for back / unmapped target
};

inline const char* toString(PMorphismViolation::Kind k) {
  switch (k) {
    case PMorphismViolation::Kind::NotSurjective: return "not surjective";
    case PMorphismViolation::Kind::ForthR: return "r-forth";
    case PMorphismViolation::Kind::ForthRd: return "rd-forth";
    case PMorphismViolation::Kind::BackR: return "r-back";
    case PMorphismViolation::Kind::BackRd: return "rd-back";
  }
  return "?";
}

/// Checks that `map` is a p-morphism from `from` onto `to`. Conditions are
/// tested in the order surjectivity, forth (r, rd), back (r, rd), and worlds
/// in index order; the first failure is returned.
inline std::optional<PMorphismViolation> checkPMorphism(const Frame& from, const Frame& to,
                                                        const std::vector<World>& map) {
  using K = PMorphismViolation::Kind;
  if (map.size() != from.size()) throw std::invalid_argument("checkPMorphism: map is not total on the source");
  for (World m : map)
    if (m >= to.size()) throw std::invalid_argument("checkPMorphism: map leaves the target frame");

  WorldSet hit;
  for (World m : map) hit.insert(m);
  if (hit != to.worlds()) return PMorphismViolation{K::NotSurjective, 0, (to.worlds() - hit).first()};

  auto forth = [&](const Relation& a, const Relation& b, K kind) -> std::optional<PMorphismViolation> {
    for (World x = 0; x < from.size(); ++x)
      for (World y : a.successors(x))
        if (!b.contains(map[x], map[y])) return PMorphismViolation{kind, x, y};
    return std::nullopt;
  };
  auto back = [&](const Relation& a, const Relation& b, K kind) -> std::optional<PMorphismViolation> {
    for (World x = 0; x < from.size(); ++x) {
      WorldSet reached;
      for (World y : a.successors(x)) reached.insert(map[y]);
      WorldSet missing = b.successors(map[x]) - reached;
      if (!missing.empty()) return PMorphismViolation{kind, x, missing.first()};
    }
    return std::nullopt;
  };
  if (auto v = forth(from.r(), to.r(), K::ForthR)) return v;
  if (auto v = forth(from.rd(), to.rd(), K::ForthRd)) return v;
  if (auto v = back(from.r(), to.r(), K::BackR)) return v;
  if (auto v = back(from.rd(), to.rd(), K::BackRd)) return v;
  return std::nullopt;
}

struct Doubling {
  Frame frame;
  std::vector<World> map;  // new world -> original world
};

/// Splits every rd-reflexive world x into (x,0), (x,1) so that the new rd is
/// exactly inequality, with x'R'y' iff f(x') R f(y'). The returned map is a
/// p-morphism onto the input.
inline Doubling doubleIrreflexive(const Frame& f) {
  const FrameReport rep = frameProperties(f);
  if (!rep.isS4D()) throw std::invalid_argument("doubleIrreflexive: input is not an S4D-frame");
  if (!rep.rdPlusIdUniversal) throw std::invalid_argument("doubleIrreflexive: rd ∪ Id is not W×W");
  std::vector<World> map;
  std::vector<std::string> names;
  for (World x = 0; x < f.size(); ++x) {
    if (f.rd().contains(x, x)) {
      for (int i = 0; i < 2; ++i) {
        map.push_back(x);
        names.push_back(f.name(x) + "#" + std::to_string(i));
      }
    } else {
      map.push_back(x);
      names.push_back(f.name(x));
    }
  }
  const std::size_t n = map.size();
  if (n > kMaxWorlds) throw std::length_error("doubleIrreflexive: result exceeds 64 worlds");
  Relation r(n);
  for (World a = 0; a < n; ++a)
    for (World b = 0; b < n; ++b)
      if (f.r().contains(map[a], map[b])) r.insert(a, b);
  return Doubling{Frame(std::move(r), Relation::inequality(n), std::move(names)), std::move(map)};
}

}  // namespace dlogic
