#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlogic/formula.hpp"
#include "dlogic/kripke.hpp"
#include "dlogic/relation.hpp"

namespace dlogic {

/// Partition of the worlds of a model into ≈_Ψ classes. Classes are numbered
/// by their least member, which is also the representative.
struct Partition {
  std::vector<std::size_t> classOf;  // world -> class index
  std::vector<WorldSet> classes;

  std::size_t size() const { return classes.size(); }
  World representative(std::size_t c) const { return classes[c].first(); }
};

namespace detail {
// Ψ-truth sets for every member of Ψ, in dependency order.
inline std::vector<WorldSet> psiTruth(const KripkeModel& m, const CompiledFormula& psi) {
  return psi.evaluate(KripkeSemantics{m.frame(), m.valuation()});
}
}  // namespace detail

/// w ≈_Ψ v iff w and v agree on every member of Ψ.
inline Partition equivClasses(const KripkeModel& m, const CompiledFormula& psi) {
  const auto truth = detail::psiTruth(m, psi);
  const std::size_t n = m.frame().size();
  Partition p;
  p.classOf.assign(n, 0);
  std::map<std::vector<bool>, std::size_t> seen;
  for (World w = 0; w < n; ++w) {
    std::vector<bool> key(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) key[i] = truth[i].contains(w);
    auto [it, fresh] = seen.emplace(std::move(key), p.classes.size());
    if (fresh) p.classes.emplace_back();
    p.classOf[w] = it->second;
    p.classes[it->second].insert(w);
  }
  return p;
}

inline Partition equivClasses(const KripkeModel& m, const std::vector<Formula>& psi) {
  if (psi.empty()) {
    Partition p;
    p.classOf.assign(m.frame().size(), 0);
    p.classes.push_back(m.frame().worlds());
    return p;
  }
  return equivClasses(m, CompiledFormula(psi));
}

struct FiltrationResult {
  std::vector<Formula> psi;
  Partition partition;
  Relation rPrime;   // minimal filtration of r
  Relation rdPrime;  // minimal filtration of rd
  Relation r2;       // transitive closure of rPrime
  Relation rd2;      // pseudo-transitive closure of rdPrime
  KripkeModel resultModel;
};

/// Existential image of a relation on the quotient:
/// [x] R' [y] iff some x' ∈ [x], y' ∈ [y] have x' R y'.
inline Relation quotientImage(const Relation& rel, const Partition& p) {
  Relation out(p.size());
  for (World x = 0; x < rel.size(); ++x)
    for (World y : rel.successors(x)) out.insert(p.classOf[x], p.classOf[y]);
  return out;
}

namespace detail {
inline KripkeModel quotientModel(const KripkeModel& m, const std::vector<Formula>& psi, const Partition& p,
                                 Relation r, Relation rd) {
  Valuation val;
  for (const auto& g : psi) {
    if (!g.isLetter()) continue;
    const WorldSet s = m.letter(g.name());
    WorldSet image;
    for (World w : s) image.insert(p.classOf[w]);
    val[g.name()] = image;
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < p.size(); ++c) names.push_back("[" + m.frame().name(p.representative(c)) + "]");
  return KripkeModel(Frame(std::move(r), std::move(rd), std::move(names)), std::move(val));
}
}  // namespace detail

/// Minimal filtration through Ψ followed by the closures R₂ = R'* and
/// R_D₂ = R_D'* − (Id − R_D').
inline FiltrationResult minimalFiltration(const KripkeModel& m, std::vector<Formula> psi) {
  Partition p = equivClasses(m, psi);
  Relation rPrime = quotientImage(m.frame().r(), p);
  Relation rdPrime = quotientImage(m.frame().rd(), p);
  Relation r2 = rPrime.transitiveClosure();
  Relation rd2 = rdPrime.pseudoTransitiveClosure();
  KripkeModel result = detail::quotientModel(m, psi, p, r2, rd2);
  return FiltrationResult{std::move(psi), std::move(p),        std::move(rPrime), std::move(rdPrime),
                          std::move(r2),  std::move(rd2),      std::move(result)};
}

/// Filtration of m through the subformulas of f, over an S4D-frame.
inline FiltrationResult filtrate(const KripkeModel& m, const Formula& f) {
  const FrameReport rep = frameProperties(m.frame());
  if (!rep.isS4D()) throw std::invalid_argument("filtrate: the model's frame is not an S4D-frame");
  if (!rep.rdPlusIdUniversal) throw std::invalid_argument("filtrate: rd ∪ Id must be the universal relation");
  return minimalFiltration(m, subformulaClosure(f));
}

struct FiltrationViolation {
  /// 1: W' is the set of classes; 2: forth; 3: Ψ-boxes; 4: valuation;
  /// 5: truth preservation.
  int condition = 0;
  std::string relation;  // "r" or "rd" for conditions 2 and 3
  World w = 0;
  World v = 0;
  std::optional<Formula> formula;
  std::string message;
};

/// Checks the filtration conditions of `res` against m, then the truth
/// preservation M,w ⊨ ψ ⟺ M',[w] ⊨ ψ for every ψ ∈ Ψ and world w.
inline std::optional<FiltrationViolation> verifyFiltration(const KripkeModel& m, const FiltrationResult& res) {
  const Frame& src = m.frame();
  const Frame& dst = res.resultModel.frame();
  const Partition& p = res.partition;
  if (p.classOf.size() != src.size() || dst.size() != p.size())
    return FiltrationViolation{1, "", 0, 0, std::nullopt, "worlds of the result are not the ≈_Ψ classes"};
  const Partition fresh = equivClasses(m, res.psi);
  if (fresh.classOf != p.classOf)
    return FiltrationViolation{1, "", 0, 0, std::nullopt, "partition differs from ≈_Ψ"};

  struct Pair {
    const char* name;
    const Relation& source;
    const Relation& target;
    Op op;
  };
  const Pair rels[] = {{"r", src.r(), dst.r(), Op::Box}, {"rd", src.rd(), dst.rd(), Op::Diff}};

  for (const auto& rel : rels)
    for (World w = 0; w < src.size(); ++w)
      for (World v : rel.source.successors(w))
        if (!rel.target.contains(p.classOf[w], p.classOf[v]))
          return FiltrationViolation{2, rel.name, w, v, std::nullopt, "related worlds have unrelated classes"};

  std::vector<WorldSet> truth;
  std::vector<WorldSet> quotientTruth;
  if (!res.psi.empty()) {
    const CompiledFormula prog(res.psi);
    truth = prog.evaluate(KripkeSemantics{src, m.valuation()});
    quotientTruth = prog.evaluate(KripkeSemantics{dst, res.resultModel.valuation()});
    const auto& closure = prog.closure();
    for (const auto& rel : rels)
      for (std::size_t i = 0; i < closure.size(); ++i) {
        if (closure[i].op() != rel.op) continue;
        const std::size_t body = prog.steps()[i].a;
        for (World w = 0; w < src.size(); ++w) {
          if (!truth[i].contains(w)) continue;
          for (World v = 0; v < src.size(); ++v)
            if (rel.target.contains(p.classOf[w], p.classOf[v]) && !truth[body].contains(v))
              return FiltrationViolation{3, rel.name, w, v, closure[i], "modal formula not respected by the class relation"};
        }
      }
    for (std::size_t i = 0; i < closure.size(); ++i) {
      if (!closure[i].isLetter()) continue;
      WorldSet image;
      for (World w : truth[i]) image.insert(p.classOf[w]);
      if (res.resultModel.letter(closure[i].name()) != image)
        return FiltrationViolation{4, "", 0, 0, closure[i], "quotient valuation is not the image of the valuation"};
    }
    for (std::size_t i = 0; i < closure.size(); ++i)
      for (World w = 0; w < src.size(); ++w)
        if (truth[i].contains(w) != quotientTruth[i].contains(p.classOf[w]))
          return FiltrationViolation{5, "", w, 0, closure[i], "truth not preserved"};
  }
  return std::nullopt;
}

}  // namespace dlogic
