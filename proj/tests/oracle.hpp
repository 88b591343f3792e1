#pragma once

// Brute-force reference implementations used by the tests. They work on
// plain vectors of bools and recurse over formulas directly, so they share
// nothing with the library's bitset evaluators.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dlogic/dlogic.hpp"

namespace oracle {

using dlogic::Formula;
using dlogic::Op;

using Bits = std::vector<bool>;
using Matrix = std::vector<std::vector<bool>>;

inline Matrix toMatrix(const dlogic::Relation& rel) {
  Matrix m(rel.size(), Bits(rel.size(), false));
  for (std::size_t x = 0; x < rel.size(); ++x)
    for (std::size_t y = 0; y < rel.size(); ++y) m[x][y] = rel.contains(x, y);
  return m;
}

inline Bits toBits(dlogic::WorldSet s, std::size_t n) {
  Bits b(n, false);
  for (std::size_t i = 0; i < n; ++i) b[i] = s.contains(i);
  return b;
}

inline dlogic::WorldSet fromBits(const Bits& b) {
  dlogic::WorldSet s;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) s.insert(i);
  return s;
}

/// Kripke truth by structural recursion.
inline Bits kripke(const Matrix& r, const Matrix& rd, const std::map<std::string, Bits>& val, const Formula& f) {
  const std::size_t n = r.size();
  switch (f.op()) {
    case Op::Letter: {
      auto it = val.find(f.name());
      return it == val.end() ? Bits(n, false) : it->second;
    }
    case Op::Bottom: return Bits(n, false);
    case Op::Implies: {
      Bits a = kripke(r, rd, val, f.lhs()), b = kripke(r, rd, val, f.rhs()), out(n);
      for (std::size_t w = 0; w < n; ++w) out[w] = !a[w] || b[w];
      return out;
    }
    case Op::Box:
    case Op::Diff: {
      const Matrix& rel = f.op() == Op::Box ? r : rd;
      Bits a = kripke(r, rd, val, f.operand()), out(n, true);
      for (std::size_t w = 0; w < n; ++w)
        for (std::size_t v = 0; v < n; ++v)
          if (rel[w][v] && !a[v]) out[w] = false;
      return out;
    }
  }
  return {};
}

inline std::map<std::string, Bits> toBitsVal(const dlogic::Valuation& v, std::size_t n) {
  std::map<std::string, Bits> out;
  for (const auto& [p, s] : v) out[p] = toBits(s, n);
  return out;
}

inline Bits kripke(const dlogic::Frame& fr, const dlogic::Valuation& v, const Formula& f) {
  return kripke(toMatrix(fr.r()), toMatrix(fr.rd()), toBitsVal(v, fr.size()), f);
}

/// A finite space given by its opens, each a vector of membership bits.
struct Space {
  std::size_t n = 0;
  std::vector<Bits> opens;
};

/// Topological truth: □ is the union of contained opens, D is "everywhere
/// else".
inline Bits topo(const Space& s, const std::map<std::string, Bits>& val, const Formula& f) {
  const std::size_t n = s.n;
  switch (f.op()) {
    case Op::Letter: {
      auto it = val.find(f.name());
      return it == val.end() ? Bits(n, false) : it->second;
    }
    case Op::Bottom: return Bits(n, false);
    case Op::Implies: {
      Bits a = topo(s, val, f.lhs()), b = topo(s, val, f.rhs()), out(n);
      for (std::size_t x = 0; x < n; ++x) out[x] = !a[x] || b[x];
      return out;
    }
    case Op::Box: {
      Bits a = topo(s, val, f.operand()), out(n, false);
      for (const Bits& u : s.opens) {
        bool inside = true;
        for (std::size_t x = 0; x < n; ++x)
          if (u[x] && !a[x]) inside = false;
        if (inside)
          for (std::size_t x = 0; x < n; ++x)
            if (u[x]) out[x] = true;
      }
      return out;
    }
    case Op::Diff: {
      Bits a = topo(s, val, f.operand()), out(n, true);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (y != x && !a[y]) out[x] = false;
      return out;
    }
  }
  return {};
}

/// Every topology on n ≤ 4 points, by testing each family of subsets that
/// contains ∅ and X for closure under ∪ and ∩.
inline std::vector<std::vector<unsigned>> allTopologies(std::size_t n) {
  const unsigned full = (1U << n) - 1;
  std::vector<unsigned> middle;
  for (unsigned a = 1; a < full; ++a) middle.push_back(a);
  std::vector<std::vector<unsigned>> out;
  for (unsigned long fam = 0; fam < (1UL << middle.size()); ++fam) {
    std::vector<bool> in(full + 1, false);
    in[0] = in[full] = true;
    for (std::size_t i = 0; i < middle.size(); ++i)
      if ((fam >> i) & 1UL) in[middle[i]] = true;
    bool ok = true;
    for (unsigned a = 0; a <= full && ok; ++a)
      for (unsigned b = 0; b <= full && ok; ++b)
        if (in[a] && in[b] && (!in[a | b] || !in[a & b])) ok = false;
    if (!ok) continue;
    std::vector<unsigned> opens;
    for (unsigned a = 0; a <= full; ++a)
      if (in[a]) opens.push_back(a);
    out.push_back(opens);
  }
  return out;
}

inline Space toSpace(std::size_t n, const std::vector<unsigned>& opens) {
  Space s{n, {}};
  for (unsigned u : opens) {
    Bits b(n);
    for (std::size_t x = 0; x < n; ++x) b[x] = ((u >> x) & 1U) != 0;
    s.opens.push_back(b);
  }
  return s;
}

inline dlogic::FiniteSpace toFiniteSpace(std::size_t n, const std::vector<unsigned>& opens) {
  std::vector<dlogic::PointSet> os;
  for (unsigned u : opens) os.emplace_back(u);
  return dlogic::FiniteSpace(n, os);
}

/// Existential image of rel on the classes given by classOf.
inline std::set<std::pair<std::size_t, std::size_t>> image(const dlogic::Relation& rel,
                                                           const std::vector<std::size_t>& classOf) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < rel.size(); ++x)
    for (std::size_t y = 0; y < rel.size(); ++y)
      if (rel.contains(x, y)) out.insert({classOf[x], classOf[y]});
  return out;
}

/// All pairs (x, y) with a path of length ≥ 1 from x to y.
inline Matrix paths(const Matrix& m) {
  const std::size_t n = m.size();
  Matrix out(n, Bits(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack;
    for (std::size_t y = 0; y < n; ++y)
      if (m[s][y] && !out[s][y]) {
        out[s][y] = true;
        stack.push_back(y);
      }
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < n; ++y)
        if (m[u][y] && !out[s][y]) {
          out[s][y] = true;
          stack.push_back(y);
        }
    }
  }
  return out;
}

/// Least-index label among those seen infinitely often along x, by walking
/// the state graph far enough for the state at cycle boundaries to repeat.
inline dlogic::World simulatePoint(const dlogic::LabelingScheme& sch, const dlogic::CPoint& x) {
  const auto& st = sch.states();
  const std::size_t reps = st.size() + 1;
  std::size_t q = sch.root();
  auto step = [&](char b) { q = st[q].child[b == '1' ? 1 : 0]; };
  for (char b : x.prefix()) step(b);
  for (std::size_t i = 0; i < reps; ++i)
    for (char b : x.cycle()) step(b);
  std::optional<dlogic::World> best;
  for (std::size_t i = 0; i < reps; ++i)
    for (char b : x.cycle()) {
      step(b);
      if (st[q].label && (!best || *st[q].label < *best)) best = st[q].label;
    }
  return *best;
}

// Random generation.

inline Formula randomFormula(std::mt19937_64& rng, std::size_t depth, const std::vector<std::string>& letters,
                             bool sugar = true) {
  std::uniform_int_distribution<int> leaf(0, static_cast<int>(letters.size()) + 1);
  if (depth == 0) {
    int k = leaf(rng);
    if (k == static_cast<int>(letters.size())) return Formula::bottom();
    if (k == static_cast<int>(letters.size()) + 1) return sugar ? Formula::top() : Formula::bottom();
    return Formula::letter(letters[k]);
  }
  std::uniform_int_distribution<int> pick(0, sugar ? 11 : 4);
  auto sub = [&] { return randomFormula(rng, depth - 1, letters, sugar); };
  switch (pick(rng)) {
    case 0: return randomFormula(rng, 0, letters, sugar);
    case 1: return Formula::implies(sub(), sub());
    case 2: return Formula::box(sub());
    case 3: return Formula::diff(sub());
    case 4: return Formula::implies(sub(), Formula::bottom());
    case 5: return Formula::negation(sub());
    case 6: return Formula::conj(sub(), sub());
    case 7: return Formula::disj(sub(), sub());
    case 8: return Formula::diamond(sub());
    case 9: return Formula::somewhereElse(sub());
    case 10: return Formula::everywhere(sub());
    default: return Formula::iff(sub(), sub());
  }
}

/// Random formula with modal depth at most `modal` and at most `size`
/// connectives.
inline Formula randomModalFormula(std::mt19937_64& rng, std::size_t modal, std::size_t size,
                                  const std::vector<std::string>& letters) {
  std::uniform_int_distribution<std::size_t> pickLetter(0, letters.size() - 1);
  if (size == 0) return Formula::letter(letters[pickLetter(rng)]);
  std::uniform_int_distribution<int> pick(0, 9);
  const int k = pick(rng);
  if (modal > 0 && k < 4) {
    Formula a = randomModalFormula(rng, modal - 1, size - 1, letters);
    switch (k) {
      case 0: return Formula::box(a);
      case 1: return Formula::diff(a);
      case 2: return Formula::diamond(a);
      default: return Formula::somewhereElse(a);
    }
  }
  if (k == 4) return Formula::negation(randomModalFormula(rng, modal, size - 1, letters));
  const std::size_t left = std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
  Formula a = randomModalFormula(rng, modal, left, letters);
  Formula b = randomModalFormula(rng, modal, size - 1 - left, letters);
  switch (k % 3) {
    case 0: return Formula::implies(a, b);
    case 1: return Formula::conj(a, b);
    default: return Formula::disj(a, b);
  }
}

inline dlogic::Relation randomPreorder(std::mt19937_64& rng, std::size_t n, double density = 0.3) {
  std::bernoulli_distribution edge(density);
  dlogic::Relation r(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y && edge(rng)) r.insert(x, y);
  return r.reflexiveTransitiveClosure();
}

inline dlogic::WorldSet randomSubset(std::mt19937_64& rng, std::size_t n) {
  return dlogic::WorldSet(std::uniform_int_distribution<std::uint64_t>(0, (std::uint64_t{1} << n) - 1)(rng));
}

/// Random S4D-frame with rd ∪ Id universal.
inline dlogic::Frame randomS4DFrame(std::mt19937_64& rng, std::size_t n) {
  return dlogic::frameFromPreorder(randomPreorder(rng, n), randomSubset(rng, n));
}

inline dlogic::Valuation randomValuation(std::mt19937_64& rng, std::size_t n, const std::vector<std::string>& letters) {
  dlogic::Valuation v;
  for (const auto& p : letters) v[p] = randomSubset(rng, n);
  return v;
}

// Named axioms.

inline Formula axiom(const std::string& name) {
  static const std::map<std::string, std::string> text = {
      {"B_D", "p -> D E p"},          {"4-_D", "(p & D p) -> D D p"}, {"T_Box", "[] p -> p"},
      {"4_Box", "[] p -> [] [] p"},   {"D_Box", "A p -> [] p"},       {"AT1", "D p -> D [] p"},
      {"DS", "D p -> <> p"},
  };
  return dlogic::parse(text.at(name));
}

inline const std::vector<std::string>& s4dAxioms() {
  static const std::vector<std::string> names = {"B_D", "4-_D", "T_Box", "4_Box", "D_Box"};
  return names;
}

/// Formulas used for frame-level property checks.
inline const std::vector<Formula>& corpus() {
  static const std::vector<Formula> fs = [] {
    std::vector<Formula> out;
    for (const char* s : {"p -> p", "[] p -> p", "[] p -> [] [] p", "p -> D E p", "(p & D p) -> D D p",
                          "A p -> [] p", "D p -> D [] p", "D p -> <> p", "<> [] p -> [] <> p", "E p | D ~p",
                          "[] (p -> q) -> ([] p -> [] q)", "D p -> p", "<> p -> [] p", "E T", "D F",
                          "p -> [] <> p", "E (p & ~<> ~p)", "[] <> p -> <> [] p"})
      out.push_back(dlogic::parse(s));
    return out;
  }();
  return fs;
}

}  // namespace oracle
