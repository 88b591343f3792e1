#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlogic/enumerate.hpp"
#include "dlogic/formula.hpp"
#include "dlogic/kripke.hpp"

namespace dlogic {

enum class LogicId { S4D, S4DS, S4DT1S };

inline const char* toString(LogicId l) {
  switch (l) {
    case LogicId::S4D: return "S4D";
    case LogicId::S4DS: return "S4DS";
    case LogicId::S4DT1S: return "S4DT1S";
  }
  return "?";
}

inline std::optional<LogicId> parseLogic(const std::string& s) {
  std::string low;
  for (char c : s) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (low == "s4d") return LogicId::S4D;
  if (low == "s4ds") return LogicId::S4DS;
  if (low == "s4dt1s") return LogicId::S4DT1S;
  return std::nullopt;
}

inline bool requiresDS(LogicId l) { return l != LogicId::S4D; }
inline bool requiresT1(LogicId l) { return l == LogicId::S4DT1S; }

/// Frame belongs to the Kripke class of the logic.
inline bool inLogicClass(const FrameReport& rep, LogicId l) {
  return rep.isS4D() && (!requiresDS(l) || rep.dsFrame) && (!requiresT1(l) || rep.t1Frame);
}

struct SearchConfig {
  /// Largest frame size searched. When unset: min(modelSizeBound, 6).
  std::optional<std::size_t> maxWorlds;
  /// Per-frame cap on valuations of the formula's letters.
  std::uint64_t maxValuationAssignments = std::uint64_t{1} << 16;
};

enum class Status { Valid, Refuted, Satisfiable, Unsatisfiable, UnknownBeyondBound };

inline const char* toString(Status s) {
  switch (s) {
    case Status::Valid: return "Valid";
    case Status::Refuted: return "Refuted";
    case Status::Satisfiable: return "Satisfiable";
    case Status::Unsatisfiable: return "Unsatisfiable";
    case Status::UnknownBeyondBound: return "UnknownBeyondBound";
  }
  return "?";
}

struct Witness {
  KripkeModel model;
  World world = 0;
};

struct SearchStats {
  std::uint64_t framesExamined = 0;
  std::uint64_t valuationsTried = 0;
  std::size_t largestSizeSearched = 0;
  double elapsedSeconds = 0.0;
};

struct Verdict {
  Status status = Status::UnknownBeyondBound;
  /// Satisfying model (Satisfiable) or countermodel (Refuted).
  std::optional<Witness> witness;
  /// Size bound that makes the search complete.
  std::size_t bound = 0;
  SearchStats stats;

  bool definite() const { return status != Status::UnknownBeyondBound; }
};

namespace detail {
inline std::size_t saturatingPow2(std::size_t e) {
  return e >= 63 ? std::numeric_limits<std::size_t>::max() / 2 : (std::size_t{1} << e);
}
}  // namespace detail

/// Upper bound on the number of ≈_Ψ classes of any model with rd ∪ Id
/// universal and reflexive r, Ψ the subformulas of f. A satisfiable f is
/// therefore satisfiable in a frame of the class with at most this many
/// worlds.
///
/// Classes are fixed by the truth of letters, □- and D-subformulas. The
/// letter/□ part ranges over assignments in which □φ forces φ whenever φ is
/// a Boolean combination of letters and □-subformulas. Each Dφ is true
/// everywhere, nowhere, or at exactly one world (rd(w) ⊇ W − {w}), so it
/// splits at most one more class off.
inline std::size_t modelSizeBound(const Formula& f) {
  const CompiledFormula prog(f);
  const auto& steps = prog.steps();
  std::vector<std::size_t> atoms;
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].op == Op::Letter || steps[i].op == Op::Box) atoms.push_back(i);
    if (steps[i].op == Op::Diff) ++diffs;
  }
  std::size_t lb = 0;
  if (atoms.size() > 20) {
    lb = detail::saturatingPow2(atoms.size());
  } else {
    // Determined-ness: entry depends only on letter/□ atoms.
    std::vector<bool> determined(steps.size(), false);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      switch (steps[i].op) {
        case Op::Letter:
        case Op::Bottom:
        case Op::Box: determined[i] = true; break;
        case Op::Implies: determined[i] = determined[steps[i].a] && determined[steps[i].b]; break;
        case Op::Diff: determined[i] = false; break;
      }
    }
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << atoms.size()); ++m) {
      std::vector<char> val(steps.size(), 0);
      for (std::size_t j = 0; j < atoms.size(); ++j) val[atoms[j]] = static_cast<char>((m >> j) & 1U);
      for (std::size_t i = 0; i < steps.size(); ++i)
        if (steps[i].op == Op::Implies && determined[i]) val[i] = static_cast<char>(!val[steps[i].a] || val[steps[i].b]);
      bool ok = true;
      for (std::size_t i = 0; i < steps.size() && ok; ++i)
        if (steps[i].op == Op::Box && val[i] && determined[steps[i].a] && !val[steps[i].a]) ok = false;
      if (ok) ++lb;
    }
  }
  return std::min(lb + diffs, std::numeric_limits<std::size_t>::max() / 2);
}

namespace detail {

/// Flattened formula with letters resolved to indices, evaluated with raw
/// bitsets over a frame's successor rows.
class FastProgram {
 public:
  explicit FastProgram(const Formula& f) : prog_(f) {
    const auto ls = letters(f);
    names_.assign(ls.begin(), ls.end());
    for (const auto& s : prog_.steps())
      letterIndex_.push_back(s.op == Op::Letter
                                 ? static_cast<std::size_t>(std::lower_bound(names_.begin(), names_.end(), s.name) -
                                                            names_.begin())
                                 : 0);
    values_.resize(prog_.steps().size());
  }

  const std::vector<std::string>& letterNames() const { return names_; }

  /// Truth set of f; `code` packs the valuation as in decodeValuation.
  std::uint64_t eval(const std::uint64_t* r, const std::uint64_t* rd, std::size_t n, std::uint64_t code) {
    const std::uint64_t all = WorldSet::full(n).bits();
    const auto& steps = prog_.steps();
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      switch (s.op) {
        case Op::Letter: values_[i] = (code >> (letterIndex_[i] * n)) & all; break;
        case Op::Bottom: values_[i] = 0; break;
        case Op::Implies: values_[i] = ((~values_[s.a]) | values_[s.b]) & all; break;
        case Op::Box:
        case Op::Diff: {
          const std::uint64_t* rows = s.op == Op::Box ? r : rd;
          const std::uint64_t body = values_[s.a];
          std::uint64_t out = 0;
          for (std::size_t w = 0; w < n; ++w)
            if ((rows[w] & ~body) == 0) out |= std::uint64_t{1} << w;
          values_[i] = out;
          break;
        }
      }
    }
    return values_.back();
  }

  /// Evaluates the 64 valuation codes base, base+1, ..., base+63 at once,
  /// one per bit lane (base a multiple of 64; lanes outside `lanes` are
  /// ignored). Returns the lanes where f holds at some world; `truthAt(w)`
  /// then gives the lanes where f holds at w.
  std::uint64_t evalLanes(const std::uint64_t* r, const std::uint64_t* rd, std::size_t n, std::uint64_t base,
                          std::uint64_t lanes) {
    static constexpr std::uint64_t kPattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                                  0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    const auto& steps = prog_.steps();
    n_ = n;
    lanes_.resize(steps.size() * n);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      std::uint64_t* out = &lanes_[i * n];
      switch (s.op) {
        case Op::Letter:
          for (std::size_t w = 0; w < n; ++w) {
            const std::size_t k = letterIndex_[i] * n + w;
            out[w] = (k < 6 ? kPattern[k] : ((base >> k) & 1U ? ~std::uint64_t{0} : 0)) & lanes;
          }
          break;
        case Op::Bottom:
          for (std::size_t w = 0; w < n; ++w) out[w] = 0;
          break;
        case Op::Implies: {
          const std::uint64_t* a = &lanes_[s.a * n];
          const std::uint64_t* b = &lanes_[s.b * n];
          for (std::size_t w = 0; w < n; ++w) out[w] = (~a[w] | b[w]) & lanes;
          break;
        }
        case Op::Box:
        case Op::Diff: {
          const std::uint64_t* rows = s.op == Op::Box ? r : rd;
          const std::uint64_t* body = &lanes_[s.a * n];
          for (std::size_t w = 0; w < n; ++w) {
            std::uint64_t acc = lanes;
            for (std::uint64_t succ = rows[w]; succ != 0; succ &= succ - 1) acc &= body[std::countr_zero(succ)];
            out[w] = acc;
          }
          break;
        }
      }
    }
    std::uint64_t any = 0;
    for (std::size_t w = 0; w < n; ++w) any |= truthAt(w);
    return any;
  }

  std::uint64_t truthAt(std::size_t w) const { return lanes_[lanes_.size() - n_ + w]; }

 private:
  CompiledFormula prog_;
  std::vector<std::string> names_;
  std::vector<std::size_t> letterIndex_;
  std::vector<std::uint64_t> values_;
  std::vector<std::uint64_t> lanes_;
  std::size_t n_ = 0;
};

struct Rows {
  std::uint64_t r[kMaxWorlds];
  std::uint64_t rd[kMaxWorlds];
  explicit Rows(const Frame& f) {
    for (World w = 0; w < f.size(); ++w) {
      r[w] = f.r().successors(w).bits();
      rd[w] = f.rd().successors(w).bits();
    }
  }
};

inline double secondsSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Finite-model search for a model of f over the Kripke class of L, by
/// increasing frame size and, within a size, over one frame per
/// isomorphism type. Complete once the search reaches modelSizeBound(f).
inline Verdict satisfiable(const Formula& f, LogicId logic, const SearchConfig& cfg = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict out;
  out.bound = modelSizeBound(f);
  const std::size_t maxWorlds = cfg.maxWorlds.value_or(std::min<std::size_t>(out.bound, 6));
  if (maxWorlds < 1 || maxWorlds > kMaxSearchWorlds)
    throw std::invalid_argument("satisfiable: maxWorlds must be between 1 and " + std::to_string(kMaxSearchWorlds));
  const std::size_t limit = std::min(maxWorlds, out.bound);

  detail::FastProgram prog(f);
  const auto& names = prog.letterNames();
  bool exhausted = true;
  for (std::size_t n = 1; n <= limit; ++n) {
    const auto total = valuationCount(names.size(), n);
    if (!total || *total > cfg.maxValuationAssignments) {
      exhausted = false;
      break;
    }
    out.stats.largestSizeSearched = n;
    for (const FrameShape& shape : canonicalShapes(n)) {
      if ((requiresDS(logic) && !shape.ds) || (requiresT1(logic) && !shape.t1)) continue;
      ++out.stats.framesExamined;
      const Frame frame = shape.frame();
      const detail::Rows rows(frame);
      for (std::uint64_t base = 0; base < *total; base += 64) {
        const std::uint64_t count = std::min<std::uint64_t>(64, *total - base);
        const std::uint64_t lanes = count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
        const std::uint64_t hit = prog.evalLanes(rows.r, rows.rd, n, base, lanes);
        if (hit == 0) {
          out.stats.valuationsTried += count;
          continue;
        }
        const int lane = std::countr_zero(hit);
        World w = 0;
        while (((prog.truthAt(w) >> lane) & 1U) == 0) ++w;
        out.stats.valuationsTried += static_cast<std::uint64_t>(lane) + 1;
        out.status = Status::Satisfiable;
        out.witness = Witness{KripkeModel(frame, decodeValuation(names, n, base + lane)), w};
        out.stats.elapsedSeconds = detail::secondsSince(t0);
        return out;
      }
    }
  }
  out.status = (exhausted && limit == out.bound) ? Status::Unsatisfiable : Status::UnknownBeyondBound;
  out.stats.elapsedSeconds = detail::secondsSince(t0);
  return out;
}

/// valid(f) = not satisfiable(¬f); a Refuted verdict carries a countermodel
/// and the world where f fails.
inline Verdict valid(const Formula& f, LogicId logic, const SearchConfig& cfg = {}) {
  Verdict v = satisfiable(Formula::negation(f), logic, cfg);
  if (v.status == Status::Satisfiable) v.status = Status::Refuted;
  else if (v.status == Status::Unsatisfiable) v.status = Status::Valid;
  return v;
}

/// Every S4D-frame (any rd, not only rd ∪ Id universal) on n labeled worlds,
/// by brute force over r and symmetric rd. Intended for n ≤ 5.
inline const std::vector<Frame>& allS4DFrames(std::size_t n) {
  if (n == 0 || n > 5) throw std::invalid_argument("allS4DFrames: n must be between 1 and 5");
  static std::mutex mu;
  static std::map<std::size_t, std::vector<Frame>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<World, World>> upper;
  for (World x = 0; x < n; ++x)
    for (World y = x; y < n; ++y) upper.emplace_back(x, y);
  std::vector<Relation> rds;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << upper.size()); ++m) {
    Relation rd(n);
    for (std::size_t i = 0; i < upper.size(); ++i)
      if ((m >> i) & 1U) {
        rd.insert(upper[i].first, upper[i].second);
        rd.insert(upper[i].second, upper[i].first);
      }
    if (rd.isPseudoTransitive()) rds.push_back(std::move(rd));
  }
  std::vector<Frame> frames;
  const Relation id = Relation::identity(n);
  for (const auto& r : labeledPreorders(n))
    for (const auto& rd : rds)
      if (r.subsetOf(rd | id)) frames.emplace_back(r, rd);
  return cache.emplace(n, std::move(frames)).first->second;
}

/// Brute-force reference: every S4D-frame with at most n worlds in the class
/// of L, every valuation, no symmetry reduction. Reports Unsatisfiable only
/// when n reaches 2^k, k the number of letter and modal subformulas (1 for
/// modality-free f).
inline Verdict oracleSatisfiable(const Formula& f, LogicId logic, std::size_t n) {
  if (n == 0 || n > 5) throw std::invalid_argument("oracle: n must be between 1 and 5");
  const auto t0 = std::chrono::steady_clock::now();
  Verdict out;
  std::size_t atoms = 0;
  for (const Formula& g : subformulaClosure(f))
    if (g.isLetter() || g.isModal()) ++atoms;
  out.bound = f.modalDepth() == 0 ? 1 : detail::saturatingPow2(atoms);
  const auto ls = letters(f);
  const std::vector<std::string> names(ls.begin(), ls.end());
  const CompiledFormula prog(f);
  for (std::size_t size = 1; size <= n; ++size) {
    const auto total = valuationCount(names.size(), size);
    if (!total) throw SearchSpaceTooLarge("oracle: too many valuations");
    out.stats.largestSizeSearched = size;
    for (const Frame& frame : allS4DFrames(size)) {
      if (!inLogicClass(frameProperties(frame), logic)) continue;
      ++out.stats.framesExamined;
      for (std::uint64_t code = 0; code < *total; ++code) {
        ++out.stats.valuationsTried;
        Valuation v = decodeValuation(names, size, code);
        const WorldSet truth = prog.truthSet(KripkeSemantics{frame, v});
        if (!truth.empty()) {
          out.status = Status::Satisfiable;
          out.witness = Witness{KripkeModel(frame, std::move(v)), truth.first()};
          out.stats.elapsedSeconds = detail::secondsSince(t0);
          return out;
        }
      }
    }
  }
  out.status = out.bound <= n ? Status::Unsatisfiable : Status::UnknownBeyondBound;
  out.stats.elapsedSeconds = detail::secondsSince(t0);
  return out;
}

inline Verdict oracleDecide(const Formula& f, LogicId logic, std::size_t n) {
  Verdict v = oracleSatisfiable(Formula::negation(f), logic, n);
  if (v.status == Status::Satisfiable) v.status = Status::Refuted;
  else if (v.status == Status::Unsatisfiable) v.status = Status::Valid;
  return v;
}

}  // namespace dlogic
