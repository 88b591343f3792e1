#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
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

// Cantor space 2^ω: infinite 0/1 sequences, metric 2^-k with k the first
// index where two sequences differ. Cylinders [s] (all extensions of the
// finite string s) are the clopen balls.

namespace detail {
inline void requireBits(const std::string& s, const char* what) {
  for (char c : s)
    if (c != '0' && c != '1') throw std::invalid_argument(std::string(what) + ": expected a 0/1 string");
}
}  // namespace detail

/// Eventually periodic point prefix·cycle^ω, kept in canonical form
/// (primitive cycle, shortest prefix).
class CPoint {
 public:
  CPoint(std::string prefix, std::string cycle) : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    detail::requireBits(prefix_, "CPoint prefix");
    detail::requireBits(cycle_, "CPoint cycle");
    if (cycle_.empty()) throw std::invalid_argument("CPoint: cycle must be non-empty");
    canonicalize();
  }

  const std::string& prefix() const { return prefix_; }
  const std::string& cycle() const { return cycle_; }

  char bit(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : cycle_[(i - prefix_.size()) % cycle_.size()];
  }
  /// First `len` bits.
  std::string head(std::size_t len) const {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(bit(i));
    return s;
  }

  std::string str() const { return prefix_ + "(" + cycle_ + ")"; }

  friend bool operator==(const CPoint&, const CPoint&) = default;

 private:
  void canonicalize() {
    const std::size_t n = cycle_.size();
    for (std::size_t p = 1; p <= n; ++p) {
      if (n % p != 0) continue;
      bool periodic = true;
      for (std::size_t i = p; i < n && periodic; ++i) periodic = cycle_[i] == cycle_[i - p];
      if (periodic) {
        cycle_.resize(p);
        break;
      }
    }
    while (!prefix_.empty() && prefix_.back() == cycle_.back()) {
      prefix_.pop_back();
      std::rotate(cycle_.rbegin(), cycle_.rbegin() + 1, cycle_.rend());
    }
  }

  std::string prefix_;
  std::string cycle_;
};

/// ρ(x, y) = 2^-k, k the first differing index; zero iff x = y.
struct Distance {
  std::optional<std::size_t> firstDifference;

  bool isZero() const { return !firstDifference.has_value(); }
  double value() const { return isZero() ? 0.0 : std::ldexp(1.0, -static_cast<int>(*firstDifference)); }

  friend bool operator==(const Distance&, const Distance&) = default;
  /// Larger first-difference index means smaller distance.
  friend bool operator<(const Distance& a, const Distance& b) {
    if (a.isZero()) return !b.isZero();
    if (b.isZero()) return false;
    return *a.firstDifference > *b.firstDifference;
  }
};

inline std::size_t gcdSize(std::size_t a, std::size_t b) {
  while (b != 0) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

inline Distance dist(const CPoint& x, const CPoint& y) {
  // Two eventually periodic sequences agree forever once they agree on the
  // longer prefix plus one common period.
  const std::size_t a = x.cycle().size();
  const std::size_t b = y.cycle().size();
  const std::size_t horizon = std::max(x.prefix().size(), y.prefix().size()) + a / gcdSize(a, b) * b;
  for (std::size_t i = 0; i < horizon; ++i)
    if (x.bit(i) != y.bit(i)) return Distance{i};
  return Distance{};
}

/// O(x, 2^-k) = {y | ρ(x, y) < 2^-k}.
inline bool inBall(const CPoint& center, std::size_t k, const CPoint& y) {
  const Distance d = dist(center, y);
  return d.isZero() || *d.firstDifference > k;
}

/// Cylinder [s].
struct Cell {
  std::string bits;

  explicit Cell(std::string s = {}) : bits(std::move(s)) { detail::requireBits(bits, "Cell"); }
  std::size_t depth() const { return bits.size(); }
  Cell child(int b) const { return Cell(bits + (b != 0 ? '1' : '0')); }
  bool contains(const CPoint& x) const { return x.head(bits.size()) == bits; }
  bool contains(const Cell& c) const { return c.bits.substr(0, bits.size()) == bits && c.bits.size() >= bits.size(); }
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// One node of a labeling automaton. A state labeled w marks cells whose
/// points are mapped into R(w).
struct SchemeState {
  enum class Kind {
    Cluster,  // reflexive cone: child 0 keeps the world, child 1 moves to R(w)[index]
    Spine,    // irreflexive root: child 0 continues the spine, child 1 starts cone `index`
    Split     // clopen split among minimal clusters, part `index`
  };
  Kind kind = Kind::Cluster;
  std::optional<World> label;
  std::size_t index = 0;
  std::array<std::size_t, 2> child{0, 0};
};

inline const char* toString(SchemeState::Kind k) {
  switch (k) {
    case SchemeState::Kind::Cluster: return "cluster";
    case SchemeState::Kind::Spine: return "spine";
    case SchemeState::Kind::Split: return "split";
  }
  return "?";
}

/// Which construction the root of a scheme uses.
enum class SchemeCase { ReflexiveRoot, IrreflexiveRoot, Split };

/// Finite-state labeling of the cells of 2^ω. The induced map f sends a point
/// to the least-index world among the labels it visits infinitely often.
class LabelingScheme {
 public:
  LabelingScheme(Frame frame, std::vector<SchemeState> states, std::size_t root, SchemeCase kind)
      : frame_(std::move(frame)), states_(std::move(states)), root_(root), case_(kind) {
    if (states_.empty() || root_ >= states_.size()) throw std::invalid_argument("scheme: bad root state");
    for (const auto& s : states_) {
      if (s.child[0] >= states_.size() || s.child[1] >= states_.size())
        throw std::invalid_argument("scheme: child index out of range");
      if (s.label && *s.label >= frame_.size()) throw std::invalid_argument("scheme: label is not a world");
    }
    for (std::size_t q = 0; q < states_.size(); ++q)
      if (!states_[q].label && (reaches(states_[q].child[0], q) || reaches(states_[q].child[1], q)))
        throw std::invalid_argument("scheme: unlabeled state on a cycle");
    computeRealizations();
  }

  const Frame& frame() const { return frame_; }
  const std::vector<SchemeState>& states() const { return states_; }
  std::size_t root() const { return root_; }
  SchemeCase rootCase() const { return case_; }

  std::size_t stateAt(const Cell& c) const {
    std::size_t q = root_;
    for (char b : c.bits) q = states_[q].child[b == '1' ? 1 : 0];
    return q;
  }
  /// Worlds f attains inside the cylinder of any cell in state q.
  WorldSet realizationOf(std::size_t q) const { return real_.at(q); }

  /// Worlds appearing infinitely often along x, and the states on the
  /// eventual period.
  std::pair<WorldSet, std::vector<std::size_t>> tail(const CPoint& x) const {
    std::size_t q = root_;
    for (char b : x.prefix()) q = step(q, b);
    std::map<std::size_t, std::size_t> boundary;  // state at period start -> iteration
    std::vector<std::vector<std::size_t>> visits;
    while (!boundary.count(q)) {
      boundary[q] = visits.size();
      visits.emplace_back();
      for (char b : x.cycle()) {
        visits.back().push_back(q);
        q = step(q, b);
      }
    }
    WorldSet labels;
    std::vector<std::size_t> loop;
    for (std::size_t it = boundary[q]; it < visits.size(); ++it)
      for (std::size_t s : visits[it]) {
        loop.push_back(s);
        if (!states_[s].label) throw std::logic_error("scheme: unlabeled state visited infinitely often");
        labels.insert(*states_[s].label);
      }
    return {labels, loop};
  }

  /// Every state the path of x passes through, root included.
  std::vector<std::size_t> pathStates(const CPoint& x) const {
    std::vector<std::size_t> out{root_};
    std::size_t q = root_;
    for (char b : x.prefix()) out.push_back(q = step(q, b));
    auto [labels, loop] = tail(x);
    out.insert(out.end(), loop.begin(), loop.end());
    return out;
  }

  std::vector<bool> reachableFromRoot() const {
    std::vector<bool> seen(states_.size(), false);
    std::deque<std::size_t> todo{root_};
    seen[root_] = true;
    while (!todo.empty()) {
      std::size_t q = todo.front();
      todo.pop_front();
      for (std::size_t c : states_[q].child)
        if (!seen[c]) {
          seen[c] = true;
          todo.push_back(c);
        }
    }
    return seen;
  }

 private:
  std::size_t step(std::size_t q, char b) const { return states_[q].child[b == '1' ? 1 : 0]; }

  // `from` reaches `to` in zero or more steps.
  bool reaches(std::size_t from, std::size_t to) const {
    std::vector<bool> seen(states_.size(), false);
    std::deque<std::size_t> todo{from};
    seen[from] = true;
    while (!todo.empty()) {
      std::size_t q = todo.front();
      todo.pop_front();
      if (q == to) return true;
      for (std::size_t c : states_[q].child)
        if (!seen[c]) {
          seen[c] = true;
          todo.push_back(c);
        }
    }
    return false;
  }

  // World v is attained below q iff q reaches a state labeled v that lies on
  // a cycle through states whose labels all have index ≥ v.
  void computeRealizations() {
    const std::size_t s = states_.size();
    real_.assign(s, WorldSet{});
    for (World v = 0; v < frame_.size(); ++v) {
      std::vector<bool> allowed(s);
      for (std::size_t q = 0; q < s; ++q) allowed[q] = states_[q].label && *states_[q].label >= v;
      std::vector<std::size_t> anchors;
      for (std::size_t q = 0; q < s; ++q) {
        if (!allowed[q] || *states_[q].label != v) continue;
        // cycle q -> ... -> q inside `allowed`
        std::vector<bool> seen(s, false);
        std::deque<std::size_t> todo;
        for (std::size_t c : states_[q].child)
          if (allowed[c] && !seen[c]) {
            seen[c] = true;
            todo.push_back(c);
          }
        while (!todo.empty() && !seen[q]) {
          std::size_t u = todo.front();
          todo.pop_front();
          for (std::size_t c : states_[u].child)
            if (allowed[c] && !seen[c]) {
              seen[c] = true;
              todo.push_back(c);
            }
        }
        if (seen[q]) anchors.push_back(q);
      }
      for (std::size_t q = 0; q < s; ++q)
        for (std::size_t a : anchors)
          if (reaches(q, a)) {
            real_[q].insert(v);
            break;
          }
    }
  }

  Frame frame_;
  std::vector<SchemeState> states_;
  std::size_t root_;
  SchemeCase case_;
  std::vector<WorldSet> real_;
};

namespace detail {

class SchemeBuilder {
 public:
  explicit SchemeBuilder(const Frame& f) : f_(f) {}

  std::size_t cluster(World w, std::size_t i) {
    auto key = std::make_pair(w, i);
    if (auto it = clusterIds_.find(key); it != clusterIds_.end()) return it->second;
    const std::vector<World> up = worldsOf(f_.r().successors(w));
    const std::size_t id = add({SchemeState::Kind::Cluster, w, i});
    clusterIds_[key] = id;
    const std::size_t c0 = cluster(w, (i + 1) % up.size());
    const std::size_t c1 = cluster(up[i], 0);
    states_[id].child = {c0, c1};
    return id;
  }

  std::size_t spine(World w0, std::size_t c) {
    auto key = std::make_pair(w0, c);
    if (auto it = spineIds_.find(key); it != spineIds_.end()) return it->second;
    const std::vector<World> cones = worldsOf(f_.r().successors(w0) - WorldSet::single(w0));
    const std::size_t id = add({SchemeState::Kind::Spine, w0, c});
    spineIds_[key] = id;
    const std::size_t c0 = spine(w0, (c + 1) % cones.size());
    const std::size_t c1 = cluster(cones[c], 0);
    states_[id].child = {c0, c1};
    return id;
  }

  std::size_t coneRoot(World v) { return f_.rd().contains(v, v) ? cluster(v, 0) : spine(v, 0); }

  /// Parts [1], [01], ..., [0^{k-2}1], [0^{k-1}] for subroots[0..k-1].
  std::size_t split(const std::vector<std::size_t>& subroots) {
    const std::size_t k = subroots.size();
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i + 1 < k; ++i) ids.push_back(add({SchemeState::Kind::Split, std::nullopt, i}));
    for (std::size_t i = 0; i + 1 < k; ++i)
      states_[ids[i]].child = {i + 2 < k ? ids[i + 1] : subroots[k - 1], subroots[i]};
    return ids.front();
  }

  std::vector<SchemeState> take() { return std::move(states_); }

  static std::vector<World> worldsOf(WorldSet s) { return {s.begin(), s.end()}; }

 private:
  std::size_t add(SchemeState s) {
    states_.push_back(s);
    return states_.size() - 1;
  }

  const Frame& f_;
  std::vector<SchemeState> states_;
  std::map<std::pair<World, std::size_t>, std::size_t> clusterIds_;
  std::map<std::pair<World, std::size_t>, std::size_t> spineIds_;
};

}  // namespace detail

/// Builds a labeling whose induced map 2^ω → W is meant to be a
/// cd-p-morphism onto f. The frame must be a rooted S4D-frame with
/// rd ∪ Id = W×W that is both a DS-frame and a T1-frame.
///
/// - some w0 has R(w0) = W and w0 rd w0: cluster labeling rooted at w0;
/// - some w0 has R(w0) = W and w0 is rd-irreflexive: the spine 0^ω maps to
///   w0 and the cells [0^j 1] cycle through the cones R(w1), ..., R(wn);
/// - otherwise: one clopen part per minimal cluster, each labeled by the
///   cone of the cluster's least world.
inline LabelingScheme buildScheme(const Frame& f) {
  const FrameReport rep = frameProperties(f);
  if (!rep.isS4D()) throw std::invalid_argument("buildScheme: frame is not an S4D-frame");
  if (!rep.rdPlusIdUniversal) throw std::invalid_argument("buildScheme: rd ∪ Id is not W×W");
  if (!rep.dsFrame) throw std::invalid_argument("buildScheme: frame is not a DS-frame");
  if (!rep.t1Frame) throw std::invalid_argument("buildScheme: frame is not a T1-frame");

  detail::SchemeBuilder b(f);
  for (World w0 = 0; w0 < f.size(); ++w0) {
    if (f.r().successors(w0) != f.worlds()) continue;
    if (f.rd().contains(w0, w0)) {
      const std::size_t root = b.cluster(w0, 0);
      return LabelingScheme(f, b.take(), root, SchemeCase::ReflexiveRoot);
    }
    const std::size_t root = b.spine(w0, 0);
    return LabelingScheme(f, b.take(), root, SchemeCase::IrreflexiveRoot);
  }

  std::vector<std::size_t> subroots;
  WorldSet covered;
  for (World v = 0; v < f.size(); ++v) {
    if (covered.contains(v)) continue;
    const WorldSet below = f.r().predecessors(v);
    if (!below.subsetOf(f.r().successors(v))) continue;  // not in a minimal cluster
    covered |= below;  // the whole cluster of v
    subroots.push_back(b.coneRoot(v));
  }
  if (subroots.size() < 2) throw std::logic_error("buildScheme: expected at least two minimal clusters");
  const std::size_t root = b.split(subroots);
  return LabelingScheme(f, b.take(), root, SchemeCase::Split);
}

inline World evalPoint(const LabelingScheme& sch, const CPoint& x) { return sch.tail(x).first.first(); }

inline WorldSet realization(const LabelingScheme& sch, const Cell& c) { return sch.realizationOf(sch.stateAt(c)); }

/// For every reachable state: the shortest cell reaching it, continued by the
/// cycles 0, 1 and 01.
inline std::vector<CPoint> stateCoveringPoints(const LabelingScheme& sch) {
  const auto& st = sch.states();
  std::vector<std::optional<std::string>> path(st.size());
  std::deque<std::size_t> todo{sch.root()};
  path[sch.root()] = "";
  while (!todo.empty()) {
    std::size_t q = todo.front();
    todo.pop_front();
    for (int b = 0; b < 2; ++b) {
      std::size_t c = st[q].child[b];
      if (!path[c]) {
        path[c] = *path[q] + (b ? '1' : '0');
        todo.push_back(c);
      }
    }
  }
  std::vector<CPoint> out;
  for (const auto& p : path) {
    if (!p) continue;
    for (const char* cyc : {"0", "1", "01"}) {
      CPoint x(*p, cyc);
      if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
  }
  return out;
}

struct SchemeReport {
  bool surjective = false;          // (a)
  bool closureCondition = false;    // (b) cofinal realization equals R(f(x))
  bool singletonFibers = false;     // (c) rd-irreflexive worlds
  bool branchingFibers = false;     // (d) rd-reflexive worlds
  std::size_t pointsChecked = 0;
  std::vector<std::string> failures;

  bool passed() const { return surjective && closureCondition && singletonFibers && branchingFibers; }
};

inline SchemeReport verifyScheme(const LabelingScheme& sch, const std::vector<CPoint>& testPoints) {
  const Frame& f = sch.frame();
  const auto& st = sch.states();
  SchemeReport rep;

  const WorldSet rootReal = sch.realizationOf(sch.root());
  rep.surjective = rootReal == f.worlds();
  if (!rep.surjective) rep.failures.push_back("(a) worlds never attained: " + std::to_string((f.worlds() - rootReal).count()));

  rep.closureCondition = true;
  for (const CPoint& x : testPoints) {
    ++rep.pointsChecked;
    const World v = evalPoint(sch, x);
    WorldSet cofinal = f.worlds();
    for (std::size_t q : sch.pathStates(x)) cofinal &= sch.realizationOf(q);
    if (cofinal != f.r().successors(v)) {
      rep.closureCondition = false;
      rep.failures.push_back("(b) at " + x.str() + ": worlds accumulating differ from R(" + f.name(v) + ")");
    }
  }

  const auto reachable = sch.reachableFromRoot();
  rep.singletonFibers = true;
  rep.branchingFibers = true;
  for (World w = 0; w < f.size(); ++w) {
    bool branches = false;
    for (std::size_t q = 0; q < st.size(); ++q) {
      if (!reachable[q] || !sch.realizationOf(q).contains(w)) continue;
      const bool left = sch.realizationOf(st[q].child[0]).contains(w);
      const bool right = sch.realizationOf(st[q].child[1]).contains(w);
      if (left && right) branches = true;
    }
    if (f.rd().contains(w, w)) {
      if (!branches) {
        rep.branchingFibers = false;
        rep.failures.push_back("(d) rd-reflexive " + f.name(w) + " has a one-point fiber");
      }
    } else if (branches) {
      rep.singletonFibers = false;
      rep.failures.push_back("(c) rd-irreflexive " + f.name(w) + " is attained in two disjoint cells");
    }
  }
  return rep;
}

/// A scheme that passed verifyScheme.
class VerifiedScheme {
 public:
  static std::optional<VerifiedScheme> certify(LabelingScheme sch, const std::vector<CPoint>& testPoints) {
    SchemeReport rep = verifyScheme(sch, testPoints);
    if (!rep.passed()) return std::nullopt;
    return VerifiedScheme(std::move(sch), std::move(rep));
  }
  static std::optional<VerifiedScheme> certify(LabelingScheme sch) {
    auto pts = stateCoveringPoints(sch);
    return certify(std::move(sch), pts);
  }

  const LabelingScheme& scheme() const { return sch_; }
  const SchemeReport& report() const { return rep_; }

 private:
  VerifiedScheme(LabelingScheme s, SchemeReport r) : sch_(std::move(s)), rep_(std::move(r)) {}
  LabelingScheme sch_;
  SchemeReport rep_;
};

/// Truth of g at x under the pulled-back valuation Θ(p) = f⁻¹(θ(p)). For a
/// cd-p-morphism f this equals frame truth at f(x).
inline bool pullbackCheck(const VerifiedScheme& vs, const Valuation& theta, const CPoint& x, const Formula& g) {
  const LabelingScheme& sch = vs.scheme();
  return checkModel(KripkeModel(sch.frame(), theta), evalPoint(sch, x), g);
}

}  // namespace dlogic
