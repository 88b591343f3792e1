#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlogic {

/// Core connectives. Every other connective is sugar over these.
enum class Op : unsigned char { Letter, Bottom, Implies, Box, Diff };

/// Immutable formula of the bimodal language over {→, ⊥, □, D}.
///
/// Formulas are shared trees; copying a Formula copies a pointer. Ordering
/// is by node count first, so every proper subformula sorts before the
/// formulas containing it.
class Formula {
 public:
  static Formula letter(std::string name) {
    if (name.empty()) throw std::invalid_argument("formula: empty letter name");
    return Formula(std::make_shared<Node>(Op::Letter, std::move(name), nullptr, nullptr));
  }
  static Formula bottom() {
    static const Formula bot(std::make_shared<Node>(Op::Bottom, std::string{}, nullptr, nullptr));
    return bot;
  }
  static Formula implies(Formula a, Formula b) {
    return Formula(std::make_shared<Node>(Op::Implies, std::string{}, std::move(a.node_), std::move(b.node_)));
  }
  static Formula box(Formula a) {
    return Formula(std::make_shared<Node>(Op::Box, std::string{}, std::move(a.node_), nullptr));
  }
  static Formula diff(Formula a) {
    return Formula(std::make_shared<Node>(Op::Diff, std::string{}, std::move(a.node_), nullptr));
  }

  // Derived connectives, expanded on construction.
  static Formula negation(Formula a) { return implies(std::move(a), bottom()); }
  static Formula top() { return negation(bottom()); }
  static Formula conj(Formula a, Formula b) { return negation(implies(std::move(a), negation(std::move(b)))); }
  static Formula disj(Formula a, Formula b) { return implies(negation(std::move(a)), std::move(b)); }
  static Formula iff(const Formula& a, const Formula& b) { return conj(implies(a, b), implies(b, a)); }
  static Formula diamond(Formula a) { return negation(box(negation(std::move(a)))); }
  static Formula somewhereElse(Formula a) { return negation(diff(negation(std::move(a)))); }
  /// [∀]φ = Dφ ∧ φ.
  static Formula everywhere(const Formula& a) { return conj(diff(a), a); }

  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  /// Left operand of →, or the operand of □ / D.
  Formula lhs() const { return Formula(node_->left); }
  Formula rhs() const { return Formula(node_->right); }
  Formula operand() const { return lhs(); }

  bool isLetter() const { return op() == Op::Letter; }
  bool isBottom() const { return op() == Op::Bottom; }
  bool isImplies() const { return op() == Op::Implies; }
  bool isModal() const { return op() == Op::Box || op() == Op::Diff; }

  std::size_t size() const { return node_->size; }
  std::size_t modalDepth() const { return node_->depth; }

  friend bool operator==(const Formula& a, const Formula& b) { return compare(a.node_.get(), b.node_.get()) == 0; }
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    return compare(a.node_.get(), b.node_.get()) <=> 0;
  }

 private:
  struct Node {
    Node(Op o, std::string n, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r)
        : op(o), name(std::move(n)), left(std::move(l)), right(std::move(r)) {
      size = 1 + (left ? left->size : 0) + (right ? right->size : 0);
      std::size_t sub = std::max(left ? left->depth : 0, right ? right->depth : 0);
      depth = (op == Op::Box || op == Op::Diff) ? sub + 1 : sub;
    }
    Op op;
    std::string name;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::size_t size = 1;
    std::size_t depth = 0;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static int compare(const Node* a, const Node* b) {
    if (a == b) return 0;
    if (a->size != b->size) return a->size < b->size ? -1 : 1;
    if (a->op != b->op) return a->op < b->op ? -1 : 1;
    if (a->op == Op::Letter) {
      int c = a->name.compare(b->name);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    if (a->left) {
      int c = compare(a->left.get(), b->left.get());
      if (c != 0) return c;
    }
    if (a->right) return compare(a->right.get(), b->right.get());
    return 0;
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {
inline void collect(const Formula& f, std::set<Formula>& out) {
  if (!out.insert(f).second) return;
  switch (f.op()) {
    case Op::Implies:
      collect(f.lhs(), out);
      collect(f.rhs(), out);
      break;
    case Op::Box:
    case Op::Diff:
      collect(f.operand(), out);
      break;
    default:
      break;
  }
}
}  // namespace detail

/// Smallest subformula-closed set containing f, subformulas first.
inline std::vector<Formula> subformulaClosure(const Formula& f) {
  std::set<Formula> acc;
  detail::collect(f, acc);
  return {acc.begin(), acc.end()};
}

inline bool isSubformulaClosed(const std::vector<Formula>& psi) {
  std::set<Formula> members(psi.begin(), psi.end());
  for (const auto& g : psi) {
    if (g.isImplies() && !(members.count(g.lhs()) && members.count(g.rhs()))) return false;
    if (g.isModal() && !members.count(g.operand())) return false;
  }
  return true;
}

inline std::set<std::string> letters(const Formula& f) {
  std::set<std::string> out;
  for (const auto& g : subformulaClosure(f))
    if (g.isLetter()) out.insert(g.name());
  return out;
}

/// Uniformly replaces every occurrence of `name` in f by g.
inline Formula substitute(const Formula& f, const std::string& name, const Formula& g) {
  switch (f.op()) {
    case Op::Letter:
      return f.name() == name ? g : f;
    case Op::Bottom:
      return f;
    case Op::Implies:
      return Formula::implies(substitute(f.lhs(), name, g), substitute(f.rhs(), name, g));
    case Op::Box:
      return Formula::box(substitute(f.operand(), name, g));
    case Op::Diff:
      return Formula::diff(substitute(f.operand(), name, g));
  }
  return f;
}

/// A formula flattened into its subformula closure, each entry referring to
/// operands by index. Entries are in dependency order, so a single forward
/// pass evaluates all of them.
class CompiledFormula {
 public:
  struct Step {
    Op op = Op::Bottom;
    std::size_t a = 0;
    std::size_t b = 0;
    std::string name;
  };

  explicit CompiledFormula(const Formula& f) : closure_(subformulaClosure(f)) { build(); }
  explicit CompiledFormula(std::vector<Formula> psi) : closure_(std::move(psi)) {
    std::sort(closure_.begin(), closure_.end());
    closure_.erase(std::unique(closure_.begin(), closure_.end()), closure_.end());
    if (!isSubformulaClosed(closure_)) throw std::invalid_argument("formula set is not closed under subformulas");
    build();
  }

  const std::vector<Formula>& closure() const { return closure_; }
  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return closure_.size(); }
  std::size_t indexOf(const Formula& g) const {
    auto it = std::lower_bound(closure_.begin(), closure_.end(), g);
    if (it == closure_.end() || !(*it == g)) throw std::out_of_range("formula not in closure");
    return static_cast<std::size_t>(it - closure_.begin());
  }

  /// Evaluates every closure member. `Sem` supplies the set algebra:
  /// universe(), letter(name), box(set), diff(set).
  template <class Sem>
  auto evaluate(const Sem& sem) const {
    using Set = decltype(sem.universe());
    std::vector<Set> v(steps_.size());
    const Set all = sem.universe();
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const Step& s = steps_[i];
      switch (s.op) {
        case Op::Letter:
          v[i] = sem.letter(s.name);
          break;
        case Op::Bottom:
          v[i] = Set{};
          break;
        case Op::Implies:
          v[i] = (all - v[s.a]) | v[s.b];
          break;
        case Op::Box:
          v[i] = sem.box(v[s.a]);
          break;
        case Op::Diff:
          v[i] = sem.diff(v[s.a]);
          break;
      }
    }
    return v;
  }

  /// Truth set of the compiled formula itself (the last closure entry).
  template <class Sem>
  auto truthSet(const Sem& sem) const {
    return evaluate(sem).back();
  }

 private:
  void build() {
    steps_.reserve(closure_.size());
    for (const auto& g : closure_) {
      Step s;
      s.op = g.op();
      if (g.isLetter()) s.name = g.name();
      if (g.isImplies()) {
        s.a = indexOf(g.lhs());
        s.b = indexOf(g.rhs());
      } else if (g.isModal()) {
        s.a = indexOf(g.operand());
      }
      steps_.push_back(std::move(s));
    }
  }

  std::vector<Formula> closure_;
  std::vector<Step> steps_;
};

}  // namespace dlogic
