#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlogic/cantor.hpp"
#include "dlogic/filtration.hpp"
#include "dlogic/kripke.hpp"
#include "dlogic/parser.hpp"
#include "dlogic/topology.hpp"

namespace dlogic {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> readNames(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw FormatError(std::string("missing array \"") + key + "\"");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& e : j.at(key)) {
    if (!e.is_string()) throw FormatError(std::string("\"") + key + "\" entries must be strings");
    auto n = e.get<std::string>();
    if (!seen.insert(n).second) throw FormatError("duplicate name \"" + n + "\"");
    names.push_back(std::move(n));
  }
  if (names.empty()) throw FormatError(std::string("\"") + key + "\" must be non-empty");
  if (names.size() > kMaxWorlds) throw FormatError("at most 64 worlds are supported");
  return names;
}

inline World lookup(const std::vector<std::string>& names, const json& e) {
  if (!e.is_string()) throw FormatError("relation endpoints must be names");
  const auto s = e.get<std::string>();
  for (World w = 0; w < names.size(); ++w)
    if (names[w] == s) return w;
  throw FormatError("undeclared world \"" + s + "\"");
}

inline WorldSet readSet(const std::vector<std::string>& names, const json& j) {
  if (!j.is_array()) throw FormatError("expected an array of names");
  WorldSet s;
  for (const auto& e : j) s.insert(lookup(names, e));
  return s;
}

inline Relation readRelation(const std::vector<std::string>& names, const json& j) {
  Relation r(names.size());
  if (j.is_string()) {
    if (j.get<std::string>() != "ne") throw FormatError("the only relation shorthand is \"ne\"");
    return Relation::inequality(names.size());
  }
  if (!j.is_array()) throw FormatError("relation must be an array of pairs or \"ne\"");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw FormatError("relation entries must be [from, to] pairs");
    r.insert(lookup(names, p[0]), lookup(names, p[1]));
  }
  return r;
}

inline json writeRelation(const Relation& r, const std::vector<std::string>& names, bool allowShorthand) {
  if (allowShorthand && r == Relation::inequality(r.size())) return "ne";
  json out = json::array();
  for (auto [x, y] : r.pairs()) out.push_back({names[x], names[y]});
  return out;
}

inline json writeSet(WorldSet s, const std::vector<std::string>& names) {
  json out = json::array();
  for (World w : s) out.push_back(names[w]);
  return out;
}

}  // namespace detail

inline Frame frameFromJson(const json& j) {
  const auto names = detail::readNames(j, "worlds");
  if (!j.contains("r")) throw FormatError("missing \"r\"");
  if (!j.contains("rd")) throw FormatError("missing \"rd\"");
  return Frame(detail::readRelation(names, j.at("r")), detail::readRelation(names, j.at("rd")), names);
}

inline KripkeModel modelFromJson(const json& j) {
  Frame f = frameFromJson(j);
  Valuation val;
  if (j.contains("val")) {
    if (!j.at("val").is_object()) throw FormatError("\"val\" must be an object");
    for (const auto& [p, s] : j.at("val").items()) val[p] = detail::readSet(f.names(), s);
  }
  return KripkeModel(std::move(f), std::move(val));
}

inline json frameToJson(const Frame& f) {
  return json{{"worlds", f.names()},
              {"r", detail::writeRelation(f.r(), f.names(), false)},
              {"rd", detail::writeRelation(f.rd(), f.names(), true)}};
}

inline json modelToJson(const KripkeModel& m) {
  json j = frameToJson(m.frame());
  json val = json::object();
  for (const auto& [p, s] : m.valuation()) val[p] = detail::writeSet(s, m.frame().names());
  j["val"] = val;
  return j;
}

inline FiniteSpace spaceFromJson(const json& j) {
  const auto names = detail::readNames(j, "points");
  if (!j.contains("opens") || !j.at("opens").is_array()) throw FormatError("missing array \"opens\"");
  std::vector<PointSet> opens;
  for (const auto& u : j.at("opens")) opens.push_back(detail::readSet(names, u));
  try {
    return FiniteSpace(names.size(), std::move(opens), names);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

inline json spaceToJson(const FiniteSpace& s) {
  json opens = json::array();
  for (PointSet u : s.opens()) opens.push_back(detail::writeSet(u, s.names()));
  return json{{"points", s.names()}, {"opens", opens}};
}

inline json filtrationToJson(const FiltrationResult& res) {
  const Frame& q = res.resultModel.frame();
  json classes = json::array();
  for (std::size_t c = 0; c < res.partition.size(); ++c) {
    json members = json::array();
    for (World w : res.partition.classes[c]) members.push_back(w);
    classes.push_back({{"name", q.name(c)}, {"members", members}});
  }
  json psi = json::array();
  for (const auto& g : res.psi) psi.push_back(render(g));
  return json{{"psi", psi},
              {"classes", classes},
              {"classMap", res.partition.classOf},
              {"rPrime", detail::writeRelation(res.rPrime, q.names(), false)},
              {"rdPrime", detail::writeRelation(res.rdPrime, q.names(), false)},
              {"r2", detail::writeRelation(res.r2, q.names(), false)},
              {"rd2", detail::writeRelation(res.rd2, q.names(), false)},
              {"model", modelToJson(res.resultModel)}};
}

inline const char* toString(SchemeCase c) {
  switch (c) {
    case SchemeCase::ReflexiveRoot: return "reflexive-root";
    case SchemeCase::IrreflexiveRoot: return "irreflexive-root";
    case SchemeCase::Split: return "split";
  }
  return "?";
}

inline json schemeToJson(const LabelingScheme& sch) {
  json states = json::array();
  for (std::size_t q = 0; q < sch.states().size(); ++q) {
    const auto& s = sch.states()[q];
    states.push_back({{"id", q},
                      {"kind", toString(s.kind)},
                      {"world", s.label ? json(sch.frame().name(*s.label)) : json(nullptr)},
                      {"index", s.index},
                      {"children", {s.child[0], s.child[1]}},
                      {"realization", detail::writeSet(sch.realizationOf(q), sch.frame().names())}});
  }
  return json{{"frame", frameToJson(sch.frame())}, {"case", toString(sch.rootCase())}, {"root", sch.root()}, {"states", states}};
}

inline json schemeReportToJson(const SchemeReport& rep) {
  return json{{"surjective", rep.surjective},
              {"closure", rep.closureCondition},
              {"singletonFibers", rep.singletonFibers},
              {"branchingFibers", rep.branchingFibers},
              {"pointsChecked", rep.pointsChecked},
              {"passed", rep.passed()},
              {"failures", rep.failures}};
}

namespace detail {
inline std::string dotEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}
}  // namespace detail

/// Worlds as nodes, r solid, rd dashed, rd-irreflexive worlds double-circled.
/// Reflexive loops of r are left implicit.
inline std::string frameToDot(const Frame& f, const Valuation* val = nullptr) {
  std::ostringstream os;
  os << "digraph frame {\n";
  for (World w = 0; w < f.size(); ++w) {
    std::string label = detail::dotEscape(f.name(w));
    if (val) {
      std::string truths;
      for (const auto& [p, s] : *val)
        if (s.contains(w)) truths += (truths.empty() ? "" : ",") + p;
      if (!truths.empty()) label += "\\n" + truths;
    }
    os << "  n" << w << " [label=\"" << label << "\", shape="
       << (f.rd().contains(w, w) ? "circle" : "doublecircle") << "];\n";
  }
  for (auto [x, y] : f.r().pairs())
    if (x != y) os << "  n" << x << " -> n" << y << ";\n";
  for (auto [x, y] : f.rd().pairs()) {
    const bool both = f.rd().contains(y, x);
    if (x == y || (both && x > y)) continue;
    os << "  n" << x << " -> n" << y << " [style=dashed" << (both ? ", dir=none" : "") << "];\n";
  }
  os << "}\n";
  return os.str();
}

/// Cell tree of a scheme down to `depth`, each cell showing its state label
/// and realization.
inline std::string schemeToDot(const LabelingScheme& sch, std::size_t depth) {
  std::ostringstream os;
  os << "digraph cells {\n";
  const auto& names = sch.frame().names();
  auto emit = [&](auto&& self, const std::string& bits, std::size_t q) -> void {
    const auto& s = sch.states()[q];
    std::string real;
    for (World w : sch.realizationOf(q)) real += (real.empty() ? "" : ",") + names[w];
    std::string id = "c" + (bits.empty() ? std::string("root") : bits);
    os << "  " << id << " [label=\"[" << bits << "] " << detail::dotEscape(s.label ? names[*s.label] : std::string("-")) << "\\n{"
       << detail::dotEscape(real) << "}\"];\n";
    if (bits.size() == depth) return;
    for (int b = 0; b < 2; ++b) {
      std::string cb = bits + (b ? '1' : '0');
      os << "  " << id << " -> c" << cb << " [label=\"" << b << "\"];\n";
      self(self, cb, s.child[b]);
    }
  };
  emit(emit, "", sch.root());
  os << "}\n";
  return os.str();
}

inline json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace dlogic
