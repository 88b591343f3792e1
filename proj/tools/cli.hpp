#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dlogic/dlogic.hpp"
#include "dlogic/io.hpp"

namespace dlogic::cli {

// Exit codes.
inline constexpr int kTrue = 0;
inline constexpr int kFalse = 1;
inline constexpr int kUsage = 2;
inline constexpr int kUnknown = 3;

namespace detail {

inline void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

inline int cmdParse(const std::string& text, std::ostream& out) {
  const Formula f = parse(text);
  out << "ast: " << toAst(f) << "\n";
  out << "formula: " << render(f) << "\n";
  return kTrue;
}

inline int cmdCheck(const std::string& logicName, std::optional<std::size_t> maxWorlds, const std::string& emit,
                    const std::string& text, std::ostream& out) {
  const auto logic = parseLogic(logicName);
  if (!logic) throw CLI::ValidationError("--logic", "expected s4d, s4ds or s4dt1s");
  const Formula f = parse(text);
  SearchConfig cfg;
  cfg.maxWorlds = maxWorlds;
  const Verdict v = valid(f, *logic, cfg);
  out << toString(v.status) << " (" << toString(*logic) << ", size bound " << v.bound << ", searched up to "
      << v.stats.largestSizeSearched << " worlds, " << v.stats.framesExamined << " frames)\n";
  if (v.status == Status::Valid) return kTrue;
  if (v.status == Status::UnknownBeyondBound) return kUnknown;
  const Witness& w = *v.witness;
  out << "world: " << w.model.frame().name(w.world) << "\n";
  const std::string modelJson = modelToJson(w.model).dump(2);
  const std::string dot = frameToDot(w.model.frame(), &w.model.valuation());
  if (!emit.empty()) {
    writeFile(emit + ".json", modelJson + "\n");
    writeFile(emit + ".dot", dot);
    out << "countermodel: " << emit << ".json\n";
    out << "dot: " << emit << ".dot\n";
  }
  out << modelJson << "\n" << dot;
  return kFalse;
}

inline int cmdMc(const std::string& file, const std::string& world, const std::string& text, std::ostream& out) {
  const KripkeModel m = modelFromJson(readJsonFile(file));
  const auto w = m.frame().find(world);
  if (!w) throw FormatError("unknown world \"" + world + "\"");
  const bool truth = checkModel(m, *w, parse(text));
  out << (truth ? "true" : "false") << "\n";
  return truth ? kTrue : kFalse;
}

inline int cmdTopOf(const std::string& file, std::ostream& out) {
  const Frame f = frameFromJson(readJsonFile(file));
  out << spaceToJson(topOf(f)).dump(2) << "\n";
  return kTrue;
}

inline int cmdFilter(const std::string& file, const std::string& text, std::ostream& out) {
  const KripkeModel m = modelFromJson(readJsonFile(file));
  const Formula f = parse(text);
  const FiltrationResult res = filtrate(m, f);
  const auto violation = verifyFiltration(m, res);
  json j = filtrationToJson(res);
  j["preserved"] = !violation.has_value();
  if (violation) j["violation"] = violation->message;
  out << j.dump(2) << "\n";
  out << "classes: " << res.partition.size() << "\n";
  out << "preserved: " << (violation ? "no" : "yes") << "\n";
  return violation ? kFalse : kTrue;
}

inline int cmdCantor(const std::string& file, bool verify, std::optional<std::size_t> depth, std::ostream& out) {
  const Frame f = frameFromJson(readJsonFile(file));
  const LabelingScheme sch = buildScheme(f);
  json j = schemeToJson(sch);
  int code = kTrue;
  if (verify) {
    const SchemeReport rep = verifyScheme(sch, stateCoveringPoints(sch));
    j["verification"] = schemeReportToJson(rep);
    if (!rep.passed()) code = kFalse;
  }
  out << j.dump(2) << "\n";
  if (depth) out << schemeToDot(sch, *depth);
  return code;
}

}  // namespace detail

/// Runs the command line `args` (program name first).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bimodal logic of topology with the difference modality"};
  app.require_subcommand(1);

  std::string formula;
  std::string logicName;
  std::optional<std::size_t> maxWorlds;
  std::string emit;
  std::string modelFile;
  std::string worldName;
  bool verify = false;
  std::optional<std::size_t> depth;

  auto* parseCmd = app.add_subcommand("parse", "Parse a formula and print its core form");
  parseCmd->add_option("formula", formula, "Formula")->required();

  auto* checkCmd = app.add_subcommand("check", "Decide validity in S4D, S4DS or S4DT1S");
  checkCmd->add_option("--logic", logicName, "s4d | s4ds | s4dt1s")->required();
  checkCmd->add_option("--max-worlds", maxWorlds, "Largest frame size searched");
  checkCmd->add_option("--emit", emit, "Write countermodel to PREFIX.json and PREFIX.dot");
  checkCmd->add_option("formula", formula, "Formula")->required();

  auto* mcCmd = app.add_subcommand("mc", "Model-check a formula at a world");
  mcCmd->add_option("--model", modelFile, "Model JSON file")->required();
  mcCmd->add_option("--world", worldName, "World name")->required();
  mcCmd->add_option("formula", formula, "Formula")->required();

  auto* topCmd = app.add_subcommand("topof", "Print the up-set topology of a frame");
  topCmd->add_option("--model", modelFile, "Frame or model JSON file")->required();

  auto* filterCmd = app.add_subcommand("filter", "Filtrate a model through the subformulas of a formula");
  filterCmd->add_option("--model", modelFile, "Model JSON file")->required();
  filterCmd->add_option("formula", formula, "Formula")->required();

  auto* cantorCmd = app.add_subcommand("cantor", "Build a Cantor-space labeling onto a DS-T1 frame");
  cantorCmd->add_option("--frame", modelFile, "Frame JSON file")->required();
  cantorCmd->add_flag("--verify", verify, "Verify the cd-p-morphism conditions");
  cantorCmd->add_option("--depth", depth, "Emit the cell tree to this depth as DOT");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*parseCmd) return detail::cmdParse(formula, out);
    if (*checkCmd) return detail::cmdCheck(logicName, maxWorlds, emit, formula, out);
    if (*mcCmd) return detail::cmdMc(modelFile, worldName, formula, out);
    if (*topCmd) return detail::cmdTopOf(modelFile, out);
    if (*filterCmd) return detail::cmdFilter(modelFile, formula, out);
    if (*cantorCmd) return detail::cmdCantor(modelFile, verify, depth, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace dlogic::cli
