#pragma once

// Script executor: runs a parsed surgery script against a fresh
// presentation, producing the requested report/render outputs, a
// human-readable trace (one line per statement, with result annotations),
// and the final state.
//
// Statement numbering in diagnostics and the trace is 1-based and counts
// statements, not source lines.  Any engine error raised while executing a
// statement is rethrown as ScriptRuntimeError, annotated with the statement
// number and its canonical text.
//
// Model notes: both manifold models expose their sole starting piece as
// piece 1, and all knot/torus declarations attach there.  Transverse curves
// need a solid or opaque host, so scripts that declare knots start from
// `manifold s3_std`; the `layer` model exists for torus work inside a
// rotational window.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cscalc/errors.hpp"
#include "cscalc/lutz.hpp"
#include "cscalc/render.hpp"
#include "cscalc/report.hpp"
#include "cscalc/script.hpp"
#include "cscalc/surgery.hpp"

namespace cscalc {

class ScriptRuntimeError : public CscError {
 public:
  ScriptRuntimeError(std::size_t statement_number, const std::string& pretty,
                     const std::string& msg)
      : CscError("statement " + std::to_string(statement_number) + " (" +
                 pretty + "): " + msg),
        statement_number_(statement_number) {}

  std::size_t statement_number() const { return statement_number_; }

 private:
  std::size_t statement_number_;
};

// One deliverable produced by a report or render statement.
struct ScriptOutput {
  std::string path;  // "-" means the standard output stream
  std::string content;
  bool is_render = false;
};

struct ExecutionResult {
  Presentation presentation;
  std::string report;  // final-state report, always produced
  std::vector<ScriptOutput> outputs;
  std::vector<std::string> trace;
};

namespace execute_detail {

inline Presentation initial_presentation(const Statement& st) {
  if (st.manifold_model == "s3_std") return standard_sphere();
  Presentation p;
  PieceId id = p.next_piece++;
  p.pieces.emplace(id, Piece(ThickenedTorusData{st.window_lo, st.window_hi}));
  p.outer.insert(BoundaryRef{id, kLoPort});
  p.outer.insert(BoundaryRef{id, kHiPort});
  validate_presentation(p);
  return p;
}

}  // namespace execute_detail

inline ExecutionResult execute(const Script& script) {
  ExecutionResult result;
  Presentation p;
  constexpr PieceId kHost = 1;

  for (std::size_t i = 0; i < script.statements.size(); ++i) {
    const Statement& st = script.statements[i];
    const std::size_t num = i + 1;
    const std::string pretty = pretty_statement(st);
    std::string note;

    try {
      switch (st.kind) {
        case StatementKind::Manifold:
          p = execute_detail::initial_presentation(st);
          break;
        case StatementKind::KnotDeclare:
          p = approximate_transverse(std::move(p), kHost, st.name, st.nbhd,
                                     st.framing);
          break;
        case StatementKind::TorusDeclare:
          p = register_convex_torus(std::move(p), st.name, kHost, st.angle,
                                    TorusDividingSet(st.pairs, st.slope),
                                    /*separating=*/false, st.meridian);
          recompute_overtwisted(p);
          break;
        case StatementKind::Rsurg1:
          p = round_surgery_1(std::move(p), st.name, st.name2, st.framing,
                              st.pairs);
          break;
        case StatementKind::Rsurg2:
          p = round_surgery_2(std::move(p), st.name, st.meridian);
          note = " [" + p.events.back().sphere_model + "]";
          break;
        case StatementKind::Lutz:
          if (st.lutz_mode == "simple")
            p = simple_lutz_knot(std::move(p), st.name);
          else if (st.lutz_mode == "full")
            p = full_lutz_knot(std::move(p), st.name);
          else
            p = lutz_torus(std::move(p), st.name, st.amount);
          break;
        case StatementKind::LutzMacro: {
          MacroResult mr = lutz_as_round_surgeries(std::move(p), st.name);
          p = std::move(mr.presentation);
          note = " [events " + std::to_string(mr.event_indices.front()) +
                 ".." + std::to_string(mr.event_indices.back()) +
                 "; equivalence verified]";
          break;
        }
        case StatementKind::AdjustEuler: {
          std::size_t before = p.events.size();
          p = adjust_relative_euler(std::move(p), st.name, st.target);
          note = " [" + std::to_string(p.events.size() - before) + " twists]";
          break;
        }
        case StatementKind::Reverse:
          p = reverse_event(std::move(p),
                            static_cast<std::size_t>(st.event_number));
          note = " [undid event " + std::to_string(st.event_number) + "]";
          break;
        case StatementKind::Report: {
          result.trace.push_back(std::to_string(num) + ": " + pretty);
          ScriptOutput out;
          out.path = st.path;
          out.content = report_json(p, result.trace);
          out.is_render = false;
          result.outputs.push_back(std::move(out));
          continue;  // trace line already recorded
        }
        case StatementKind::Render: {
          auto it = p.tori.find(st.name);
          if (it == p.tori.end())
            throw std::runtime_error("no tracked torus named '" + st.name +
                                     "'");
          RenderFormat fmt = st.format == "ascii" ? RenderFormat::Ascii
                                                  : RenderFormat::Svg;
          ScriptOutput out;
          out.path = st.path;
          out.content = render_dividing_set(it->second.dividing, fmt);
          out.is_render = true;
          result.outputs.push_back(std::move(out));
          break;
        }
      }
    } catch (const ScriptRuntimeError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScriptRuntimeError(num, pretty, e.what());
    }
    result.trace.push_back(std::to_string(num) + ": " + pretty + note);
  }

  result.report = report_json(p, result.trace);
  result.presentation = std::move(p);
  return result;
}

}  // namespace cscalc
