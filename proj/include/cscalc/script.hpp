#pragma once

// Surgery-script front end: a line-oriented statement language, its parser,
// and a canonical pretty-printer.
//
// Grammar (one statement per line; '#' starts a comment; blank lines are
// skipped; fields are key=value tokens and may appear in any order after the
// positional arguments):
//
//   manifold s3_std
//   manifold layer lo=<angle> hi=<angle>
//   knot <name> [nbhd=<p/q>] [framing=<matrix>]
//   torus <name> [angle=<angle>] slope=<slope> [pairs=<int>]
//         [meridian=<slope>|lambda|mu]
//   rsurg1 <knot> <knot> [framing=<matrix>] [pairs=<int>]
//   rsurg2 <torus> [meridian=<slope>]
//   lutz simple <knot> | lutz full <knot> | lutz torus <torus> [amount=<int>]
//   lutz-macro <torus>
//   adjust-euler <torus> [target=<int>]
//   reverse <event-number>
//   report json <path|->
//   render ascii|svg <torus> <path|->
//
// Literals: slopes are written p/q or inf (meridians also accept lambda for
// 1/0 and mu for 0/1); angles are written k*pi+slope(p/q), mirroring the
// twist-angle encoding with no floating-point numerals; matrices are written
// [a b;c d] and must have determinant +-1; a knot's nbhd=p/q declares the
// protected radius arctan(p/q), i.e. the boundary angle 0*pi+slope(-p/q).
//
// Static rules enforced at parse time: the first statement must be the
// single manifold initialization, and every knot or torus name must be
// declared by an earlier statement before it is used.  Whether a name is
// still alive (not yet consumed by a surgery) is a runtime question and is
// reported during execution instead.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cscalc/errors.hpp"
#include "cscalc/slope.hpp"

namespace cscalc {

enum class StatementKind {
  Manifold,
  KnotDeclare,
  TorusDeclare,
  Rsurg1,
  Rsurg2,
  Lutz,
  LutzMacro,
  AdjustEuler,
  Reverse,
  Report,
  Render,
};

struct Statement {
  StatementKind kind = StatementKind::Manifold;
  int source_line = 0;  // 1-based; not part of statement identity

  // manifold
  std::string manifold_model;  // "s3_std" | "layer"
  TwistAngle window_lo;
  TwistAngle window_hi;
  // names: the statement's subject(s)
  std::string name;
  std::string name2;
  // knot fields
  TwistAngle nbhd{0, Slope(-1, 100)};
  BasisChange framing;  // knot framing, or rsurg1 relative framing
  // torus fields
  TwistAngle angle;
  Slope slope = Slope::zero();
  std::int64_t pairs = 1;
  std::optional<Slope> meridian;
  // lutz
  std::string lutz_mode;  // "simple" | "full" | "torus"
  std::int64_t amount = 1;
  // adjust-euler
  std::int64_t target = 0;
  // reverse
  std::int64_t event_number = 0;
  // report / render
  std::string format;  // "json" | "ascii" | "svg"
  std::string path;    // output path, "-" for the standard stream

  friend bool operator==(const Statement& a, const Statement& b) {
    return a.kind == b.kind && a.manifold_model == b.manifold_model &&
           a.window_lo == b.window_lo && a.window_hi == b.window_hi &&
           a.name == b.name && a.name2 == b.name2 && a.nbhd == b.nbhd &&
           a.framing == b.framing && a.angle == b.angle &&
           a.slope == b.slope && a.pairs == b.pairs &&
           a.meridian == b.meridian && a.lutz_mode == b.lutz_mode &&
           a.amount == b.amount && a.target == b.target &&
           a.event_number == b.event_number && a.format == b.format &&
           a.path == b.path;
  }
  friend bool operator!=(const Statement& a, const Statement& b) {
    return !(a == b);
  }
};

struct Script {
  std::vector<Statement> statements;

  friend bool operator==(const Script& a, const Script& b) {
    return a.statements == b.statements;
  }
};

namespace script_detail {

struct Token {
  std::string text;
  int col = 0;  // 1-based
};

// Split one line into tokens.  A token is a maximal run of non-space
// characters, except that a '[' ... ']' group is kept whole (bracketed
// matrix literals contain spaces).  '#' at a token boundary starts a comment.
inline std::vector<Token> lex_line(const std::string& line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
      if (line[i] == '[') {
        while (i < line.size() && line[i] != ']') ++i;
        if (i == line.size())
          throw SyntaxError(line_no, static_cast<int>(start) + 1,
                            "unterminated '[' group");
      }
      ++i;
    }
    out.push_back(Token{line.substr(start, i - start),
                        static_cast<int>(start) + 1});
  }
  return out;
}

inline std::int64_t parse_int(const Token& t, int line,
                              const std::string& what) {
  const std::string& s = t.text;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size())
    throw SyntaxError(line, t.col, "expected " + what + ", got '" + s + "'");
  for (std::size_t k = i; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9')
      throw SyntaxError(line, t.col, "expected " + what + ", got '" + s + "'");
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    throw SyntaxError(line, t.col, what + " out of range: '" + s + "'");
  }
}

inline Slope parse_slope(const Token& t, int line, bool allow_names) {
  const std::string& s = t.text;
  if (s == "inf") return Slope::infinity();
  if (allow_names && s == "lambda") return Slope(1, 0);
  if (allow_names && s == "mu") return Slope(0, 1);
  std::size_t slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      Token tt{s, t.col};
      return Slope(parse_int(tt, line, "a slope"), 1);
    }
    Token np{s.substr(0, slash), t.col};
    Token dp{s.substr(slash + 1), t.col + static_cast<int>(slash) + 1};
    std::int64_t num = parse_int(np, line, "a slope numerator");
    std::int64_t den = parse_int(dp, line, "a slope denominator");
    return Slope(num, den);
  } catch (const SyntaxError&) {
    throw;
  } catch (const std::exception& e) {
    throw SyntaxError(line, t.col,
                      "invalid slope '" + s + "': " + e.what());
  }
}

inline TwistAngle parse_angle(const Token& t, int line) {
  const std::string& s = t.text;
  const std::string mid = "*pi+slope(";
  std::size_t m = s.find(mid);
  if (m == std::string::npos || s.empty() || s.back() != ')')
    throw SyntaxError(line, t.col,
                      "expected an angle of the form k*pi+slope(p/q), got '" +
                          s + "'");
  Token kt{s.substr(0, m), t.col};
  std::int64_t k = parse_int(kt, line, "a half-turn count");
  if (k < 0)
    throw SyntaxError(line, t.col, "angle half-turn count must be >= 0");
  std::size_t inner = m + mid.size();
  Token st{s.substr(inner, s.size() - 1 - inner),
           t.col + static_cast<int>(inner)};
  Slope sl = parse_slope(st, line, false);
  return TwistAngle(k, sl);
}

inline BasisChange parse_matrix(const Token& t, int line) {
  const std::string& s = t.text;
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw SyntaxError(line, t.col,
                      "expected a matrix of the form [a b;c d], got '" + s +
                          "'");
  std::string body = s.substr(1, s.size() - 2);
  std::size_t semi = body.find(';');
  if (semi == std::string::npos)
    throw SyntaxError(line, t.col, "matrix is missing the ';' row separator");
  auto split_row = [&](std::string row, int col_base) {
    while (!row.empty() && row.front() == ' ') {
      row.erase(row.begin());
      ++col_base;
    }
    while (!row.empty() && row.back() == ' ') row.pop_back();
    std::size_t sp = row.find(' ');
    if (sp == std::string::npos)
      throw SyntaxError(line, col_base, "matrix row needs two entries");
    std::size_t sp2 = sp;
    while (sp2 < row.size() && row[sp2] == ' ') ++sp2;
    Token a{row.substr(0, sp), col_base};
    Token b{row.substr(sp2), col_base + static_cast<int>(sp2)};
    return std::pair<std::int64_t, std::int64_t>(
        parse_int(a, line, "a matrix entry"),
        parse_int(b, line, "a matrix entry"));
  };
  auto [a, b] = split_row(body.substr(0, semi), t.col + 1);
  auto [c, d] =
      split_row(body.substr(semi + 1), t.col + static_cast<int>(semi) + 2);
  try {
    return BasisChange(a, b, c, d);
  } catch (const std::exception& e) {
    throw SyntaxError(line, t.col, std::string("invalid matrix: ") + e.what());
  }
}

// A knot's nbhd=p/q literal: the protected radius arctan(p/q), which is the
// twist angle 0*pi + slope(-p/q).
inline TwistAngle parse_nbhd(const Token& t, int line) {
  Slope r = parse_slope(t, line, false);
  if (r.is_infinite() || r.p <= 0)
    throw SyntaxError(line, t.col,
                      "nbhd must be a positive finite radius, got '" + t.text +
                          "'");
  return TwistAngle(0, Slope(-r.p, r.q));
}

struct FieldSet {
  std::vector<std::pair<std::string, Token>> kv;
  int line;

  const Token* find(const std::string& key) const {
    for (const auto& [k, v] : kv)
      if (k == key) return &v;
    return nullptr;
  }
};

inline FieldSet collect_fields(const std::vector<Token>& toks,
                               std::size_t from, int line,
                               const std::set<std::string>& allowed) {
  FieldSet fs;
  fs.line = line;
  for (std::size_t i = from; i < toks.size(); ++i) {
    const Token& t = toks[i];
    std::size_t eq = t.text.find('=');
    if (eq == std::string::npos || eq == 0)
      throw SyntaxError(line, t.col,
                        "expected key=value, got '" + t.text + "'");
    std::string key = t.text.substr(0, eq);
    if (!allowed.count(key))
      throw SyntaxError(line, t.col, "unknown field '" + key + "'");
    if (fs.find(key))
      throw SyntaxError(line, t.col, "duplicate field '" + key + "'");
    fs.kv.emplace_back(key,
                       Token{t.text.substr(eq + 1),
                             t.col + static_cast<int>(eq) + 1});
  }
  return fs;
}

inline const Token& positional(const std::vector<Token>& toks, std::size_t i,
                               int line, const std::string& what) {
  if (i >= toks.size())
    throw SyntaxError(line, toks.empty() ? 1 : toks.back().col,
                      "missing " + what);
  if (toks[i].text.find('=') != std::string::npos &&
      toks[i].text.find('=') != 0)
    throw SyntaxError(line, toks[i].col,
                      "expected " + what + " before key=value fields");
  return toks[i];
}

}  // namespace script_detail

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------
inline Script parse_script(const std::string& text) {
  using namespace script_detail;
  Script script;
  bool have_manifold = false;
  std::set<std::string> knots;
  std::set<std::string> tori;

  auto need_knot = [&](const Token& t, int line) {
    if (!knots.count(t.text))
      throw UseBeforeDeclare("line " + std::to_string(line) + ": knot '" +
                             t.text + "' used before declaration");
  };
  auto need_torus = [&](const Token& t, int line) {
    if (!tori.count(t.text))
      throw UseBeforeDeclare("line " + std::to_string(line) + ": torus '" +
                             t.text + "' used before declaration");
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = nl == std::string::npos
                           ? text.substr(pos)
                           : text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::vector<Token> toks = lex_line(line, line_no);
    if (toks.empty()) continue;

    Statement st;
    st.source_line = line_no;
    const std::string& head = toks[0].text;

    if (head != "manifold" && !have_manifold)
      throw UseBeforeDeclare(
          "line " + std::to_string(line_no) +
          ": statement precedes the manifold initialization");

    if (head == "manifold") {
      if (have_manifold)
        throw SyntaxError(line_no, toks[0].col,
                          "a script has exactly one manifold statement");
      st.kind = StatementKind::Manifold;
      const Token& model = positional(toks, 1, line_no, "a manifold model");
      st.manifold_model = model.text;
      if (model.text == "s3_std") {
        if (toks.size() > 2)
          throw SyntaxError(line_no, toks[2].col,
                            "manifold s3_std takes no fields");
      } else if (model.text == "layer") {
        FieldSet fs = collect_fields(toks, 2, line_no, {"lo", "hi"});
        const Token* lo = fs.find("lo");
        const Token* hi = fs.find("hi");
        if (!lo || !hi)
          throw SyntaxError(line_no, toks[1].col,
                            "manifold layer needs lo= and hi= angles");
        st.window_lo = parse_angle(*lo, line_no);
        st.window_hi = parse_angle(*hi, line_no);
        if (compare_angles(st.window_lo, st.window_hi) > 0)
          throw SyntaxError(line_no, lo->col,
                            "layer window is empty (lo > hi)");
      } else {
        throw SyntaxError(line_no, model.col,
                          "unknown manifold model '" + model.text +
                              "' (expected s3_std or layer)");
      }
      have_manifold = true;
    } else if (head == "knot") {
      st.kind = StatementKind::KnotDeclare;
      st.name = positional(toks, 1, line_no, "a knot name").text;
      if (knots.count(st.name) || tori.count(st.name))
        throw SyntaxError(line_no, toks[1].col,
                          "name '" + st.name + "' already declared");
      FieldSet fs = collect_fields(toks, 2, line_no, {"nbhd", "framing"});
      if (const Token* t = fs.find("nbhd")) st.nbhd = parse_nbhd(*t, line_no);
      if (const Token* t = fs.find("framing"))
        st.framing = parse_matrix(*t, line_no);
      knots.insert(st.name);
    } else if (head == "torus") {
      st.kind = StatementKind::TorusDeclare;
      st.name = positional(toks, 1, line_no, "a torus name").text;
      if (knots.count(st.name) || tori.count(st.name))
        throw SyntaxError(line_no, toks[1].col,
                          "name '" + st.name + "' already declared");
      FieldSet fs = collect_fields(toks, 2, line_no,
                                   {"angle", "slope", "pairs", "meridian"});
      const Token* sl = fs.find("slope");
      if (!sl)
        throw SyntaxError(line_no, toks[1].col, "torus needs slope=");
      st.slope = parse_slope(*sl, line_no, false);
      if (const Token* t = fs.find("angle"))
        st.angle = parse_angle(*t, line_no);
      else
        st.angle = twist_end_for_slope(st.slope);
      if (const Token* t = fs.find("pairs")) {
        st.pairs = parse_int(*t, line_no, "a pair count");
        if (st.pairs < 1)
          throw SyntaxError(line_no, t->col, "pairs must be >= 1");
      }
      if (const Token* t = fs.find("meridian"))
        st.meridian = parse_slope(*t, line_no, true);
      tori.insert(st.name);
    } else if (head == "rsurg1") {
      st.kind = StatementKind::Rsurg1;
      const Token& k1 = positional(toks, 1, line_no, "a knot name");
      const Token& k2 = positional(toks, 2, line_no, "a second knot name");
      need_knot(k1, line_no);
      need_knot(k2, line_no);
      st.name = k1.text;
      st.name2 = k2.text;
      FieldSet fs = collect_fields(toks, 3, line_no, {"framing", "pairs"});
      if (const Token* t = fs.find("framing"))
        st.framing = parse_matrix(*t, line_no);
      if (const Token* t = fs.find("pairs")) {
        st.pairs = parse_int(*t, line_no, "a pair count");
        if (st.pairs < 1)
          throw SyntaxError(line_no, t->col, "pairs must be >= 1");
      }
    } else if (head == "rsurg2") {
      st.kind = StatementKind::Rsurg2;
      const Token& t1 = positional(toks, 1, line_no, "a torus name");
      need_torus(t1, line_no);
      st.name = t1.text;
      FieldSet fs = collect_fields(toks, 2, line_no, {"meridian"});
      if (const Token* t = fs.find("meridian"))
        st.meridian = parse_slope(*t, line_no, true);
    } else if (head == "lutz") {
      st.kind = StatementKind::Lutz;
      const Token& mode = positional(toks, 1, line_no, "simple|full|torus");
      st.lutz_mode = mode.text;
      if (mode.text == "simple" || mode.text == "full") {
        const Token& k = positional(toks, 2, line_no, "a knot name");
        need_knot(k, line_no);
        st.name = k.text;
        if (toks.size() > 3)
          throw SyntaxError(line_no, toks[3].col, "unexpected trailing token");
      } else if (mode.text == "torus") {
        const Token& t1 = positional(toks, 2, line_no, "a torus name");
        need_torus(t1, line_no);
        st.name = t1.text;
        FieldSet fs = collect_fields(toks, 3, line_no, {"amount"});
        if (const Token* t = fs.find("amount")) {
          st.amount = parse_int(*t, line_no, "a half-turn amount");
          if (st.amount < 1)
            throw SyntaxError(line_no, t->col, "amount must be >= 1");
        }
      } else {
        throw SyntaxError(line_no, mode.col,
                          "expected simple, full, or torus after lutz");
      }
    } else if (head == "lutz-macro") {
      st.kind = StatementKind::LutzMacro;
      const Token& t1 = positional(toks, 1, line_no, "a torus name");
      need_torus(t1, line_no);
      st.name = t1.text;
      if (toks.size() > 2)
        throw SyntaxError(line_no, toks[2].col, "unexpected trailing token");
    } else if (head == "adjust-euler") {
      st.kind = StatementKind::AdjustEuler;
      const Token& t1 = positional(toks, 1, line_no, "a torus name");
      need_torus(t1, line_no);
      st.name = t1.text;
      FieldSet fs = collect_fields(toks, 2, line_no, {"target"});
      if (const Token* t = fs.find("target"))
        st.target = parse_int(*t, line_no, "a target Euler number");
    } else if (head == "reverse") {
      st.kind = StatementKind::Reverse;
      const Token& n = positional(toks, 1, line_no, "an event number");
      st.event_number = parse_int(n, line_no, "an event number");
      if (st.event_number < 0)
        throw SyntaxError(line_no, n.col, "event number must be >= 0");
      if (toks.size() > 2)
        throw SyntaxError(line_no, toks[2].col, "unexpected trailing token");
    } else if (head == "report") {
      st.kind = StatementKind::Report;
      const Token& fmt = positional(toks, 1, line_no, "a report format");
      if (fmt.text != "json")
        throw SyntaxError(line_no, fmt.col,
                          "unknown report format '" + fmt.text + "'");
      st.format = fmt.text;
      st.path = positional(toks, 2, line_no, "an output path").text;
      if (toks.size() > 3)
        throw SyntaxError(line_no, toks[3].col, "unexpected trailing token");
    } else if (head == "render") {
      st.kind = StatementKind::Render;
      const Token& fmt = positional(toks, 1, line_no, "a render format");
      if (fmt.text != "ascii" && fmt.text != "svg")
        throw SyntaxError(line_no, fmt.col,
                          "unknown render format '" + fmt.text + "'");
      st.format = fmt.text;
      const Token& t1 = positional(toks, 2, line_no, "a torus name");
      need_torus(t1, line_no);
      st.name = t1.text;
      st.path = positional(toks, 3, line_no, "an output path").text;
      if (toks.size() > 4)
        throw SyntaxError(line_no, toks[4].col, "unexpected trailing token");
    } else {
      throw SyntaxError(line_no, toks[0].col,
                        "unknown statement '" + head + "'");
    }
    script.statements.push_back(std::move(st));
  }
  if (!have_manifold && !script.statements.empty())
    throw SyntaxError(1, 1, "script has no manifold statement");
  return script;
}

// ---------------------------------------------------------------------------
// Canonical pretty-printer.  All resolved fields are printed explicitly, so
// parsing the printed text reproduces the same statements (parse-pretty-parse
// is idempotent).
// ---------------------------------------------------------------------------
namespace script_detail {

inline std::string slope_text(const Slope& s) {
  return s.is_infinite() ? "inf" : s.str();
}

inline std::string angle_text(const TwistAngle& a) {
  return std::to_string(a.half_turns) + "*pi+slope(" + a.slope.str() + ")";
}

inline std::string nbhd_text(const TwistAngle& a) {
  // inverse of parse_nbhd: angle (0; -p/q) prints as p/q
  return std::to_string(-a.slope.p) + "/" + std::to_string(a.slope.q);
}

}  // namespace script_detail

inline std::string pretty_statement(const Statement& st) {
  using namespace script_detail;
  switch (st.kind) {
    case StatementKind::Manifold:
      if (st.manifold_model == "s3_std") return "manifold s3_std";
      return "manifold layer lo=" + angle_text(st.window_lo) +
             " hi=" + angle_text(st.window_hi);
    case StatementKind::KnotDeclare:
      return "knot " + st.name + " nbhd=" + nbhd_text(st.nbhd) +
             " framing=" + st.framing.str();
    case StatementKind::TorusDeclare: {
      std::string out = "torus " + st.name + " angle=" + angle_text(st.angle) +
                        " slope=" + slope_text(st.slope) +
                        " pairs=" + std::to_string(st.pairs);
      if (st.meridian) out += " meridian=" + slope_text(*st.meridian);
      return out;
    }
    case StatementKind::Rsurg1:
      return "rsurg1 " + st.name + " " + st.name2 +
             " framing=" + st.framing.str() +
             " pairs=" + std::to_string(st.pairs);
    case StatementKind::Rsurg2: {
      std::string out = "rsurg2 " + st.name;
      if (st.meridian) out += " meridian=" + slope_text(*st.meridian);
      return out;
    }
    case StatementKind::Lutz:
      if (st.lutz_mode == "torus")
        return "lutz torus " + st.name + " amount=" + std::to_string(st.amount);
      return "lutz " + st.lutz_mode + " " + st.name;
    case StatementKind::LutzMacro:
      return "lutz-macro " + st.name;
    case StatementKind::AdjustEuler:
      return "adjust-euler " + st.name + " target=" + std::to_string(st.target);
    case StatementKind::Reverse:
      return "reverse " + std::to_string(st.event_number);
    case StatementKind::Report:
      return "report json " + st.path;
    case StatementKind::Render:
      return "render " + st.format + " " + st.name + " " + st.path;
  }
  return "";
}

inline std::string pretty_print(const Script& script) {
  std::string out;
  for (const Statement& st : script.statements) {
    out += pretty_statement(st);
    out += '\n';
  }
  return out;
}

}  // namespace cscalc
