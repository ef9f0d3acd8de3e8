#pragma once

// JSON report emission for presentations.
//
// The report is built as an explicit document tree with *ordered* object
// fields and written with a fixed formatting policy (two-space indent, no
// trailing spaces, "\n" line ends), so identical presentations produce
// byte-identical report text.  A small reader for the emitted subset of JSON
// (null, booleans, integers, strings, arrays, objects) lets tests check that
// a report round-trips through serialization bit-identically.
//
// Schema v1 ("cscalc-report-v1"):
//   schema      string
//   pieces      array of {id, kind, detail}
//   interfaces  array of {id, a, b, gluing, pairs, slope, oriented}
//   events      array of {kind, index, site, sphere_model, lutz_half_turns,
//                         reversed_event, normalize_trace}
//   counters    {overtwisted, torsion_half_units, simple_lutz_count}
//   tori        {name -> {slope, pairs, relative_euler}}
//   trace       array of execution log lines

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cscalc/presentation.hpp"

namespace cscalc {

// ---------------------------------------------------------------------------
// Minimal ordered JSON document
// ---------------------------------------------------------------------------
struct JsonValue {
  enum class Kind { Null, Bool, Int, String, Array, Object };
  Kind kind = Kind::Null;
  bool boolean = false;
  std::int64_t integer = 0;
  std::string string;
  std::vector<JsonValue> items;                                // Array
  std::vector<std::pair<std::string, JsonValue>> fields;       // Object

  static JsonValue null() { return JsonValue{}; }
  static JsonValue of(bool b) {
    JsonValue v;
    v.kind = Kind::Bool;
    v.boolean = b;
    return v;
  }
  static JsonValue of(std::int64_t i) {
    JsonValue v;
    v.kind = Kind::Int;
    v.integer = i;
    return v;
  }
  static JsonValue of(std::string s) {
    JsonValue v;
    v.kind = Kind::String;
    v.string = std::move(s);
    return v;
  }
  static JsonValue array() {
    JsonValue v;
    v.kind = Kind::Array;
    return v;
  }
  static JsonValue object() {
    JsonValue v;
    v.kind = Kind::Object;
    return v;
  }
  JsonValue& add(std::string key, JsonValue val) {
    fields.emplace_back(std::move(key), std::move(val));
    return *this;
  }
  JsonValue& push(JsonValue val) {
    items.push_back(std::move(val));
    return *this;
  }

  friend bool operator==(const JsonValue& a, const JsonValue& b) {
    return a.kind == b.kind && a.boolean == b.boolean &&
           a.integer == b.integer && a.string == b.string &&
           a.items == b.items && a.fields == b.fields;
  }
};

namespace json_detail {

inline void escape_into(const std::string& s, std::string& out) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x",
                        static_cast<unsigned>(static_cast<unsigned char>(ch)));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

inline void write_into(const JsonValue& v, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (v.kind) {
    case JsonValue::Kind::Null: out += "null"; return;
    case JsonValue::Kind::Bool: out += v.boolean ? "true" : "false"; return;
    case JsonValue::Kind::Int: out += std::to_string(v.integer); return;
    case JsonValue::Kind::String: escape_into(v.string, out); return;
    case JsonValue::Kind::Array: {
      if (v.items.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        out += pad_in;
        write_into(v.items[i], out, depth + 1);
        if (i + 1 < v.items.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case JsonValue::Kind::Object: {
      if (v.fields.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (std::size_t i = 0; i < v.fields.size(); ++i) {
        out += pad_in;
        escape_into(v.fields[i].first, out);
        out += ": ";
        write_into(v.fields[i].second, out, depth + 1);
        if (i + 1 < v.fields.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
  }
}

struct Reader {
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw std::runtime_error("json parse error at offset " +
                             std::to_string(pos) + ": " + why);
  }
  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t' ||
            text[pos] == '\r'))
      ++pos;
  }
  char peek() {
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  bool consume_word(const char* w) {
    std::size_t n = std::char_traits<char>::length(w);
    if (text.compare(pos, n, w) == 0) {
      pos += n;
      return true;
    }
    return false;
  }
  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos >= text.size()) fail("unterminated string");
      char c = text[pos++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos >= text.size()) fail("unterminated escape");
      char e = text[pos++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'u': {
          if (pos + 4 > text.size()) fail("bad \\u escape");
          unsigned code = 0;
          for (int i = 0; i < 4; ++i) {
            char h = text[pos++];
            code <<= 4;
            if (h >= '0' && h <= '9') code |= static_cast<unsigned>(h - '0');
            else if (h >= 'a' && h <= 'f')
              code |= static_cast<unsigned>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F')
              code |= static_cast<unsigned>(h - 'A' + 10);
            else fail("bad \\u escape digit");
          }
          if (code > 0x7f) fail("non-ascii \\u escape unsupported");
          out += static_cast<char>(code);
          break;
        }
        default: fail("unsupported escape");
      }
    }
  }
  JsonValue parse_value() {
    skip_ws();
    char c = peek();
    if (c == 'n') {
      if (!consume_word("null")) fail("bad literal");
      return JsonValue::null();
    }
    if (c == 't') {
      if (!consume_word("true")) fail("bad literal");
      return JsonValue::of(true);
    }
    if (c == 'f') {
      if (!consume_word("false")) fail("bad literal");
      return JsonValue::of(false);
    }
    if (c == '"') return JsonValue::of(parse_string());
    if (c == '[') {
      ++pos;
      JsonValue v = JsonValue::array();
      skip_ws();
      if (peek() == ']') {
        ++pos;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value());
        skip_ws();
        if (peek() == ',') {
          ++pos;
          continue;
        }
        expect(']');
        return v;
      }
    }
    if (c == '{') {
      ++pos;
      JsonValue v = JsonValue::object();
      skip_ws();
      if (peek() == '}') {
        ++pos;
        return v;
      }
      while (true) {
        skip_ws();
        std::string key = parse_string();
        skip_ws();
        expect(':');
        v.fields.emplace_back(std::move(key), parse_value());
        skip_ws();
        if (peek() == ',') {
          ++pos;
          continue;
        }
        expect('}');
        return v;
      }
    }
    if (c == '-' || (c >= '0' && c <= '9')) {
      std::size_t start = pos;
      if (c == '-') ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      if (pos == start || (text[start] == '-' && pos == start + 1))
        fail("bad number");
      return JsonValue::of(
          static_cast<std::int64_t>(std::stoll(text.substr(start, pos - start))));
    }
    fail("unexpected character");
  }
};

}  // namespace json_detail

inline std::string json_write(const JsonValue& v) {
  std::string out;
  json_detail::write_into(v, out, 0);
  out += '\n';
  return out;
}

inline JsonValue json_parse(const std::string& text) {
  json_detail::Reader r{text};
  JsonValue v = r.parse_value();
  r.skip_ws();
  if (r.pos != text.size()) r.fail("trailing content");
  return v;
}

// ---------------------------------------------------------------------------
// Report construction
// ---------------------------------------------------------------------------
namespace report_detail {

inline std::string piece_detail(const Piece& piece) {
  if (piece.is_solid())
    return "end=" + piece.solid().twist_end.str() +
           " basis=" + piece.solid().basis.str();
  if (piece.is_layer())
    return "window=[" + piece.layer().twist_lo.str() + ", " +
           piece.layer().twist_hi.str() + "]";
  const OpaqueData& od = piece.opaque();
  std::string out = "origin=" + od.origin +
                    " boundaries=" + std::to_string(od.boundaries.size());
  for (const OpaqueBoundary& b : od.boundaries)
    out += " [" + canonical_text(b.dividing) +
           (b.outward ? " out" : " in") + "]";
  return out;
}

inline std::string trace_step_text(const MacroApplication& m) {
  std::string out = m.name + "(";
  for (std::size_t i = 0; i < m.args.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(m.args[i]);
  }
  out += ")";
  return out;
}

}  // namespace report_detail

inline JsonValue build_report(const Presentation& p,
                              const std::vector<std::string>& trace) {
  JsonValue root = JsonValue::object();
  root.add("schema", JsonValue::of(std::string("cscalc-report-v1")));

  JsonValue pieces = JsonValue::array();
  for (const auto& [id, piece] : p.pieces) {
    JsonValue e = JsonValue::object();
    e.add("id", JsonValue::of(static_cast<std::int64_t>(id)));
    e.add("kind", JsonValue::of(std::string(piece.kind_name())));
    e.add("detail", JsonValue::of(report_detail::piece_detail(piece)));
    pieces.push(std::move(e));
  }
  root.add("pieces", std::move(pieces));

  JsonValue ifaces = JsonValue::array();
  for (const auto& [id, ifc] : p.interfaces) {
    JsonValue e = JsonValue::object();
    e.add("id", JsonValue::of(static_cast<std::int64_t>(id)));
    e.add("a", JsonValue::of(ifc.a.str()));
    e.add("b", JsonValue::of(ifc.b.str()));
    e.add("gluing", JsonValue::of(ifc.gluing.str()));
    e.add("pairs", JsonValue::of(ifc.dividing_pairs));
    e.add("slope", JsonValue::of(ifc.slope_a.str()));
    e.add("oriented", JsonValue::of(ifc.orientation_compatible));
    ifaces.push(std::move(e));
  }
  root.add("interfaces", std::move(ifaces));

  JsonValue events = JsonValue::array();
  for (const SurgeryEvent& ev : p.events) {
    JsonValue e = JsonValue::object();
    e.add("kind", JsonValue::of(ev.kind));
    e.add("index", JsonValue::of(static_cast<std::int64_t>(ev.index)));
    e.add("site", JsonValue::of(ev.site));
    e.add("sphere_model", JsonValue::of(ev.sphere_model));
    e.add("lutz_half_turns", JsonValue::of(ev.lutz_half_turns));
    e.add("reversed_event",
          JsonValue::of(static_cast<std::int64_t>(ev.reversed_event)));
    JsonValue nt = JsonValue::array();
    for (const MacroApplication& m : ev.normalize_trace)
      nt.push(JsonValue::of(report_detail::trace_step_text(m)));
    e.add("normalize_trace", std::move(nt));
    events.push(std::move(e));
  }
  root.add("events", std::move(events));

  JsonValue counters = JsonValue::object();
  counters.add("overtwisted", JsonValue::of(p.counters.overtwisted));
  counters.add("torsion_half_units",
               JsonValue::of(p.counters.torsion_half_units));
  counters.add("simple_lutz_count",
               JsonValue::of(p.counters.simple_lutz_count));
  root.add("counters", std::move(counters));

  JsonValue tori = JsonValue::object();
  for (const auto& [name, t] : p.tori) {
    JsonValue e = JsonValue::object();
    e.add("slope", JsonValue::of(t.dividing.essential_slope.str()));
    e.add("pairs", JsonValue::of(t.dividing.essential_pairs));
    e.add("relative_euler", JsonValue::of(relative_euler(t.dividing)));
    tori.add(name, std::move(e));
  }
  root.add("tori", std::move(tori));

  JsonValue tr = JsonValue::array();
  for (const std::string& line : trace) tr.push(JsonValue::of(line));
  root.add("trace", std::move(tr));

  return root;
}

inline std::string report_json(const Presentation& p,
                               const std::vector<std::string>& trace) {
  return json_write(build_report(p, trace));
}

}  // namespace cscalc
