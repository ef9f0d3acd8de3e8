#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "cscalc/execute.hpp"

using namespace cscalc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) {
  return read_file(std::string(CSCALC_SOURCE_DIR) + "/fixtures/" + name);
}

const JsonValue* field(const JsonValue& obj, const std::string& key) {
  for (const auto& [k, v] : obj.fields)
    if (k == key) return &v;
  return nullptr;
}

}  // namespace

TEST_CASE("a two-statement script parses into its statements") {
  Script s = parse_script("manifold s3_std\nreport json -\n");
  REQUIRE(s.statements.size() == 2);
  CHECK(s.statements[0].kind == StatementKind::Manifold);
  CHECK(s.statements[0].manifold_model == "s3_std");
  CHECK(s.statements[0].source_line == 1);
  CHECK(s.statements[1].kind == StatementKind::Report);
  CHECK(s.statements[1].format == "json");
  CHECK(s.statements[1].path == "-");
}

TEST_CASE("comments, blank lines, and field order are all accepted") {
  Script s = parse_script(
      "# leading comment\n"
      "\n"
      "manifold layer hi=1*pi+slope(0/1) lo=0*pi+slope(0/1)  # trailing\n"
      "\n"
      "torus T pairs=2 slope=-1/1\n");
  REQUIRE(s.statements.size() == 2);
  CHECK(s.statements[0].source_line == 3);
  CHECK(s.statements[0].window_lo == TwistAngle(0, Slope::zero()));
  CHECK(s.statements[0].window_hi == TwistAngle(1, Slope::zero()));
  CHECK(s.statements[1].source_line == 5);
  CHECK(s.statements[1].pairs == 2);
  CHECK(s.statements[1].slope == Slope(-1, 1));
  // angle defaults to the canonical position for the slope
  CHECK(s.statements[1].angle == TwistAngle(0, Slope(-1, 1)));
}

TEST_CASE("declaration discipline is enforced at parse time") {
  CHECK_THROWS_AS(parse_script("manifold s3_std\nrsurg2 T\n"),
                  UseBeforeDeclare);
  CHECK_THROWS_AS(parse_script("report json -\n"), UseBeforeDeclare);
  CHECK_THROWS_AS(parse_script("manifold s3_std\nmanifold s3_std\n"),
                  SyntaxError);
  CHECK_THROWS_AS(
      parse_script("manifold s3_std\nknot K\nknot K\n"), SyntaxError);
  CHECK_THROWS_AS(
      parse_script("manifold s3_std\nknot K\ntorus K slope=0\n"), SyntaxError);
  CHECK_THROWS_AS(
      parse_script("manifold s3_std\nknot K\nlutz simple X\n"),
      UseBeforeDeclare);

  try {
    parse_script("manifold s3_std\nrsurg2 T\n");
    FAIL("expected UseBeforeDeclare");
  } catch (const UseBeforeDeclare& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("'T'") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry line and column positions") {
  try {
    parse_script("manifold s3_std\nfrobnicate X\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 1);
  }
  try {
    parse_script("manifold s3_std\nknot K wibble=3\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 8);
    CHECK(std::string(e.what()).find("wibble") != std::string::npos);
  }
  // determinant-zero framing is rejected with the matrix position
  try {
    parse_script("manifold s3_std\nknot K framing=[1 1;1 1]\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("matrix") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_script("manifold s3_std\nknot K framing=[1 0;0 1\n"),
                  SyntaxError);
  CHECK_THROWS_AS(
      parse_script("manifold layer lo=0*pi+slope(0/1) hi=bogus\n"),
      SyntaxError);
  CHECK_THROWS_AS(
      parse_script("manifold layer lo=1*pi+slope(0/1) hi=0*pi+slope(0/1)\n"),
      SyntaxError);
  CHECK_THROWS_AS(parse_script("manifold s3_std\nreverse -1\n"), SyntaxError);
  CHECK_THROWS_AS(parse_script("manifold s3_std\nreport xml -\n"),
                  SyntaxError);
  CHECK_THROWS_AS(
      parse_script("manifold s3_std\ntorus T slope=0 pairs=0\n"), SyntaxError);
}

TEST_CASE("the torsion-equivalence fixture parses into seven statements") {
  Script s = parse_script(fixture("lutz_equiv.csc"));
  REQUIRE(s.statements.size() == 7);
  CHECK(s.statements[0].kind == StatementKind::Manifold);
  CHECK(s.statements[1].kind == StatementKind::TorusDeclare);
  CHECK(s.statements[2].kind == StatementKind::LutzMacro);
  for (int i = 3; i < 7; ++i) {
    CHECK(s.statements[i].kind == StatementKind::Reverse);
    CHECK(s.statements[i].event_number == 6 - i);
  }
}

TEST_CASE("pretty-printing then reparsing reproduces the statements") {
  std::vector<std::string> sources = {
      fixture("lutz_equiv.csc"),
      fixture("sphere_report.csc"),
      fixture("bad_framing.csc"),
      // one of everything, with all optional fields exercised
      "manifold s3_std\n"
      "knot K1 nbhd=1/50 framing=[0 -1;1 0]\n"
      "knot K2\n"
      "torus A slope=-2/3 pairs=2 meridian=lambda\n"
      "torus B angle=0*pi+slope(inf) slope=inf meridian=3/7\n"
      "torus C slope=5 meridian=mu\n"
      "rsurg1 K1 K2 framing=[1 0;0 1] pairs=3\n"
      "rsurg2 A\n"
      "lutz torus B amount=2\n"
      "lutz-macro C\n"
      "adjust-euler A target=-4\n"
      "reverse 0\n"
      "report json out.json\n"
      "render svg B pic.svg\n"
      "lutz simple K1\n"
      "lutz full K2\n"};
  for (const std::string& src : sources) {
    Script once = parse_script(src);
    std::string printed = pretty_print(once);
    Script twice = parse_script(printed);
    INFO(printed);
    CHECK(once == twice);
    CHECK(pretty_print(twice) == printed);
  }
}

TEST_CASE("statement identity ignores source position") {
  Statement a = parse_script("manifold s3_std\nknot K\n").statements[1];
  Statement b =
      parse_script("# pad\n\nmanifold s3_std\n\nknot K\n").statements[1];
  CHECK(a.source_line != b.source_line);
  CHECK(a == b);
}

TEST_CASE("executing an initialization-only script yields a schema report") {
  ExecutionResult res = execute(parse_script("manifold s3_std\n"));
  CHECK(res.report.find("\"schema\": \"cscalc-report-v1\"") !=
        std::string::npos);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0] == "1: manifold s3_std");
  CHECK(res.outputs.empty());
}

TEST_CASE("execution is deterministic: the fixture gives identical reports") {
  Script s = parse_script(fixture("lutz_equiv.csc"));
  ExecutionResult a = execute(s);
  ExecutionResult b = execute(s);
  CHECK(a.report == b.report);
  CHECK(a.trace == b.trace);
  REQUIRE(a.trace.size() == 7);
  CHECK(a.trace[2].find("equivalence verified") != std::string::npos);
}

TEST_CASE("unwinding the macro returns the state of the two-statement prefix") {
  Script full = parse_script(fixture("lutz_equiv.csc"));
  Script prefix;
  prefix.statements = {full.statements[0], full.statements[1]};
  ExecutionResult done = execute(full);
  ExecutionResult init = execute(prefix);
  CHECK(same_state(done.presentation, init.presentation));
  CHECK(done.presentation.counters.torsion_half_units == 0);
  CHECK_FALSE(done.presentation.counters.overtwisted);
  // history remains: four surgeries plus four reversals
  CHECK(done.presentation.events.size() == 8);
}

TEST_CASE("a report statement snapshots the final state of its prefix") {
  ExecutionResult res = execute(parse_script(fixture("sphere_report.csc")));
  REQUIRE(res.outputs.size() == 1);
  CHECK(res.outputs[0].path == "-");
  CHECK_FALSE(res.outputs[0].is_render);
  // nothing happens after the report, so the snapshot equals the final report
  CHECK(res.outputs[0].content == res.report);
}

TEST_CASE("reports parse back and rewrite to the identical bytes") {
  ExecutionResult res = execute(parse_script(fixture("lutz_equiv.csc")));
  JsonValue v = json_parse(res.report);
  CHECK(json_write(v) == res.report);

  const JsonValue* events = field(v, "events");
  REQUIRE(events != nullptr);
  CHECK(events->items.size() == 8);
  const JsonValue* tori = field(v, "tori");
  REQUIRE(tori != nullptr);
  REQUIRE(tori->fields.size() == 1);
  CHECK(tori->fields[0].first == "T");
  const JsonValue* counters = field(v, "counters");
  REQUIRE(counters != nullptr);
  const JsonValue* torsion = field(*counters, "torsion_half_units");
  REQUIRE(torsion != nullptr);
  CHECK(torsion->integer == 0);
}

TEST_CASE("runtime failures carry the statement number and its text") {
  Script s = parse_script(fixture("bad_framing.csc"));
  try {
    execute(s);
    FAIL("expected ScriptRuntimeError");
  } catch (const ScriptRuntimeError& e) {
    CHECK(e.statement_number() == 4);
    std::string msg = e.what();
    CHECK(msg.find("statement 4") != std::string::npos);
    CHECK(msg.find("rsurg1 K1 K2") != std::string::npos);
    CHECK(msg.find("framing") != std::string::npos);
  }
}

TEST_CASE("using a consumed torus is a runtime error, not a parse error") {
  std::string src =
      "manifold layer lo=0*pi+slope(0/1) hi=1*pi+slope(0/1)\n"
      "torus T slope=-1/1\n"
      "rsurg2 T meridian=lambda\n"
      "render ascii T -\n";
  Script s = parse_script(src);  // parses: T is declared before use
  try {
    execute(s);
    FAIL("expected ScriptRuntimeError");
  } catch (const ScriptRuntimeError& e) {
    CHECK(e.statement_number() == 4);
    CHECK(std::string(e.what()).find("no tracked torus") != std::string::npos);
  }
}

TEST_CASE("reversing an out-of-range event is annotated with its statement") {
  Script s = parse_script("manifold s3_std\nreverse 5\n");
  try {
    execute(s);
    FAIL("expected ScriptRuntimeError");
  } catch (const ScriptRuntimeError& e) {
    CHECK(e.statement_number() == 2);
  }
}

TEST_CASE("render statements produce outputs without touching the report") {
  std::string src =
      "manifold layer lo=0*pi+slope(0/1) hi=1*pi+slope(0/1)\n"
      "torus T slope=-1/1\n"
      "render ascii T torus.txt\n"
      "render svg T torus.svg\n"
      "report json -\n";
  ExecutionResult res = execute(parse_script(src));
  REQUIRE(res.outputs.size() == 3);
  CHECK(res.outputs[0].is_render);
  CHECK(res.outputs[0].path == "torus.txt");
  CHECK(res.outputs[0].content.find('*') != std::string::npos);
  CHECK(res.outputs[1].is_render);
  CHECK(res.outputs[1].content.rfind("<?xml", 0) == 0);
  CHECK_FALSE(res.outputs[2].is_render);
}

TEST_CASE("scripted surgeries on the sphere match the direct calls") {
  std::string src =
      "manifold s3_std\n"
      "knot K1 nbhd=1/100 framing=[1 0;0 1]\n"
      "knot K2\n"
      "rsurg1 K1 K2\n";
  ExecutionResult scripted = execute(parse_script(src));

  Presentation direct = standard_sphere();
  direct = approximate_transverse(std::move(direct), 1, "K1",
                                  TwistAngle(0, Slope(-1, 100)));
  direct = approximate_transverse(std::move(direct), 1, "K2");
  direct = round_surgery_1(std::move(direct), "K1", "K2");
  CHECK(same_state(scripted.presentation, direct));
  CHECK(canonical_equal(scripted.presentation, direct));
}
