// Command-line driver for the contact-surgery calculus.
//
//   cscalc run <script> [--json <path|->] [--render <dir>] [--trace]
//   cscalc check <script>
//   cscalc demo lutz
//
// Exit codes: 0 success; 1 script error (syntax or runtime, diagnostic on
// stderr); 2 usage error (bad arguments, unreadable file, unknown demo).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cscalc/execute.hpp"

namespace {

// Built-in copy of fixtures/lutz_equiv.csc: torsion insertion expanded into
// round surgeries and then unwound.  A golden test keeps the two in sync.
const char kDemoLutz[] =
    "# Torsion insertion as four round surgeries, then unwound event by "
    "event.\n"
    "# The final reverse returns the layer to its initial tight state.\n"
    "manifold layer lo=0*pi+slope(0/1) hi=1*pi+slope(0/1)\n"
    "torus T slope=-1/1 pairs=1\n"
    "lutz-macro T\n"
    "reverse 3\n"
    "reverse 2\n"
    "reverse 1\n"
    "reverse 0\n";

int usage() {
  std::cerr << "usage: cscalc run <script> [--json <path|->] [--render <dir>]"
               " [--trace]\n"
               "       cscalc check <script>\n"
               "       cscalc demo lutz\n";
  return 2;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return true;
  }
  std::filesystem::path fp(path);
  if (fp.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(fp.parent_path(), ec);
  }
  std::ofstream out(fp, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

int run_script(const std::string& path, const std::optional<std::string>& json,
               const std::optional<std::string>& render_dir, bool trace) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "cscalc: cannot read '" << path << "'\n";
    return 2;
  }
  try {
    cscalc::Script script = cscalc::parse_script(text);
    cscalc::ExecutionResult res = cscalc::execute(script);
    if (trace)
      for (const std::string& line : res.trace) std::cerr << line << '\n';
    for (const cscalc::ScriptOutput& out : res.outputs) {
      std::string dest = out.path;
      if (out.is_render && render_dir && dest != "-")
        dest = *render_dir + "/" + dest;
      if (!write_output(dest, out.content)) {
        std::cerr << "cscalc: cannot write '" << dest << "'\n";
        return 2;
      }
    }
    if (json && !write_output(*json, res.report)) {
      std::cerr << "cscalc: cannot write '" << *json << "'\n";
      return 2;
    }
    return 0;
  } catch (const cscalc::SyntaxError& e) {
    std::cerr << path << ":" << e.line() << ":" << e.col()
              << ": error: " << e.what() << '\n';
    return 1;
  } catch (const cscalc::CscError& e) {
    std::cerr << path << ": error: " << e.what() << '\n';
    return 1;
  }
}

int check_script(const std::string& path) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "cscalc: cannot read '" << path << "'\n";
    return 2;
  }
  try {
    cscalc::Script script = cscalc::parse_script(text);
    std::cout << path << ": ok (" << script.statements.size()
              << " statements)\n";
    return 0;
  } catch (const cscalc::SyntaxError& e) {
    std::cerr << path << ":" << e.line() << ":" << e.col()
              << ": error: " << e.what() << '\n';
    return 1;
  } catch (const cscalc::CscError& e) {
    std::cerr << path << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) return usage();

  if (args[0] == "run") {
    if (args.size() < 2) return usage();
    std::string script = args[1];
    std::optional<std::string> json;
    std::optional<std::string> render_dir;
    bool trace = false;
    for (std::size_t i = 2; i < args.size(); ++i) {
      if (args[i] == "--json" && i + 1 < args.size())
        json = args[++i];
      else if (args[i] == "--render" && i + 1 < args.size())
        render_dir = args[++i];
      else if (args[i] == "--trace")
        trace = true;
      else
        return usage();
    }
    return run_script(script, json, render_dir, trace);
  }
  if (args[0] == "check") {
    if (args.size() != 2) return usage();
    return check_script(args[1]);
  }
  if (args[0] == "demo") {
    if (args.size() != 2) return usage();
    if (args[1] == "lutz") {
      std::cout << kDemoLutz;
      return 0;
    }
    std::cerr << "cscalc: unknown demo '" << args[1] << "'\n";
    return 2;
  }
  return usage();
}
