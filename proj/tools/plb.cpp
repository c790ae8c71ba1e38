// plb: benchmark harness and ad-hoc query runner.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plb/bench.hpp"
#include "plb/bridge.hpp"

namespace {

int cmd_bench(const std::string& suite_name, const std::vector<std::string>& variant_names,
              std::optional<std::int64_t> scale, int iterations, int warmups, const std::string& format,
              bool no_index) {
  plb::SuiteOptions opts;
  opts.suite = plb::parse_suite(suite_name);
  for (const auto& v : variant_names) opts.variants.push_back(plb::parse_variant(v));
  opts.scale = scale;
  opts.iterations = iterations;
  opts.warmups = warmups;
  opts.indexing = !no_index;

  auto results = plb::run_suite(opts, [](const plb::BenchResult& r) {
    std::cerr << to_string(r.spec.name) << "/" << to_string(r.spec.variant) << " K=" << r.spec.scale << ": "
              << plb::format_absolute(r.summary) << "\n";
  });

  if (format == "tsv") {
    std::cout << plb::emit_tsv(results);
    return 0;
  }
  bool latex = format == "latex";
  const char* c = latex ? "% " : "# ";
  std::cout << c << iterations << " timed iterations after " << warmups
            << " warmups; mean and 99% Student-t half-width\n";
  std::cout << c << "deep mode converts TCons and Lists data in both directions\n";
  std::string label = no_index ? "plb no-index" : "plb";
  for (const auto& t : plb::build_tables(opts.suite, {{label, std::move(results)}})) {
    if (latex) std::cout << "% " << plb::table_title(t.kind) << "\n";
    std::cout << plb::emit_table(t, latex ? plb::TableFormat::Latex : plb::TableFormat::Plain) << "\n";
  }
  return 0;
}

int cmd_run(const std::string& file, const std::string& goal, bool nc, int limit) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file);
  std::stringstream text;
  text << in.rdbuf();
  plb::Engine engine(text.str(), nc ? plb::ConversionPolicy::nc() : plb::ConversionPolicy::deep());
  auto cursor = engine.query(goal);
  int n = 0;
  while (limit <= 0 || n < limit) {
    auto sol = cursor.next();
    if (!sol) break;
    ++n;
    if (sol->size() == 0) {
      std::cout << "true.\n";
      continue;
    }
    std::string line;
    for (const auto& [name, value] : sol->bindings) {
      if (!line.empty()) line += ", ";
      line += name + " = " + plb::to_string(value);
    }
    std::cout << line << "\n";
  }
  if (n == 0) std::cout << "false.\n";
  return 0;
}

int cmd_check(std::optional<std::int64_t> scale) {
  bool all = true;
  for (const auto& c : plb::check_kernels(scale)) {
    std::cout << (c.ok ? "ok    " : "FAIL  ") << to_string(c.name) << "/" << to_string(c.variant) << "  "
              << c.message << "\n";
    all = all && c.ok;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prolog engine, host bridge and cross-language benchmark harness"};
  app.require_subcommand(1);

  std::string suite = "micro", format = "plain";
  std::vector<std::string> variants;
  std::optional<std::int64_t> scale;
  int iterations = 30, warmups = 3;
  bool no_index = false;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and print its tables");
  bench->add_option("--suite", suite, "micro, larger or nc")->check(CLI::IsMember({"micro", "larger", "nc"}));
  bench->add_option("--variant", variants, "host, prolog, cross, cross-nc (repeatable; default: the suite's)")
      ->check(CLI::IsMember({"host", "prolog", "cross", "cross-nc"}));
  bench->add_option("--scale", scale, "Problem size K for every kernel");
  bench->add_option("--iterations", iterations, "Timed iterations")->check(CLI::PositiveNumber);
  bench->add_option("--warmups", warmups, "Untimed warmup runs")->check(CLI::NonNegativeNumber);
  bench->add_option("--format", format, "plain, latex or tsv")->check(CLI::IsMember({"plain", "latex", "tsv"}));
  bench->add_flag("--no-index", no_index, "Disable first-argument indexing");

  std::string file, goal;
  bool nc = false;
  int limit = 0;
  auto* run = app.add_subcommand("run", "Consult a program and print the answers to a goal");
  run->add_option("file", file, "Prolog source file")->required();
  run->add_option("--goal", goal, "Goal text, e.g. \"g(X)\"")->required();
  run->add_flag("--nc", nc, "No-conversion answers (composites print as references)");
  run->add_option("--limit", limit, "Stop after this many answers (0: all)");

  std::optional<std::int64_t> check_scale;
  auto* check = app.add_subcommand("check", "Validate every kernel's result once");
  check->add_option("--scale", check_scale, "Problem size K for every kernel");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return cmd_bench(suite, variants, scale, iterations, warmups, format, no_index);
    if (*run) return cmd_run(file, goal, nc, limit);
    if (*check) return cmd_check(check_scale);
  } catch (const plb::BoundaryError& e) {
    std::cerr << "error: " << e.what();
    if (!e.goal().empty()) std::cerr << " (goal: " << e.goal() << ")";
    std::cerr << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
