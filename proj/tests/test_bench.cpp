#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "bench/connect4.hpp"
#include "plb/bench.hpp"
#include "plb/bridge.hpp"

using namespace plb;

namespace {

std::vector<std::string> golden_lines(const std::string& name) {
  std::ifstream in(std::string(PLB_GOLDEN_DIR) + "/" + name);
  REQUIRE(in);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

BenchResult fake(Benchmark b, Variant v, double mean, double ci) {
  BenchResult r;
  r.spec = {b, v, 1, 2, 0, true};
  r.samples = {mean, mean};
  r.summary = {mean, ci};
  return r;
}

}  // namespace

TEST_CASE("t critical values") {
  // Two-sided 99%: textbook table values.
  CHECK(t_critical(0.99, 1) == doctest::Approx(63.657).epsilon(1e-4));
  CHECK(t_critical(0.99, 29) == doctest::Approx(2.756).epsilon(1e-3));
  CHECK(t_critical(0.95, 10) == doctest::Approx(2.228).epsilon(1e-3));
  CHECK_THROWS_AS(t_critical(1.0, 5), std::invalid_argument);
}

TEST_CASE("summaries") {
  std::vector<double> flat(30, 1.0);
  Summary s = summarize(flat);
  CHECK(s.mean == doctest::Approx(1.0));
  CHECK(s.ci == doctest::Approx(0.0));

  // Sample sd of {0.9, 1.1} is 0.1*sqrt(2); half-width t*sd/sqrt(2) = t*0.1.
  std::vector<double> two{0.9, 1.1};
  s = summarize(two);
  CHECK(s.mean == doctest::Approx(1.0));
  CHECK(s.ci == doctest::Approx(6.3657).epsilon(1e-4));

  std::vector<double> one{1.0};
  CHECK_THROWS_AS(summarize(one), std::invalid_argument);
}

TEST_CASE("ratios") {
  RatioCell r = ratio({6.895, 0.024}, {3.150, 0.008});
  CHECK(r.value == doctest::Approx(2.18889).epsilon(1e-5));
  double rel = std::sqrt(std::pow(0.024 / 6.895, 2) + std::pow(0.008 / 3.150, 2));
  CHECK(r.ci == doctest::Approx(r.value * rel));
  CHECK(format_ratio(ratio({14.324, 0.036}, {14.172, 0.033})).rfind("1.011×", 0) == 0);
  CHECK(format_ratio(reference_ratio()) == "1.000×");
  CHECK_THROWS_AS(ratio({1.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ratio({1.0, 0.0}, {-1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("cell rendering matches the golden file") {
  auto g = golden_lines("cells.txt");
  REQUIRE(g.size() == 8);
  CHECK(format_absolute({0.933, 0.002}) == g[0]);
  CHECK(format_ratio({2.189, 0.009, false}) == g[1]);
  CHECK(format_ratio(reference_ratio()) == g[2]);
  CHECK(std::string(kNotAvailable) == g[3]);
  CHECK(latex_absolute({0.933, 0.002}) == g[4]);
  CHECK(latex_ratio({2.189, 0.009, false}) == g[5]);
  CHECK(latex_ratio(reference_ratio()) == g[6]);
  CHECK(std::string(kLatexNotAvailable) == g[7]);
}

TEST_CASE("table emission") {
  ReportTable t{TableKind::AbsoluteMicro,
                {{"CPython-SWI",
                  {{"SmallFunc",
                    {Cell::absolute({0.933, 0.002}), Cell::absolute({1.983, 0.011}),
                     Cell::absolute({196.0, 4.225})}}}}}};
  std::string latex = emit_table(t, TableFormat::Latex);
  CHECK(latex.find("\\begin{tabular}{llrlrlrl}") == 0);
  CHECK(latex.find("\\multirow{1}{*}{CPython-SWI} & SmallFunc\n"
                   "& 0.933s & {\\tiny$\\pm 0.002$}\n"
                   "& 1.983s & {\\tiny$\\pm 0.011$}\n"
                   "& 196.000s & {\\tiny$\\pm 4.225$}\n"
                   "\\\\\n") != std::string::npos);
  CHECK(latex.find("\\bottomrule\n\\end{tabular}\n") != std::string::npos);

  std::string plain = emit_table(t, TableFormat::Plain);
  CHECK(plain.rfind("Absolute Times Micro\n", 0) == 0);
  CHECK(plain.find("CPython-SWI  SmallFunc  0.933s ± 0.002  1.983s ± 0.011  196.000s ± 4.225") !=
        std::string::npos);
  CHECK(emit_table(t, TableFormat::Plain) == plain);

  ReportTable larger{TableKind::AbsoluteLarger,
                     {{"X", {{"sat-models", {Cell::not_available(), Cell::absolute({1.0, 0.1})}}}}}};
  CHECK(emit_table(larger, TableFormat::Latex).find("& n/a & ~~\n") != std::string::npos);
  CHECK(emit_table(larger, TableFormat::Plain).find("n/a") != std::string::npos);

  ReportTable empty{TableKind::AbsoluteMicro, {}};
  CHECK_THROWS_AS(emit_table(empty, TableFormat::Plain), std::invalid_argument);
  ReportTable hollow{TableKind::AbsoluteMicro, {{"X", {}}}};
  CHECK_THROWS_AS(emit_table(hollow, TableFormat::Latex), std::invalid_argument);
  ReportTable missing{TableKind::AbsoluteLarger, {{"X", {{"tube", {Cell{}, Cell::absolute({1.0, 0.0})}}}}}};
  CHECK_THROWS_AS(emit_table(missing, TableFormat::Plain), std::invalid_argument);
  ReportTable short_row{TableKind::AbsoluteMicro, {{"X", {{"tube", {Cell::absolute({1.0, 0.0})}}}}}};
  CHECK_THROWS_AS(emit_table(short_row, TableFormat::Plain), std::invalid_argument);

  CHECK(column_count(TableKind::RelativeMicro) == 3);
  CHECK(column_count(TableKind::NoConversion) == 2);
}

TEST_CASE("build_tables fills gaps with n/a and uses the first config as reference") {
  ConfigResults a{"plb", {fake(Benchmark::SatModels, Variant::PrologOnly, 2.0, 0.1),
                          fake(Benchmark::SatModels, Variant::Cross, 4.0, 0.2),
                          fake(Benchmark::Tube, Variant::Cross, 1.0, 0.0)}};
  ConfigResults b{"plb no-index", {fake(Benchmark::Tube, Variant::Cross, 3.0, 0.0)}};
  auto tables = build_tables(Suite::Larger, {a, b});
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].kind == TableKind::AbsoluteLarger);
  CHECK(tables[1].kind == TableKind::RelativeLarger);
  const auto& rel_a = tables[1].groups[0].rows;
  CHECK(rel_a[0].cells[0].rat.value == doctest::Approx(2.0));
  CHECK(rel_a[0].cells[1].rat.reference);
  CHECK(rel_a[1].cells[0].kind == Cell::Kind::NotAvailable);
  const auto& rel_b = tables[1].groups[1].rows;
  CHECK(rel_b[0].cells[0].kind == Cell::Kind::NotAvailable);  // sat-models unmeasured
  CHECK(rel_b[1].cells[1].rat.value == doctest::Approx(3.0));
  std::string text = emit_table(tables[1], TableFormat::Latex);
  CHECK(text.find("n/a & ~~") != std::string::npos);
  CHECK(text.find("1.000$\\times$ & ~~") != std::string::npos);

  auto nc = build_tables(Suite::Nc, {ConfigResults{"plb", {fake(Benchmark::TCons, Variant::Cross, 2.0, 0.0),
                                                           fake(Benchmark::TCons, Variant::CrossNc, 1.0, 0.0)}}});
  REQUIRE(nc.size() == 1);
  CHECK(nc[0].kind == TableKind::NoConversion);
  for (const auto& row : nc[0].groups[0].rows) {
    if (row.benchmark == "TCons") {
      CHECK(row.cells[1].rat.value == doctest::Approx(2.0));
    } else {
      CHECK(row.cells[0].kind == Cell::Kind::NotAvailable);
    }
  }
  CHECK_THROWS_AS(build_tables(Suite::Micro, {}), std::invalid_argument);
}

TEST_CASE("tsv output") {
  std::string tsv = emit_tsv({fake(Benchmark::L1A1R, Variant::PrologOnly, 0.5, 0.01)});
  CHECK(tsv.rfind("name\tvariant\tK\tn\tmean_s\tci99_s\n", 0) == 0);
  CHECK(tsv.find("L1A1R\t") != std::string::npos);
}

TEST_CASE("names") {
  for (Benchmark b : {Benchmark::SmallFunc, Benchmark::NdL1A1R, Benchmark::SatModels, Benchmark::Connect4}) {
    CHECK(parse_benchmark(to_string(b)) == b);
  }
  CHECK(parse_variant("cross-nc") == Variant::CrossNc);
  CHECK(parse_variant("host") == Variant::HostOnly);
  CHECK(parse_suite("larger") == Suite::Larger);
  CHECK_THROWS_AS(parse_benchmark("nope"), std::invalid_argument);
  CHECK_FALSE(available(Benchmark::Tube, Variant::HostOnly));
  CHECK(available(Benchmark::SmallFunc, Variant::HostOnly));
  CHECK_THROWS_AS(make_kernel({Benchmark::Tube, Variant::HostOnly, 10}), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel({Benchmark::L1A1R, Variant::Cross, 0}), std::invalid_argument);
}

TEST_CASE("kernel results") {
  auto result = [](Benchmark b, Variant v, std::int64_t k) {
    BenchmarkSpec spec{b, v, k, 2, 0, true};
    return run_benchmark(spec).result;
  };
  CHECK(result(Benchmark::L1A1R, Variant::Cross, 1000) == HostValue(1000));
  CHECK(result(Benchmark::L1A1R, Variant::HostOnly, 1000) == HostValue(1000));
  CHECK(result(Benchmark::NdL1A1R, Variant::Cross, 5) == HostValue(15));
  // In-engine variant backtracks to the last answer.
  CHECK(result(Benchmark::NdL1A1R, Variant::PrologOnly, 5) == HostValue(5));
  CHECK(result(Benchmark::L1A0R, Variant::Cross, 100) == symbol("done"));
}

TEST_CASE("a wrong expected value is a hard failure") {
  BenchmarkSpec spec{Benchmark::L1A1R, Variant::Cross, 100, 5, 1, true};
  auto kernel = make_kernel(spec);
  HostValue wrong(99);
  CHECK_THROWS_AS(run_benchmark(spec, *kernel, &wrong), BenchmarkError);
}

TEST_CASE("step counts are deterministic") {
  for (Benchmark b : {Benchmark::L1A0R, Benchmark::NdL1A1R, Benchmark::Tube, Benchmark::SatModels}) {
    BenchmarkSpec spec{b, Variant::PrologOnly, b == Benchmark::SatModels ? 3 : (b == Benchmark::Tube ? 20 : 200), 5, 1, true};
    BenchResult r1 = run_benchmark(spec);
    BenchResult r2 = run_benchmark(spec);
    CHECK(r1.result == r2.result);
    REQUIRE(r1.stats.size() == 5);
    CHECK(r1.stats[0].steps > 0);
    for (const auto& s : r1.stats) CHECK(s.steps == r1.stats[0].steps);
    CHECK(r2.stats[0].steps == r1.stats[0].steps);
  }
}

TEST_CASE("crossing counts") {
  auto crossings = [](Benchmark b, std::int64_t k) {
    BenchmarkSpec spec{b, Variant::Cross, k, 2, 0, true};
    return run_benchmark(spec).stats[0].crossings;
  };
  CHECK(crossings(Benchmark::SmallFunc, 1000) == 1000);
  CHECK(crossings(Benchmark::L1A0R, 1000) == 1);
  CHECK(crossings(Benchmark::NdL1A1R, 100) == 101);  // K answers plus the final no
  CHECK(crossings(Benchmark::Lists, 1000) == 10);
}

TEST_CASE("tube routes on a chain") {
  std::string text = read_file(std::string(PLB_FIXTURE_DIR) + "/tube.pl");
  std::string program;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("conn(", 0) != 0) program += line + "\n";
  }
  program += "conn(a, b, x).\nconn(b, c, x).\nconn(c, d, x).\n";
  Engine e(program);
  auto s = e.query_once("route(a, d, P)");
  REQUIRE(s);
  CHECK((*s)["P"] == HostValue(Sequence{symbol("a"), symbol("b"), symbol("c"), symbol("d")}));
  s = e.query_once("route(d, a, P)");
  REQUIRE(s);
  CHECK((*s)["P"] == HostValue(Sequence{symbol("d"), symbol("c"), symbol("b"), symbol("a")}));
}

TEST_CASE("connect4 host mirror") {
  c4::Board b;
  for (int i = 0; i < 3; ++i) c4::play(b, 0, 'x');
  CHECK(c4::best_move(b, 2) == 0);  // block or win in column 0
  c4::play(b, 0, 'x');
  CHECK(c4::wins(b, 0, 'x'));

  c4::Game g = c4::self_play(10, kConnect4Depth);
  CHECK(g.moves.size() == 10);
  // The engine plays the same game.
  BenchmarkSpec spec{Benchmark::Connect4, Variant::PrologOnly, 10, 1, 0, true};
  CHECK(run_benchmark(spec).result == HostValue(g.checksum));
  spec.variant = Variant::Cross;
  CHECK(run_benchmark(spec).result == HostValue(g.checksum));
}
