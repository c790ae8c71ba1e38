#include <chrono>
#include <cstdio>

#include "plb/bench.hpp"

namespace plb {

namespace {

constexpr Benchmark kAll[] = {Benchmark::SmallFunc, Benchmark::L1A0R,  Benchmark::L1A1R,
                              Benchmark::NdL1A1R,   Benchmark::TCons,  Benchmark::Lists,
                              Benchmark::SatModels, Benchmark::Tube,   Benchmark::Connect4};
constexpr Variant kVariants[] = {Variant::HostOnly, Variant::PrologOnly, Variant::Cross, Variant::CrossNc};

const BenchResult* find(const std::vector<BenchResult>& rs, Benchmark b, Variant v) {
  for (const auto& r : rs) {
    if (r.spec.name == b && r.spec.variant == v) return &r;
  }
  return nullptr;
}

Cell abs_cell(const BenchResult* r) { return r ? Cell::absolute(r->summary) : Cell::not_available(); }

Cell ratio_cell(const BenchResult* num, const BenchResult* den) {
  if (!num || !den) return Cell::not_available();
  return Cell::of_ratio(ratio(num->summary, den->summary));
}

std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Benchmark b) {
  switch (b) {
    case Benchmark::SmallFunc: return "SmallFunc";
    case Benchmark::L1A0R: return "L1A0R";
    case Benchmark::L1A1R: return "L1A1R";
    case Benchmark::NdL1A1R: return "NdL1A1R";
    case Benchmark::TCons: return "TCons";
    case Benchmark::Lists: return "Lists";
    case Benchmark::SatModels: return "sat-models";
    case Benchmark::Tube: return "tube";
    case Benchmark::Connect4: return "connect4";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::HostOnly: return "host";
    case Variant::PrologOnly: return "prolog";
    case Variant::Cross: return "cross";
    case Variant::CrossNc: return "cross-nc";
  }
  return "?";
}

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::Micro: return "micro";
    case Suite::Larger: return "larger";
    case Suite::Nc: return "nc";
  }
  return "?";
}

Benchmark parse_benchmark(std::string_view name) {
  for (Benchmark b : kAll) {
    if (to_string(b) == name) return b;
  }
  throw std::invalid_argument("unknown benchmark " + std::string(name));
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kVariants) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant " + std::string(name));
}

Suite parse_suite(std::string_view name) {
  for (Suite s : {Suite::Micro, Suite::Larger, Suite::Nc}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown suite " + std::string(name));
}

bool is_micro(Benchmark b) {
  return b != Benchmark::SatModels && b != Benchmark::Tube && b != Benchmark::Connect4;
}

bool available(Benchmark b, Variant v) { return v != Variant::HostOnly || is_micro(b); }

std::int64_t default_scale(Benchmark b) {
  switch (b) {
    case Benchmark::SmallFunc: return 50'000;
    case Benchmark::L1A0R: return 200'000;
    case Benchmark::L1A1R: return 200'000;
    case Benchmark::NdL1A1R: return 50'000;
    case Benchmark::TCons: return 50'000;
    case Benchmark::Lists: return 50'000;
    case Benchmark::SatModels: return 4;  // holes; 8 variables
    case Benchmark::Tube: return 100;     // route queries
    case Benchmark::Connect4: return 4;   // plies
  }
  return 1;
}

std::vector<Benchmark> suite_benchmarks(Suite s) {
  std::vector<Benchmark> out;
  for (Benchmark b : kAll) {
    if (s == Suite::Nc || (s == Suite::Micro) == is_micro(b)) out.push_back(b);
  }
  return out;
}

std::vector<Variant> suite_variants(Suite s) {
  switch (s) {
    case Suite::Micro: return {Variant::HostOnly, Variant::PrologOnly, Variant::Cross};
    case Suite::Larger: return {Variant::PrologOnly, Variant::Cross};
    case Suite::Nc: return {Variant::Cross, Variant::CrossNc};
  }
  return {};
}

BenchResult run_benchmark(const BenchmarkSpec& spec, Kernel& kernel, const HostValue* expected) {
  if (spec.iterations < 1) throw std::invalid_argument("iterations must be positive");
  const HostValue& want = expected ? *expected : kernel.expected();
  BenchResult out;
  out.spec = spec;

  auto once = [&](RunStats& stats) {
    auto t0 = std::chrono::steady_clock::now();
    HostValue r = kernel.run(stats);
    auto t1 = std::chrono::steady_clock::now();
    if (!(r == want)) {
      throw BenchmarkError(std::string(to_string(spec.name)) + "/" + std::string(to_string(spec.variant)) +
                           ": result " + to_string(r) + ", expected " + to_string(want));
    }
    out.result = std::move(r);
    return std::chrono::duration<double>(t1 - t0).count();
  };

  for (int i = 0; i < spec.warmups; ++i) {
    RunStats ignored;
    once(ignored);
  }
  for (int i = 0; i < spec.iterations; ++i) {
    RunStats stats;
    double secs = once(stats);
    out.samples.push_back(secs > 0.0 ? secs : 1e-9);
    out.stats.push_back(stats);
  }
  out.summary = out.samples.size() >= 2 ? summarize(out.samples) : Summary{out.samples[0], 0.0};
  return out;
}

BenchResult run_benchmark(const BenchmarkSpec& spec) {
  auto kernel = make_kernel(spec);
  return run_benchmark(spec, *kernel);
}

std::vector<BenchResult> run_suite(const SuiteOptions& options,
                                   const std::function<void(const BenchResult&)>& progress) {
  std::vector<Variant> variants = options.variants.empty() ? suite_variants(options.suite) : options.variants;
  std::vector<BenchResult> out;
  for (Benchmark b : suite_benchmarks(options.suite)) {
    for (Variant v : variants) {
      if (!available(b, v)) continue;
      BenchmarkSpec spec{b, v, options.scale.value_or(default_scale(b)), options.iterations, options.warmups,
                         options.indexing};
      out.push_back(run_benchmark(spec));
      if (progress) progress(out.back());
    }
  }
  return out;
}

std::vector<ReportTable> build_tables(Suite suite, const std::vector<ConfigResults>& configs) {
  if (configs.empty()) throw std::invalid_argument("no results to report");
  const auto& reference = configs.front().results;
  auto ref_ratio = [&](std::size_t ci, const BenchResult* cross, Benchmark b) {
    if (ci == 0) return cross ? Cell::of_ratio(reference_ratio()) : Cell::not_available();
    return ratio_cell(cross, find(reference, b, Variant::Cross));
  };

  std::vector<ReportTable> tables;
  if (suite == Suite::Nc) {
    ReportTable t{TableKind::NoConversion, {}};
    for (const auto& c : configs) {
      ReportGroup g{c.label, {}};
      for (Benchmark b : suite_benchmarks(suite)) {
        const BenchResult* deep = find(c.results, b, Variant::Cross);
        const BenchResult* nc = find(c.results, b, Variant::CrossNc);
        g.rows.push_back({std::string(to_string(b)), {abs_cell(nc), ratio_cell(deep, nc)}});
      }
      t.groups.push_back(std::move(g));
    }
    tables.push_back(std::move(t));
    return tables;
  }

  bool micro = suite == Suite::Micro;
  ReportTable abs{micro ? TableKind::AbsoluteMicro : TableKind::AbsoluteLarger, {}};
  ReportTable rel{micro ? TableKind::RelativeMicro : TableKind::RelativeLarger, {}};
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const auto& c = configs[ci];
    ReportGroup ga{c.label, {}};
    ReportGroup gr{c.label, {}};
    for (Benchmark b : suite_benchmarks(suite)) {
      const BenchResult* host = find(c.results, b, Variant::HostOnly);
      const BenchResult* prolog = find(c.results, b, Variant::PrologOnly);
      const BenchResult* cross = find(c.results, b, Variant::Cross);
      std::string name(to_string(b));
      if (micro) {
        ga.rows.push_back({name, {abs_cell(host), abs_cell(prolog), abs_cell(cross)}});
        gr.rows.push_back({name, {ratio_cell(cross, host), ratio_cell(cross, prolog), ref_ratio(ci, cross, b)}});
      } else {
        ga.rows.push_back({name, {abs_cell(prolog), abs_cell(cross)}});
        gr.rows.push_back({name, {ratio_cell(cross, prolog), ref_ratio(ci, cross, b)}});
      }
    }
    abs.groups.push_back(std::move(ga));
    rel.groups.push_back(std::move(gr));
  }
  tables.push_back(std::move(abs));
  tables.push_back(std::move(rel));
  return tables;
}

std::string emit_tsv(const std::vector<BenchResult>& results) {
  std::string out = "name\tvariant\tK\tn\tmean_s\tci99_s\n";
  for (const auto& r : results) {
    out += std::string(to_string(r.spec.name)) + "\t" + std::string(to_string(r.spec.variant)) + "\t" +
           std::to_string(r.spec.scale) + "\t" + std::to_string(r.samples.size()) + "\t" + g9(r.summary.mean) +
           "\t" + g9(r.summary.ci) + "\n";
  }
  return out;
}

std::vector<CheckOutcome> check_kernels(std::optional<std::int64_t> scale) {
  std::vector<CheckOutcome> out;
  for (Benchmark b : kAll) {
    for (Variant v : kVariants) {
      if (!available(b, v)) continue;
      CheckOutcome c{b, v, false, {}};
      try {
        BenchmarkSpec spec{b, v, scale.value_or(default_scale(b)), 1, 0, true};
        auto kernel = make_kernel(spec);
        BenchResult r = run_benchmark(spec, *kernel);
        c.ok = true;
        c.message = to_string(r.result);
      } catch (const std::exception& e) {
        c.message = e.what();
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace plb
