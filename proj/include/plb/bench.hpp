#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plb/host_value.hpp"
#include "plb/report.hpp"
#include "plb/stats.hpp"

namespace plb {

enum class Benchmark { SmallFunc, L1A0R, L1A1R, NdL1A1R, TCons, Lists, SatModels, Tube, Connect4 };

/// HostOnly: native host code. PrologOnly: the whole loop inside one engine
/// run, no bridge. Cross / CrossNc: driven through the bridge with deep or
/// no-conversion policy.
enum class Variant { HostOnly, PrologOnly, Cross, CrossNc };

enum class Suite { Micro, Larger, Nc };

std::string_view to_string(Benchmark b);
std::string_view to_string(Variant v);
std::string_view to_string(Suite s);
/// Accepts the names printed by to_string; CLI variant names are
/// host, prolog, cross and cross-nc. Throws std::invalid_argument.
Benchmark parse_benchmark(std::string_view name);
Variant parse_variant(std::string_view name);
Suite parse_suite(std::string_view name);

bool is_micro(Benchmark b);
bool available(Benchmark b, Variant v);
std::int64_t default_scale(Benchmark b);
std::vector<Benchmark> suite_benchmarks(Suite s);
std::vector<Variant> suite_variants(Suite s);

/// Search depth used by the connect4 kernel; its scale is the ply count.
inline constexpr int kConnect4Depth = 4;
/// Elements per list in the Lists kernel; K/kListSize crossings.
inline constexpr std::int64_t kListSize = 100;

struct BenchmarkSpec {
  Benchmark name = Benchmark::SmallFunc;
  Variant variant = Variant::Cross;
  std::int64_t scale = 1;
  int iterations = 30;
  int warmups = 3;
  bool indexing = true;
};

/// Instrumentation for one kernel run.
struct RunStats {
  std::uint64_t steps = 0;      // engine resolution steps
  std::uint64_t crossings = 0;  // bridge pulls
};

class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual HostValue run(RunStats& stats) = 0;
  virtual const HostValue& expected() const = 0;
};

/// Throws std::invalid_argument for an unavailable benchmark/variant pair or
/// a non-positive scale.
std::unique_ptr<Kernel> make_kernel(const BenchmarkSpec& spec);

/// The kernel produced a wrong result: the benchmark is broken, not slow.
class BenchmarkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchResult {
  BenchmarkSpec spec;
  std::vector<double> samples;  // seconds, one per timed iteration
  Summary summary;
  HostValue result;
  std::vector<RunStats> stats;  // per timed iteration
};

/// Warmups, then timed iterations on the monotonic clock, validating every
/// run against `expected` (the kernel's own expectation by default).
BenchResult run_benchmark(const BenchmarkSpec& spec, Kernel& kernel,
                          const HostValue* expected = nullptr);
BenchResult run_benchmark(const BenchmarkSpec& spec);

struct SuiteOptions {
  Suite suite = Suite::Micro;
  std::vector<Variant> variants;  // empty: every variant the suite reports
  std::optional<std::int64_t> scale;
  int iterations = 30;
  int warmups = 3;
  bool indexing = true;
};

std::vector<BenchResult> run_suite(const SuiteOptions& options,
                                   const std::function<void(const BenchResult&)>& progress = {});

/// One labelled configuration's results; the first one is the reference.
struct ConfigResults {
  std::string label;
  std::vector<BenchResult> results;
};

/// Tables for a suite: absolute then relative (micro, larger) or the single
/// no-conversion table. Unmeasured cells are n/a.
std::vector<ReportTable> build_tables(Suite suite, const std::vector<ConfigResults>& configs);

/// name, variant, K, n, mean_s, ci99_s
std::string emit_tsv(const std::vector<BenchResult>& results);

struct CheckOutcome {
  Benchmark name;
  Variant variant;
  bool ok = false;
  std::string message;
};

/// Runs every available kernel once at `scale` (default scales if unset).
std::vector<CheckOutcome> check_kernels(std::optional<std::int64_t> scale = std::nullopt);

/// Benchmark program text, by fixture name (micro, sat, tube, connect4).
std::string_view fixture(std::string_view name);

}  // namespace plb
