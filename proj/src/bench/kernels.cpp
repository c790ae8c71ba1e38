#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "bench/connect4.hpp"
#include "plb/bench.hpp"
#include "plb/bridge.hpp"

namespace plb {

namespace {

std::string str(std::int64_t v) { return std::to_string(v); }

std::int64_t as_int(const HostValue& v) {
  if (!v.is<std::int64_t>()) throw BenchmarkError("expected an integer, got " + to_string(v));
  return v.as<std::int64_t>();
}

const Sequence& as_seq(const HostValue& v) {
  if (!v.is<Sequence>()) throw BenchmarkError("expected a sequence, got " + to_string(v));
  return v.as<Sequence>();
}

const OpaqueTerm& as_ref(const HostValue& v) {
  if (!v.is<OpaqueTerm>()) throw BenchmarkError("expected a term reference, got " + to_string(v));
  return v.as<OpaqueTerm>();
}

const Solution& require(const std::optional<Solution>& s, std::string_view what) {
  if (!s) throw BenchmarkError(std::string(what) + ": no solution");
  return *s;
}

EngineOptions engine_options(const BenchmarkSpec& spec) {
  EngineOptions o;
  o.indexing = spec.indexing;
  return o;
}

std::shared_ptr<Database> load(std::string_view fixture_name) {
  auto db = std::make_shared<Database>();
  db->consult(fixture(fixture_name));
  return db;
}

class FnKernel : public Kernel {
 public:
  FnKernel(std::function<HostValue(RunStats&)> fn, HostValue expected)
      : fn_(std::move(fn)), expected_(std::move(expected)) {}
  HostValue run(RunStats& stats) override { return fn_(stats); }
  const HostValue& expected() const override { return expected_; }

 private:
  std::function<HostValue(RunStats&)> fn_;
  HostValue expected_;
};

// Runs one goal on a bare machine; the result is the binding of `out`.
class PrologOnlyKernel : public Kernel {
 public:
  PrologOnlyKernel(std::shared_ptr<const Database> db, EngineOptions opts, std::string goal,
                   std::string out, HostValue expected)
      : db_(std::move(db)), opts_(opts), goal_(std::move(goal)), out_(std::move(out)),
        expected_(std::move(expected)) {}

  HostValue run(RunStats& stats) override {
    Machine m(db_, opts_);
    LoadedQuery q = m.load(parse_term(goal_, db_->symbols()));
    m.start(q.goal);
    if (m.solve_next() != SolveStatus::Succeeded) throw BenchmarkError(goal_ + ": no solution");
    stats.steps = m.step_count();
    for (const auto& v : q.vars) {
      if (v.name != out_) continue;
      Term t = m.deref(v.var);
      if (t.is_int()) return t.int_value();
      if (t.is_atom()) return symbol(db_->symbols().name(t.name()));
      return symbol(m.format(t));
    }
    throw BenchmarkError(goal_ + ": no variable " + out_);
  }
  const HostValue& expected() const override { return expected_; }

 private:
  std::shared_ptr<const Database> db_;
  EngineOptions opts_;
  std::string goal_;
  std::string out_;
  HostValue expected_;
};

// Counts crossings made by `fn` on `engine`.
std::unique_ptr<Kernel> cross_kernel(Engine engine, std::function<HostValue(const Engine&)> fn,
                                     HostValue expected) {
  return std::make_unique<FnKernel>(
      [engine, fn = std::move(fn)](RunStats& stats) {
        std::uint64_t before = engine.crossings();
        HostValue r = fn(engine);
        stats.crossings = engine.crossings() - before;
        return r;
      },
      std::move(expected));
}

ConversionPolicy policy_of(Variant v) {
  return v == Variant::CrossNc ? ConversionPolicy::nc() : ConversionPolicy::deep();
}

[[gnu::noinline]] std::int64_t host_inc(std::int64_t x) { return x + 1; }

// ---------------------------------------------------------------------------
// Micro kernels

std::unique_ptr<Kernel> small_func(const BenchmarkSpec& spec) {
  std::int64_t k = spec.scale;
  HostValue expected = k * (k + 1) / 2;
  switch (spec.variant) {
    case Variant::HostOnly:
      return std::make_unique<FnKernel>(
          [k](RunStats&) {
            std::int64_t s = 0;
            for (std::int64_t i = 0; i < k; ++i) s += host_inc(i);
            return HostValue(s);
          },
          expected);
    case Variant::PrologOnly:
      return std::make_unique<PrologOnlyKernel>(load("micro"), engine_options(spec),
                                                "smallfunc(" + str(k) + ", S)", "S", expected);
    default: {
      ConversionPolicy pol = policy_of(spec.variant);
      return cross_kernel(
          Engine(load("micro"), pol, engine_options(spec)),
          [k, pol](const Engine& e) {
            std::int64_t s = 0;
            for (std::int64_t i = 0; i < k; ++i) {
              s += as_int(require(e.query_once("inc(X, Y)", {{"X", i}}, pol), "inc")["Y"]);
            }
            return HostValue(s);
          },
          expected);
    }
  }
}

[[gnu::noinline]] void host_countdown(volatile std::int64_t& n) {
  while (n > 0) n = n - 1;
}

std::unique_ptr<Kernel> loop_kernel(const BenchmarkSpec& spec, bool with_acc) {
  std::int64_t k = spec.scale;
  HostValue expected = with_acc ? HostValue(k) : symbol("done");
  std::string goal = std::string(with_acc ? "l1a1r(" : "l1a0r(") + str(k) + ", R)";
  switch (spec.variant) {
    case Variant::HostOnly:
      return std::make_unique<FnKernel>(
          [k, with_acc](RunStats&) -> HostValue {
            if (!with_acc) {
              volatile std::int64_t n = k;
              host_countdown(n);
              return symbol("done");
            }
            volatile std::int64_t acc = 0;
            for (std::int64_t n = k; n > 0; --n) acc = acc + 1;
            return std::int64_t{acc};
          },
          expected);
    case Variant::PrologOnly:
      return std::make_unique<PrologOnlyKernel>(load("micro"), engine_options(spec), goal, "R", expected);
    default: {
      ConversionPolicy pol = policy_of(spec.variant);
      std::string g = with_acc ? "l1a1r(K, R)" : "l1a0r(K, R)";
      return cross_kernel(
          Engine(load("micro"), pol, engine_options(spec)),
          [k, pol, g](const Engine& e) { return require(e.query_once(g, {{"K", k}}, pol), g)["R"]; },
          expected);
    }
  }
}

// Host counterpart of a nondeterministic predicate: a resumable generator.
class Counter {
 public:
  explicit Counter(std::int64_t k) : k_(k) {}
  [[gnu::noinline]] std::optional<std::int64_t> next() {
    if (i_ >= k_) return std::nullopt;
    return ++i_;
  }

 private:
  std::int64_t k_;
  std::int64_t i_ = 0;
};

std::unique_ptr<Kernel> nd_loop(const BenchmarkSpec& spec) {
  std::int64_t k = spec.scale;
  HostValue sum = k * (k + 1) / 2;
  switch (spec.variant) {
    case Variant::HostOnly:
      return std::make_unique<FnKernel>(
          [k](RunStats&) {
            Counter c(k);
            std::int64_t s = 0;
            while (auto x = c.next()) s += *x;
            return HostValue(s);
          },
          sum);
    case Variant::PrologOnly:
      // Backtracks through every solution; only the last passes the test.
      return std::make_unique<PrologOnlyKernel>(load("micro"), engine_options(spec),
                                                "nd(" + str(k) + ", X), X >= " + str(k), "X", HostValue(k));
    default: {
      ConversionPolicy pol = policy_of(spec.variant);
      return cross_kernel(
          Engine(load("micro"), pol, engine_options(spec)),
          [k, pol](const Engine& e) {
            auto c = e.query("nd(K, X)", {{"K", k}}, pol);
            std::int64_t s = 0;
            while (auto sol = c.next()) s += as_int((*sol)["X"]);
            return HostValue(s);
          },
          sum);
    }
  }
}

std::unique_ptr<Kernel> tcons(const BenchmarkSpec& spec) {
  std::int64_t k = spec.scale;
  HostValue expected = k;
  switch (spec.variant) {
    case Variant::HostOnly:
      return std::make_unique<FnKernel>(
          [k](RunStats&) {
            HostValue t = symbol("nil");
            for (std::int64_t n = 1; n <= k; ++n) {
              std::vector<HostValue> fields;
              fields.reserve(2);
              fields.emplace_back(n);
              fields.emplace_back(std::move(t));
              t = record("t", std::move(fields));
            }
            return HostValue(static_cast<std::int64_t>(record_spine_depth(t)));
          },
          expected);
    case Variant::PrologOnly:
      return std::make_unique<PrologOnlyKernel>(load("micro"), engine_options(spec),
                                                "tcons(" + str(k) + ", T), tdepth(T, D)", "D", expected);
    case Variant::Cross:
      return cross_kernel(
          Engine(load("micro"), ConversionPolicy::deep(), engine_options(spec)),
          [k](const Engine& e) {
            HostValue t = require(e.query_once("tcons(K, T)", {{"K", k}}), "tcons")["T"];
            auto depth = static_cast<std::int64_t>(record_spine_depth(t));
            if (depth > 0 && as_int(t.as<Record>().fields[0]) != k) throw BenchmarkError("tcons: wrong top");
            return HostValue(depth);
          },
          expected);
    default:
      return cross_kernel(
          Engine(load("micro"), ConversionPolicy::nc(), engine_options(spec)),
          [k](const Engine& e) {
            HostValue t = require(e.query_once("tcons(K, T)", {{"K", k}}, ConversionPolicy::nc()), "tcons")["T"];
            if (k == 0) return HostValue(std::int64_t{0});
            return as_ref(t).arg(0);
          },
          expected);
  }
}

Sequence iota_list(std::int64_t n) {
  Sequence s;
  s.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) s.emplace_back(i);
  return s;
}

std::unique_ptr<Kernel> lists(const BenchmarkSpec& spec) {
  std::int64_t rounds = spec.scale / kListSize;
  HostValue expected = rounds * kListSize;
  switch (spec.variant) {
    case Variant::HostOnly:
      return std::make_unique<FnKernel>(
          [rounds](RunStats&) {
            std::vector<std::int64_t> in(kListSize);
            for (std::int64_t i = 0; i < kListSize; ++i) in[i] = i + 1;
            std::int64_t s = 0;
            for (std::int64_t r = 0; r < rounds; ++r) {
              std::vector<std::int64_t> out(in.rbegin(), in.rend());
              s += out.front();
            }
            return HostValue(s);
          },
          expected);
    case Variant::PrologOnly:
      return std::make_unique<PrologOnlyKernel>(load("micro"), engine_options(spec),
                                                "lists(" + str(rounds) + ", " + str(kListSize) + ", S)", "S",
                                                expected);
    case Variant::Cross:
      return cross_kernel(
          Engine(load("micro"), ConversionPolicy::deep(), engine_options(spec)),
          [rounds](const Engine& e) {
            Sequence in = iota_list(kListSize);
            std::int64_t s = 0;
            for (std::int64_t r = 0; r < rounds; ++r) {
              Solution sol = require(e.query_once("rev(L, R)", {{"L", in}}), "rev");
              s += as_int(as_seq(sol["R"]).at(0));
            }
            return HostValue(s);
          },
          expected);
    default: {
      Engine engine(load("micro"), ConversionPolicy::nc(), engine_options(spec));
      OpaqueTerm in = engine.make_term(iota_list(kListSize));
      return cross_kernel(
          engine,
          [rounds, in](const Engine& e) {
            std::int64_t s = 0;
            for (std::int64_t r = 0; r < rounds; ++r) {
              Solution sol = require(e.query_once("rev(L, R)", {{"L", in}}, ConversionPolicy::nc()), "rev");
              s += as_int(as_ref(sol["R"]).arg(0));
            }
            return HostValue(s);
          },
          expected);
    }
  }
}

// ---------------------------------------------------------------------------
// Larger kernels

// Two pigeons, `holes` holes: each pigeon somewhere, no hole shared.
std::vector<std::vector<int>> pigeon_cnf(int holes) {
  std::vector<std::vector<int>> cnf;
  for (int p = 0; p < 2; ++p) {
    std::vector<int> c;
    for (int h = 0; h < holes; ++h) c.push_back(p * holes + h + 1);
    cnf.push_back(c);
  }
  for (int h = 0; h < holes; ++h) cnf.push_back({-(h + 1), -(holes + h + 1)});
  return cnf;
}

std::string cnf_text(const std::vector<std::vector<int>>& cnf) {
  std::string s = "[";
  for (std::size_t i = 0; i < cnf.size(); ++i) {
    if (i > 0) s += ",";
    s += "[";
    for (std::size_t j = 0; j < cnf[i].size(); ++j) {
      if (j > 0) s += ",";
      s += std::to_string(cnf[i][j]);
    }
    s += "]";
  }
  return s + "]";
}

HostValue cnf_value(const std::vector<std::vector<int>>& cnf) {
  Sequence out;
  for (const auto& c : cnf) {
    Sequence lits;
    for (int l : c) lits.emplace_back(std::int64_t{l});
    out.emplace_back(std::move(lits));
  }
  return out;
}

// A model is a list of Var-Value pairs.
bool satisfies(const HostValue& model, const std::vector<std::vector<int>>& cnf) {
  std::map<std::int64_t, std::int64_t> value;
  for (const auto& pair : as_seq(model)) {
    const auto& r = pair.as<Record>();
    value[as_int(r.fields.at(0))] = as_int(r.fields.at(1));
  }
  for (const auto& c : cnf) {
    bool sat = std::any_of(c.begin(), c.end(), [&](int l) {
      return l > 0 ? value[l] == 1 : value[-l] == 0;
    });
    if (!sat) return false;
  }
  return true;
}

std::int64_t ipow(std::int64_t b, std::int64_t e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

std::unique_ptr<Kernel> sat_models(const BenchmarkSpec& spec) {
  if (spec.scale > 12) throw std::invalid_argument("sat-models scale (holes) must be at most 12");
  int holes = static_cast<int>(spec.scale);
  auto cnf = pigeon_cnf(holes);
  std::int64_t nvars = 2 * holes;
  HostValue expected = ipow(3, holes) - 2 * ipow(2, holes) + 1;
  if (spec.variant == Variant::PrologOnly) {
    return std::make_unique<PrologOnlyKernel>(load("sat"), engine_options(spec),
                                              "count_models(" + str(nvars) + ", " + cnf_text(cnf) + ", C)",
                                              "C", expected);
  }
  if (spec.variant == Variant::Cross) {
    return cross_kernel(
        Engine(load("sat"), ConversionPolicy::deep(), engine_options(spec)),
        [cnf, nvars](const Engine& e) {
          auto c = e.query("model(N, Cnf, M)", {{"N", nvars}, {"Cnf", cnf_value(cnf)}});
          std::int64_t n = 0;
          while (auto sol = c.next()) {
            if (!satisfies((*sol)["M"], cnf)) throw BenchmarkError("sat-models: bad model");
            ++n;
          }
          return HostValue(n);
        },
        expected);
  }
  Engine engine(load("sat"), ConversionPolicy::nc(), engine_options(spec));
  OpaqueTerm cnf_term = engine.make_term(cnf_value(cnf));
  return cross_kernel(
      engine,
      [cnf_term, nvars](const Engine& e) {
        auto c = e.query("model(N, Cnf, M)", {{"N", nvars}, {"Cnf", cnf_term}}, ConversionPolicy::nc());
        std::int64_t n = 0;
        while (auto sol = c.next()) {
          as_ref((*sol)["M"]);
          ++n;
        }
        return HostValue(n);
      },
      expected);
}

struct Trip {
  std::string from, to;
};

// Station count of a shortest path, by breadth-first search.
std::int64_t shortest_stations(const std::unordered_map<std::string, std::vector<std::string>>& adj,
                               const std::string& from, const std::string& to) {
  std::unordered_map<std::string, std::int64_t> dist{{from, 1}};
  std::deque<std::string> queue{from};
  while (!queue.empty()) {
    std::string s = queue.front();
    queue.pop_front();
    if (s == to) return dist[s];
    auto it = adj.find(s);
    if (it == adj.end()) continue;
    for (const auto& n : it->second) {
      if (dist.emplace(n, dist[s] + 1).second) queue.push_back(n);
    }
  }
  throw BenchmarkError("tube: no route from " + from + " to " + to);
}

std::unique_ptr<Kernel> tube(const BenchmarkSpec& spec) {
  std::int64_t k = spec.scale;
  auto db = load("tube");
  Engine probe(db);

  std::vector<Trip> trips;
  auto tc = probe.query("trip(I, A, B)");
  while (auto s = tc.next()) trips.push_back({(*s)["A"].as<Symbol>().name, (*s)["B"].as<Symbol>().name});
  std::unordered_map<std::string, std::vector<std::string>> adj;
  auto cc = probe.query("conn(A, B, _)");
  while (auto s = cc.next()) {
    const auto& a = (*s)["A"].as<Symbol>().name;
    const auto& b = (*s)["B"].as<Symbol>().name;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::int64_t> lengths;
  for (const auto& t : trips) lengths.push_back(shortest_stations(adj, t.from, t.to));
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < k; ++i) total += lengths[static_cast<std::size_t>(i) % lengths.size()];
  HostValue expected = total;

  if (spec.variant == Variant::PrologOnly) {
    return std::make_unique<PrologOnlyKernel>(db, engine_options(spec), "tube(" + str(k) + ", S)", "S", expected);
  }
  ConversionPolicy pol = policy_of(spec.variant);
  return cross_kernel(
      Engine(db, pol, engine_options(spec)),
      [k, pol, trips](const Engine& e) {
        std::int64_t s = 0;
        for (std::int64_t i = 0; i < k; ++i) {
          const Trip& t = trips[static_cast<std::size_t>(i) % trips.size()];
          Solution sol = require(
              e.query_once("route(A, B, P), len(P, L)", {{"A", symbol(t.from)}, {"B", symbol(t.to)}}, pol),
              "route");
          std::int64_t len = as_int(sol["L"]);
          if (pol.mode == ConversionMode::Deep && static_cast<std::int64_t>(as_seq(sol["P"]).size()) != len) {
            throw BenchmarkError("tube: path length mismatch");
          }
          s += len;
        }
        return HostValue(s);
      },
      expected);
}

HostValue board_value(const c4::Board& b) {
  Sequence cols;
  for (const auto& col : b) {
    Sequence pieces;
    for (char p : col) pieces.push_back(symbol(std::string(1, p)));
    cols.emplace_back(std::move(pieces));
  }
  return cols;
}

std::int64_t move_of(const HostValue& m, const c4::Board& mirror) {
  if (!m.is<std::int64_t>()) throw BenchmarkError("connect4: no move on a playable board");
  std::int64_t col = m.as<std::int64_t>();
  if (!c4::playable(mirror, static_cast<int>(col))) throw BenchmarkError("connect4: illegal move");
  return col;
}

std::unique_ptr<Kernel> connect4(const BenchmarkSpec& spec) {
  std::int64_t plies = spec.scale;
  int depth = kConnect4Depth;
  HostValue expected = c4::self_play(static_cast<int>(plies), depth).checksum;
  if (spec.variant == Variant::PrologOnly) {
    return std::make_unique<PrologOnlyKernel>(load("connect4"), engine_options(spec),
                                              "game(" + str(plies) + ", " + std::to_string(depth) + ", S)",
                                              "S", expected);
  }
  const char* goal = "best_move(B, D, M), play_move(B, M, B2)";
  if (spec.variant == Variant::Cross) {
    return cross_kernel(
        Engine(load("connect4"), ConversionPolicy::deep(), engine_options(spec)),
        [plies, depth, goal](const Engine& e) {
          c4::Board mirror;
          std::int64_t sum = 0;
          for (std::int64_t ply = 1; ply <= plies && !c4::full(mirror); ++ply) {
            Solution sol = require(e.query_once(goal, {{"B", board_value(mirror)}, {"D", depth}}), "best_move");
            std::int64_t m = move_of(sol["M"], mirror);
            char p = c4::to_move(mirror);
            c4::play(mirror, static_cast<int>(m), p);
            if (!(sol["B2"] == board_value(mirror))) throw BenchmarkError("connect4: board mismatch");
            sum += ply * (m + 1);
            if (c4::wins(mirror, static_cast<int>(m), p)) break;
          }
          return HostValue(sum);
        },
        expected);
  }
  Engine engine(load("connect4"), ConversionPolicy::nc(), engine_options(spec));
  OpaqueTerm empty = engine.make_term(board_value(c4::Board{}));
  return cross_kernel(
      engine,
      [plies, depth, goal, empty](const Engine& e) {
        c4::Board mirror;
        HostValue board = empty;
        std::int64_t sum = 0;
        for (std::int64_t ply = 1; ply <= plies && !c4::full(mirror); ++ply) {
          Solution sol = require(e.query_once(goal, {{"B", board}, {"D", depth}}, ConversionPolicy::nc()),
                                 "best_move");
          std::int64_t m = move_of(sol["M"], mirror);
          char p = c4::to_move(mirror);
          c4::play(mirror, static_cast<int>(m), p);
          board = sol["B2"];
          sum += ply * (m + 1);
          if (c4::wins(mirror, static_cast<int>(m), p)) break;
        }
        return HostValue(sum);
      },
      expected);
}

}  // namespace

std::unique_ptr<Kernel> make_kernel(const BenchmarkSpec& spec) {
  if (!available(spec.name, spec.variant)) {
    throw std::invalid_argument(std::string(to_string(spec.name)) + " has no " +
                                std::string(to_string(spec.variant)) + " variant");
  }
  if (spec.scale <= 0) throw std::invalid_argument("scale must be positive");
  switch (spec.name) {
    case Benchmark::SmallFunc: return small_func(spec);
    case Benchmark::L1A0R: return loop_kernel(spec, false);
    case Benchmark::L1A1R: return loop_kernel(spec, true);
    case Benchmark::NdL1A1R: return nd_loop(spec);
    case Benchmark::TCons: return tcons(spec);
    case Benchmark::Lists: return lists(spec);
    case Benchmark::SatModels: return sat_models(spec);
    case Benchmark::Tube: return tube(spec);
    case Benchmark::Connect4: return connect4(spec);
  }
  throw std::invalid_argument("unknown benchmark");
}

}  // namespace plb
