#include "reference.hpp"

#include <climits>
#include <map>
#include <memory>

#include "generators.hpp"
#include "plb/engine.hpp"

namespace plbtest {

namespace {

struct Unsupported {};

struct RTerm;
using RT = std::shared_ptr<const RTerm>;

struct RTerm {
  enum Kind { Atom, Int, Float, Var, Cmp } kind;
  std::string name;
  std::int64_t i = 0;
  double f = 0;
  int var = 0;
  std::vector<RT> args;
};

RT mk_var(int v) { return std::make_shared<RTerm>(RTerm{RTerm::Var, "", 0, 0, v, {}}); }
RT mk_atom(const std::string& n) { return std::make_shared<RTerm>(RTerm{RTerm::Atom, n, 0, 0, 0, {}}); }

RT convert(const plb::TermArena& arena, plb::Term t, const plb::SymbolTable& syms, int var_base) {
  switch (t.tag()) {
    case plb::Tag::Atom: return mk_atom(syms.name(t.name()));
    case plb::Tag::Int: return std::make_shared<RTerm>(RTerm{RTerm::Int, "", t.int_value(), 0, 0, {}});
    case plb::Tag::Float: return std::make_shared<RTerm>(RTerm{RTerm::Float, "", 0, t.float_value(), 0, {}});
    case plb::Tag::Var: return mk_var(var_base + static_cast<int>(t.var_index()));
    case plb::Tag::Compound: {
      RTerm c{RTerm::Cmp, syms.name(t.name()), 0, 0, 0, {}};
      for (std::uint32_t k = 0; k < t.arity(); ++k) c.args.push_back(convert(arena, arena.arg(t, k), syms, var_base));
      return std::make_shared<RTerm>(std::move(c));
    }
    default: throw Unsupported{};
  }
}

RT rename(const RT& t, int base) {
  if (t->kind == RTerm::Var) return mk_var(t->var + base);
  if (t->kind != RTerm::Cmp) return t;
  RTerm c{RTerm::Cmp, t->name, 0, 0, 0, {}};
  for (const auto& a : t->args) c.args.push_back(rename(a, base));
  return std::make_shared<RTerm>(std::move(c));
}

using Subst = std::map<int, RT>;

RT walk(RT t, const Subst& s) {
  for (int n = 0; t->kind == RTerm::Var; ++n) {
    auto it = s.find(t->var);
    if (it == s.end()) return t;
    if (n > 10'000) throw Unsupported{};
    t = it->second;
  }
  return t;
}

bool unify(RT a, RT b, Subst& s, int depth = 0) {
  if (depth > 200) throw Unsupported{};  // cyclic
  a = walk(a, s);
  b = walk(b, s);
  if (a->kind == RTerm::Var && b->kind == RTerm::Var && a->var == b->var) return true;
  if (a->kind == RTerm::Var) {
    s[a->var] = b;
    return true;
  }
  if (b->kind == RTerm::Var) {
    s[b->var] = a;
    return true;
  }
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case RTerm::Atom: return a->name == b->name;
    case RTerm::Int: return a->i == b->i;
    case RTerm::Float: return a->f == b->f;
    default: break;
  }
  if (a->name != b->name || a->args.size() != b->args.size()) return false;
  for (std::size_t k = 0; k < a->args.size(); ++k) {
    if (!unify(a->args[k], b->args[k], s, depth + 1)) return false;
  }
  return true;
}

struct Clause {
  RT head;
  RT body;
  int n_vars;
};

struct Goals {
  RT goal;
  int barrier;
  std::shared_ptr<const Goals> rest;
};
using GL = std::shared_ptr<const Goals>;

GL push(RT g, int barrier, GL rest) { return std::make_shared<const Goals>(Goals{std::move(g), barrier, std::move(rest)}); }

constexpr int kNoCut = INT_MAX;

struct Solver {
  std::map<std::pair<std::string, std::size_t>, std::vector<Clause>> db;
  int next_var = 0;
  int next_activation = 0;
  std::size_t steps = 0;
  std::size_t max_steps;

  // Appends every answer substitution to `out`; returns the activation a
  // cut asked to prune to, or kNoCut.
  int solve(GL gl, const Subst& s, std::vector<Subst>& out) {
    if (++steps > max_steps) throw Unsupported{};
    if (!gl) {
      out.push_back(s);
      return kNoCut;
    }
    RT g = walk(gl->goal, s);
    int barrier = gl->barrier;
    const GL& rest = gl->rest;
    if (g->kind == RTerm::Var || g->kind == RTerm::Int || g->kind == RTerm::Float) throw Unsupported{};
    const std::string& n = g->name;
    std::size_t ar = g->args.size();
    if (g->kind == RTerm::Atom) {
      if (n == "true") return solve(rest, s, out);
      if (n == "fail") return kNoCut;
      if (n == "!") return std::min(solve(rest, s, out), barrier);
    }
    if (n == "," && ar == 2) return solve(push(g->args[0], barrier, push(g->args[1], barrier, rest)), s, out);
    if (n == "=" && ar == 2) {
      Subst s2 = s;
      return unify(g->args[0], g->args[1], s2) ? solve(rest, s2, out) : kNoCut;
    }
    if (n == "\\=" && ar == 2) {
      Subst s2 = s;
      return unify(g->args[0], g->args[1], s2) ? kNoCut : solve(rest, s, out);
    }
    if (n == "\\+" && ar == 1) {
      std::vector<Subst> inner;
      solve(push(g->args[0], ++next_activation, nullptr), s, inner);
      return inner.empty() ? solve(rest, s, out) : kNoCut;
    }
    if (n == ";" && ar == 2) {
      RT lhs = walk(g->args[0], s);
      if (lhs->kind == RTerm::Cmp && lhs->name == "->" && lhs->args.size() == 2) {
        std::vector<Subst> cond;
        solve(push(lhs->args[0], ++next_activation, nullptr), s, cond);
        if (!cond.empty()) return solve(push(lhs->args[1], barrier, rest), cond.front(), out);
        return solve(push(g->args[1], barrier, rest), s, out);
      }
      int r = solve(push(g->args[0], barrier, rest), s, out);
      if (r != kNoCut) return r;
      return solve(push(g->args[1], barrier, rest), s, out);
    }
    if (n == "->" && ar == 2) {
      std::vector<Subst> cond;
      solve(push(g->args[0], ++next_activation, nullptr), s, cond);
      return cond.empty() ? kNoCut : solve(push(g->args[1], barrier, rest), cond.front(), out);
    }
    auto it = db.find({n, ar});
    if (it == db.end()) throw Unsupported{};
    int activation = ++next_activation;
    for (const Clause& c : it->second) {
      int base = next_var;
      next_var += c.n_vars;
      Subst s2 = s;
      if (!unify(rename(c.head, base), g, s2)) continue;
      int r = solve(push(rename(c.body, base), activation, rest), s2, out);
      if (r == activation) return kNoCut;
      if (r != kNoCut) return r;
    }
    return kNoCut;
  }
};

std::string render(const RT& root, const Subst& s) {
  std::map<int, int> names;
  std::string out;
  int depth = 0;
  auto go = [&](auto&& self, RT t) -> void {
    if (++depth > 10'000) throw Unsupported{};
    t = walk(t, s);
    switch (t->kind) {
      case RTerm::Var: {
        auto [pos, fresh] = names.emplace(t->var, static_cast<int>(names.size()));
        out += "_" + std::to_string(pos->second);
        return;
      }
      case RTerm::Atom: out += "'" + t->name + "'"; return;
      case RTerm::Int: out += std::to_string(t->i); return;
      case RTerm::Float: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", t->f);
        out += buf;
        return;
      }
      case RTerm::Cmp:
        out += "'" + t->name + "'(";
        for (std::size_t k = 0; k < t->args.size(); ++k) {
          if (k) out += ",";
          self(self, t->args[k]);
        }
        out += ")";
        return;
    }
  };
  go(go, root);
  return out;
}

}  // namespace

std::optional<std::vector<std::string>> reference_answers(std::string_view program, std::string_view goal,
                                                          std::size_t max_steps) {
  plb::SymbolTable syms;
  Solver solver;
  solver.max_steps = max_steps;
  try {
    for (const auto& c : plb::parse_program(program, syms)) {
      RT head = convert(c.arena, c.head, syms, 0);
      solver.db[{head->name, head->args.size()}].push_back({head, convert(c.arena, c.body, syms, 0),
                                                           static_cast<int>(c.n_vars)});
    }
    plb::ParsedTerm q = plb::parse_term(goal, syms);
    RT g = convert(q.tree.arena, q.tree.root, syms, 0);
    solver.next_var = static_cast<int>(q.tree.n_vars);
    std::vector<Subst> answers;
    solver.solve(push(g, 0, nullptr), Subst{}, answers);
    std::vector<std::string> out;
    for (const auto& s : answers) out.push_back(render(g, s));
    return out;
  } catch (const Unsupported&) {
    return std::nullopt;
  }
}

std::vector<std::string> engine_answers(std::string_view program, std::string_view goal, std::size_t limit,
                                        plb::EngineOptions options) {
  auto db = std::make_shared<plb::Database>();
  db->consult(program);
  plb::Machine m(db, options);
  plb::ParsedTerm parsed = plb::parse_term(goal, db->symbols());
  plb::LoadedQuery q = m.load(parsed);
  m.start(q.goal);
  std::vector<std::string> out;
  while (out.size() < limit && m.solve_next() == plb::SolveStatus::Succeeded) {
    plb::TermTree t = m.detach(q.goal);
    out.push_back(canonical(t.arena, t.root, db->symbols()));
  }
  return out;
}

}  // namespace plbtest
