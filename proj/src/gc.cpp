#include <algorithm>
#include <vector>

#include "plb/engine.hpp"

// Sliding mark-compact collection of the heap, the variable store and the
// frame pool. Order is preserved, so every choice point's tops stay valid
// after remapping: live data older than a choice point remains older.
//
// Runs only between steps, when every term the machine can still use is
// reachable from the query base, the current goal list or a choice point.

namespace plb {

namespace {

// Maps old indices to new ones: new = number of live entries before old.
class Forward {
 public:
  explicit Forward(const std::vector<bool>& live) : before_(live.size() + 1, 0) {
    for (std::size_t i = 0; i < live.size(); ++i) before_[i + 1] = before_[i] + (live[i] ? 1 : 0);
  }
  std::uint64_t operator()(std::uint64_t old) const { return before_[old]; }

 private:
  std::vector<std::uint64_t> before_;
};

}  // namespace

void Machine::collect() {
  auto& heap = heap_.raw();
  auto& store = store_.raw();
  std::vector<bool> heap_live(heap.size(), false);
  std::vector<bool> var_live(store.size(), false);
  std::vector<bool> frame_live(frames_.size(), false);

  std::vector<Term> pending;
  auto mark_term = [&](Term root) {
    pending.push_back(root);
    while (!pending.empty()) {
      Term t = pending.back();
      pending.pop_back();
      if (t.is_var()) {
        std::uint32_t i = t.var_index();
        if (var_live[i]) continue;
        var_live[i] = true;
        Term v = store[i];
        if (!(v.is_var() && v.var_index() == i)) pending.push_back(v);
      } else if (t.is_compound()) {
        std::uint64_t off = t.args_offset();
        for (std::uint32_t k = 0; k < t.arity(); ++k) {
          if (heap_live[off + k]) continue;
          heap_live[off + k] = true;
          pending.push_back(heap[off + k]);
        }
      }
    }
  };
  auto mark_frames = [&](std::uint32_t f) {
    while (f != kNil && !frame_live[f]) {
      frame_live[f] = true;
      mark_term(frames_[f].goal);
      f = frames_[f].next;
    }
  };

  // The query region below the base is kept whole.
  frame_live[0] = true;
  for (std::size_t f = 1; f < base_.frames; ++f) {
    frame_live[f] = true;
    mark_term(frames_[f].goal);
  }
  for (std::size_t i = 0; i < base_.heap; ++i) {
    heap_live[i] = true;
    mark_term(heap[i]);
  }
  for (std::size_t i = 0; i < base_.vars; ++i) mark_term(Term::var(static_cast<std::uint32_t>(i)));

  mark_frames(goal_);
  for (const auto& cp : cps_) {
    mark_frames(cp.cont);
    mark_frames(cp.alt);
    mark_term(cp.goal);
  }

  const Forward fh(heap_live), fv(var_live), ff(frame_live);
  auto move = [&](Term t) -> Term {
    if (t.is_compound()) return Term::compound(t.name(), t.arity(), fh(t.args_offset()));
    if (t.is_var()) return Term::var(static_cast<std::uint32_t>(fv(t.var_index())));
    return t;
  };
  auto move_frame = [&](std::uint32_t f) { return static_cast<std::uint32_t>(ff(f)); };

  // Trail: keep an entry only if some choice point could still undo it,
  // that is, its cell is live and older than the newest choice point (or
  // base) taken before the binding.
  auto& trail = trail_.raw();
  std::vector<std::size_t> kept_before(trail.size() + 1, 0);
  {
    std::size_t cp = 0;
    std::size_t barrier_vars = 0;
    bool past_base = false;
    std::size_t out = 0;
    for (std::size_t p = 0; p < trail.size(); ++p) {
      if (!past_base && p >= base_.trail) {
        past_base = true;
        barrier_vars = base_.vars;
      }
      while (cp < cps_.size() && cps_[cp].tops.trail <= p) barrier_vars = cps_[cp++].tops.vars;
      kept_before[p] = out;
      std::uint32_t c = trail[p];
      bool keep = p < base_.trail || (var_live[c] && c < barrier_vars);
      if (keep) trail[out++] = static_cast<std::uint32_t>(fv(c));
    }
    kept_before[trail.size()] = out;
    trail.resize(out);
  }
  auto move_trail_mark = [&](TrailMark m) { return kept_before[std::min<std::size_t>(m, kept_before.size() - 1)]; };

  // Slide everything down.
  std::size_t out = 0;
  for (std::size_t i = 0; i < heap.size(); ++i) {
    if (heap_live[i]) heap[out++] = move(heap[i]);
  }
  heap.resize(out);
  out = 0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (var_live[i]) store[out++] = move(store[i]);
  }
  store.resize(out);
  out = 0;
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (!frame_live[i]) continue;
    Frame f = frames_[i];
    f.goal = move(f.goal);
    f.next = move_frame(f.next);
    frames_[out++] = f;
  }
  frames_.resize(out);

  auto move_tops = [&](Tops& t) {
    t.trail = move_trail_mark(t.trail);
    t.vars = fv(t.vars);
    t.heap = fh(t.heap);
    t.frames = ff(t.frames);
  };
  for (auto& cp : cps_) {
    move_tops(cp.tops);
    cp.cont = move_frame(cp.cont);
    cp.alt = move_frame(cp.alt);
    cp.goal = move(cp.goal);
  }
  goal_ = move_frame(goal_);
  move_tops(base_);

  auto trim = [](auto& v) {
    if (v.capacity() > 4 * v.size() + 1024) v.shrink_to_fit();
  };
  trim(heap);
  trim(store);
  trim(frames_);
  trim(trail);
  ++gc_runs_;
}

}  // namespace plb
