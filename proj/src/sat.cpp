#include "phoenix/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "phoenix/error.hpp"

namespace phoenix::sat {

void Cnf::add(std::vector<Lit> clause) {
  if (clause.empty()) throw ValidationError("empty clause");
  for (auto l : clause) {
    if (l == 0 || static_cast<std::size_t>(std::abs(l)) > variables) {
      throw ValidationError("literal " + std::to_string(l) + " out of range");
    }
  }
  clauses.push_back(std::move(clause));
}

bool satisfies(const Cnf& cnf, const Model& model) {
  if (model.size() < cnf.variables + 1) return false;
  for (const auto& c : cnf.clauses) {
    bool sat = false;
    for (auto l : c) {
      if (model[static_cast<std::size_t>(std::abs(l))] == (l > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Solver internals. Literals are coded as 2*var + sign with 0-based vars.

namespace {

using Code = std::uint32_t;
constexpr std::uint32_t kNoReason = UINT32_MAX;

inline Code encode_lit(Lit l) { return static_cast<Code>((std::abs(l) - 1) * 2 + (l < 0 ? 1 : 0)); }
inline std::uint32_t var_of(Code c) { return c >> 1; }
inline Code neg(Code c) { return c ^ 1u; }

/// Reluctant doubling sequence 1,1,2,1,1,2,4,...
double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct Solver::Impl {
  struct ClauseInfo {
    std::uint32_t offset;
    std::uint32_t size;
    bool learnt;
    bool deleted;
    std::uint32_t lbd;
    double activity;
  };
  struct Watcher {
    std::uint32_t cref;
    Code blocker;
  };

  std::vector<Code> arena;
  std::vector<ClauseInfo> clauses;
  std::vector<std::uint32_t> learnts;
  std::vector<std::vector<Watcher>> watches;

  std::vector<std::int8_t> assigns;  // 1 true, -1 false, 0 unassigned
  std::vector<std::uint32_t> level;
  std::vector<std::uint32_t> reason;
  std::vector<std::uint8_t> phase;
  std::vector<double> activity;
  std::vector<std::uint8_t> seen;
  std::vector<Code> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;

  // Max-heap of variables by activity.
  std::vector<std::uint32_t> heap;
  std::vector<std::int32_t> heap_pos;

  double var_inc = 1.0;
  double cla_inc = 1.0;
  bool ok = true;
  Model model;
  Stats stats;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::size_t max_learnts = 4000;
  std::vector<std::uint32_t> level_stamp;
  std::uint32_t stamp = 0;

  std::size_t nvars() const { return assigns.size(); }

  std::int8_t value(Code c) const {
    const auto v = assigns[var_of(c)];
    return (c & 1u) ? static_cast<std::int8_t>(-v) : v;
  }

  std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim.size()); }

  void grow(std::size_t n) {
    while (nvars() < n) {
      const auto v = static_cast<std::uint32_t>(nvars());
      assigns.push_back(0);
      level.push_back(0);
      reason.push_back(kNoReason);
      phase.push_back(1);  // prefer false
      activity.push_back(0.0);
      seen.push_back(0);
      watches.emplace_back();
      watches.emplace_back();
      heap_pos.push_back(-1);
      level_stamp.push_back(0);
      heap_insert(v);
    }
  }

  // -- heap -----------------------------------------------------------------
  bool heap_less(std::uint32_t a, std::uint32_t b) const {
    // Higher activity first; lower index breaks ties deterministically.
    return activity[a] > activity[b] || (activity[a] == activity[b] && a < b);
  }
  void heap_up(std::size_t i) {
    const auto v = heap[i];
    while (i > 0) {
      const auto parent = (i - 1) / 2;
      if (!heap_less(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = static_cast<std::int32_t>(i);
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<std::int32_t>(i);
  }
  void heap_down(std::size_t i) {
    const auto v = heap[i];
    for (;;) {
      auto child = 2 * i + 1;
      if (child >= heap.size()) break;
      if (child + 1 < heap.size() && heap_less(heap[child + 1], heap[child])) ++child;
      if (!heap_less(heap[child], v)) break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = static_cast<std::int32_t>(i);
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<std::int32_t>(i);
  }
  void heap_insert(std::uint32_t v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  std::uint32_t heap_pop() {
    const auto top = heap.front();
    heap_pos[top] = -1;
    heap.front() = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap_pos[heap.front()] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump_var(std::uint32_t v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }

  void bump_clause(std::uint32_t cref) {
    auto& c = clauses[cref];
    c.activity += cla_inc;
    if (c.activity > 1e20) {
      for (auto l : learnts) clauses[l].activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  // -- assignment -----------------------------------------------------------
  void enqueue(Code p, std::uint32_t from) {
    const auto v = var_of(p);
    assigns[v] = (p & 1u) ? -1 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(p);
  }

  void backtrack(std::uint32_t target) {
    if (decision_level() <= target) return;
    for (auto i = trail.size(); i-- > trail_lim[target];) {
      const auto v = var_of(trail[i]);
      assigns[v] = 0;
      reason[v] = kNoReason;
      phase[v] = trail[i] & 1u;
      heap_insert(v);
    }
    trail.resize(trail_lim[target]);
    trail_lim.resize(target);
    qhead = trail.size();
  }

  std::uint32_t attach(const std::vector<Code>& lits, bool learnt, std::uint32_t lbd) {
    const auto cref = static_cast<std::uint32_t>(clauses.size());
    clauses.push_back({static_cast<std::uint32_t>(arena.size()), static_cast<std::uint32_t>(lits.size()), learnt,
                       false, lbd, 0.0});
    arena.insert(arena.end(), lits.begin(), lits.end());
    watches[lits[0]].push_back({cref, lits[1]});
    watches[lits[1]].push_back({cref, lits[0]});
    if (learnt) learnts.push_back(cref);
    return cref;
  }

  /// Returns the conflicting clause or kNoReason.
  std::uint32_t propagate() {
    std::uint32_t conflict = kNoReason;
    while (qhead < trail.size()) {
      const Code p = trail[qhead++];
      const Code false_lit = neg(p);
      auto& ws = watches[false_lit];
      ++stats.propagations;
      std::size_t i = 0;
      std::size_t j = 0;
      const std::size_t n = ws.size();
      while (i < n) {
        const Watcher w = ws[i++];
        if (value(w.blocker) == 1) {
          ws[j++] = w;
          continue;
        }
        const auto& info = clauses[w.cref];
        Code* lits = arena.data() + info.offset;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        const Code first = lits[0];
        if (first != w.blocker && value(first) == 1) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::uint32_t k = 2; k < info.size; ++k) {
          if (value(lits[k]) != -1) {
            lits[1] = lits[k];
            lits[k] = false_lit;
            watches[lits[1]].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == -1) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < n) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  std::uint32_t compute_lbd(const std::vector<Code>& lits) {
    ++stamp;
    std::uint32_t n = 0;
    for (auto l : lits) {
      const auto lv = level[var_of(l)];
      if (level_stamp[lv] != stamp) {
        level_stamp[lv] = stamp;
        ++n;
      }
    }
    return n;
  }

  /// First-UIP learning with local minimization.
  void analyze(std::uint32_t conflict, std::vector<Code>& learnt, std::uint32_t& backtrack_level) {
    learnt.assign(1, 0);
    int path = 0;
    Code p = 0;
    bool have_p = false;
    std::size_t index = trail.size();
    std::uint32_t cref = conflict;
    for (;;) {
      if (clauses[cref].learnt) bump_clause(cref);
      const auto& info = clauses[cref];
      const Code* lits = arena.data() + info.offset;
      for (std::uint32_t k = have_p ? 1 : 0; k < info.size; ++k) {
        const Code q = lits[k];
        const auto v = var_of(q);
        if (seen[v] || level[v] == 0) continue;
        seen[v] = 1;
        bump_var(v);
        if (level[v] >= decision_level()) {
          ++path;
        } else {
          learnt.push_back(q);
        }
      }
      do {
        --index;
      } while (!seen[var_of(trail[index])]);
      p = trail[index];
      have_p = true;
      seen[var_of(p)] = 0;
      --path;
      if (path == 0) break;
      cref = reason[var_of(p)];
    }
    learnt[0] = neg(p);

    // Drop literals implied by the rest of the clause.
    std::vector<Code> kept{learnt[0]};
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      const auto v = var_of(learnt[k]);
      const auto r = reason[v];
      bool redundant = r != kNoReason;
      if (redundant) {
        const auto& info = clauses[r];
        const Code* lits = arena.data() + info.offset;
        for (std::uint32_t m = 1; m < info.size; ++m) {
          const auto u = var_of(lits[m]);
          if (!seen[u] && level[u] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) kept.push_back(learnt[k]);
    }
    for (std::size_t k = 1; k < learnt.size(); ++k) seen[var_of(learnt[k])] = 0;
    learnt.swap(kept);

    backtrack_level = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k) {
        if (level[var_of(learnt[k])] > level[var_of(learnt[best])]) best = k;
      }
      std::swap(learnt[1], learnt[best]);
      backtrack_level = level[var_of(learnt[1])];
    }
  }

  bool locked(std::uint32_t cref) const {
    const auto& info = clauses[cref];
    const Code first = arena[info.offset];
    return value(first) == 1 && reason[var_of(first)] == cref;
  }

  void reduce_db() {
    std::vector<std::uint32_t> candidates;
    std::vector<std::uint32_t> keep;
    for (auto cref : learnts) {
      if (clauses[cref].lbd <= 2 || locked(cref)) {
        keep.push_back(cref);
      } else {
        candidates.push_back(cref);
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto& x = clauses[a];
      const auto& y = clauses[b];
      if (x.lbd != y.lbd) return x.lbd < y.lbd;
      if (x.activity != y.activity) return x.activity > y.activity;
      return a < b;
    });
    const std::size_t half = candidates.size() / 2;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (k < half) {
        keep.push_back(candidates[k]);
      } else {
        clauses[candidates[k]].deleted = true;
        ++stats.deleted;
      }
    }
    std::sort(keep.begin(), keep.end());
    learnts.swap(keep);
    rebuild();
  }

  /// Compacts the literal arena and rebuilds every watch list.
  void rebuild() {
    std::vector<Code> fresh;
    fresh.reserve(arena.size());
    for (auto& w : watches) w.clear();
    for (std::uint32_t cref = 0; cref < clauses.size(); ++cref) {
      auto& info = clauses[cref];
      if (info.deleted) {
        info.size = 0;
        continue;
      }
      const auto offset = static_cast<std::uint32_t>(fresh.size());
      fresh.insert(fresh.end(), arena.begin() + info.offset, arena.begin() + info.offset + info.size);
      info.offset = offset;
      watches[fresh[offset]].push_back({cref, fresh[offset + 1]});
      watches[fresh[offset + 1]].push_back({cref, fresh[offset]});
    }
    arena.swap(fresh);
  }

  bool add(std::span<const Lit> clause) {
    if (!ok) return false;
    backtrack(0);
    std::size_t top = 0;
    for (auto l : clause) {
      if (l == 0) throw ValidationError("literal 0 in clause");
      top = std::max(top, static_cast<std::size_t>(std::abs(l)));
    }
    grow(top);
    std::vector<Code> lits;
    for (auto l : clause) lits.push_back(encode_lit(l));
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Code> kept;
    for (std::size_t k = 0; k < lits.size(); ++k) {
      if (k + 1 < lits.size() && lits[k + 1] == neg(lits[k])) return true;  // tautology
      const auto v = value(lits[k]);
      if (v == 1) return true;
      if (v == 0) kept.push_back(lits[k]);
    }
    if (kept.empty()) {
      ok = false;
      return false;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() != kNoReason) ok = false;
      return ok;
    }
    attach(kept, false, 0);
    return true;
  }

  bool out_of_time() const { return deadline && std::chrono::steady_clock::now() >= *deadline; }

  Result solve() {
    if (!ok) return Result::Unsat;
    backtrack(0);
    if (propagate() != kNoReason) {
      ok = false;
      return Result::Unsat;
    }
    std::vector<Code> learnt;
    int restart_index = 0;
    std::uint64_t restart_budget = static_cast<std::uint64_t>(luby(2, restart_index) * 100);
    std::uint64_t since_restart = 0;
    for (;;) {
      const auto conflict = propagate();
      if (conflict != kNoReason) {
        ++stats.conflicts;
        ++since_restart;
        if (decision_level() == 0) {
          ok = false;
          return Result::Unsat;
        }
        std::uint32_t bt = 0;
        analyze(conflict, learnt, bt);
        backtrack(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          const auto cref = attach(learnt, true, compute_lbd(learnt));
          bump_clause(cref);
          enqueue(learnt[0], cref);
          ++stats.learned;
        }
        var_inc /= 0.95;
        cla_inc /= 0.999;
        if ((stats.conflicts & 255) == 0 && out_of_time()) {
          backtrack(0);
          return Result::Unknown;
        }
        continue;
      }
      if (since_restart >= restart_budget) {
        ++stats.restarts;
        since_restart = 0;
        restart_budget = static_cast<std::uint64_t>(luby(2, ++restart_index) * 100);
        backtrack(0);
        continue;
      }
      if (learnts.size() >= max_learnts) {
        reduce_db();
        max_learnts += max_learnts / 10;
      }
      std::uint32_t next = UINT32_MAX;
      while (!heap.empty()) {
        const auto v = heap_pop();
        if (assigns[v] == 0) {
          next = v;
          break;
        }
      }
      if (next == UINT32_MAX) {
        model.assign(nvars() + 1, false);
        for (std::size_t v = 0; v < nvars(); ++v) model[v + 1] = assigns[v] == 1;
        return Result::Sat;
      }
      ++stats.decisions;
      if ((stats.decisions & 4095) == 0 && out_of_time()) {
        backtrack(0);
        return Result::Unknown;
      }
      trail_lim.push_back(trail.size());
      enqueue(next * 2 + phase[next], kNoReason);
    }
  }
};

Solver::Solver() : impl_(std::make_unique<Impl>()) {}

Solver::Solver(const Cnf& cnf) : Solver() {
  impl_->grow(cnf.variables);
  for (const auto& c : cnf.clauses) {
    if (!impl_->add(c)) break;
  }
}

Solver::~Solver() = default;

Lit Solver::new_var() {
  impl_->grow(impl_->nvars() + 1);
  return static_cast<Lit>(impl_->nvars());
}

std::size_t Solver::variable_count() const noexcept { return impl_->nvars(); }

void Solver::reserve_vars(std::size_t count) { impl_->grow(count); }

bool Solver::add_clause(std::span<const Lit> clause) {
  if (clause.empty()) {
    impl_->ok = false;
    return false;
  }
  return impl_->add(clause);
}

Result Solver::solve() { return impl_->solve(); }

void Solver::set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline) {
  impl_->deadline = deadline;
}

bool Solver::value(Lit var) const { return impl_->model.at(static_cast<std::size_t>(var)); }

Model Solver::model() const { return impl_->model; }

const Stats& Solver::stats() const noexcept { return impl_->stats; }

std::optional<Model> solve(const Cnf& cnf) {
  Solver s(cnf);
  s.reserve_vars(cnf.variables);
  if (s.solve() != Result::Sat) return std::nullopt;
  auto m = s.model();
  m.resize(cnf.variables + 1);
  if (!satisfies(cnf, m)) throw Error("solver returned a model that violates a clause");
  return m;
}

// ---------------------------------------------------------------------------
// DIMACS

void write_dimacs(std::ostream& out, const Cnf& cnf) {
  out << "p cnf " << cnf.variables << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (auto l : c) out << l << ' ';
    out << "0\n";
  }
}

Cnf read_dimacs(std::istream& in) {
  Cnf cnf;
  bool header = false;
  std::size_t declared = 0;
  std::vector<Lit> clause;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%") continue;
    if (first == "p") {
      std::string fmt;
      long long vars = -1;
      long long count = -1;
      if (header || !(ls >> fmt >> vars >> count) || fmt != "cnf" || vars < 0 || count < 0) {
        throw ParseError("malformed problem line", number);
      }
      header = true;
      cnf.variables = static_cast<std::size_t>(vars);
      declared = static_cast<std::size_t>(count);
      continue;
    }
    if (!header) throw ParseError("clause before the problem line", number);
    std::istringstream tokens(line);
    for (std::string tok; tokens >> tok;) {
      char* end = nullptr;
      const long long v = std::strtoll(tok.c_str(), &end, 10);
      if (*end != '\0') throw ParseError("bad literal '" + tok + "'", number);
      if (v == 0) {
        if (clause.empty()) throw ParseError("empty clause", number);
        try {
          cnf.add(clause);
        } catch (const ValidationError& e) {
          throw ParseError(e.what(), number);
        }
        clause.clear();
      } else {
        clause.push_back(static_cast<Lit>(v));
      }
    }
  }
  if (!clause.empty()) throw ParseError("last clause is not terminated by 0", number);
  if (!header) throw ParseError("missing problem line", number);
  if (cnf.clauses.size() != declared) throw ParseError("clause count differs from the problem line", number);
  return cnf;
}

}  // namespace phoenix::sat
