#include "phoenix/synth.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "phoenix/error.hpp"
#include "phoenix/rng.hpp"

namespace phoenix::synth {

using pltl::Formula;
using pltl::Op;
using pltl::Trace;
using sat::Lit;

bool satisfied(const Formula& f, const Trace& t, Semantics semantics) {
  if (t.size() == 0) return true;
  if (semantics == Semantics::Global) return pltl::holds_globally(f, t);
  return pltl::eval_at(f, t, t.size() - 1);
}

bool consistent(const Formula& f, const SynthesisProblem& p) {
  for (const auto& t : p.positive) {
    if (!satisfied(f, t, p.semantics)) return false;
  }
  for (const auto& t : p.negative) {
    if (satisfied(f, t, p.semantics)) return false;
  }
  return true;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Found: return "found";
    case Status::BoundExceeded: return "bound-exceeded";
    case Status::TimedOut: return "timed-out";
  }
  return {};
}

namespace {

bool same_states(const Trace& a, const Trace& b) { return a.states == b.states; }

void check_sample(const SynthesisProblem& p) {
  if (p.alphabet.size() == 0) throw ValidationError("empty alphabet");
  for (const auto* set : {&p.positive, &p.negative}) {
    for (const auto& t : *set) {
      for (const auto& s : t.states) {
        if (s.size() != p.alphabet.size()) throw ValidationError("sample trace does not match the alphabet");
      }
    }
  }
  for (const auto& a : p.positive) {
    for (const auto& b : p.negative) {
      if (same_states(a, b)) throw ValidationError("sample is inconsistent: a trace is both positive and negative");
    }
  }
}

bool is_leaf(Op op) { return pltl::arity(op) == 0; }
bool is_unary(Op op) { return pltl::arity(op) == 1; }
bool is_binary(Op op) { return pltl::arity(op) == 2; }

/// Clause sink with an at-most-one helper.
struct Builder {
  sat::Cnf& cnf;
  void clause(std::initializer_list<Lit> lits) { cnf.clauses.emplace_back(lits); }
  void clause(std::vector<Lit> lits) { cnf.clauses.push_back(std::move(lits)); }
  void at_most_one(const std::vector<Lit>& lits) {
    for (std::size_t a = 0; a < lits.size(); ++a) {
      for (std::size_t b = a + 1; b < lits.size(); ++b) clause({-lits[a], -lits[b]});
    }
  }
};

using Clock = std::chrono::steady_clock;

std::optional<Clock::time_point> deadline_of(const SynthesisProblem& p) {
  if (!p.timeout) return std::nullopt;
  return Clock::now() + *p.timeout;
}

}  // namespace

std::vector<Lit> Encoding::structure(const sat::Model& model) const {
  std::vector<Lit> out;
  for (const auto& row : label_var) {
    for (auto v : row) {
      if (model.at(static_cast<std::size_t>(v))) out.push_back(v);
    }
  }
  for (const auto& row : left_var) {
    for (auto v : row) {
      if (v != 0 && model.at(static_cast<std::size_t>(v))) out.push_back(v);
    }
  }
  return out;
}

Encoding encode(const SynthesisProblem& p, std::size_t size) {
  check_sample(p);
  if (size == 0) throw ValidationError("formula size must be at least 1");

  Encoding e;
  e.size = size;
  for (const auto& t : p.positive) {
    if (std::none_of(e.traces.begin(), e.traces.end(), [&](const Trace& u) { return same_states(t, u); })) {
      e.traces.push_back(t);
    }
  }
  e.positive_count = e.traces.size();
  for (const auto& t : p.negative) {
    if (std::none_of(e.traces.begin() + static_cast<std::ptrdiff_t>(e.positive_count), e.traces.end(),
                     [&](const Trace& u) { return same_states(t, u); })) {
      e.traces.push_back(t);
    }
  }

  // Label menu: constants, live propositions, unary, binary.
  e.labels.push_back({Op::True});
  e.labels.push_back({Op::False});
  for (std::size_t q = 0; q < p.alphabet.size(); ++q) {
    bool live = !p.prune_propositions;
    for (const auto& t : e.traces) {
      for (const auto& s : t.states) live = live || s.get(q);
    }
    if (live) e.labels.push_back({Op::Prop, q});
  }
  e.labels.push_back({Op::Not});
  e.labels.push_back({Op::Yesterday});
  if (p.once_historically) {
    e.labels.push_back({Op::Once});
    e.labels.push_back({Op::Historically});
  }
  e.labels.push_back({Op::And});
  e.labels.push_back({Op::Or});
  e.labels.push_back({Op::Since});

  auto& cnf = e.cnf;
  Builder b{cnf};
  const std::size_t L = e.labels.size();

  e.label_var.assign(size, {});
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t k = 0; k < L; ++k) e.label_var[i].push_back(cnf.new_var());
  }
  e.left_var.assign(size, {});
  for (std::size_t i = 0; i < size; ++i) {
    e.left_var[i].assign(i, 0);
    for (std::size_t j = 0; i >= 2 && j + 2 <= i; ++j) e.left_var[i][j] = cnf.new_var();
  }
  // internal[i]: node i is not a leaf, so node i-1 is its (right or only) child.
  std::vector<Lit> internal(size, 0);
  for (std::size_t i = 1; i < size; ++i) internal[i] = cnf.new_var();

  // -- structure ------------------------------------------------------------
  for (std::size_t i = 0; i < size; ++i) {
    b.clause(std::vector<Lit>(e.label_var[i].begin(), e.label_var[i].end()));
    b.at_most_one(e.label_var[i]);

    std::vector<Lit> internal_labels;
    std::vector<Lit> binary_labels;
    for (std::size_t k = 0; k < L; ++k) {
      const auto op = e.labels[k].op;
      const Lit x = e.label_var[i][k];
      if ((is_unary(op) && i < 1) || (is_binary(op) && i < 2)) {
        b.clause({-x});
        continue;
      }
      if (!is_leaf(op)) {
        internal_labels.push_back(x);
        if (i >= 1) b.clause({-x, internal[i]});
      }
      if (is_binary(op)) binary_labels.push_back(x);
    }
    if (i >= 1) {
      std::vector<Lit> c{-internal[i]};
      c.insert(c.end(), internal_labels.begin(), internal_labels.end());
      b.clause(c);
    }
    if (i >= 2) {
      std::vector<Lit> lefts;
      for (std::size_t j = 0; j + 2 <= i; ++j) lefts.push_back(e.left_var[i][j]);
      b.at_most_one(lefts);
      for (auto x : binary_labels) {
        std::vector<Lit> c{-x};
        c.insert(c.end(), lefts.begin(), lefts.end());
        b.clause(c);
      }
      for (auto l : lefts) {
        std::vector<Lit> c{-l};
        c.insert(c.end(), binary_labels.begin(), binary_labels.end());
        b.clause(c);
      }
    }
  }
  // Every non-root node has exactly one parent: its successor as the right or
  // only child, or a later binary node as the left child.
  for (std::size_t k = 0; k + 1 < size; ++k) {
    std::vector<Lit> parents{internal[k + 1]};
    for (std::size_t i = k + 2; i < size; ++i) parents.push_back(e.left_var[i][k]);
    b.clause(parents);
    b.at_most_one(parents);
  }
  // Post-order numbering: nodes strictly between a left child j and the right
  // child i-1 belong to the right subtree, so their parent is below i.
  for (std::size_t i = 2; i < size; ++i) {
    for (std::size_t j = 0; j + 2 <= i; ++j) {
      for (std::size_t k = j + 1; k + 1 < i; ++k) {
        for (std::size_t m = i; m < size; ++m) {
          if (k + 2 <= m) b.clause({-e.left_var[i][j], -e.left_var[m][k]});
        }
      }
    }
  }

  // -- semantics ------------------------------------------------------------
  e.value_var.resize(e.traces.size());
  for (std::size_t t = 0; t < e.traces.size(); ++t) {
    const auto n = e.traces[t].size();
    e.value_var[t].assign(size, std::vector<Lit>(n));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t pos = 0; pos < n; ++pos) e.value_var[t][i][pos] = cnf.new_var();
    }
  }

  for (std::size_t t = 0; t < e.traces.size(); ++t) {
    const auto& trace = e.traces[t];
    const auto n = trace.size();
    const auto& y = e.value_var[t];
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t k = 0; k < L; ++k) {
        const auto [op, prop] = e.labels[k];
        const Lit x = e.label_var[i][k];
        if ((is_unary(op) && i < 1) || (is_binary(op) && i < 2)) continue;
        for (std::size_t pos = 0; pos < n; ++pos) {
          const Lit v = y[i][pos];
          switch (op) {
            case Op::True: b.clause({-x, v}); break;
            case Op::False: b.clause({-x, -v}); break;
            case Op::Prop: b.clause({-x, trace.states[pos].get(prop) ? v : -v}); break;
            case Op::Not: {
              const Lit c = y[i - 1][pos];
              b.clause({-x, -v, -c});
              b.clause({-x, v, c});
              break;
            }
            case Op::Yesterday: {
              if (pos == 0) {
                b.clause({-x, -v});
              } else {
                const Lit c = y[i - 1][pos - 1];
                b.clause({-x, -v, c});
                b.clause({-x, v, -c});
              }
              break;
            }
            case Op::Once:
            case Op::Historically: {
              const Lit c = y[i - 1][pos];
              if (pos == 0) {
                b.clause({-x, -v, c});
                b.clause({-x, v, -c});
              } else if (op == Op::Once) {
                const Lit prev = y[i][pos - 1];
                b.clause({-x, -v, c, prev});
                b.clause({-x, v, -c});
                b.clause({-x, v, -prev});
              } else {
                const Lit prev = y[i][pos - 1];
                b.clause({-x, -v, c});
                b.clause({-x, -v, prev});
                b.clause({-x, v, -c, -prev});
              }
              break;
            }
            case Op::And:
            case Op::Or:
            case Op::Since: {
              const Lit right = y[i - 1][pos];
              // Clauses that do not mention the left child need only the label.
              if (op == Op::And) b.clause({-x, -v, right});
              if (op == Op::Or) b.clause({-x, v, -right});
              if (op == Op::Since) {
                b.clause({-x, v, -right});
                if (pos == 0) {
                  b.clause({-x, -v, right});
                } else {
                  b.clause({-x, -v, right, y[i][pos - 1]});
                }
              }
              for (std::size_t j = 0; j + 2 <= i; ++j) {
                const Lit l = e.left_var[i][j];
                const Lit left = y[j][pos];
                if (op == Op::And) {
                  b.clause({-x, -l, -v, left});
                  b.clause({-x, -l, v, -left, -right});
                } else if (op == Op::Or) {
                  b.clause({-x, -l, v, -left});
                  b.clause({-x, -l, -v, left, right});
                } else if (pos > 0) {
                  b.clause({-x, -l, -v, right, left});
                  b.clause({-x, -l, v, -y[i][pos - 1], -left});
                }
              }
              break;
            }
          }
        }
      }
    }

    // Root constraints.
    const auto& root = y[size - 1];
    const bool positive = t < e.positive_count;
    if (n == 0) {
      if (!positive) {
        // Nothing is violated on an empty trace, so no formula rejects it.
        const Lit v = cnf.new_var();
        b.clause({v});
        b.clause({-v});
      }
      continue;
    }
    if (positive) {
      if (p.semantics == Semantics::Global) {
        for (auto v : root) b.clause({v});
      } else {
        b.clause({root.back()});
      }
    } else if (p.semantics == Semantics::Global) {
      std::vector<Lit> c;
      for (auto v : root) c.push_back(-v);
      b.clause(c);
    } else {
      b.clause({-root.back()});
    }
  }
  return e;
}

Formula decode(const sat::Model& model, const Encoding& e, const SynthesisProblem& p) {
  auto truth = [&](Lit v) { return model.at(static_cast<std::size_t>(v)); };
  std::vector<std::optional<Formula>> nodes(e.size);
  for (std::size_t i = 0; i < e.size; ++i) {
    std::optional<std::size_t> label;
    for (std::size_t k = 0; k < e.labels.size(); ++k) {
      if (!truth(e.label_var[i][k])) continue;
      if (label) throw Error("malformed model: node " + std::to_string(i) + " has two labels");
      label = k;
    }
    if (!label) throw Error("malformed model: node " + std::to_string(i) + " has no label");
    const auto [op, prop] = e.labels[*label];
    std::optional<Formula> left;
    std::optional<Formula> right;
    if (pltl::arity(op) >= 1) {
      if (i < 1 || !nodes[i - 1]) throw Error("malformed model: missing child of node " + std::to_string(i));
      (pltl::arity(op) == 1 ? left : right) = nodes[i - 1];
    }
    if (pltl::arity(op) == 2) {
      std::optional<std::size_t> j;
      for (std::size_t c = 0; c + 2 <= i; ++c) {
        if (!truth(e.left_var[i][c])) continue;
        if (j) throw Error("malformed model: node " + std::to_string(i) + " has two left children");
        j = c;
      }
      if (!j) throw Error("malformed model: node " + std::to_string(i) + " has no left child");
      left = nodes[*j];
    }
    nodes[i] = Formula::make(op, prop, left, right);
  }
  Formula f = *nodes.back();
  if (pltl::size(f) != e.size) throw Error("malformed model: decoded formula is not a tree of the encoded size");
  if (!consistent(f, p)) throw Error("decoded formula is inconsistent with the sample");
  return f;
}

std::vector<Lit> structure_units(const Encoding& e, const Formula& f) {
  struct Item {
    Op op;
    std::size_t prop;
    std::size_t left;
  };
  std::vector<Item> order;
  std::function<std::size_t(const Formula&)> visit = [&](const Formula& g) -> std::size_t {
    std::size_t left = 0;
    if (pltl::arity(g.op()) >= 1) left = visit(g.left());
    if (pltl::arity(g.op()) == 2) visit(g.right());
    order.push_back({g.op(), g.prop_index(), left});
    return order.size() - 1;
  };
  visit(f);
  if (order.size() != e.size) throw ValidationError("formula size differs from the encoding size");
  std::vector<Lit> units;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& it = order[i];
    std::optional<std::size_t> k;
    for (std::size_t c = 0; c < e.labels.size(); ++c) {
      if (e.labels[c].op == it.op && (it.op != Op::Prop || e.labels[c].prop == it.prop)) k = c;
    }
    if (!k) throw ValidationError("formula uses a label outside the encoding's menu");
    units.push_back(e.label_var[i][*k]);
    if (pltl::arity(it.op) == 2) units.push_back(e.left_var[i][it.left]);
  }
  return units;
}

SynthesisResult synthesize_min(const SynthesisProblem& p) {
  check_sample(p);
  SynthesisResult result;
  // The empty sample is satisfied by anything; answer with the canonical
  // smallest formula instead of whatever the solver happens to pick.
  if (p.positive.empty() && p.negative.empty() && p.max_size >= 1) {
    result.status = Status::Found;
    result.formula = Formula::truth();
    return result;
  }
  const auto deadline = deadline_of(p);
  for (std::size_t size = 1; size <= p.max_size; ++size) {
    const auto e = encode(p, size);
    sat::Solver solver(e.cnf);
    solver.reserve_vars(e.cnf.variables);
    solver.set_deadline(deadline);
    const auto r = solver.solve();
    if (r == sat::Result::Unknown) {
      result.status = Status::TimedOut;
      return result;
    }
    if (r == sat::Result::Sat) {
      result.status = Status::Found;
      result.formula = decode(solver.model(), e, p);
      return result;
    }
    result.refuted_sizes.push_back(size);
  }
  result.status = Status::BoundExceeded;
  return result;
}

CandidateList synthesize_candidates(const SynthesisProblem& p, std::size_t k) {
  if (k == 0) throw ValidationError("candidate count must be at least 1");
  check_sample(p);
  CandidateList out;
  if (p.positive.empty() && p.negative.empty()) out.formulas.push_back(Formula::truth());
  const auto deadline = deadline_of(p);
  for (std::size_t size = 1; size <= p.max_size && out.formulas.size() < k; ++size) {
    const auto e = encode(p, size);
    sat::Solver solver(e.cnf);
    solver.reserve_vars(e.cnf.variables);
    solver.set_deadline(deadline);
    while (out.formulas.size() < k) {
      const auto r = solver.solve();
      if (r == sat::Result::Unknown) {
        out.timed_out = true;
        return out;
      }
      if (r == sat::Result::Unsat) break;
      const auto model = solver.model();
      auto f = decode(model, e, p);
      if (std::find(out.formulas.begin(), out.formulas.end(), f) == out.formulas.end()) {
        out.formulas.push_back(std::move(f));
      }
      std::vector<Lit> block;
      for (auto v : e.structure(model)) block.push_back(-v);
      if (!solver.add_clause(block)) break;
    }
  }
  return out;
}

Confusion score(const Formula& f, const std::vector<Trace>& benign, const std::vector<Trace>& attack,
                Semantics semantics) {
  Confusion c;
  for (const auto& t : benign) c.record(false, !satisfied(f, t, semantics));
  for (const auto& t : attack) c.record(true, !satisfied(f, t, semantics));
  return c;
}

std::vector<ScoredCandidate> score_all(const std::vector<Formula>& formulas, const std::vector<Trace>& benign,
                                       const std::vector<Trace>& attack, Semantics semantics) {
  std::vector<ScoredCandidate> out;
  for (const auto& f : formulas) out.push_back({f, pltl::size(f), score(f, benign, attack, semantics)});
  return out;
}

std::size_t select_best(const std::vector<ScoredCandidate>& candidates) {
  if (candidates.empty()) throw ValidationError("no candidates to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double a = candidates[i].holdout.f1();
    const double b = candidates[best].holdout.f1();
    if (a > b || (a == b && candidates[i].size < candidates[best].size)) best = i;
  }
  return best;
}

HoldoutSplit split_holdout(const std::vector<Trace>& positive, const std::vector<Trace>& negative,
                           double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ValidationError("holdout fraction must be in [0, 1)");
  }
  Rng rng(seed);
  HoldoutSplit out;
  auto split = [&](const std::vector<Trace>& all, std::vector<Trace>& train, std::vector<Trace>& hold) {
    const std::size_t n = all.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    auto h = static_cast<std::size_t>(static_cast<double>(n) * holdout_fraction + 0.5);
    if (n > 0 && h >= n) h = n - 1;
    std::vector<std::size_t> held(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h));
    std::vector<std::size_t> kept(idx.begin() + static_cast<std::ptrdiff_t>(h), idx.end());
    std::sort(held.begin(), held.end());
    std::sort(kept.begin(), kept.end());
    for (auto i : kept) train.push_back(all[i]);
    for (auto i : held) hold.push_back(all[i]);
  };
  split(positive, out.train_positive, out.holdout_positive);
  split(negative, out.train_negative, out.holdout_negative);
  return out;
}

SignatureReport synthesize_signature(const SynthesisProblem& p, const SignatureOptions& options) {
  const auto split = split_holdout(p.positive, p.negative, options.holdout, options.seed);
  SynthesisProblem train = p;
  train.positive = split.train_positive;
  train.negative = split.train_negative;
  const auto found = synthesize_candidates(train, options.candidates);
  SignatureReport report;
  report.timed_out = found.timed_out;
  report.candidates = score_all(found.formulas, split.holdout_positive, split.holdout_negative, p.semantics);
  if (!report.candidates.empty()) report.best = select_best(report.candidates);
  return report;
}

}  // namespace phoenix::synth
