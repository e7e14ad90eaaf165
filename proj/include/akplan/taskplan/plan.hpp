// SPDX-License-Identifier: Apache-2.0
//
// Grounding and plan search for the parsed task layer.  Atoms are the full
// typed instantiation of every declared predicate (so counts are easy to
// derive by hand), states are bitsets over those atoms, and search is
// breadth-first (optimal for unit costs) or greedy best-first on the
// additive relaxation heuristic.  Plans are validated by an independent
// substitution-based simulator that never touches the grounding tables.

#pragma once

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "akplan/common.hpp"
#include "akplan/taskplan/pddl.hpp"

namespace akplan {

struct GroundAtom {
  std::string pred;
  std::vector<std::string> args;

  [[nodiscard]] std::string text() const {
    std::string s = pred;
    for (const std::string& a : args) {
      s += ' ';
      s += a;
    }
    return s;
  }
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<int> pre_pos, pre_neg, add, del;  // atom ids

  [[nodiscard]] std::string text() const {
    std::string s = "(" + name;
    for (const std::string& a : args) {
      s += ' ';
      s += a;
    }
    return s + ")";
  }
};

// Fully grounded task: atom table, action table, init and goal atom ids.
struct GroundTask {
  std::vector<GroundAtom> atoms;
  std::vector<GroundAction> actions;
  std::vector<int> init;  // sorted, unique
  std::vector<int> goal;  // sorted, unique
};

namespace detail {

// Enumerates all type-compatible object tuples for `types`, in object
// declaration order, invoking fn(tuple) for each.
template <typename Fn>
void for_each_binding(const pddl::Domain& domain,
                      const std::vector<std::pair<std::string, std::string>>&
                          objects,
                      const std::vector<std::string>& types, Fn&& fn) {
  std::vector<std::string> tuple(types.size());
  const auto recurse = [&](auto&& self, std::size_t slot) -> void {
    if (slot == types.size()) {
      fn(tuple);
      return;
    }
    for (const auto& [name, type] : objects) {
      if (!domain.is_subtype(type, types[slot])) continue;
      tuple[slot] = name;
      self(self, slot + 1);
    }
  };
  recurse(recurse, 0);
}

}  // namespace detail

// Grounds the parsed task.  The atom table is the complete typed
// instantiation of every predicate over the declared objects, ordered by
// predicate declaration then object declaration; ground actions enumerate
// every type-compatible parameter binding.
inline GroundTask ground(const pddl::Domain& domain,
                         const pddl::Problem& problem) {
  GroundTask task;
  std::unordered_map<std::string, int> atom_id;
  for (const std::string& pred : domain.predicate_order) {
    const std::vector<std::string>& types = domain.predicates.at(pred);
    detail::for_each_binding(
        domain, problem.objects, types, [&](const std::vector<std::string>& t) {
          GroundAtom a{pred, t};
          atom_id.emplace(a.text(), static_cast<int>(task.atoms.size()));
          task.atoms.push_back(std::move(a));
        });
  }

  const auto lookup = [&](const pddl::Atom& atom,
                          const std::unordered_map<std::string, std::string>&
                              binding) {
    GroundAtom g;
    g.pred = atom.pred;
    for (const std::string& arg : atom.args) {
      const auto it = binding.find(arg);
      g.args.push_back(it == binding.end() ? arg : it->second);
    }
    const auto id = atom_id.find(g.text());
    require(id != atom_id.end(), ErrorKind::kInvariant,
            "grounding produced unknown atom: " + g.text());
    return id->second;
  };

  for (const pddl::ActionSchema& schema : domain.actions) {
    std::vector<std::string> types;
    types.reserve(schema.params.size());
    for (const auto& [v, t] : schema.params) types.push_back(t);
    detail::for_each_binding(
        domain, problem.objects, types,
        [&](const std::vector<std::string>& tuple) {
          std::unordered_map<std::string, std::string> binding;
          for (std::size_t i = 0; i < tuple.size(); ++i) {
            binding[schema.params[i].first] = tuple[i];
          }
          GroundAction ga;
          ga.name = schema.name;
          ga.args = tuple;
          for (const pddl::Literal& l : schema.preconditions) {
            (l.positive ? ga.pre_pos : ga.pre_neg)
                .push_back(lookup(l.atom, binding));
          }
          for (const pddl::Literal& l : schema.effects) {
            (l.positive ? ga.add : ga.del).push_back(lookup(l.atom, binding));
          }
          task.actions.push_back(std::move(ga));
        });
  }

  const std::unordered_map<std::string, std::string> empty_binding;
  for (const pddl::Atom& a : problem.init) {
    task.init.push_back(lookup(a, empty_binding));
  }
  for (const pddl::Atom& a : problem.goal) {
    task.goal.push_back(lookup(a, empty_binding));
  }
  std::sort(task.init.begin(), task.init.end());
  task.init.erase(std::unique(task.init.begin(), task.init.end()),
                  task.init.end());
  std::sort(task.goal.begin(), task.goal.end());
  task.goal.erase(std::unique(task.goal.begin(), task.goal.end()),
                  task.goal.end());
  return task;
}

enum class PlanOutcome { kSolved, kUnsolvable, kBudgetExceeded };

inline const char* to_string(PlanOutcome o) {
  switch (o) {
    case PlanOutcome::kSolved: return "solved";
    case PlanOutcome::kUnsolvable: return "unsolvable";
    case PlanOutcome::kBudgetExceeded: return "budget-exceeded";
  }
  return "unknown";
}

enum class SearchKind { kBfs, kBestFirst };

struct SearchStats {
  long nodes_generated{0};
  long nodes_expanded{0};
  int max_depth{0};  // deepest expanded node
  Scalar seconds{0};
};

struct PlanStep {
  std::string name;
  std::vector<std::string> args;
};

struct TaskPlan {
  std::vector<PlanStep> steps;
};

struct PlanResult {
  PlanOutcome outcome{PlanOutcome::kUnsolvable};
  TaskPlan plan;
  SearchStats stats;
};

namespace detail {

using StateBits = std::vector<std::uint64_t>;

inline StateBits make_state(int natoms, const std::vector<int>& atoms) {
  StateBits s(static_cast<std::size_t>((natoms + 63) / 64), 0);
  for (const int a : atoms) s[a / 64] |= std::uint64_t{1} << (a % 64);
  return s;
}

inline bool test_bit(const StateBits& s, int a) {
  return (s[a / 64] >> (a % 64)) & 1u;
}

inline bool applicable(const StateBits& s, const GroundAction& ga) {
  for (const int a : ga.pre_pos) {
    if (!test_bit(s, a)) return false;
  }
  for (const int a : ga.pre_neg) {
    if (test_bit(s, a)) return false;
  }
  return true;
}

inline StateBits apply(StateBits s, const GroundAction& ga) {
  for (const int a : ga.del) s[a / 64] &= ~(std::uint64_t{1} << (a % 64));
  for (const int a : ga.add) s[a / 64] |= std::uint64_t{1} << (a % 64);
  return s;
}

inline bool subset(const std::vector<int>& atoms, const StateBits& s) {
  for (const int a : atoms) {
    if (!test_bit(s, a)) return false;
  }
  return true;
}

inline std::uint64_t hash_state(const StateBits& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const std::uint64_t block : s) {
    h ^= block;
    h *= 1099511628211ull;
  }
  return h;
}

// Additive relaxation heuristic: cheapest achievement cost per atom under
// delete-free semantics (negative preconditions dropped), summed over the
// goal.  Returns a large sentinel when some goal atom is unreachable.
inline long h_add(const GroundTask& task, const StateBits& s) {
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  std::vector<long> cost(task.atoms.size(), kInf);
  for (std::size_t a = 0; a < task.atoms.size(); ++a) {
    if (test_bit(s, static_cast<int>(a))) cost[a] = 0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const GroundAction& ga : task.actions) {
      long c = 1;
      bool reachable = true;
      for (const int p : ga.pre_pos) {
        if (cost[p] >= kInf) {
          reachable = false;
          break;
        }
        c += cost[p];
      }
      if (!reachable) continue;
      for (const int a : ga.add) {
        if (c < cost[a]) {
          cost[a] = c;
          changed = true;
        }
      }
    }
  }
  long h = 0;
  for (const int g : task.goal) {
    if (cost[g] >= kInf) return kInf;
    h += cost[g];
  }
  return h;
}

}  // namespace detail

// Searches the grounded task.  kBfs explores breadth-first and returns a
// shortest plan; kBestFirst expands greedily by the additive-relaxation
// heuristic.  Both test goals at node generation and deduplicate states
// exactly.  node_budget bounds generated nodes; exceeding it reports
// kBudgetExceeded.
inline PlanResult plan_task(const GroundTask& task, SearchKind kind,
                            long node_budget = 5000000) {
  const auto t0 = std::chrono::steady_clock::now();
  const int natoms = static_cast<int>(task.atoms.size());

  struct Node {
    detail::StateBits state;
    int parent;
    int action;
    int depth;
  };
  std::vector<Node> arena;
  std::unordered_map<std::uint64_t, std::vector<int>> seen;

  const auto known = [&](const detail::StateBits& s) {
    const auto it = seen.find(detail::hash_state(s));
    if (it == seen.end()) return false;
    for (const int idx : it->second) {
      if (arena[idx].state == s) return true;
    }
    return false;
  };
  const auto remember = [&](const detail::StateBits& s, int parent,
                            int action, int depth) {
    arena.push_back({s, parent, action, depth});
    seen[detail::hash_state(s)].push_back(
        static_cast<int>(arena.size()) - 1);
    return static_cast<int>(arena.size()) - 1;
  };

  PlanResult result;
  const auto finish = [&](PlanOutcome outcome, int goal_node) {
    result.outcome = outcome;
    if (outcome == PlanOutcome::kSolved) {
      std::vector<int> chain;
      for (int n = goal_node; arena[n].parent >= 0; n = arena[n].parent) {
        chain.push_back(arena[n].action);
      }
      std::reverse(chain.begin(), chain.end());
      for (const int a : chain) {
        result.plan.steps.push_back(
            {task.actions[a].name, task.actions[a].args});
      }
    }
    result.stats.seconds =
        std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
  };

  const detail::StateBits init = detail::make_state(natoms, task.init);
  result.stats.nodes_generated = 1;
  const int root = remember(init, -1, -1, 0);
  if (detail::subset(task.goal, init)) {
    return finish(PlanOutcome::kSolved, root);
  }

  // Frontier: FIFO for BFS; (heuristic, insertion counter) min-heap for
  // best-first, so ties resolve in generation order.
  std::deque<int> fifo;
  using Entry = std::pair<std::pair<long, long>, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  long counter = 0;
  if (kind == SearchKind::kBfs) {
    fifo.push_back(root);
  } else {
    heap.push({{detail::h_add(task, init), counter++}, root});
  }

  while (kind == SearchKind::kBfs ? !fifo.empty() : !heap.empty()) {
    int idx;
    if (kind == SearchKind::kBfs) {
      idx = fifo.front();
      fifo.pop_front();
    } else {
      idx = heap.top().second;
      heap.pop();
    }
    ++result.stats.nodes_expanded;
    result.stats.max_depth = std::max(result.stats.max_depth,
                                      arena[idx].depth);
    for (int a = 0; a < static_cast<int>(task.actions.size()); ++a) {
      if (!detail::applicable(arena[idx].state, task.actions[a])) continue;
      detail::StateBits next = detail::apply(arena[idx].state,
                                             task.actions[a]);
      if (known(next)) continue;
      if (++result.stats.nodes_generated > node_budget) {
        return finish(PlanOutcome::kBudgetExceeded, -1);
      }
      const bool is_goal = detail::subset(task.goal, next);
      const int child =
          remember(std::move(next), idx, a, arena[idx].depth + 1);
      if (is_goal) {
        result.stats.max_depth =
            std::max(result.stats.max_depth, arena[child].depth);
        return finish(PlanOutcome::kSolved, child);
      }
      if (kind == SearchKind::kBfs) {
        fifo.push_back(child);
      } else {
        const long h = detail::h_add(task, arena[child].state);
        if (h >= std::numeric_limits<long>::max() / 4) continue;  // dead end
        heap.push({{h, counter++}, child});
      }
    }
  }
  return finish(PlanOutcome::kUnsolvable, -1);
}

struct ValidationResult {
  bool ok{true};
  // Index of the first violated step; steps.size() means the goal check
  // failed after a precondition-clean simulation.
  std::size_t failed_step{0};
  std::string reason;
};

// Independent plan validation: re-binds each step's schema by direct
// substitution over string atoms and simulates effects on a set state.
// Shares nothing with ground()/plan_task() beyond the parsed AST.
inline ValidationResult validate_plan(const pddl::Domain& domain,
                                      const pddl::Problem& problem,
                                      const TaskPlan& plan) {
  std::set<std::string> state;
  for (const pddl::Atom& a : problem.init) {
    state.insert(GroundAtom{a.pred, a.args}.text());
  }

  const auto substitute = [](const pddl::Atom& atom,
                             const std::unordered_map<std::string,
                                                      std::string>& binding) {
    GroundAtom g;
    g.pred = atom.pred;
    for (const std::string& arg : atom.args) {
      const auto it = binding.find(arg);
      g.args.push_back(it == binding.end() ? arg : it->second);
    }
    return g.text();
  };

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    const pddl::ActionSchema* schema = nullptr;
    for (const pddl::ActionSchema& s : domain.actions) {
      if (s.name == step.name) {
        schema = &s;
        break;
      }
    }
    if (schema == nullptr) {
      return {false, i, "unknown action '" + step.name + "'"};
    }
    if (schema->params.size() != step.args.size()) {
      return {false, i, "action '" + step.name + "' arity mismatch"};
    }
    std::unordered_map<std::string, std::string> binding;
    for (std::size_t p = 0; p < step.args.size(); ++p) {
      binding[schema->params[p].first] = step.args[p];
    }
    for (const pddl::Literal& l : schema->preconditions) {
      const std::string atom = substitute(l.atom, binding);
      const bool holds = state.count(atom) > 0;
      if (holds != l.positive) {
        return {false, i,
                std::string("precondition ") + (l.positive ? "(" : "(not (") +
                    atom + (l.positive ? ")" : "))") + " not satisfied"};
      }
    }
    for (const pddl::Literal& l : schema->effects) {
      const std::string atom = substitute(l.atom, binding);
      if (l.positive) {
        state.insert(atom);
      } else {
        state.erase(atom);
      }
    }
  }

  const std::unordered_map<std::string, std::string> empty;
  for (const pddl::Atom& g : problem.goal) {
    const std::string atom = substitute(g, empty);
    if (!state.count(atom)) {
      return {false, plan.steps.size(), "goal atom (" + atom + ") not reached"};
    }
  }
  return {};
}

// Renders a plan result in the exchange format: one grounded action per
// line as (name arg1 arg2 ...), then machine-readable key=value statistics.
inline std::string format_plan(const PlanResult& result) {
  std::ostringstream out;
  for (const PlanStep& s : result.plan.steps) {
    out << '(' << s.name;
    for (const std::string& a : s.args) out << ' ' << a;
    out << ")\n";
  }
  out << "outcome=" << to_string(result.outcome) << '\n';
  out << "nodes=" << result.stats.nodes_generated << '\n';
  out << "depth=" << result.stats.max_depth << '\n';
  out << "length=" << result.plan.steps.size() << '\n';
  out << "seconds=" << result.stats.seconds << '\n';
  return out.str();
}

}  // namespace akplan
