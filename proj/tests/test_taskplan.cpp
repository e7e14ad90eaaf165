// SPDX-License-Identifier: Apache-2.0
//
// Task-layer tests: parsing diagnostics, hand-counted grounding sizes, plan
// search against an independent brute-force model of the rearrangement
// task, substitution-based plan validation, and the whole-robot vs split
// base/arm search-effort comparison.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "akplan/taskplan/plan.hpp"

namespace akplan {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in.good()) << path;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data_path(const std::string& rel) {
  return std::string(AKPLAN_DATA_DIR) + "/" + rel;
}

// Rearrangement instance: objects o1..om start on tables t1..tm (t0 free)
// and must end up in reversed order, one object per table.
std::string rearrangement_problem(const std::string& domain_name, int m) {
  std::ostringstream p;
  p << "(define (problem rearrange-" << m << ")\n  (:domain " << domain_name
    << ")\n  (:objects";
  for (int i = 1; i <= m; ++i) p << " o" << i;
  p << " - item";
  for (int t = 0; t <= m; ++t) p << " t" << t;
  p << " - site)\n  (:init (handempty)";
  if (domain_name == "split") p << " (at-base t0) (arm-stowed)";
  for (int i = 1; i <= m; ++i) {
    p << " (on o" << i << " t" << i << ") (occupied t" << i << ")";
  }
  p << ")\n  (:goal (and";
  for (int i = 1; i <= m; ++i) p << " (on o" << i << " t" << (m + 1 - i) << ")";
  p << ")))";
  return p.str();
}

// Independent brute-force model of the rearrangement semantics: object k
// (0-based) sits on table pos[k] in 0..m or is held (-1, at most one).
// Picking and placing are one action each.  Returns the optimal action
// count found by exhaustive breadth-first enumeration.
int oracle_rearrangement_optimal(int m) {
  std::vector<int> start(m);
  for (int k = 0; k < m; ++k) start[k] = k + 1;
  const auto is_goal = [&](const std::vector<int>& pos) {
    for (int k = 0; k < m; ++k) {
      if (pos[k] != m - k) return false;
    }
    return true;
  };

  std::map<std::vector<int>, int> depth{{start, 0}};
  std::vector<std::vector<int>> frontier{start};
  if (is_goal(start)) return 0;
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next_frontier;
    for (const std::vector<int>& pos : frontier) {
      const int d = depth.at(pos);
      int held = -1;
      std::vector<bool> used(m + 1, false);
      for (int k = 0; k < m; ++k) {
        if (pos[k] < 0) {
          held = k;
        } else {
          used[pos[k]] = true;
        }
      }
      std::vector<std::vector<int>> successors;
      if (held < 0) {
        for (int k = 0; k < m; ++k) {
          std::vector<int> nxt = pos;
          nxt[k] = -1;
          successors.push_back(std::move(nxt));
        }
      } else {
        for (int t = 0; t <= m; ++t) {
          if (used[t]) continue;
          std::vector<int> nxt = pos;
          nxt[held] = t;
          successors.push_back(std::move(nxt));
        }
      }
      for (std::vector<int>& nxt : successors) {
        if (depth.count(nxt)) continue;
        if (is_goal(nxt)) return d + 1;
        depth.emplace(nxt, d + 1);
        next_frontier.push_back(std::move(nxt));
      }
    }
    frontier = std::move(next_frontier);
  }
  return -1;
}

constexpr const char* kMiniDomain = R"((define (domain mini)
  (:requirements :strips :typing)
  (:types site)
  (:predicates (at-akr ?s - site))
  (:action goto-akr
    :parameters (?from - site ?to - site)
    :precondition (and (at-akr ?from))
    :effect (and (not (at-akr ?from)) (at-akr ?to)))))";

// ---------------------------------------------------------------------------
// Parsing.

TEST(Parse, MinimalGotoDomainPlansLengthOne) {
  const std::string problem = R"((define (problem hop)
    (:domain mini)
    (:objects t0 t1 - site)
    (:init (at-akr t0))
    (:goal (at-akr t1))))";
  const pddl::ParsedTask task = pddl::parse(kMiniDomain, problem);
  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBfs);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  ASSERT_EQ(r.plan.steps.size(), 1u);
  EXPECT_EQ(r.plan.steps[0].name, "goto-akr");
  EXPECT_TRUE(validate_plan(task.domain, task.problem, r.plan).ok);
}

TEST(Parse, MalformedInputReportsLineAndColumn) {
  // Stray ')' on line 4, column 1.
  const std::string stray = "(define (domain d)\n  (:requirements :strips)\n"
                            "  (:predicates (p))\n)\n)";
  try {
    pddl::parse_domain(stray);
    FAIL() << "expected syntax error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("5:1"), std::string::npos)
        << e.what();
    EXPECT_NE(std::string(e.what()).find("syntax"), std::string::npos);
  }

  // Unclosed '(' opened on line 2, column 3.
  const std::string unclosed = "(define (domain d)\n  (:predicates (p)";
  try {
    pddl::parse_domain(unclosed);
    FAIL() << "expected syntax error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unclosed"), std::string::npos)
        << e.what();
  }
}

TEST(Parse, UnsupportedFeaturesRejected) {
  EXPECT_THROW(
      pddl::parse_domain("(define (domain d) (:requirements :adl))"), Error);
  EXPECT_THROW(
      pddl::parse_domain("(define (domain d) (:derived (p) (q)))"), Error);

  // Disjunctive precondition.
  const std::string disj = R"((define (domain d)
    (:requirements :strips)
    (:predicates (p) (q))
    (:action a :parameters () :precondition (or (p) (q)) :effect (p))))";
  try {
    pddl::parse_domain(disj);
    FAIL() << "expected rejection of 'or'";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported connective"),
              std::string::npos);
  }

  // Negative goal literal.
  const std::string domain = R"((define (domain d)
    (:requirements :strips :negative-preconditions)
    (:predicates (p))
    (:action a :parameters () :precondition (and) :effect (p))))";
  const std::string neg_goal = R"((define (problem x) (:domain d)
    (:init) (:goal (not (p)))))";
  try {
    pddl::parse(domain, neg_goal);
    FAIL() << "expected rejection of negative goal";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("negative literals"),
              std::string::npos);
  }
}

TEST(Parse, SemanticErrorsCarryDetail) {
  const std::string domain = read_file(data_path("pddl/akr-domain.pddl"));

  const auto expect_error = [&](const std::string& problem,
                                const std::string& needle) {
    try {
      pddl::parse(domain, problem);
      FAIL() << "expected error containing: " << needle;
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
          << e.what();
    }
  };

  expect_error(R"((define (problem p) (:domain akr)
                   (:objects o1 - item t1 - site)
                   (:init (on o1)) (:goal (on o1 t1))))",
               "arity mismatch");
  expect_error(R"((define (problem p) (:domain akr)
                   (:objects o1 - item t1 - site)
                   (:init (on o2 t1)) (:goal (on o1 t1))))",
               "undeclared object");
  expect_error(R"((define (problem p) (:domain akr)
                   (:objects o1 - gizmo)
                   (:init) (:goal (handempty))))",
               "undeclared type");
  expect_error(R"((define (problem p) (:domain akr)
                   (:objects o1 - item t1 - site)
                   (:init (on t1 o1)) (:goal (handempty))))",
               "incompatible");
}

// ---------------------------------------------------------------------------
// Grounding.

TEST(Ground, RearrangementAtomAndActionCountsMatchHandCount) {
  // m = 2: items {o1, o2}, sites {t0, t1, t2}.
  //   at-akr: 3   on: 2*3 = 6   occupied: 3   holding: 2   handempty: 1
  //   -> 15 ground atoms.
  //   goto-akr: 3*3 = 9   pick-akr: 2*3 = 6   place-akr: 2*3 = 6
  //   -> 21 ground actions.
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")),
                  rearrangement_problem("akr", 2));
  const GroundTask gt = ground(task.domain, task.problem);
  EXPECT_EQ(gt.atoms.size(), 15u);
  EXPECT_EQ(gt.actions.size(), 21u);
  EXPECT_EQ(gt.init.size(), 5u);  // handempty + 2 on + 2 occupied
  EXPECT_EQ(gt.goal.size(), 2u);
}

// ---------------------------------------------------------------------------
// Planning.

TEST(Plan, InitEqualsGoalYieldsEmptyPlan) {
  const std::string problem = R"((define (problem already-done)
    (:domain akr)
    (:objects o1 - item t0 t1 - site)
    (:init (handempty) (on o1 t1) (occupied t1))
    (:goal (on o1 t1))))";
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")), problem);
  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBfs);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  EXPECT_TRUE(r.plan.steps.empty());
  EXPECT_EQ(r.stats.nodes_generated, 1);
}

TEST(Plan, RearrangementSwapMatchesBruteForceOracle) {
  const int oracle = oracle_rearrangement_optimal(2);
  ASSERT_EQ(oracle, 6);  // swap via the free table: three moves, two actions each

  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")),
                  rearrangement_problem("akr", 2));
  const GroundTask gt = ground(task.domain, task.problem);

  const PlanResult bfs = plan_task(gt, SearchKind::kBfs);
  ASSERT_EQ(bfs.outcome, PlanOutcome::kSolved);
  EXPECT_EQ(static_cast<int>(bfs.plan.steps.size()), oracle);
  EXPECT_TRUE(validate_plan(task.domain, task.problem, bfs.plan).ok);

  const PlanResult greedy = plan_task(gt, SearchKind::kBestFirst);
  ASSERT_EQ(greedy.outcome, PlanOutcome::kSolved);
  EXPECT_TRUE(validate_plan(task.domain, task.problem, greedy.plan).ok);
  EXPECT_LE(greedy.plan.steps.size(), 2u * bfs.plan.steps.size());
}

TEST(Plan, RearrangementFourObjectsMatchesBruteForceOracle) {
  const int oracle = oracle_rearrangement_optimal(4);
  ASSERT_EQ(oracle, 12);  // two disjoint swaps, each costing six actions

  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")),
                  rearrangement_problem("akr", 4));
  const PlanResult bfs = plan_task(ground(task.domain, task.problem),
                                   SearchKind::kBfs);
  ASSERT_EQ(bfs.outcome, PlanOutcome::kSolved);
  EXPECT_EQ(static_cast<int>(bfs.plan.steps.size()), oracle);
  EXPECT_TRUE(validate_plan(task.domain, task.problem, bfs.plan).ok);
}

TEST(Plan, ValidatorFlagsSwappedSteps) {
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")),
                  rearrangement_problem("akr", 2));
  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBfs);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  ASSERT_GE(r.plan.steps.size(), 2u);

  TaskPlan swapped = r.plan;
  std::swap(swapped.steps[0], swapped.steps[1]);
  const ValidationResult v = validate_plan(task.domain, task.problem, swapped);
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.failed_step, 0u);  // place-akr now leads without holding
  EXPECT_NE(v.reason.find("holding"), std::string::npos) << v.reason;
}

TEST(Plan, FourStepRelocationPlanValidates) {
  // A chair blocks a doorway; the robot stows it in the corner, then grasps
  // the door and drives it to its open state.  Manual precondition trace:
  //   pick-akr chair bedroom : (on chair bedroom), (handempty)   -> holding
  //   place-akr chair corner : (holding chair), corner free      -> handempty
  //   pick-akr door door-closed : (on door door-closed), (handempty)
  //   place-akr door door-open  : (holding door), door-open free
  const std::string problem = R"((define (problem clear-then-open)
    (:domain akr)
    (:objects chair door - item bedroom corner door-closed door-open - site)
    (:init (handempty)
           (on chair bedroom) (occupied bedroom)
           (on door door-closed) (occupied door-closed))
    (:goal (and (on chair corner) (on door door-open)))))";
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")), problem);

  TaskPlan manual;
  manual.steps = {{"pick-akr", {"chair", "bedroom"}},
                  {"place-akr", {"chair", "corner"}},
                  {"pick-akr", {"door", "door-closed"}},
                  {"place-akr", {"door", "door-open"}}};
  EXPECT_TRUE(validate_plan(task.domain, task.problem, manual).ok);

  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBfs);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  EXPECT_EQ(r.plan.steps.size(), 4u);
}

TEST(Plan, TissueRestockFourteenActionPlanValidates) {
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")),
                  read_file(data_path("pddl/tissue-problem.pddl")));

  // Hand-written 14-action plan (seven pick/place pairs); target sites free
  // up exactly in this order.
  TaskPlan manual;
  manual.steps = {{"pick-akr", {"chair", "chair-start"}},
                  {"place-akr", {"chair", "corner"}},
                  {"pick-akr", {"trash-lid", "trash-mouth"}},
                  {"place-akr", {"trash-lid", "lid-rest"}},
                  {"pick-akr", {"empty-box", "stand"}},
                  {"place-akr", {"empty-box", "trash-mouth"}},
                  {"pick-akr", {"cupboard-door", "cup-mouth"}},
                  {"place-akr", {"cupboard-door", "door-rest"}},
                  {"pick-akr", {"new-box", "shelf"}},
                  {"place-akr", {"new-box", "stand"}},
                  {"pick-akr", {"bottle", "table"}},
                  {"place-akr", {"bottle", "shelf"}},
                  {"pick-akr", {"remote", "sofa"}},
                  {"place-akr", {"remote", "table"}}};
  ASSERT_EQ(manual.steps.size(), 14u);
  EXPECT_TRUE(validate_plan(task.domain, task.problem, manual).ok);

  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBestFirst);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  EXPECT_TRUE(validate_plan(task.domain, task.problem, r.plan).ok);
  EXPECT_GE(r.plan.steps.size(), 14u);  // seven relocations are all forced
  EXPECT_LE(r.plan.steps.size(), 28u);
}

TEST(Plan, WholeRobotDomainSearchesLessThanSplitDomain) {
  const std::string akr_domain = read_file(data_path("pddl/akr-domain.pddl"));
  const std::string split_domain =
      read_file(data_path("pddl/split-domain.pddl"));

  long prev_node_gap = 0;
  int prev_depth_gap = 0;
  for (const int m : {2, 4}) {
    const pddl::ParsedTask akr =
        pddl::parse(akr_domain, rearrangement_problem("akr", m));
    const pddl::ParsedTask split =
        pddl::parse(split_domain, rearrangement_problem("split", m));

    const PlanResult ra = plan_task(ground(akr.domain, akr.problem),
                                    SearchKind::kBestFirst);
    const PlanResult rs = plan_task(ground(split.domain, split.problem),
                                    SearchKind::kBestFirst);
    ASSERT_EQ(ra.outcome, PlanOutcome::kSolved) << m;
    ASSERT_EQ(rs.outcome, PlanOutcome::kSolved) << m;
    EXPECT_TRUE(validate_plan(akr.domain, akr.problem, ra.plan).ok);
    EXPECT_TRUE(validate_plan(split.domain, split.problem, rs.plan).ok);

    EXPECT_LT(ra.stats.nodes_generated, rs.stats.nodes_generated) << m;
    EXPECT_LT(ra.stats.max_depth, rs.stats.max_depth) << m;

    const long node_gap =
        rs.stats.nodes_generated - ra.stats.nodes_generated;
    const int depth_gap = rs.stats.max_depth - ra.stats.max_depth;
    EXPECT_GT(node_gap, prev_node_gap) << m;
    EXPECT_GT(depth_gap, prev_depth_gap) << m;
    prev_node_gap = node_gap;
    prev_depth_gap = depth_gap;
  }
}

TEST(Plan, BudgetExceededReported) {
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/split-domain.pddl")),
                  rearrangement_problem("split", 4));
  const PlanResult r =
      plan_task(ground(task.domain, task.problem), SearchKind::kBfs, 100);
  EXPECT_EQ(r.outcome, PlanOutcome::kBudgetExceeded);
  EXPECT_TRUE(r.plan.steps.empty());
}

TEST(Plan, UnsolvableReported) {
  // Two objects cannot share one table: occupancy makes this goal
  // unreachable, and the state space is small enough to exhaust.
  const std::string problem = R"((define (problem impossible)
    (:domain akr)
    (:objects o1 o2 - item t0 t1 t2 - site)
    (:init (handempty) (on o1 t1) (occupied t1) (on o2 t2) (occupied t2))
    (:goal (and (on o1 t1) (on o2 t1)))))";
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")), problem);
  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBfs);
  EXPECT_EQ(r.outcome, PlanOutcome::kUnsolvable);
  EXPECT_NE(format_plan(r).find("outcome=unsolvable"), std::string::npos);
}

TEST(Plan, FormatPlanHasActionLinesAndStatsFooter) {
  const pddl::ParsedTask task =
      pddl::parse(read_file(data_path("pddl/akr-domain.pddl")),
                  rearrangement_problem("akr", 2));
  const PlanResult r = plan_task(ground(task.domain, task.problem),
                                 SearchKind::kBfs);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  const std::string text = format_plan(r);

  std::istringstream lines(text);
  std::string line;
  std::size_t action_lines = 0;
  bool saw_nodes = false, saw_depth = false, saw_seconds = false;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.front() == '(') {
      EXPECT_EQ(line.back(), ')') << line;
      ++action_lines;
    }
    saw_nodes = saw_nodes || line.rfind("nodes=", 0) == 0;
    saw_depth = saw_depth || line.rfind("depth=", 0) == 0;
    saw_seconds = saw_seconds || line.rfind("seconds=", 0) == 0;
  }
  EXPECT_EQ(action_lines, r.plan.steps.size());
  EXPECT_TRUE(saw_nodes);
  EXPECT_TRUE(saw_depth);
  EXPECT_TRUE(saw_seconds);
  EXPECT_NE(text.find("outcome=solved"), std::string::npos);
  EXPECT_NE(text.find("length=6"), std::string::npos);
}

}  // namespace
}  // namespace akplan
