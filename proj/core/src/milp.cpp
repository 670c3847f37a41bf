// Copyright 2026 The dsmopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "dsmopt/errors.hpp"
#include "dsmopt/solver.hpp"
#include "lp_engine.hpp"

namespace dsmopt {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kNodeBudgetExceeded: return "NodeBudgetExceeded";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  LpSolution lp;
  std::size_t serial = 0;
};

// Most fractional binary, lowest index on ties; npos when integral.
std::size_t pick_branch(const std::vector<std::size_t>& binaries, const std::vector<double>& x,
                        double int_tol) {
  std::size_t best = static_cast<std::size_t>(-1);
  double best_frac = int_tol;
  for (std::size_t j : binaries) {
    const double f = std::abs(x[j] - std::round(x[j]));
    if (f > best_frac) {
      best_frac = f;
      best = j;
    }
  }
  return best;
}

bool ties(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

// Rounds binaries and re-solves the remaining LP so continuous values match an
// exactly integral assignment.
std::vector<double> polish(const detail::LpEngine& engine, const std::vector<std::size_t>& binaries,
                           const Node& node, std::size_t& iterations) {
  std::vector<double> lo = node.lower;
  std::vector<double> hi = node.upper;
  for (std::size_t j : binaries) {
    const double v = std::round(node.lp.values[j]);
    lo[j] = v;
    hi[j] = v;
  }
  try {
    LpSolution fixed = engine.solve(lo, hi);
    iterations += fixed.iterations;
    if (fixed.status == SolveStatus::kOptimal) return fixed.values;
  } catch (const NumericalBreakdown&) {
  }
  std::vector<double> raw = node.lp.values;
  for (std::size_t j : binaries) raw[j] = std::round(raw[j]);
  return raw;
}

}  // namespace

MilpSolution solve_milp(const MilpModel& m, const SolverOptions& opts) {
  const detail::LpEngine engine(m);
  const std::vector<std::size_t> binaries = m.binaries();

  MilpSolution out;
  double incumbent = kInf;
  std::size_t serial = 0;

  auto trace = [&](double bound) {
    if (opts.trace == nullptr) return;
    *opts.trace << out.node_count << ',' << bound << ',' << incumbent << '\n';
  };

  auto evaluate = [&](std::vector<double> lo, std::vector<double> hi) {
    Node n;
    n.lower = std::move(lo);
    n.upper = std::move(hi);
    n.lp = engine.solve(n.lower, n.upper);
    n.serial = serial++;
    ++out.node_count;
    out.lp_iterations += n.lp.iterations;
    trace(n.lp.status == SolveStatus::kOptimal ? n.lp.objective : kInf);
    return n;
  };

  auto prunable = [&](double bound) {
    return bound >= incumbent - opts.rel_gap * std::max(1.0, std::abs(incumbent));
  };

  std::vector<Node> open;
  bool budget_hit = false;

  auto consider = [&](Node&& n) {
    if (n.lp.status == SolveStatus::kInfeasible) return;
    if (n.lp.status == SolveStatus::kUnbounded) {
      out.status = SolveStatus::kUnbounded;
      return;
    }
    if (prunable(n.lp.objective)) return;
    if (pick_branch(binaries, n.lp.values, opts.int_tol) == static_cast<std::size_t>(-1)) {
      std::vector<double> x = polish(engine, binaries, n, out.lp_iterations);
      const double obj = m.objective_value(x);
      if (!out.has_incumbent() || obj < out.objective) {
        out.values = std::move(x);
        out.objective = obj;
        incumbent = obj;
      }
      return;
    }
    open.push_back(std::move(n));
  };

  consider(evaluate(m.lower(), m.upper()));
  if (out.status == SolveStatus::kUnbounded) return out;

  double pruned_bound = kInf;
  while (!open.empty()) {
    // Best bound first; among ties the oldest node.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < open.size(); ++i) {
      const double a = open[i].lp.objective;
      const double b = open[pick].lp.objective;
      if (ties(a, b) ? open[i].serial < open[pick].serial : a < b) pick = i;
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

    if (prunable(node.lp.objective)) {
      // Everything left is no better than this node.
      pruned_bound = node.lp.objective;
      open.clear();
      break;
    }
    if (out.node_count + 2 > opts.max_nodes) {
      budget_hit = true;
      open.push_back(std::move(node));
      break;
    }

    const std::size_t j = pick_branch(binaries, node.lp.values, opts.int_tol);
    std::vector<double> lo0 = node.lower, hi0 = node.upper;
    hi0[j] = 0.0;
    std::vector<double> lo1 = std::move(node.lower), hi1 = std::move(node.upper);
    lo1[j] = 1.0;
    consider(evaluate(std::move(lo0), std::move(hi0)));
    if (out.status == SolveStatus::kUnbounded) return out;
    consider(evaluate(std::move(lo1), std::move(hi1)));
    if (out.status == SolveStatus::kUnbounded) return out;
  }

  if (budget_hit) {
    double b = incumbent;
    for (const Node& n : open) b = std::min(b, n.lp.objective);
    out.bound = b;
    out.status = SolveStatus::kNodeBudgetExceeded;
    return out;
  }
  if (!out.has_incumbent()) {
    out.status = SolveStatus::kInfeasible;
    return out;
  }
  out.status = SolveStatus::kOptimal;
  out.bound = std::min(incumbent, pruned_bound);
  return out;
}

MilpSolution brute_force_milp(const MilpModel& m, std::size_t cap, const SolverOptions& opts) {
  std::vector<std::size_t> free;
  for (std::size_t j : m.binaries()) {
    if (m.lower()[j] < m.upper()[j]) free.push_back(j);
  }
  if (free.size() > cap) {
    throw TooManyBinaries("model has " + std::to_string(free.size()) +
                          " free binaries, oracle cap is " + std::to_string(cap));
  }
  const detail::LpEngine engine(m);
  MilpSolution out;
  std::vector<double> lo = m.lower();
  std::vector<double> hi = m.upper();
  const std::size_t combos = std::size_t{1} << free.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    for (std::size_t b = 0; b < free.size(); ++b) {
      const double v = (mask >> b) & 1U ? 1.0 : 0.0;
      lo[free[b]] = v;
      hi[free[b]] = v;
    }
    LpSolution lp = engine.solve(lo, hi);
    ++out.node_count;
    out.lp_iterations += lp.iterations;
    if (opts.trace != nullptr) {
      *opts.trace << out.node_count << ','
                  << (lp.status == SolveStatus::kOptimal ? lp.objective : kInf) << ','
                  << (out.has_incumbent() ? out.objective : kInf) << '\n';
    }
    if (lp.status == SolveStatus::kUnbounded) {
      out.status = SolveStatus::kUnbounded;
      out.values.clear();
      return out;
    }
    if (lp.status != SolveStatus::kOptimal) continue;
    if (!out.has_incumbent() || lp.objective < out.objective) {
      out.objective = lp.objective;
      out.values = std::move(lp.values);
    }
  }
  if (out.has_incumbent()) {
    out.status = SolveStatus::kOptimal;
    out.bound = out.objective;
  }
  return out;
}

}  // namespace dsmopt
