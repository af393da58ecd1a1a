#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "slice_embed/errors.hpp"
#include "slice_embed/solver.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegralityTolerance = 1e-9;

// Pruning threshold: anything at or above this cannot improve the incumbent.
double cutoff(double incumbent, double epsilon) {
  if (!std::isfinite(incumbent)) return kInf;
  return incumbent - epsilon * std::max(1.0, std::fabs(incumbent));
}

std::vector<VariableBounds> default_bounds(const MilpProblem& problem) {
  std::vector<VariableBounds> bounds;
  bounds.reserve(problem.variables.size());
  for (const auto& var : problem.variables) bounds.push_back({var.lo, var.hi});
  return bounds;
}

class BestFirstSearch {
 public:
  BestFirstSearch(const MilpProblem& problem, const SolverOptions& options)
      : problem_(problem), options_(options), base_(default_bounds(problem)) {}

  MilpSolution run();

 private:
  struct Node {
    std::vector<std::pair<std::size_t, double>> fixes;
    double bound = 0.0;
    std::size_t depth = 0;
    std::uint64_t sequence = 0;
    std::vector<double> values;
  };
  struct LowerPriority {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      if (a.depth != b.depth) return a.depth < b.depth;
      return a.sequence > b.sequence;
    }
  };

  LpSolution solve(const std::vector<std::pair<std::size_t, double>>& fixes);
  void count_node();

  const MilpProblem& problem_;
  const SolverOptions& options_;
  std::vector<VariableBounds> base_;
  SolverStats stats_;
  double incumbent_ = kInf;
  std::vector<double> best_;
};

LpSolution BestFirstSearch::solve(const std::vector<std::pair<std::size_t, double>>& fixes) {
  auto bounds = base_;
  for (const auto& [var, value] : fixes) bounds[var] = {value, value};
  auto lp = solve_lp(problem_, bounds, options_.lp);
  stats_.lp_iterations += lp.iterations;
  if (lp.status == LpStatus::kUnbounded) throw SolverFailure("LP relaxation is unbounded");
  return lp;
}

void BestFirstSearch::count_node() {
  if (++stats_.branch_nodes > options_.node_limit) {
    throw ResourceLimitError("branch-and-bound node limit " + std::to_string(options_.node_limit) + " reached",
                             stats_.branch_nodes, std::isfinite(incumbent_));
  }
}

MilpSolution BestFirstSearch::run() {
  std::priority_queue<Node, std::vector<Node>, LowerPriority> open;
  std::uint64_t sequence = 0;
  count_node();
  {
    auto root = solve({});
    if (root.status == LpStatus::kOptimal) {
      open.push(Node{{}, root.objective, 0, sequence++, std::move(root.values)});
    }
  }
  const double epsilon = options_.lp.tolerance;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= cutoff(incumbent_, epsilon)) break;

    std::size_t branch = problem_.variables.size();
    double most = kIntegralityTolerance;
    for (std::size_t j = 0; j < problem_.variables.size(); ++j) {
      if (problem_.variables[j].integrality != Integrality::kBinary) continue;
      const double v = node.values[j];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > most) {
        most = frac;
        branch = j;
      }
    }
    if (branch == problem_.variables.size()) {
      // Integral relaxation: pin the assignment exactly and re-solve flows.
      auto fixes = node.fixes;
      for (std::size_t j = 0; j < problem_.variables.size(); ++j) {
        if (problem_.variables[j].integrality == Integrality::kBinary) {
          fixes.emplace_back(j, std::round(node.values[j]));
        }
      }
      auto exact = solve(fixes);
      if (exact.status == LpStatus::kOptimal && exact.objective < cutoff(incumbent_, epsilon)) {
        incumbent_ = exact.objective;
        best_ = std::move(exact.values);
      }
      continue;
    }
    for (const double value : {0.0, 1.0}) {
      auto fixes = node.fixes;
      fixes.emplace_back(branch, value);
      count_node();
      auto child = solve(fixes);
      if (child.status != LpStatus::kOptimal) continue;
      if (child.objective >= cutoff(incumbent_, epsilon)) continue;
      open.push(Node{std::move(fixes), child.objective, node.depth + 1, sequence++, std::move(child.values)});
    }
  }
  MilpSolution solution;
  solution.stats = stats_;
  if (std::isfinite(incumbent_)) {
    solution.status = SolveStatus::kOptimal;
    solution.objective = incumbent_;
    solution.values = std::move(best_);
  }
  return solution;
}

class AssignmentTree {
 public:
  AssignmentTree(const MilpProblem& problem, const SolverOptions& options)
      : problem_(problem), layout_(*problem.layout), options_(options) {}

  MilpSolution run();

 private:
  bool feasible(std::size_t vnf, std::size_t server) const {
    return layout_.compatible[vnf * layout_.server_count + server] != 0 && slots_[server] > 0 &&
           cpu_left_[server] >= layout_.cpu_demand[vnf] - kCpuSlack;
  }
  double pair_bound(const VirtualLink& vlink) const;
  /// Lower bound on the objective of any completion; infinity if none exists.
  double bound() const;
  void assign(std::size_t vnf, std::size_t server);
  void unassign(std::size_t vnf);
  void search(std::size_t depth);
  void leaf();
  void count_node();
  void prepare();

  static constexpr double kCpuSlack = 1e-6;
  static constexpr std::ptrdiff_t kFree = -1;

  const MilpProblem& problem_;
  const EmbeddingLayout& layout_;
  const SolverOptions& options_;
  std::vector<double> place_cost_;  // vnf * servers + server
  std::vector<double> distance_;    // server * servers + server
  std::vector<double> access_;      // residual bandwidth incident to each server
  std::vector<std::size_t> order_;
  std::vector<std::ptrdiff_t> placed_;
  std::vector<double> cpu_left_;
  std::vector<unsigned> slots_;
  std::vector<VariableBounds> bounds_;
  SolverStats stats_;
  double incumbent_ = kInf;
  std::vector<double> best_;
};

void AssignmentTree::prepare() {
  const std::size_t servers = layout_.server_count, vnfs = layout_.vnf_count;
  place_cost_.assign(vnfs * servers, 0.0);
  for (const auto& term : problem_.objective.terms) {
    if (term.var < vnfs * servers) place_cost_[term.var] += term.coef;
  }

  // Delay-weighted shortest paths between servers over links that still
  // have capacity; per unit of flow this bounds both objective and delay.
  std::vector<std::vector<std::pair<std::size_t, double>>> graph(layout_.node_count);
  access_.assign(servers, 0.0);
  std::vector<std::ptrdiff_t> server_of(layout_.node_count, -1);
  for (std::size_t u = 0; u < servers; ++u) server_of[layout_.server_node[u]] = static_cast<std::ptrdiff_t>(u);
  for (const auto& link : layout_.links) {
    if (!(link.residual > 0.0)) continue;
    graph[link.a].emplace_back(link.b, link.delay);
    graph[link.b].emplace_back(link.a, link.delay);
    if (server_of[link.a] >= 0) access_[static_cast<std::size_t>(server_of[link.a])] += link.residual;
    if (server_of[link.b] >= 0) access_[static_cast<std::size_t>(server_of[link.b])] += link.residual;
  }
  distance_.assign(servers * servers, kInf);
  using Entry = std::pair<double, std::size_t>;
  for (std::size_t u = 0; u < servers; ++u) {
    std::vector<double> dist(layout_.node_count, kInf);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[layout_.server_node[u]] = 0.0;
    heap.emplace(0.0, layout_.server_node[u]);
    while (!heap.empty()) {
      const auto [d, node] = heap.top();
      heap.pop();
      if (d > dist[node]) continue;
      for (const auto& [next, w] : graph[node]) {
        if (d + w < dist[next]) {
          dist[next] = d + w;
          heap.emplace(dist[next], next);
        }
      }
    }
    for (std::size_t v = 0; v < servers; ++v) distance_[u * servers + v] = dist[layout_.server_node[v]];
    distance_[u * servers + u] = 0.0;
  }

  // Breadth-first over virtual links so each new VNF tends to touch a
  // placed neighbour.
  std::vector<std::vector<std::size_t>> adjacent(vnfs);
  for (const auto& vlink : layout_.vlinks) {
    adjacent[vlink.from].push_back(vlink.to);
    adjacent[vlink.to].push_back(vlink.from);
  }
  std::vector<bool> seen(vnfs, false);
  for (std::size_t start = 0; start < vnfs; ++start) {
    if (seen[start]) continue;
    std::queue<std::size_t> queue;
    queue.push(start);
    seen[start] = true;
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop();
      order_.push_back(i);
      for (const auto j : adjacent[i]) {
        if (!seen[j]) {
          seen[j] = true;
          queue.push(j);
        }
      }
    }
  }

  placed_.assign(vnfs, kFree);
  cpu_left_ = layout_.server_residual;
  slots_.assign(servers, layout_.isolation_degree);
  bounds_ = default_bounds(problem_);
}

double AssignmentTree::pair_bound(const VirtualLink& vlink) const {
  const std::size_t servers = layout_.server_count;
  const auto a = placed_[vlink.from], b = placed_[vlink.to];
  if (a != kFree && b != kFree) return distance_[static_cast<std::size_t>(a) * servers + static_cast<std::size_t>(b)];
  double best = kInf;
  if (a != kFree || b != kFree) {
    const auto fixed = static_cast<std::size_t>(a != kFree ? a : b);
    const auto open = a != kFree ? vlink.to : vlink.from;
    for (std::size_t v = 0; v < servers; ++v) {
      if (feasible(open, v)) best = std::min(best, distance_[fixed * servers + v]);
    }
    return best;
  }
  for (std::size_t u = 0; u < servers; ++u) {
    if (!feasible(vlink.from, u)) continue;
    for (std::size_t v = 0; v < servers; ++v) {
      if (!feasible(vlink.to, v)) continue;
      if (u == v && (slots_[u] < 2 || cpu_left_[u] < layout_.cpu_demand[vlink.from] +
                                                         layout_.cpu_demand[vlink.to] - kCpuSlack)) {
        continue;
      }
      best = std::min(best, distance_[u * servers + v]);
    }
  }
  return best;
}

double AssignmentTree::bound() const {
  const std::size_t servers = layout_.server_count;
  double total = 0.0, open_cpu = 0.0;
  std::size_t open_count = 0;
  for (std::size_t i = 0; i < layout_.vnf_count; ++i) {
    if (placed_[i] != kFree) {
      total += place_cost_[i * servers + static_cast<std::size_t>(placed_[i])];
      continue;
    }
    double cheapest = kInf;
    for (std::size_t u = 0; u < servers; ++u) {
      if (feasible(i, u)) cheapest = std::min(cheapest, place_cost_[i * servers + u]);
    }
    if (!std::isfinite(cheapest)) return kInf;
    total += cheapest;
    open_cpu += layout_.cpu_demand[i];
    ++open_count;
  }
  if (open_count > 0) {
    double cpu = 0.0;
    std::size_t slots = 0;
    for (std::size_t u = 0; u < servers; ++u) {
      if (slots_[u] == 0) continue;
      cpu += cpu_left_[u];
      slots += slots_[u];
    }
    if (open_count > slots || open_cpu > cpu + kCpuSlack) return kInf;
  }
  double delay = 0.0;
  std::vector<double> crossing(servers, 0.0);
  for (const auto& vlink : layout_.vlinks) {
    const double d = pair_bound(vlink);
    if (!std::isfinite(d)) return kInf;
    total += vlink.bw_demand * d;
    delay += d;
    const auto a = placed_[vlink.from], b = placed_[vlink.to];
    if (a != kFree && b != kFree && a != b) {
      crossing[static_cast<std::size_t>(a)] += vlink.bw_demand;
      crossing[static_cast<std::size_t>(b)] += vlink.bw_demand;
    }
  }
  if (delay > layout_.delay_slack + 1e-9 * (1.0 + std::fabs(layout_.delay_slack))) return kInf;
  for (std::size_t u = 0; u < servers; ++u) {
    if (crossing[u] > access_[u] + 1e-9 * (1.0 + access_[u])) return kInf;
  }
  return total;
}

void AssignmentTree::assign(std::size_t vnf, std::size_t server) {
  placed_[vnf] = static_cast<std::ptrdiff_t>(server);
  cpu_left_[server] -= layout_.cpu_demand[vnf];
  --slots_[server];
}

void AssignmentTree::unassign(std::size_t vnf) {
  const auto server = static_cast<std::size_t>(placed_[vnf]);
  cpu_left_[server] += layout_.cpu_demand[vnf];
  ++slots_[server];
  placed_[vnf] = kFree;
}

void AssignmentTree::count_node() {
  if (++stats_.branch_nodes > options_.node_limit) {
    throw ResourceLimitError("assignment search node limit " + std::to_string(options_.node_limit) + " reached",
                             stats_.branch_nodes, std::isfinite(incumbent_));
  }
}

void AssignmentTree::leaf() {
  const std::size_t servers = layout_.server_count;
  for (std::size_t i = 0; i < layout_.vnf_count; ++i) {
    for (std::size_t u = 0; u < servers; ++u) {
      const double v = placed_[i] == static_cast<std::ptrdiff_t>(u) ? 1.0 : 0.0;
      bounds_[layout_.assignment_column(i, u)] = {v, v};
    }
  }
  auto lp = solve_lp(problem_, bounds_, options_.lp);
  stats_.lp_iterations += lp.iterations;
  if (lp.status == LpStatus::kUnbounded) throw SolverFailure("flow LP is unbounded");
  if (lp.status != LpStatus::kOptimal) return;
  if (lp.objective < cutoff(incumbent_, options_.lp.tolerance)) {
    incumbent_ = lp.objective;
    best_ = std::move(lp.values);
  }
}

void AssignmentTree::search(std::size_t depth) {
  if (depth == order_.size()) {
    leaf();
    return;
  }
  const std::size_t vnf = order_[depth];
  std::vector<std::pair<double, std::size_t>> children;
  for (std::size_t u = 0; u < layout_.server_count; ++u) {
    if (!feasible(vnf, u)) continue;
    assign(vnf, u);
    const double b = bound();
    unassign(vnf);
    if (b < cutoff(incumbent_, options_.lp.tolerance)) children.emplace_back(b, u);
  }
  std::sort(children.begin(), children.end());
  for (const auto& [b, u] : children) {
    if (b >= cutoff(incumbent_, options_.lp.tolerance)) break;
    count_node();
    assign(vnf, u);
    search(depth + 1);
    unassign(vnf);
  }
}

MilpSolution AssignmentTree::run() {
  prepare();
  count_node();
  if (std::isfinite(bound())) search(0);
  MilpSolution solution;
  solution.stats = stats_;
  if (std::isfinite(incumbent_)) {
    solution.status = SolveStatus::kOptimal;
    solution.objective = incumbent_;
    solution.values = std::move(best_);
  }
  return solution;
}

}  // namespace

std::string format_stats(const SolverStats& stats) {
  return "nodes=" + std::to_string(stats.branch_nodes) + " lp_iters=" + std::to_string(stats.lp_iterations) +
         " wall=" + format_number(stats.wall_time);
}

void extract_embedding(const MilpProblem& problem, MilpSolution& solution) {
  solution.assignment.clear();
  solution.flows.clear();
  if (!solution.optimal()) return;
  for (std::size_t j = 0; j < problem.variables.size(); ++j) {
    const double v = solution.values[j];
    if (const auto* x = std::get_if<AssignmentVar>(&problem.variables[j].kind)) {
      if (v > 0.5) {
        if (solution.assignment.size() <= x->vnf) solution.assignment.resize(x->vnf + 1);
        solution.assignment[x->vnf] = x->server;
      }
    } else if (v > 0.0) {
      const auto& f = std::get<FlowVar>(problem.variables[j].kind);
      solution.flows.push_back(ArcFlow{f.vlink, f.link, f.forward, v});
    }
  }
}

MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  MilpSolution solution;
  if (options.strategy == BranchStrategy::kAssignmentTree) {
    if (!problem.layout) throw ConfigurationError("assignment-tree search needs the problem layout");
    solution = AssignmentTree(problem, options).run();
  } else {
    solution = BestFirstSearch(problem, options).run();
  }
  extract_embedding(problem, solution);
  solution.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return solution;
}

}  // namespace slice_embed
