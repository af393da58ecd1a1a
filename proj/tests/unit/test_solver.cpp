#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "slice_embed/errors.hpp"
#include "slice_embed/formulation.hpp"
#include "slice_embed/oracle.hpp"
#include "slice_embed/simplex.hpp"
#include "slice_embed/solver.hpp"

using namespace slice_embed;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpRow row(std::vector<std::size_t> index, std::vector<double> coef, Sense sense, double rhs) {
  return LpRow{std::move(index), std::move(coef), sense, rhs};
}

SubstrateNetwork small_tree(std::size_t servers, std::size_t edges) {
  TopologyConfig config;
  config.server_count = servers;
  config.edge_switch_count = edges;
  config.servers_per_edge_switch = servers / edges;
  config.aggregation_switch_count = 1;
  config.datacenter_switch_count = 1;
  return build_fat_tree(config);
}

SliceRequest chain(std::size_t vnfs, double cpu, double bw, unsigned k) {
  SliceRequest request;
  for (std::size_t i = 0; i < vnfs; ++i) request.vnfs.push_back(VnfSpec{cpu, 0.5});
  for (std::size_t i = 0; i + 1 < vnfs; ++i) request.vlinks.push_back(VirtualLink{i, i + 1, bw});
  request.isolation_degree = k;
  request.delay_budget = 100.0;
  return request;
}

SolverOptions strategy(BranchStrategy s) {
  SolverOptions options;
  options.strategy = s;
  return options;
}

/// Minimum of a 2-variable LP by enumerating every pairwise intersection of
/// constraint boundaries (box edges included) and keeping the feasible ones.
double vertex_enumeration(const std::vector<double>& cost, const std::vector<std::array<double, 3>>& halfplanes,
                          bool& feasible) {
  feasible = false;
  double best = kInf;
  for (std::size_t p = 0; p < halfplanes.size(); ++p) {
    for (std::size_t q = p + 1; q < halfplanes.size(); ++q) {
      const auto& [a1, b1, c1] = halfplanes[p];
      const auto& [a2, b2, c2] = halfplanes[q];
      const double det = a1 * b2 - a2 * b1;
      if (std::fabs(det) < 1e-12) continue;
      const double x = (c1 * b2 - c2 * b1) / det, y = (a1 * c2 - a2 * c1) / det;
      bool ok = true;
      for (const auto& [a, b, c] : halfplanes) ok = ok && a * x + b * y <= c + 1e-9;
      if (!ok) continue;
      feasible = true;
      best = std::min(best, cost[0] * x + cost[1] * y);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("one-dimensional LP") {
  LinearProgram lp{{1.0}, {-kInf}, {kInf}, {row({0}, {1.0}, Sense::kGreaterEqual, 3.0), row({0}, {1.0}, Sense::kLessEqual, 5.0)}};
  const auto result = solve_simplex(lp);
  REQUIRE(result.status == LpStatus::kOptimal);
  CHECK(result.x[0] == doctest::Approx(3.0));
  CHECK(result.objective == doctest::Approx(3.0));
}

TEST_CASE("contradictory rows are infeasible") {
  LinearProgram lp{{1.0}, {-kInf}, {kInf}, {row({0}, {1.0}, Sense::kGreaterEqual, 2.0), row({0}, {1.0}, Sense::kLessEqual, 1.0)}};
  CHECK(solve_simplex(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded LP") {
  LinearProgram lp{{-1.0, 0.0}, {0.0, 0.0}, {kInf, kInf}, {row({0, 1}, {1.0, -1.0}, Sense::kLessEqual, 1.0)}};
  CHECK(solve_simplex(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("degenerate cycling example terminates at the optimum") {
  // Beale's example: Dantzig pricing cycles here without an anti-cycling rule.
  LinearProgram lp;
  lp.cost = {-0.75, 20.0, -0.5, 6.0};
  lp.lower = {0.0, 0.0, 0.0, 0.0};
  lp.upper = {kInf, kInf, kInf, kInf};
  lp.rows = {row({0, 1, 2, 3}, {0.25, -8.0, -1.0, 9.0}, Sense::kLessEqual, 0.0),
             row({0, 1, 2, 3}, {0.5, -12.0, -0.5, 3.0}, Sense::kLessEqual, 0.0),
             row({2}, {1.0}, Sense::kLessEqual, 1.0)};
  const auto result = solve_simplex(lp);
  REQUIRE(result.status == LpStatus::kOptimal);
  CHECK(result.objective == doctest::Approx(-1.25));
}

TEST_CASE("random 2-D LPs agree with vertex enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), rhs(1.0, 20.0);
  for (int trial = 0; trial < 300; ++trial) {
    LinearProgram lp;
    lp.cost = {coef(rng), coef(rng)};
    lp.lower = {0.0, 0.0};
    lp.upper = {10.0, 10.0};
    std::vector<std::array<double, 3>> halfplanes = {
        {-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {1.0, 0.0, 10.0}, {0.0, 1.0, 10.0}};
    for (int r = 0; r < 4; ++r) {
      const double a = coef(rng), b = coef(rng), c = rhs(rng);
      if (r == 3) {
        // One >= row so some instances are infeasible.
        lp.rows.push_back(row({0, 1}, {a, b}, Sense::kGreaterEqual, c));
        halfplanes.push_back({-a, -b, -c});
      } else {
        lp.rows.push_back(row({0, 1}, {a, b}, Sense::kLessEqual, c));
        halfplanes.push_back({a, b, c});
      }
    }
    bool feasible = false;
    const double expected = vertex_enumeration(lp.cost, halfplanes, feasible);
    const auto result = solve_simplex(lp);
    CAPTURE(trial);
    if (!feasible) {
      CHECK(result.status == LpStatus::kInfeasible);
      continue;
    }
    REQUIRE(result.status == LpStatus::kOptimal);
    CHECK(result.objective == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("solve_lp honours bound overrides") {
  const auto network = small_tree(2, 1);
  const auto problem = build_problem(network, chain(2, 1.0, 50.0, 2));
  std::vector<VariableBounds> bounds;
  for (const auto& var : problem.variables) bounds.push_back({var.lo, var.hi});
  bounds[0] = {0.0, 0.0};  // VNF 0 off server 0
  bounds[3] = {0.0, 0.0};  // VNF 1 off server 1
  const auto lp = solve_lp(problem, bounds);
  REQUIRE(lp.status == LpStatus::kOptimal);
  CHECK(lp.values[1] == doctest::Approx(1.0));
  CHECK(lp.values[2] == doctest::Approx(1.0));
  CHECK(lp.objective == doctest::Approx(50.0 * 0.2));
}

TEST_CASE("two VNFs, two servers, K=1: one per server plus the path cost") {
  const auto network = small_tree(2, 1);
  const auto request = chain(2, 1.0, 50.0, 1);
  for (const auto s : {BranchStrategy::kMostFractional, BranchStrategy::kAssignmentTree}) {
    const auto solution = solve_milp(build_problem(network, request), strategy(s));
    REQUIRE(solution.optimal());
    CHECK(solution.assignment[0] != solution.assignment[1]);
    // Fresh servers weigh 0; S1-E1-S2 is two 0.1 ms links carrying 50 Mbps.
    CHECK(solution.objective == doctest::Approx(50.0 * 0.1 * 2));
    const auto oracle = brute_force_solve(network, request);
    CHECK(solution.objective == doctest::Approx(oracle.objective));
  }
}

TEST_CASE("node capacity makes a heavy request infeasible") {
  auto network = build_fat_tree(TopologyConfig{});
  for (std::size_t u = 0; u < network.server_count(); ++u) network.set_server_residual(u, 1.0);
  const auto request = chain(10, 2.0, 50.0, 10);
  CHECK(check_aggregate(network, request).feasible);
  CHECK(!solve_milp(build_problem(network, request)).optimal());
}

TEST_CASE("pigeonhole: K=1 with fewer servers than VNFs") {
  const auto network = small_tree(2, 1);
  const auto request = chain(3, 1.0, 40.0, 1);
  CHECK(!brute_force_solve(network, request).optimal());
  for (const auto s : {BranchStrategy::kMostFractional, BranchStrategy::kAssignmentTree}) {
    CHECK(!solve_milp(build_problem(network, request), strategy(s)).optimal());
  }
}

TEST_CASE("single-server instance") {
  auto network = small_tree(1, 1);
  network.set_server_residual(0, 9.0);
  const auto request = chain(2, 1.0, 40.0, 2);
  const auto oracle = brute_force_solve(network, request);
  const auto milp = solve_milp(build_problem(network, request));
  REQUIRE(oracle.optimal());
  REQUIRE(milp.optimal());
  CHECK(oracle.assignment == milp.assignment);
  CHECK(milp.objective == doctest::Approx(0.25 * 2.0));
}

TEST_CASE("relaxation bounds the integer optimum from below") {
  std::mt19937_64 rng(99);
  std::size_t compared = 0;
  for (int n = 0; n < 60; ++n) {
    const auto instance = generate_oracle_instance(rng, 2, 2);
    const auto oracle = brute_force_solve(instance.network, instance.request);
    if (!oracle.optimal()) continue;
    const auto lp = solve_lp(build_problem(instance.network, instance.request));
    REQUIRE(lp.status == LpStatus::kOptimal);
    CHECK(lp.objective <= oracle.objective + 1e-9);
    ++compared;
  }
  CHECK(compared > 10);
}

TEST_CASE("both strategies match the oracle on random tiny instances") {
  std::mt19937_64 rng(4242);
  for (int n = 0; n < 150; ++n) {
    const auto instance = generate_oracle_instance(rng, 4, 3);
    const auto delays = link_delays(instance.network);
    const auto problem = build_problem(instance.network, instance.request, delays);
    const auto oracle = brute_force_solve(instance.network, instance.request, delays);
    for (const auto s : {BranchStrategy::kMostFractional, BranchStrategy::kAssignmentTree}) {
      CAPTURE(n);
      const auto got = solve_milp(problem, strategy(s));
      REQUIRE(got.status == oracle.status);
      if (!got.optimal()) continue;
      CHECK(std::fabs(got.objective - oracle.objective) <= 1e-6);
      CHECK(realized_delay(got, instance.request, delays) <= instance.request.delay_budget + 1e-6);
    }
  }
}

TEST_CASE("node limit raises ResourceLimitError") {
  std::mt19937_64 rng(3);
  auto instance = generate_oracle_instance(rng, 5, 3);
  while (!brute_force_solve(instance.network, instance.request).optimal()) {
    instance = generate_oracle_instance(rng, 5, 3);
  }
  SolverOptions options;
  options.node_limit = 1;
  CHECK_THROWS_AS(solve_milp(build_problem(instance.network, instance.request), options), ResourceLimitError);
}

TEST_CASE("oracle refuses oversized enumerations") {
  const auto network = small_tree(20, 2);
  const auto request = chain(5, 1.0, 40.0, 1);
  CHECK_THROWS_AS(brute_force_solve(network, request, link_delays(network), 1000), OracleScopeError);
}

TEST_CASE("assignment tree needs a layout") {
  const auto network = small_tree(2, 1);
  auto problem = build_problem(network, chain(2, 1.0, 50.0, 1));
  problem.layout.reset();
  CHECK_THROWS_AS(solve_milp(problem, strategy(BranchStrategy::kAssignmentTree)), ConfigurationError);
  CHECK(solve_milp(problem, strategy(BranchStrategy::kMostFractional)).optimal());
}
