#include <doctest.h>

#include <random>
#include <sstream>

#include "slice_embed/errors.hpp"
#include "slice_embed/slice_model.hpp"

using namespace slice_embed;

namespace {

WorkloadParams table_params() {
  WorkloadParams params;  // 10 VNFs, default demand ranges
  params.request_count = 5;
  return params;
}

}  // namespace

TEST_CASE("generated request stays within the demand ranges") {
  const auto params = table_params();
  std::mt19937_64 rng(7);
  const auto request = generate_request(params, rng, 0);
  REQUIRE(request.vnfs.size() == 10);
  REQUIRE(request.vlinks.size() == 9);
  for (const auto& vnf : request.vnfs) {
    CHECK(vnf.cpu_demand >= 0.5);
    CHECK(vnf.cpu_demand <= 2.0);
    CHECK(vnf.proc_delay >= 0.3);
    CHECK(vnf.proc_delay <= 2.0);
  }
  for (std::size_t k = 0; k < request.vlinks.size(); ++k) {
    CHECK(request.vlinks[k].from == k);
    CHECK(request.vlinks[k].to == k + 1);
    CHECK(request.vlinks[k].bw_demand >= 30.0);
    CHECK(request.vlinks[k].bw_demand <= 70.0);
  }
  CHECK_NOTHROW(request.validate());
}

TEST_CASE("single-VNF chain has no virtual links") {
  auto params = table_params();
  params.vnfs_per_slice = 1;
  std::mt19937_64 rng(1);
  const auto request = generate_request(params, rng, 3);
  CHECK(request.vnfs.size() == 1);
  CHECK(request.vlinks.empty());
  CHECK(request.id == 3);
}

TEST_CASE("same seed gives bit-identical workloads") {
  auto params = table_params();
  params.rng_seed = 42;
  const auto a = generate_workload(params), b = generate_workload(params);
  std::ostringstream ta, tb;
  for (const auto& r : a) write_request(ta, r);
  for (const auto& r : b) write_request(tb, r);
  CHECK(ta.str() == tb.str());
  params.rng_seed = 43;
  std::ostringstream tc;
  for (const auto& r : generate_workload(params)) write_request(tc, r);
  CHECK(tc.str() != ta.str());
}

TEST_CASE("sample_uniform uses the top 53 bits") {
  std::mt19937_64 a(5), b(5);
  const auto draw = sample_uniform(a, DemandRange{10.0, 20.0});
  const double unit = static_cast<double>(b() >> 11) * 0x1.0p-53;
  CHECK(draw == 10.0 + unit * 10.0);
}

TEST_CASE("total demands") {
  SliceRequest request;
  for (int i = 0; i < 10; ++i) request.vnfs.push_back(VnfSpec{1.0, 0.5});
  for (std::size_t k = 0; k < 9; ++k) request.vlinks.push_back(VirtualLink{k, k + 1, 50.0});
  const auto totals = total_demands(request);
  CHECK(totals.cpu == doctest::Approx(10.0));
  CHECK(totals.bw == doctest::Approx(450.0));

  const auto empty = total_demands(SliceRequest{});
  CHECK(empty.cpu == 0.0);
  CHECK(empty.bw == 0.0);

  auto params = table_params();
  params.rng_seed = 11;
  for (const auto& r : generate_workload(params)) {
    double cpu = 0.0, bw = 0.0;
    for (std::size_t i = r.vnfs.size(); i-- > 0;) cpu += r.vnfs[i].cpu_demand;
    for (std::size_t k = r.vlinks.size(); k-- > 0;) bw += r.vlinks[k].bw_demand;
    CHECK(total_demands(r).cpu == doctest::Approx(cpu).epsilon(1e-12));
    CHECK(total_demands(r).bw == doctest::Approx(bw).epsilon(1e-12));
  }
}

TEST_CASE("request text round trip") {
  auto params = table_params();
  params.incompatible = {{0, 3}, {2, 1}};
  params.isolation_degree = 4;
  params.delay_budget = 60.0;
  const auto requests = generate_workload(params);
  std::ostringstream out;
  write_request(out, requests[2]);
  std::istringstream in(out.str());
  const auto back = read_request(in);
  std::ostringstream again;
  write_request(again, back);
  CHECK(again.str() == out.str());
  CHECK(back.isolation_degree == 4);
  CHECK(back.delay_budget == 60.0);
  CHECK(!back.compatible(0, 3));
  CHECK(back.compatible(0, 2));
}

TEST_CASE("malformed request text cites the line") {
  std::istringstream in("slice 0 K=1 d=10\nvnf 0 1 0.5\nbogus\n");
  try {
    read_request(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("request invariants") {
  SliceRequest request;
  request.vnfs = {VnfSpec{1.0, 0.5}, VnfSpec{1.0, 0.5}};
  CHECK_THROWS_AS(request.validate(), ConfigurationError);  // not connected
  request.vlinks = {VirtualLink{0, 1, 30.0}};
  CHECK_NOTHROW(request.validate());
  request.isolation_degree = 0;
  CHECK_THROWS_AS(request.validate(), ConfigurationError);
  request.isolation_degree = 1;
  request.delay_budget = 1.0;
  CHECK(request.trivially_infeasible());
  request.delay_budget = 1.5;
  CHECK(!request.trivially_infeasible());
}
