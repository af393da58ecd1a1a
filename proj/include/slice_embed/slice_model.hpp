#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace slice_embed {

struct VnfSpec {
  double cpu_demand = 0.0;  // GHz
  double proc_delay = 0.0;  // ms
};

struct VirtualLink {
  std::size_t from = 0;
  std::size_t to = 0;
  double bw_demand = 0.0;  // Mbps
};

/// (vnf index, server index) pairs that may not be mapped together.
using Incompatibilities = std::set<std::pair<std::size_t, std::size_t>>;

/// A core-network slice: VNFs, the virtual links between them, an end-to-end
/// delay budget and an isolation degree (max VNFs of this slice per server).
struct SliceRequest {
  std::size_t id = 0;
  std::vector<VnfSpec> vnfs;
  std::vector<VirtualLink> vlinks;
  double delay_budget = 0.0;  // ms
  unsigned isolation_degree = 1;
  Incompatibilities incompatible;

  bool compatible(std::size_t vnf, std::size_t server) const {
    return !incompatible.contains({vnf, server});
  }

  /// Throws ConfigurationError on broken invariants.
  void validate() const;
  bool vlinks_connected() const;
  /// Processing delay alone already reaches the budget.
  bool trivially_infeasible() const;
};

struct DemandRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct WorkloadParams {
  std::size_t request_count = 200;
  std::size_t vnfs_per_slice = 10;
  DemandRange cpu_demand{0.5, 2.0};   // GHz
  DemandRange bw_demand{30.0, 70.0};  // Mbps
  DemandRange proc_delay{0.3, 2.0};   // ms
  double delay_budget = 500.0;        // ms
  unsigned isolation_degree = 1;
  std::uint64_t rng_seed = 1;
  Incompatibilities incompatible;

  void validate() const;
};

/// Uniform draw in [lo, hi) from the top 53 bits of one engine output, so
/// the stream is identical across standard libraries.
double sample_uniform(std::mt19937_64& rng, DemandRange range);

/// Linear chain of `vnfs_per_slice` VNFs. Draw order: (g, alpha) per VNF,
/// then the bandwidth of each vlink.
SliceRequest generate_request(const WorkloadParams& params, std::mt19937_64& rng, std::size_t id);

/// All `request_count` requests of a run, from a generator seeded with
/// `rng_seed`.
std::vector<SliceRequest> generate_workload(const WorkloadParams& params);

struct DemandTotals {
  double cpu = 0.0;
  double bw = 0.0;
};

DemandTotals total_demands(const SliceRequest& request);

/// Line format: `slice <id> K=<k> d=<ms>`, then `vnf <i> <g> <alpha>`,
/// `vlink <i> <j> <g_ij>` and (if any) `incompatible <i> <server>` lines.
void write_request(std::ostream& out, const SliceRequest& request);
/// Reads one request; stops at a blank line or end of input.
SliceRequest read_request(std::istream& in);

}  // namespace slice_embed
