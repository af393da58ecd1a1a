#include "slice_embed/slice_model.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

void SliceRequest::validate() const {
  if (isolation_degree < 1) throw ConfigurationError("isolation degree must be >= 1");
  if (!std::isfinite(delay_budget)) throw ConfigurationError("delay budget must be finite");
  for (const auto& vnf : vnfs) {
    if (!(vnf.cpu_demand > 0.0)) throw ConfigurationError("VNF CPU demand must be positive");
    if (!(vnf.proc_delay >= 0.0)) throw ConfigurationError("VNF processing delay must be >= 0");
  }
  for (const auto& vlink : vlinks) {
    if (vlink.from >= vnfs.size() || vlink.to >= vnfs.size()) {
      throw ConfigurationError("virtual link references a missing VNF");
    }
    if (vlink.from == vlink.to) throw ConfigurationError("virtual link endpoints must differ");
    if (!(vlink.bw_demand > 0.0)) throw ConfigurationError("virtual link demand must be positive");
  }
  if (!vlinks_connected()) throw ConfigurationError("virtual links do not connect all VNFs");
}

bool SliceRequest::vlinks_connected() const {
  if (vnfs.size() <= 1) return true;
  std::vector<std::size_t> parent(vnfs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = vnfs.size();
  for (const auto& vlink : vlinks) {
    const auto a = find(vlink.from), b = find(vlink.to);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

bool SliceRequest::trivially_infeasible() const {
  double processing = 0.0;
  for (const auto& vnf : vnfs) processing += vnf.proc_delay;
  return !(delay_budget > processing);
}

void WorkloadParams::validate() const {
  if (vnfs_per_slice == 0) throw ConfigurationError("vnfs_per_slice must be positive");
  if (isolation_degree < 1) throw ConfigurationError("isolation degree must be >= 1");
  for (const auto& range : {cpu_demand, bw_demand, proc_delay}) {
    if (!(range.lo > 0.0) || !(range.lo <= range.hi) || !std::isfinite(range.hi)) {
      throw ConfigurationError("demand ranges need 0 < lo <= hi");
    }
  }
  if (!(delay_budget > 0.0) || !std::isfinite(delay_budget)) {
    throw ConfigurationError("delay budget must be positive");
  }
}

double sample_uniform(std::mt19937_64& rng, DemandRange range) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return range.lo + (range.hi - range.lo) * unit;
}

SliceRequest generate_request(const WorkloadParams& params, std::mt19937_64& rng, std::size_t id) {
  SliceRequest request;
  request.id = id;
  request.delay_budget = params.delay_budget;
  request.isolation_degree = params.isolation_degree;
  request.incompatible = params.incompatible;
  request.vnfs.reserve(params.vnfs_per_slice);
  for (std::size_t i = 0; i < params.vnfs_per_slice; ++i) {
    VnfSpec vnf;
    vnf.cpu_demand = sample_uniform(rng, params.cpu_demand);
    vnf.proc_delay = sample_uniform(rng, params.proc_delay);
    request.vnfs.push_back(vnf);
  }
  for (std::size_t i = 0; i + 1 < params.vnfs_per_slice; ++i) {
    request.vlinks.push_back(VirtualLink{i, i + 1, sample_uniform(rng, params.bw_demand)});
  }
  return request;
}

std::vector<SliceRequest> generate_workload(const WorkloadParams& params) {
  params.validate();
  std::mt19937_64 rng(params.rng_seed);
  std::vector<SliceRequest> requests;
  requests.reserve(params.request_count);
  for (std::size_t id = 0; id < params.request_count; ++id) {
    requests.push_back(generate_request(params, rng, id));
  }
  return requests;
}

DemandTotals total_demands(const SliceRequest& request) {
  DemandTotals totals;
  for (const auto& vnf : request.vnfs) totals.cpu += vnf.cpu_demand;
  for (const auto& vlink : request.vlinks) totals.bw += vlink.bw_demand;
  return totals;
}

void write_request(std::ostream& out, const SliceRequest& request) {
  out << "slice " << request.id << " K=" << request.isolation_degree
      << " d=" << format_number(request.delay_budget) << '\n';
  for (std::size_t i = 0; i < request.vnfs.size(); ++i) {
    out << "vnf " << i << ' ' << format_number(request.vnfs[i].cpu_demand) << ' '
        << format_number(request.vnfs[i].proc_delay) << '\n';
  }
  for (const auto& vlink : request.vlinks) {
    out << "vlink " << vlink.from << ' ' << vlink.to << ' ' << format_number(vlink.bw_demand) << '\n';
  }
  for (const auto& [vnf, server] : request.incompatible) {
    out << "incompatible " << vnf << ' ' << server << '\n';
  }
}

SliceRequest read_request(std::istream& in) {
  SliceRequest request;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_whitespace(trim(line));
      if (fields.empty()) {
        if (have_header) break;
        continue;
      }
      if (fields[0] == "slice") {
        if (have_header || fields.size() != 4 || !fields[2].starts_with("K=") ||
            !fields[3].starts_with("d=")) {
          throw ParseError("malformed slice header", line_no);
        }
        request.id = static_cast<std::size_t>(parse_integer(fields[1]));
        request.isolation_degree = static_cast<unsigned>(parse_integer(fields[2].substr(2)));
        request.delay_budget = parse_number(fields[3].substr(2));
        have_header = true;
      } else if (!have_header) {
        throw ParseError("expected 'slice' header", line_no);
      } else if (fields[0] == "vnf" && fields.size() == 4) {
        if (static_cast<std::size_t>(parse_integer(fields[1])) != request.vnfs.size()) {
          throw ParseError("VNF indices must be consecutive", line_no);
        }
        request.vnfs.push_back(VnfSpec{parse_number(fields[2]), parse_number(fields[3])});
      } else if (fields[0] == "vlink" && fields.size() == 4) {
        request.vlinks.push_back(VirtualLink{static_cast<std::size_t>(parse_integer(fields[1])),
                                             static_cast<std::size_t>(parse_integer(fields[2])),
                                             parse_number(fields[3])});
      } else if (fields[0] == "incompatible" && fields.size() == 3) {
        request.incompatible.emplace(static_cast<std::size_t>(parse_integer(fields[1])),
                                     static_cast<std::size_t>(parse_integer(fields[2])));
      } else {
        throw ParseError("unrecognized request line", line_no);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
  if (!have_header) throw ParseError("no slice request found", line_no);
  return request;
}

}  // namespace slice_embed
