#pragma once

#include "slice_embed/slice_model.hpp"
#include "slice_embed/solution.hpp"
#include "slice_embed/substrate.hpp"

namespace slice_embed {

/// Network after reserving the solution's CPU and flows. Returns the input
/// unchanged for a non-optimal solution. Throws ConsistencyError (and leaves
/// `network` untouched) if any residual would go negative beyond rounding.
SubstrateNetwork commit_allocation(const SubstrateNetwork& network, const MilpSolution& solution,
                                   const SliceRequest& request);

}  // namespace slice_embed
