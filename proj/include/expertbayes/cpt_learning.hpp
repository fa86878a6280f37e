#pragma once

#include <span>
#include <vector>

#include "expertbayes/dataset.hpp"
#include "expertbayes/network.hpp"

namespace expertbayes {

// Smoothed frequency estimate of one node's table:
//   P(v = s | u) = (n(s, u) + a) / (n(u) + a * |states(v)|)
// Rows missing the node or any parent are skipped for this table only. A
// configuration with zero total mass (a = 0, never observed) is uniform.
Cpt estimate_cpt(const NetworkStructure& structure, std::size_t node, const BoundData& data,
                 double pseudocount);

// Throws Error(EmptyDataset), Error(ColumnMismatch), Error(InvalidArgument)
// for a negative pseudocount.
std::vector<Cpt> estimate_cpts(const NetworkStructure& structure, const BoundData& data,
                               double pseudocount);
std::vector<Cpt> estimate_cpts(const NetworkStructure& structure, const Dataset& data,
                               double pseudocount);

// Re-estimates only `changed`; every other table is carried over untouched.
Network rebuild_affected(const Network& network, const BoundData& data,
                         std::span<const std::size_t> changed, double pseudocount);
Network rebuild_affected(const Network& network, const Dataset& data,
                         std::span<const std::size_t> changed, double pseudocount);

// Re-estimates every table.
Network fit_parameters(const Network& network, const BoundData& data, double pseudocount);
Network fit_parameters(const Network& network, const Dataset& data, double pseudocount);

// Re-estimates only tables that are not marked estimated (e.g. a loaded
// network where the expert supplied some tables).
Network fill_unestimated(const Network& network, const BoundData& data, double pseudocount);

}  // namespace expertbayes
