#pragma once

#include <vector>

#include "blockwave/blocks.hpp"

namespace blockwave {

// Singular values of a dense block, descending. One-sided Jacobi on the
// thinner orientation; high relative accuracy on the small values.
std::vector<double> singular_values(const DenseBlock& a);

} // namespace blockwave
