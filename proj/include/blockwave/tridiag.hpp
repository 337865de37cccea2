#pragma once

#include <vector>

namespace blockwave {

// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
// off-diagonal `e` (e.size() == d.size() - 1), ascending. Self-contained
// implicit QL with shifts.
std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e);

// Normalized eigenvector for an eigenvalue lambda, by inverse iteration.
std::vector<double> tridiag_eigenvector(const std::vector<double>& d, const std::vector<double>& e,
                                        double lambda);

} // namespace blockwave
