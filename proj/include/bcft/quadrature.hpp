#pragma once

#include <utility>
#include <vector>

namespace bcft {

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

}  // namespace bcft
