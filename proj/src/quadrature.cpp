#include "bcft/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <mutex>

namespace bcft {

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(n);
  std::vector<std::pair<double, double>> nodes(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes[i].first, &nodes[i].second, tab);
  gsl_integration_glfixed_table_free(tab);
  return cache.emplace(n, std::move(nodes)).first->second;
}

}  // namespace bcft
