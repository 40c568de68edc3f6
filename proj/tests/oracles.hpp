#pragma once

// Test-only oracles. These stay independent of the library's refinement path:
// the polynomial-derivative oracle goes through divided differences, never
// through rpi_step.

#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sdn/refine.hpp"

namespace oracle {

// Derivative at u0 of the unique polynomial interpolating `samples`, via
// Newton divided differences. O(n^2).
inline double newton_derivative(const std::vector<std::pair<double, double>>& samples, double u0) {
  const size_t n = samples.size();
  if (n == 0) throw sdn::DegenerateInputError("newton_derivative: no samples");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (samples[i].first == samples[j].first)
        throw sdn::DegenerateInputError("newton_derivative: duplicate abscissae");

  std::vector<double> x(n), c(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = samples[i].first;
    c[i] = samples[i].second;
  }
  for (size_t k = 1; k < n; ++k)
    for (size_t i = n - 1; i >= k; --i) c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - k]);

  // derivative of the Newton form by the product rule
  double prod = 1.0, dprod = 0.0, der = 0.0;
  for (size_t j = 0; j < n; ++j) {
    der += c[j] * dprod;
    dprod = dprod * (u0 - x[j]) + prod;
    prod *= (u0 - x[j]);
  }
  return der;
}

// Chains rpi_step over a row of samples the way the dynamic program would:
// every position keeps its own current-order state, and each round consumes
// the next collinear neighbor. Returns the anchor's gradient after
// `target_order` refinements. dir=+1 anchors at z.front() consuming rightward,
// dir=-1 anchors at z.back() consuming leftward.
inline double chained_rpi(const std::vector<double>& z, int target_order, int dir) {
  const int m = int(z.size()) - 2;  // number of refinements available
  if (target_order > m || target_order < 0) throw std::invalid_argument("row too short for target order");
  const int count = int(z.size()) - 1;
  std::vector<sdn::RpiState> g(size_t(count));
  if (dir > 0) {
    for (int i = 0; i < count; ++i) g[size_t(i)] = sdn::RpiState::from_difference(z[i + 1] - z[i], +1);
    for (int k = 1; k <= target_order; ++k)
      for (int i = 0; i + k < count; ++i) g[size_t(i)] = sdn::rpi_step(g[size_t(i)], g[size_t(i) + 1], k, +1);
    return g[0].gradient;
  }
  for (int i = 0; i < count; ++i)
    g[size_t(i)] = sdn::RpiState::from_difference(z[i + 1] - z[i], -1);  // backward FD at anchor i+1
  for (int k = 1; k <= target_order; ++k)
    for (int i = count - 1; i - k >= 0; --i) g[size_t(i)] = sdn::rpi_step(g[size_t(i)], g[size_t(i) - 1], k, -1);
  return g[size_t(count) - 1].gradient;
}

struct Poly {
  std::vector<double> coef;  // coef[i] * u^i

  double operator()(double u) const {
    double s = 0.0;
    for (size_t i = coef.size(); i-- > 0;) s = s * u + coef[i];
    return s;
  }
  double derivative(double u) const {
    double s = 0.0;
    for (size_t i = coef.size(); i-- > 1;) s = s * u + coef[i] * double(i);
    return s;
  }
};

inline Poly random_poly(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  Poly p;
  p.coef.resize(size_t(deg(rng)) + 1);
  for (double& x : p.coef) x = c(rng);
  return p;
}

}  // namespace oracle
