#include "crystalcool/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <map>
#include <memory>
#include <mutex>

#include "crystalcool/errors.hpp"

namespace crystalcool {

GaussLegendre::GaussLegendre(std::size_t n) {
  require(n >= 1, "Gauss-Legendre rule needs at least one node");
  // legendre_p_zeros returns the non-negative roots in ascending order.
  const auto positive = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  nodes.reserve(n);
  weights.reserve(n);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    if (*it == 0.0) continue;
    nodes.push_back(-*it);
    weights.push_back(weight(*it));
  }
  for (double x : positive) {
    nodes.push_back(x);
    weights.push_back(weight(x));
  }
}

const GaussLegendre& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(n);
  return *slot;
}

}  // namespace crystalcool
