#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

// loss_fn(store, with_grad) returns the loss; when with_grad is true it must
// also accumulate the analytic gradient into store. It must be deterministic.
using LossFn = std::function<double(ParamStore<double>&, bool with_grad)>;

// Central differences against the analytic gradient over trainable
// coordinates. When there are more than max_coords coordinates a seeded
// uniform subset is checked (never fewer than 100). Relative error is
// |ga - gn| / max(|ga|, |gn|, 1e-8).
inline GradCheckResult grad_check(const LossFn& loss_fn, ParamStore<double>& store,
                                  double epsilon = 1e-5, std::size_t max_coords = 2000,
                                  std::uint64_t seed = 0) {
  store.zero_grad();
  double base = loss_fn(store, true);
  if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss");

  std::vector<std::pair<std::string, Index>> coords;
  for (const auto& [name, e] : store.entries()) {
    if (!e.trainable) continue;
    for (Index i = 0; i < e.value.size(); ++i) coords.emplace_back(name, i);
  }
  max_coords = std::max<std::size_t>(max_coords, 100);
  if (coords.size() > max_coords) {
    Rng rng(seed);
    rng.shuffle(coords);
    coords.resize(max_coords);
    std::sort(coords.begin(), coords.end());
  }

  std::map<std::string, Mat<double>> analytic;
  for (const auto& [name, e] : store.entries()) analytic[name] = e.grad;

  GradCheckResult result;
  result.coordinates = coords.size();
  for (const auto& [name, i] : coords) {
    double& theta = store.value(name).data()[i];
    const double saved = theta;
    theta = saved + epsilon;
    double plus = loss_fn(store, false);
    theta = saved - epsilon;
    double minus = loss_fn(store, false);
    theta = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw NumericError("grad_check: non-finite loss while perturbing " + name);
    double numeric = (plus - minus) / (2.0 * epsilon);
    double exact = analytic[name].data()[i];
    double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
    double rel = std::abs(exact - numeric) / denom;
    if (rel > result.max_rel_error || result.worst_index < 0) {
      result.max_rel_error = std::max(rel, result.max_rel_error);
      result.worst_param = name;
      result.worst_index = i;
      result.worst_analytic = exact;
      result.worst_numeric = numeric;
    }
  }
  store.zero_grad();
  return result;
}

}  // namespace lovebirds
