#include "metasymnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metasymnet/rng.hpp"
#include "metasymnet/training.hpp"
#include "metasymnet/tree_distance.hpp"

namespace metasymnet {

std::optional<double> r_squared(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw std::invalid_argument("r_squared: length mismatch");
  if (y.size() < 2) throw std::invalid_argument("r_squared: need at least two samples");

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    const double t = y[i] - mean;
    ss_res += r * r;
    ss_tot += t * t;
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

double mean_squared_error(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw std::invalid_argument("mse: length mismatch");
  if (y.empty()) throw std::invalid_argument("mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - yhat[i];
    acc += e * e;
  }
  return acc / static_cast<double>(y.size());
}

double ned(const Expression& pred, const Expression& truth) {
  const int ed = tree_edit_distance(pred, truth);
  const int size = truth.node_count();
  return std::min(1.0, static_cast<double>(ed) / size);
}

bool is_recovered(const Expression& pred, const Expression& truth, const SamplingSpec& domain,
                  int k, std::uint64_t seed, const EvalPolicy& policy) {
  if (ned(pred, truth) == 0.0) return true;
  if (pred.node_count() > truth.node_count() + 2) return false;

  SamplingSpec dense = domain;
  dense.count = domain.count * 10;
  dense.seed = derive_seed(seed, 0xd35e11);
  Dataset data;
  data.X = sample(dense, k);
  data.y.resize(static_cast<std::size_t>(data.X.rows));
  for (int i = 0; i < data.X.rows; ++i) {
    data.y[static_cast<std::size_t>(i)] = truth.eval(data.X.row(i), policy);
  }

  const Expression refined = refine_constants(pred, data, 500, 0.01, policy);
  const auto r2 = r_squared(data.y, refined.eval_rows(data.X, policy));
  return r2.has_value() && *r2 > 1.0 - 1e-10;
}

}  // namespace metasymnet
