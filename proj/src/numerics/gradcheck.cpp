#include "infoasym/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "infoasym/errors.hpp"

namespace infoasym {

std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> params, double step) {
  if (!(step > 0.0)) throw InvalidInput("finite difference step must be positive");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + step;
    const double up = f(p);
    p[i] = saved - step;
    const double down = f(p);
    p[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NumericError("finite difference: objective returned a non-finite value");
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(double a, double b, double floor) noexcept {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw InvalidInput("max_relative_error: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, relative_error(a[i], b[i], floor));
  return worst;
}

}  // namespace infoasym
