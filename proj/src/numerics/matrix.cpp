#include "infoasym/numerics/matrix.hpp"

#include <cmath>

#include "infoasym/errors.hpp"

namespace infoasym {

bool all_finite(std::span<const double> v) noexcept {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Matrix::all_finite() const noexcept { return infoasym::all_finite(data_); }

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw InvalidInput("matvec: vector length does not match matrix columns");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double acc = 0.0;
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

std::vector<double> vecmat(std::span<const double> x, const Matrix& a) {
  if (x.size() != a.rows()) throw InvalidInput("vecmat: vector length does not match matrix rows");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) y[c] += x[r] * row[c];
  }
  return y;
}

}  // namespace infoasym
