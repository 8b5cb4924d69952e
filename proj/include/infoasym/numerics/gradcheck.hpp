#pragma once

#include <functional>
#include <span>
#include <vector>

namespace infoasym {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h for every coordinate.
/// Throws NumericError if f returns a non-finite value.
std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> params, double step = 1e-5);

/// |a - b| / max(|a|, |b|, floor). The floor keeps round-off on near-zero
/// gradients (about 1e-11 for unit-scale losses at step 1e-5) from reading as a
/// large relative error.
double relative_error(double a, double b, double floor = 1e-4) noexcept;

/// Largest relative_error over paired entries.
double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-4);

}  // namespace infoasym
