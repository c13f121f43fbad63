#pragma once

#include <cstddef>
#include <functional>

#include "hogt/autodiff.hpp"

namespace hogt {

struct FiniteDiffReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::size_t worst_coordinate = 0;
  double step = 0.0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

using ScalarFunction = std::function<ad::Var(ad::Tape&, ad::Var)>;

// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h against the tape gradient.
// Relative error uses max(|a|, |b|, 1e-8) as denominator.
FiniteDiffReport gradcheck(const ScalarFunction& f, const Tensor& x, double step = 1e-4);

// Evaluates f at x and returns the scalar output.
double evaluate_scalar(const ScalarFunction& f, const Tensor& x);

}  // namespace hogt
