#include "hogt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hogt/error.hpp"

namespace hogt {

double evaluate_scalar(const ScalarFunction& f, const Tensor& x) {
  ad::Tape tape;
  ad::Var out = f(tape, tape.constant(x));
  if (out.value().size() != 1) throw Error(ErrorKind::DimensionError, "gradcheck needs a scalar output");
  return out.value()[0];
}

FiniteDiffReport gradcheck(const ScalarFunction& f, const Tensor& x, double step) {
  if (step < 1e-6 || step > 1e-3) throw Error(ErrorKind::InvalidParameter, "step must lie in [1e-6, 1e-3]");
  ad::Tape tape;
  ad::Var xv = tape.leaf(x);
  ad::Var out = f(tape, xv);
  if (out.value().size() != 1) throw Error(ErrorKind::DimensionError, "gradcheck needs a scalar output");
  tape.backward(out);
  Tensor analytic = xv.grad().size() ? xv.grad() : Tensor(x.shape());

  FiniteDiffReport report;
  report.step = step;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    double plus = evaluate_scalar(f, probe);
    probe[i] = x[i] - step;
    double minus = evaluate_scalar(f, probe);
    probe[i] = x[i];
    double numeric = (plus - minus) / (2.0 * step);
    double a = analytic[i];
    double abs_err = std::abs(a - numeric);
    double rel = abs_err / std::max({std::abs(a), std::abs(numeric), 1e-8});
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    if (i == 0 || rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_coordinate = i;
      report.analytic_at_worst = a;
      report.numeric_at_worst = numeric;
    }
  }
  return report;
}

}  // namespace hogt
