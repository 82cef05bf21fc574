#pragma once

#include <functional>
#include <vector>

namespace ds2 {

struct GmresOptions {
  double tol = 1e-10;
  int restart = 50;
  int max_iter = 400;
};

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  std::vector<double> history;  // relative residual after each iteration
};

using RealOp = std::function<void(const std::vector<double>& in, std::vector<double>& out)>;

// Restarted GMRES over the reals, optionally right preconditioned. The
// operator only has to be linear over R, so complex fields with conjugation
// can be passed as interleaved (re, im) vectors.
GmresResult gmres_real_linear(const RealOp& apply, const std::vector<double>& rhs,
                              const GmresOptions& opt, const RealOp* precond = nullptr,
                              const std::vector<double>* x0 = nullptr);

}  // namespace ds2
