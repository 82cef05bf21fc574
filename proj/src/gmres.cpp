#include "ds2/gmres.hpp"

#include <cmath>

#include "ds2/kernels.hpp"

namespace ds2 {

namespace {
double norm2(const std::vector<double>& v) {
  return std::sqrt(kernels::dot(v.data(), v.data(), v.size()));
}
}  // namespace

GmresResult gmres_real_linear(const RealOp& apply, const std::vector<double>& rhs,
                              const GmresOptions& opt, const RealOp* precond,
                              const std::vector<double>* x0) {
  const std::size_t n = rhs.size();
  const int m = std::max(1, opt.restart);
  GmresResult res;
  res.x = x0 ? *x0 : std::vector<double>(n, 0.0);

  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), w(n), z(n);
  auto residual = [&]() {
    if (x0 == nullptr && res.iterations == 0) {
      r = rhs;
    } else {
      apply(res.x, w);
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - w[i];
    }
    return norm2(r);
  };

  std::vector<std::vector<double>> V(m + 1);
  std::vector<double> H(std::size_t(m + 1) * m), cs(m), sn(m), g(m + 1), y(m);
  auto h = [&](int i, int j) -> double& { return H[std::size_t(j) * (m + 1) + i]; };

  double beta = residual();
  res.rel_residual = beta / bnorm;
  if (res.rel_residual <= opt.tol) {
    res.converged = true;
    return res;
  }

  while (res.iterations < opt.max_iter) {
    V[0] = r;
    kernels::scal(1.0 / beta, V[0].data(), n);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && res.iterations < opt.max_iter; ++k) {
      if (precond) {
        (*precond)(V[k], z);
        apply(z, w);
      } else {
        apply(V[k], w);
      }
      // modified Gram-Schmidt, two passes
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          double c = kernels::dot(w.data(), V[i].data(), n);
          if (pass == 0) h(i, k) = c; else h(i, k) += c;
          kernels::axpy(-c, V[i].data(), w.data(), n);
        }
      double hn = norm2(w);
      h(k + 1, k) = hn;
      for (int i = 0; i < k; ++i) {
        double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      double den = std::hypot(h(k, k), h(k + 1, k));
      cs[k] = den == 0.0 ? 1.0 : h(k, k) / den;
      sn[k] = den == 0.0 ? 0.0 : h(k + 1, k) / den;
      h(k, k) = den;
      h(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++res.iterations;
      double rel = std::abs(g[k + 1]) / bnorm;
      res.history.push_back(rel);
      if (rel <= opt.tol || hn <= 1e-300) {
        ++k;
        break;
      }
      V[k + 1] = w;
      kernels::scal(1.0 / hn, V[k + 1].data(), n);
    }
    // back substitution and update
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
      y[i] = h(i, i) == 0.0 ? 0.0 : s / h(i, i);
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < k; ++i) kernels::axpy(y[i], V[i].data(), w.data(), n);
    if (precond) {
      (*precond)(w, z);
      kernels::axpy(1.0, z.data(), res.x.data(), n);
    } else {
      kernels::axpy(1.0, w.data(), res.x.data(), n);
    }
    beta = residual();
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= opt.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace ds2
