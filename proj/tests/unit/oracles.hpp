// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "zinpaint/tensor.hpp"

namespace oracles {

// Central finite difference of a scalar function of a vector.
inline std::vector<double> central_diff(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double step) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    grad[i] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return grad;
}

inline double rel_err(double got, double want) {
  const double denom = std::max({std::abs(got), std::abs(want), 1e-12});
  return std::abs(got - want) / denom;
}

// Worst relative component error between a gradient and its reference,
// ignoring components that are tiny in both.
inline double max_grad_rel_err(const std::vector<double>& got,
                               const std::vector<double>& want,
                               double absolute_floor = 1e-7) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (std::abs(got[i]) < absolute_floor && std::abs(want[i]) < absolute_floor) {
      continue;
    }
    worst = std::max(worst, rel_err(got[i], want[i]));
  }
  return worst;
}

// Scalar blob renderer evaluated one pixel at a time, written directly from
// the formula.
inline double blob_pixel(const std::vector<double>& z, int k_blobs,
                         int channels, double sigma_min, double sigma_max,
                         int height, int width, int y, int x, int c) {
  double s = 0.0;
  for (int k = 0; k < k_blobs; ++k) {
    const int base = k * (3 + channels);
    const double cx = (z[base + 0] + 1.0) / 2.0 * (width - 1);
    const double cy = (z[base + 1] + 1.0) / 2.0 * (height - 1);
    const double sigma = sigma_min + (z[base + 2] + 1.0) / 2.0 * (sigma_max - sigma_min);
    const double a = z[base + 3 + c];
    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    s += a * std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return std::tanh(s);
}

// Plain matrix-vector forward pass for an MLP given raw layer data.
struct DenseLayer {
  int rows, cols;
  std::vector<double> w, b;  // row-major
  bool sigmoid;
};

inline std::vector<double> mlp_forward(const std::vector<DenseLayer>& layers,
                                       std::vector<double> x) {
  for (const DenseLayer& l : layers) {
    std::vector<double> y(static_cast<std::size_t>(l.rows));
    for (int r = 0; r < l.rows; ++r) {
      double acc = l.b[static_cast<std::size_t>(r)];
      for (int c = 0; c < l.cols; ++c) {
        acc += l.w[static_cast<std::size_t>(r) * l.cols + c] *
               x[static_cast<std::size_t>(c)];
      }
      y[static_cast<std::size_t>(r)] =
          l.sigmoid ? 1.0 / (1.0 + std::exp(-acc)) : std::tanh(acc);
    }
    x = std::move(y);
  }
  return x;
}

// Mean-squared-error PSNR, written directly from the definition.
inline double psnr_ref(const zinpaint::Image& a, const zinpaint::Image& b,
                       double peak, double cap) {
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse < peak * peak * std::pow(10.0, -cap / 10.0)) return cap;
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace oracles
