#pragma once

// Brute-force reference for the averaged population: propagates
// rho(t) = U(t) rho0 U(t)^dagger in the time domain and integrates
// (1/tau) * int_0^inf Tr{P rho(t)} exp(-t/tau) dt numerically.
//
// Nothing here uses an eigendecomposition. The propagator over a short base
// interval comes from a Taylor series; the integral over the base interval is
// composite Simpson, and longer intervals are assembled by doubling:
//
//   I(2T) = I(T) + exp(-T/tau) U(T) I(T) U(T)^dagger,   U(2T) = U(T)^2.

#include <cmath>

#include "lacsim/evolution.hpp"

namespace lacsim {

namespace detail {

/// exp(-i 2 pi H dt) for a small step, by Taylor series to machine precision.
inline Matrix taylor_propagator(const Matrix& h_mhz, double dt_s) {
  const int n = static_cast<int>(h_mhz.rows());
  const Matrix generator = Complex(0.0, -units::kTwoPi * units::kHzPerMhz * dt_s) * h_mhz;
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k < 60; ++k) {
    term = (term * generator) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return sum;
}

/// Nearest unitary matrix (polar factor). Keeps repeated squaring from
/// amplifying the norm error of the base step.
inline Matrix unitary_part(const Matrix& u) {
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace detail

/// Time-domain average of Tr{P rho(t)} over exp(-t/tau)/tau.
///
/// n_samples is the number of Simpson intervals on the base step (rounded up
/// to even, at least 1000).
inline double time_domain_oracle(const DensityMatrix& rho0, const Matrix& h_mhz,
                                 const BrightProjector& proj, double tau_s, int n_samples = 2000) {
  require_positive_tau(tau_s);
  if (n_samples < 1000) n_samples = 1000;
  if (n_samples % 2 != 0) ++n_samples;

  // Base interval: total phase excursion of about 0.5 rad over the largest
  // energy scale, never longer than tau / 64.
  const double spectral_bound = std::max(h_mhz.cwiseAbs().rowwise().sum().maxCoeff(), 1e-12);
  double base = 0.5 / (units::kTwoPi * units::kHzPerMhz * spectral_bound);
  base = std::min(base, tau_s / 64.0);
  const double h = base / n_samples;

  const Matrix step = detail::unitary_part(detail::taylor_propagator(h_mhz, h));
  Matrix u = Matrix::Identity(h_mhz.rows(), h_mhz.cols());
  Matrix integral = Matrix::Zero(h_mhz.rows(), h_mhz.cols());
  for (int k = 0; k <= n_samples; ++k) {
    const double t = k * h;
    const double w = (k == 0 || k == n_samples) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    integral += (w * h / 3.0 * std::exp(-t / tau_s)) * (u * rho0.mat * u.adjoint());
    if (k < n_samples) u = step * u;
  }
  u = detail::unitary_part(u);

  // Double until the remaining tail weight exp(-T/tau) is below 1e-16.
  double span = base;
  while (span < 40.0 * tau_s) {
    integral += std::exp(-span / tau_s) * (u * integral * u.adjoint());
    u = detail::unitary_part(u * u);
    span *= 2.0;
  }
  return ((proj.mat * integral).trace() / tau_s).real();
}

}  // namespace lacsim
