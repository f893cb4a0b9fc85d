#pragma once

// Initial product density matrix, Hermitian eigendecomposition and the
// closed-form exponential time average of the bright-state population.
//
// With H = V diag(E) V^dagger and rho0^eb = V^dagger rho0 V, the average of
// rho(t) over an exponential distribution of evolution times with mean tau is
//
//   rho^st_ij = rho0^eb_ij / (1 + 2 pi i (E_i - E_j) tau),
//
// and <rho00> = Tr{P0 V rho^st V^dagger}. Energies are in MHz and tau in
// seconds, hence the units::kHzPerMhz factor in the kernel.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lacsim/hamiltonian.hpp"

namespace lacsim {

struct DensityMatrix {
  Matrix mat;

  int dim() const { return static_cast<int>(mat.rows()); }
};

struct EigenSystem {
  Eigen::VectorXd energies;  // MHz, ascending
  Matrix vectors;            // columns are eigenvectors

  int dim() const { return static_cast<int>(energies.size()); }
};

/// Projector onto Ms = 0 of one center's electron spin, embedded in the full space.
struct BrightProjector {
  Matrix mat;
  std::size_t center = 0;
};

inline constexpr double kHermitianTolerance = 1e-10;

/// max |A - A^dagger| relative to max |A|.
inline double hermiticity_defect(const Matrix& a) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0e-300);
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

/// rho_S = alpha |0><0| + (1 - alpha)/3 * 1, with |0> the Ms = 0 state along `axis`.
inline Matrix polarized_spin_density(const SpinCenter& center, const Vector3& axis) {
  const auto ops = make_spin_operators(center.s);
  const int n = ops.dim();
  return center.alpha * zero_projection_projector(ops, axis) +
         ((1.0 - center.alpha) / n) * Matrix::Identity(n, n);
}

/// rho0 as a Kronecker product over slots: center 1 (and a spin-1 center 2)
/// polarized into Ms = 0 along their own symmetry axes, everything else
/// maximally mixed.
inline DensityMatrix initial_density(const SpinSystem& system) {
  validate(system);
  std::vector<Matrix> factors;
  for (std::size_t k = 0; k < system.center_count(); ++k) {
    const SpinCenter& c = system.center(k);
    if (c.has_bright_state()) {
      factors.push_back(polarized_spin_density(c, c.zfs_axis));
    } else {
      const int d = c.s.dim();
      factors.push_back(Matrix::Identity(d, d) / static_cast<double>(d));
    }
    for (const auto& nuc : c.nuclei) {
      const int d = nuc.i.dim();
      factors.push_back(Matrix::Identity(d, d) / static_cast<double>(d));
    }
  }
  return DensityMatrix{kron_chain(factors)};
}

inline BrightProjector bright_projector(const SpinSystem& system, std::size_t k = 0) {
  const SpinCenter& c = system.center(k);
  if (!c.has_bright_state()) {
    throw ValidationError("center '" + c.label + "' has no Ms = 0 bright state");
  }
  const Matrix local = zero_projection_projector(make_spin_operators(c.s), c.zfs_axis);
  return BrightProjector{embed_operator(local, {system.dims(), system.electron_slot(k)}), k};
}

/// Projectors for every center with a bright state, center 1 first.
inline std::vector<BrightProjector> bright_projectors(const SpinSystem& system) {
  std::vector<BrightProjector> out;
  for (std::size_t k = 0; k < system.center_count(); ++k) {
    if (system.center(k).has_bright_state()) out.push_back(bright_projector(system, k));
  }
  return out;
}

/// Fixes the gauge of each eigenvector: its largest-magnitude component is real positive.
inline void normalize_phases(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      // Near-ties go to the lowest row index so the choice is reproducible.
      if (a > best_abs * (1.0 + 1e-12)) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs > 0.0) vectors.col(c) *= std::conj(vectors(best, c)) / best_abs;
  }
}

inline EigenSystem eigen_decompose(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ValidationError("eigen_decompose needs a non-empty square matrix");
  }
  if (!h.allFinite()) throw NumericalError("Hamiltonian contains non-finite entries");
  if (hermiticity_defect(h) > kHermitianTolerance) {
    throw ValidationError("eigen_decompose: matrix is not Hermitian (defect " +
                          std::to_string(hermiticity_defect(h)) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
  normalize_phases(es.vectors);
  return es;
}

inline void require_positive_tau(double tau_s) {
  if (!(tau_s > 0.0) || !std::isfinite(tau_s)) {
    throw ValidationError("mean evolution time tau must be positive and finite");
  }
}

/// Filter kernel 1 / (1 + 2 pi i Delta tau) with Delta in MHz and tau in seconds.
inline Complex averaging_kernel(double delta_mhz, double tau_s) {
  return 1.0 / Complex(1.0, units::kTwoPi * delta_mhz * units::kHzPerMhz * tau_s);
}

/// V^dagger A V, using a weighted Gram product when A is diagonal with non-negative entries
/// and a sparse first product when A is mostly zeros.
inline Matrix to_eigenbasis(const Matrix& a, const Matrix& v) {
  struct Entry {
    Eigen::Index row;
    Eigen::Index col;
    Complex value;
  };
  std::vector<Entry> nonzero;
  bool diagonal = true;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      const Complex x = a(r, c);
      if (x == Complex(0.0, 0.0)) continue;
      nonzero.push_back({r, c, x});
      diagonal = diagonal && r == c && x.imag() == 0.0 && x.real() > 0.0;
    }
  }
  if (diagonal) {
    Matrix w(static_cast<Eigen::Index>(nonzero.size()), v.cols());
    for (std::size_t k = 0; k < nonzero.size(); ++k) {
      w.row(static_cast<Eigen::Index>(k)) = std::sqrt(nonzero[k].value.real()) * v.row(nonzero[k].row);
    }
    return w.adjoint() * w;
  }
  // Projectors of tilted centers are mostly zeros.
  if (static_cast<Eigen::Index>(nonzero.size()) * 8 < a.size()) {
    Matrix av = Matrix::Zero(a.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      for (const auto& e : nonzero) av(e.row, j) += e.value * v(e.col, j);
    }
    return v.adjoint() * av;
  }
  return v.adjoint() * a * v;
}

/// Exponentially time-averaged density matrix, returned in the original basis.
inline DensityMatrix stationary_density(const DensityMatrix& rho0, const EigenSystem& es, double tau_s) {
  require_positive_tau(tau_s);
  Matrix eb = es.vectors.adjoint() * rho0.mat * es.vectors;
  for (int i = 0; i < es.dim(); ++i) {
    for (int j = 0; j < es.dim(); ++j) {
      if (i != j) eb(i, j) *= averaging_kernel(es.energies(i) - es.energies(j), tau_s);
    }
  }
  return DensityMatrix{es.vectors * eb * es.vectors.adjoint()};
}

inline constexpr double kImaginaryResidueTolerance = 1e-10;
inline constexpr double kBoundSlack = 1e-10;

/// Real part of a trace that must be real; out-of-range values within slack are clamped.
inline double checked_population(Complex value, double upper = 1.0) {
  if (std::abs(value.imag()) > kImaginaryResidueTolerance) {
    throw NumericalError("population has imaginary residue " + std::to_string(value.imag()));
  }
  double p = value.real();
  if (p < 0.0 && p >= -kBoundSlack) p = 0.0;
  if (p > upper && p <= upper + kBoundSlack) p = upper;
  return p;
}

/// Averaged populations for several projectors sharing one eigendecomposition.
inline std::vector<double> averaged_populations(const DensityMatrix& rho0, const EigenSystem& es,
                                                std::span<const BrightProjector> projectors,
                                                double tau_s) {
  require_positive_tau(tau_s);
  const int n = es.dim();
  const Matrix rho_eb = to_eigenbasis(rho0.mat, es.vectors);
  Matrix kernel(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      kernel(i, j) = i == j ? Complex(1.0, 0.0)
                            : averaging_kernel(es.energies(i) - es.energies(j), tau_s);
    }
  }
  const Matrix filtered = rho_eb.cwiseProduct(kernel);
  std::vector<double> out;
  out.reserve(projectors.size());
  for (const auto& p : projectors) {
    // Tr{P V rho^st V^dagger} = sum_ij (V^dagger P V)_ji rho^st_ij; the first factor is Hermitian.
    const Matrix p_eb = to_eigenbasis(p.mat, es.vectors);
    out.push_back(checked_population(p_eb.conjugate().cwiseProduct(filtered).sum()));
  }
  return out;
}

inline double averaged_population(const DensityMatrix& rho0, const EigenSystem& es,
                                  const BrightProjector& proj, double tau_s) {
  return averaged_populations(rho0, es, std::span(&proj, 1), tau_s).front();
}

/// Tr{P rho} for the unevolved state.
inline double initial_population(const DensityMatrix& rho0, const BrightProjector& proj) {
  return checked_population((proj.mat * rho0.mat).trace());
}

}  // namespace lacsim
