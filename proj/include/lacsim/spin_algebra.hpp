#pragma once

// Spin operator matrices, Kronecker embedding into product spaces, and
// axial interaction tensors rotated into the lab frame.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lacsim/errors.hpp"
#include "lacsim/units.hpp"

namespace lacsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Spin quantum number stored as the integer 2s so that 1/2, 1, 3/2 are exact.
class SpinQuantum {
 public:
  constexpr SpinQuantum() = default;

  static SpinQuantum from_twice(int twice_s) {
    if (twice_s <= 0) {
      throw ValidationError("spin quantum number must be positive, got 2s = " +
                            std::to_string(twice_s));
    }
    SpinQuantum s;
    s.twice_ = twice_s;
    return s;
  }

  static SpinQuantum from_value(double s) {
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (!std::isfinite(s) || std::abs(twice - rounded) > 1e-9 || rounded < 1.0) {
      throw ValidationError("spin quantum number must be a positive half-integer, got " +
                            std::to_string(s));
    }
    return from_twice(static_cast<int>(rounded));
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr int dim() const { return twice_ + 1; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr bool operator==(const SpinQuantum&) const = default;

 private:
  int twice_ = 1;
};

inline const SpinQuantum kSpinHalf = SpinQuantum::from_twice(1);
inline const SpinQuantum kSpinOne = SpinQuantum::from_twice(2);

/// Cartesian spin matrices in the |s, m> basis ordered m = s, s-1, ..., -s.
struct SpinOperators {
  SpinQuantum s;
  Matrix sx;
  Matrix sy;
  Matrix sz;

  int dim() const { return s.dim(); }
  const Matrix& operator[](int axis) const { return axis == 0 ? sx : (axis == 1 ? sy : sz); }
};

inline SpinOperators make_spin_operators(SpinQuantum s) {
  const int n = s.dim();
  const double sv = s.value();
  Matrix raise = Matrix::Zero(n, n);
  Matrix sz = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double m = sv - i;
    sz(i, i) = m;
    if (i > 0) {
      // <m+1| S+ |m> sits at row i-1, column i.
      raise(i - 1, i) = std::sqrt(sv * (sv + 1.0) - m * (m + 1.0));
    }
  }
  const Matrix lower = raise.adjoint();
  SpinOperators ops{s, 0.5 * (raise + lower), Complex(0.0, -0.5) * (raise - lower), sz};
  return ops;
}

inline SpinOperators make_spin_operators(double s) {
  return make_spin_operators(SpinQuantum::from_value(s));
}

/// Component of the spin vector along a lab-frame direction, n . S.
inline Matrix spin_along(const SpinOperators& ops, const Vector3& n) {
  return n.x() * ops.sx + n.y() * ops.sy + n.z() * ops.sz;
}

/// Projector onto the m = 0 eigenstate of n . S (integer spins only).
///
/// Built as the Lagrange interpolation product over the other eigenvalues, so
/// no eigensolver is involved.
inline Matrix zero_projection_projector(const SpinOperators& ops, const Vector3& n) {
  if (!ops.s.is_integer()) {
    throw ValidationError("m = 0 projector requires an integer spin");
  }
  const int dim = ops.dim();
  const Matrix sn = spin_along(ops, n);
  const Matrix id = Matrix::Identity(dim, dim);
  Matrix p = id;
  for (int i = 0; i < dim; ++i) {
    const double m = ops.s.value() - i;
    if (m == 0.0) continue;
    p = p * (sn - m * id) / (-m);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Product spaces

/// Subsystem dimensions of a product space plus the slot an operator acts on.
struct EmbeddingMap {
  std::vector<int> dims;
  std::size_t target = 0;

  int total_dim() const {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
  }
  int target_dim() const { return dims.at(target); }
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Kronecker product of factors in order, first factor is the slowest index.
inline Matrix kron_chain(std::span<const Matrix> factors) {
  if (factors.empty()) return Matrix::Identity(1, 1);
  Matrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

/// Identity on every slot except map.target, where op is placed.
inline Matrix embed_operator(const Matrix& op, const EmbeddingMap& map) {
  if (map.target >= map.dims.size()) {
    throw ValidationError("embedding target slot out of range");
  }
  if (op.rows() != op.cols() || op.rows() != map.target_dim()) {
    throw ValidationError("operator dimension " + std::to_string(op.rows()) + "x" +
                          std::to_string(op.cols()) + " does not match slot dimension " +
                          std::to_string(map.target_dim()));
  }
  int left = 1;
  int right = 1;
  for (std::size_t k = 0; k < map.dims.size(); ++k) {
    if (k < map.target) left *= map.dims[k];
    if (k > map.target) right *= map.dims[k];
  }
  const int d = map.target_dim();
  const int total = left * d * right;
  Matrix out = Matrix::Zero(total, total);
  for (int l = 0; l < left; ++l) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const Complex v = op(a, b);
        if (v == Complex(0.0, 0.0)) continue;
        const int row0 = (l * d + a) * right;
        const int col0 = (l * d + b) * right;
        for (int r = 0; r < right; ++r) out(row0 + r, col0 + r) = v;
      }
    }
  }
  return out;
}

/// Spin operators of one slot, each already embedded in the full space.
struct EmbeddedSpin {
  std::array<Matrix, 3> components;

  const Matrix& operator[](int axis) const { return components[axis]; }
};

inline EmbeddedSpin embed_spin(const SpinOperators& ops, const EmbeddingMap& map) {
  return EmbeddedSpin{{embed_operator(ops.sx, map), embed_operator(ops.sy, map),
                       embed_operator(ops.sz, map)}};
}

/// sum_ab T_ab A_a B_b for embedded spin vectors A, B and a 3x3 real tensor T.
inline Matrix bilinear(const EmbeddedSpin& a, const Matrix3& t, const EmbeddedSpin& b) {
  const auto n = a[0].rows();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < 3; ++i) {
    Matrix weighted = Matrix::Zero(n, n);
    for (int j = 0; j < 3; ++j) {
      if (t(i, j) != 0.0) weighted += t(i, j) * b[j];
    }
    if (!weighted.isZero(0.0)) out += a[i] * weighted;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tensors and rotations

/// Tensor with one unique principal value along `axis` and a degenerate pair
/// perpendicular to it.
struct AxialTensor {
  double parallel = 0.0;
  double perpendicular = 0.0;
  Vector3 axis = Vector3::UnitZ();

  bool operator==(const AxialTensor&) const = default;
};

inline constexpr double kAxisNormTolerance = 1e-12;

inline void require_unit(const Vector3& v, const std::string& what) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kAxisNormTolerance) {
    throw ValidationError(what + " must be a unit vector (norm = " + std::to_string(v.norm()) +
                          ")");
  }
}

inline AxialTensor isotropic_tensor(double value) { return AxialTensor{value, value, Vector3::UnitZ()}; }

/// Lab-frame 3x3 form: perpendicular * I + (parallel - perpendicular) * axis axis^T.
inline Matrix3 rotate_axial_tensor(const AxialTensor& t) {
  require_unit(t.axis, "axial tensor axis");
  return t.perpendicular * Matrix3::Identity() +
         (t.parallel - t.perpendicular) * (t.axis * t.axis.transpose());
}

/// Active rotation by `angle` (radians) about a unit axis.
inline Matrix3 rotation_about(const Vector3& axis, double angle) {
  require_unit(axis, "rotation axis");
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

/// Active rotation from z-y-z Euler angles (radians): Rz(alpha) Ry(beta) Rz(gamma).
inline Matrix3 euler_zyz(double alpha, double beta, double gamma) {
  return (Eigen::AngleAxisd(alpha, Vector3::UnitZ()) * Eigen::AngleAxisd(beta, Vector3::UnitY()) *
          Eigen::AngleAxisd(gamma, Vector3::UnitZ()))
      .toRotationMatrix();
}

/// Rotates a tensor's principal frame: R T R^T.
inline Matrix3 rotate_tensor(const Matrix3& t, const Matrix3& r) { return r * t * r.transpose(); }

/// Unit vector at polar angle `polar` from z and azimuth `azimuth` (radians).
inline Vector3 direction_from_angles(double polar, double azimuth) {
  return Vector3(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                 std::cos(polar));
}

/// The four <111> directions in a frame whose z axis is one of them.
/// Index 0 is z; indices 1..3 are tilted by the tetrahedral angle at
/// azimuths 0, 120 and 240 degrees.
inline std::array<Vector3, 4> tetrahedral_axes() {
  const double theta = units::kTetrahedralAngle;
  const double step = units::degrees_to_radians(120.0);
  return {Vector3::UnitZ(), direction_from_angles(theta, 0.0), direction_from_angles(theta, step),
          direction_from_angles(theta, 2.0 * step)};
}

}  // namespace lacsim
