#pragma once

// Lab-frame spin Hamiltonian of one NV-like center, optionally coupled to a
// second center by the electron dipole-dipole interaction. All terms in MHz.

#include <optional>
#include <string>
#include <vector>

#include "lacsim/spin_algebra.hpp"

namespace lacsim {

struct Nucleus {
  std::string label;
  SpinQuantum i = kSpinOne;
  AxialTensor hfc;                 // MHz
  double quadrupole_mhz = 0.0;     // ignored for spin-1/2
  Vector3 quadrupole_axis = Vector3::UnitZ();

  bool operator==(const Nucleus&) const = default;
};

struct SpinCenter {
  std::string label;
  SpinQuantum s = kSpinOne;
  AxialTensor g{2.0023, 2.0023, Vector3::UnitZ()};
  double zfs_d_mhz = 0.0;
  Vector3 zfs_axis = Vector3::UnitZ();
  std::vector<Nucleus> nuclei;
  double alpha = 1.0;  // light-induced Ms = 0 polarization, integer spins only

  /// Spin-1 centers carry an optically bright Ms = 0 state.
  bool has_bright_state() const { return s == kSpinOne; }

  bool operator==(const SpinCenter&) const = default;
};

struct SpinSystem {
  SpinCenter center1;
  std::optional<SpinCenter> center2;
  double dipolar_mhz = 0.0;
  Vector3 n12 = Vector3::UnitZ();

  bool operator==(const SpinSystem&) const = default;

  std::size_t center_count() const { return center2 ? 2 : 1; }
  const SpinCenter& center(std::size_t k) const { return k == 0 ? center1 : *center2; }

  /// Slot dimensions in Kronecker order: electron 1, its nuclei, electron 2, its nuclei.
  std::vector<int> dims() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < center_count(); ++k) {
      out.push_back(center(k).s.dim());
      for (const auto& n : center(k).nuclei) out.push_back(n.i.dim());
    }
    return out;
  }

  int dimension() const {
    int d = 1;
    for (int x : dims()) d *= x;
    return d;
  }

  std::size_t electron_slot(std::size_t k) const {
    return k == 0 ? 0 : 1 + center1.nuclei.size();
  }
  std::size_t nucleus_slot(std::size_t k, std::size_t n) const { return electron_slot(k) + 1 + n; }
};

/// External field in Gauss.
struct FieldPoint {
  Vector3 gauss = Vector3::Zero();
};

/// Where a center's electron and nuclei live in the full product space.
struct CenterSlots {
  std::vector<int> dims;
  std::size_t electron = 0;
  std::vector<std::size_t> nuclei;

  EmbeddingMap electron_map() const { return {dims, electron}; }
  EmbeddingMap nucleus_map(std::size_t n) const { return {dims, nuclei.at(n)}; }
};

inline CenterSlots center_slots(const SpinSystem& system, std::size_t k) {
  CenterSlots slots{system.dims(), system.electron_slot(k), {}};
  for (std::size_t n = 0; n < system.center(k).nuclei.size(); ++n) {
    slots.nuclei.push_back(system.nucleus_slot(k, n));
  }
  return slots;
}

/// Slots of a center standing alone: [electron, nuclei...].
inline CenterSlots center_slots(const SpinCenter& center) {
  SpinSystem lone{center, std::nullopt, 0.0, Vector3::UnitZ()};
  return center_slots(lone, 0);
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const Nucleus& n) {
  require_unit(n.hfc.axis, "nucleus '" + n.label + "' hyperfine axis");
  require_unit(n.quadrupole_axis, "nucleus '" + n.label + "' quadrupole axis");
  if (!std::isfinite(n.hfc.parallel) || !std::isfinite(n.hfc.perpendicular) ||
      !std::isfinite(n.quadrupole_mhz)) {
    throw ValidationError("nucleus '" + n.label + "' has non-finite couplings");
  }
}

inline void validate(const SpinCenter& c) {
  require_unit(c.g.axis, "center '" + c.label + "' g axis");
  require_unit(c.zfs_axis, "center '" + c.label + "' zfs axis");
  if (!std::isfinite(c.g.parallel) || !std::isfinite(c.g.perpendicular) ||
      !std::isfinite(c.zfs_d_mhz)) {
    throw ValidationError("center '" + c.label + "' has non-finite parameters");
  }
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
    throw ValidationError("center '" + c.label + "' alpha must lie in [0, 1]");
  }
  if (c.s == kSpinHalf && c.zfs_d_mhz != 0.0) {
    throw ValidationError("center '" + c.label + "' is spin-1/2 but has a nonzero ZFS D");
  }
  for (const auto& n : c.nuclei) validate(n);
}

inline void validate(const SpinSystem& s) {
  validate(s.center1);
  if (!s.center1.has_bright_state()) {
    throw ValidationError("center1 must be a spin-1 (NV-like) center");
  }
  if (s.center2) {
    validate(*s.center2);
    require_unit(s.n12, "inter-center direction n12");
    if (!std::isfinite(s.dipolar_mhz)) throw ValidationError("dipolar coupling is not finite");
  }
}

// ---------------------------------------------------------------------------
// Individual terms

/// beta * B^T G S for the center's electron spin.
inline Matrix zeeman_term(const SpinCenter& center, const FieldPoint& b0, const CenterSlots& slots) {
  if (!b0.gauss.allFinite()) throw ValidationError("field vector is not finite");
  const auto ops = make_spin_operators(center.s);
  const Vector3 coeff =
      units::kBohrMhzPerGauss * (b0.gauss.transpose() * rotate_axial_tensor(center.g)).transpose();
  return embed_operator(spin_along(ops, coeff), slots.electron_map());
}

/// S^T D S with D the traceless axial ZFS tensor (principal values 2D/3, -D/3, -D/3).
inline Matrix zfs_term(const SpinCenter& center, const CenterSlots& slots) {
  const int n = EmbeddingMap{slots.dims, 0}.total_dim();
  if (center.zfs_d_mhz == 0.0) return Matrix::Zero(n, n);
  if (center.s == kSpinHalf) {
    throw ValidationError("ZFS is undefined for a spin-1/2 center");
  }
  const double d = center.zfs_d_mhz;
  const Matrix3 tensor = rotate_axial_tensor({2.0 * d / 3.0, -d / 3.0, center.zfs_axis});
  const auto ops = make_spin_operators(center.s);
  Matrix local = Matrix::Zero(ops.dim(), ops.dim());
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) local += tensor(a, b) * ops[a] * ops[b];
  }
  return embed_operator(local, slots.electron_map());
}

/// S^T A I between the center's electron and one of its nuclei.
inline Matrix hfc_term(const SpinCenter& center, std::size_t nucleus_index, const CenterSlots& slots) {
  if (nucleus_index >= center.nuclei.size()) {
    throw ValidationError("nucleus index " + std::to_string(nucleus_index) + " out of range");
  }
  const Nucleus& nuc = center.nuclei[nucleus_index];
  const auto electron = embed_spin(make_spin_operators(center.s), slots.electron_map());
  const auto nuclear = embed_spin(make_spin_operators(nuc.i), slots.nucleus_map(nucleus_index));
  return bilinear(electron, rotate_axial_tensor(nuc.hfc), nuclear);
}

/// Q [I_z'^2 - I(I+1)/3] about the quadrupole axis; zero for spin-1/2.
inline Matrix quadrupole_term(const Nucleus& nucleus, const EmbeddingMap& map) {
  const int n = map.total_dim();
  if (nucleus.i == kSpinHalf || nucleus.quadrupole_mhz == 0.0) return Matrix::Zero(n, n);
  const auto ops = make_spin_operators(nucleus.i);
  if (map.target_dim() != ops.dim()) {
    throw ValidationError("quadrupole slot dimension does not match nuclear spin");
  }
  const double iv = nucleus.i.value();
  const Matrix iz = spin_along(ops, nucleus.quadrupole_axis);
  const Matrix local =
      nucleus.quadrupole_mhz *
      (iz * iz - (iv * (iv + 1.0) / 3.0) * Matrix::Identity(ops.dim(), ops.dim()));
  return embed_operator(local, map);
}

/// D_dd [3 (S1.n)(S2.n) - S1.S2].
inline Matrix dipolar_term(const SpinSystem& system) {
  if (!system.center2) throw ValidationError("dipolar term needs two centers");
  require_unit(system.n12, "inter-center direction n12");
  const int n = system.dimension();
  if (system.dipolar_mhz == 0.0) return Matrix::Zero(n, n);
  const auto dims = system.dims();
  const auto s1 = embed_spin(make_spin_operators(system.center1.s), {dims, system.electron_slot(0)});
  const auto s2 = embed_spin(make_spin_operators(system.center2->s), {dims, system.electron_slot(1)});
  const Matrix3 t = system.dipolar_mhz * (3.0 * system.n12 * system.n12.transpose() - Matrix3::Identity());
  return bilinear(s1, t, s2);
}

// ---------------------------------------------------------------------------
// Assembly

/// H(B) = field_free + sum_a B_a * per_gauss[a]; the Hamiltonian is affine in B.
struct HamiltonianModel {
  Matrix field_free;
  std::array<Matrix, 3> per_gauss;

  int dimension() const { return static_cast<int>(field_free.rows()); }

  Matrix at(const FieldPoint& b0) const {
    if (!b0.gauss.allFinite()) throw ValidationError("field vector is not finite");
    Matrix h = field_free;
    for (int a = 0; a < 3; ++a) {
      if (b0.gauss[a] != 0.0) h += b0.gauss[a] * per_gauss[a];
    }
    return h;
  }
};

inline Matrix field_free_hamiltonian(const SpinSystem& system) {
  const int n = system.dimension();
  Matrix h = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < system.center_count(); ++k) {
    const SpinCenter& c = system.center(k);
    const CenterSlots slots = center_slots(system, k);
    h += zfs_term(c, slots);
    for (std::size_t i = 0; i < c.nuclei.size(); ++i) {
      h += hfc_term(c, i, slots);
      h += quadrupole_term(c.nuclei[i], slots.nucleus_map(i));
    }
  }
  if (system.center2) h += dipolar_term(system);
  return h;
}

inline HamiltonianModel build_model(const SpinSystem& system) {
  validate(system);
  HamiltonianModel model{field_free_hamiltonian(system), {}};
  for (int a = 0; a < 3; ++a) {
    const FieldPoint unit{Vector3::Unit(a)};
    Matrix z = Matrix::Zero(system.dimension(), system.dimension());
    for (std::size_t k = 0; k < system.center_count(); ++k) {
      z += zeeman_term(system.center(k), unit, center_slots(system, k));
    }
    model.per_gauss[a] = std::move(z);
  }
  return model;
}

/// Full Hamiltonian in MHz at one field point.
inline Matrix assemble_hamiltonian(const SpinSystem& system, const FieldPoint& b0) {
  validate(system);
  Matrix h = field_free_hamiltonian(system);
  for (std::size_t k = 0; k < system.center_count(); ++k) {
    h += zeeman_term(system.center(k), b0, center_slots(system, k));
  }
  return h;
}

}  // namespace lacsim
