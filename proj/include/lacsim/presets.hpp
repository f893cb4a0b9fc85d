#pragma once

// Built-in parameter sets for NV- centers in diamond and their partners.
//
// Frame: z is the symmetry axis of the first (always parallel) NV- center.
// The external field lies along a <111> direction, either z itself or tilted
// by the tetrahedral angle for the misaligned isolated center.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "lacsim/run_config.hpp"

namespace lacsim::presets {

inline constexpr double kNvGParallel = 2.0029;
inline constexpr double kNvGPerpendicular = 2.0031;
inline constexpr double kNvZfsMhz = 2872.0;
inline constexpr double kNv14NAParallel = -2.2;
inline constexpr double kNv14NAPerpendicular = -2.7;
inline constexpr double kN14QuadrupoleMhz = -4.8;

inline constexpr double kP1G = 2.0023;
inline constexpr double kP1_14NAParallel = 114.0;
inline constexpr double kP1_14NAPerpendicular = 81.0;

inline constexpr double kNv13CAIsotropic = 100.0;
inline constexpr double kP1_13CAParallel = 340.0;
inline constexpr double kP1_13CAPerpendicular = 140.0;

inline constexpr double kDipolarMhz = 1.0;
/// Inter-center direction, perpendicular to the field. Along z the dipolar
/// coupling has no double-quantum part and the ~D/2 lines vanish.
inline const Vector3 kInterCenterDirection = Vector3::UnitX();
inline constexpr double kAlphaParallel = 1.0;
inline constexpr double kAlphaTilted = 0.7;

inline Nucleus nitrogen14(double a_par, double a_perp, const Vector3& axis) {
  return Nucleus{"14N", kSpinOne, AxialTensor{a_par, a_perp, axis}, kN14QuadrupoleMhz, axis};
}

inline Nucleus carbon13(double a_par, double a_perp, const Vector3& axis) {
  return Nucleus{"13C", kSpinHalf, AxialTensor{a_par, a_perp, axis}, 0.0, axis};
}

inline SpinCenter nv_center(const Vector3& axis, double alpha, std::string label = "NV") {
  SpinCenter c;
  c.label = std::move(label);
  c.s = kSpinOne;
  c.g = AxialTensor{kNvGParallel, kNvGPerpendicular, axis};
  c.zfs_d_mhz = kNvZfsMhz;
  c.zfs_axis = axis;
  c.nuclei = {nitrogen14(kNv14NAParallel, kNv14NAPerpendicular, axis)};
  c.alpha = alpha;
  return c;
}

inline SpinCenter p1_center(const Vector3& axis, bool with_carbon13) {
  SpinCenter c;
  c.label = "P1";
  c.s = kSpinHalf;
  c.g = AxialTensor{kP1G, kP1G, axis};
  c.zfs_d_mhz = 0.0;
  c.zfs_axis = axis;
  c.nuclei = {nitrogen14(kP1_14NAParallel, kP1_14NAPerpendicular, axis)};
  if (with_carbon13) c.nuclei.push_back(carbon13(kP1_13CAParallel, kP1_13CAPerpendicular, axis));
  c.alpha = 0.0;
  return c;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"nv_isolated_parallel", "nv_isolated_tilted", "nv_p1",
                                            "nv_p1_c13",            "nv_nv",              "nv_nv_c13"};
  return all;
}

namespace detail {

inline RunConfig single_member(std::string name, SpinSystem system, const Vector3& field_direction) {
  RunConfig cfg;
  cfg.name = name;
  cfg.grid.direction = field_direction;
  cfg.components = {Component{name, 1.0, OrientationEnsemble{{EnsembleMember{name, 1.0, std::move(system)}}}}};
  return cfg;
}

inline std::string orientation_label(std::size_t k) {
  static constexpr std::array<const char*, 4> labels{"parallel", "tilted_0", "tilted_120", "tilted_240"};
  return labels[k];
}

inline RunConfig nv_p1(bool with_carbon13) {
  const auto axes = tetrahedral_axes();
  OrientationEnsemble ensemble;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    SpinSystem s{nv_center(Vector3::UnitZ(), kAlphaParallel), p1_center(axes[k], with_carbon13),
                 kDipolarMhz, kInterCenterDirection};
    ensemble.members.push_back({"p1_" + orientation_label(k), 0.25, std::move(s)});
  }
  RunConfig cfg;
  cfg.name = with_carbon13 ? "nv_p1_c13" : "nv_p1";
  cfg.components = {Component{cfg.name, 1.0, std::move(ensemble)}};
  return cfg;
}

inline RunConfig nv_nv(bool with_carbon13) {
  const auto axes = tetrahedral_axes();
  OrientationEnsemble ensemble;
  for (std::size_t k = 1; k < axes.size(); ++k) {
    SpinCenter second = nv_center(axes[k], kAlphaTilted, "NV2");
    if (with_carbon13) second.nuclei.push_back(carbon13(kNv13CAIsotropic, kNv13CAIsotropic, axes[k]));
    SpinSystem s{nv_center(Vector3::UnitZ(), kAlphaParallel, "NV1"), std::move(second), kDipolarMhz,
                 kInterCenterDirection};
    ensemble.members.push_back({"nv2_" + orientation_label(k), 1.0 / 3.0, std::move(s)});
  }
  RunConfig cfg;
  cfg.name = with_carbon13 ? "nv_nv_c13" : "nv_nv";
  cfg.components = {Component{cfg.name, 1.0, std::move(ensemble)}};
  return cfg;
}

}  // namespace detail

/// Fully populated run configuration for a named preset.
inline RunConfig load_preset(std::string_view name) {
  if (name == "nv_isolated_parallel") {
    return detail::single_member("nv_isolated_parallel",
                                 SpinSystem{nv_center(Vector3::UnitZ(), kAlphaParallel), std::nullopt, 0.0,
                                            Vector3::UnitZ()},
                                 Vector3::UnitZ());
  }
  if (name == "nv_isolated_tilted") {
    return detail::single_member("nv_isolated_tilted",
                                 SpinSystem{nv_center(Vector3::UnitZ(), kAlphaTilted), std::nullopt, 0.0,
                                            Vector3::UnitZ()},
                                 direction_from_angles(units::kTetrahedralAngle, 0.0));
  }
  if (name == "nv_p1") return detail::nv_p1(false);
  if (name == "nv_p1_c13") return detail::nv_p1(true);
  if (name == "nv_nv") return detail::nv_nv(false);
  if (name == "nv_nv_c13") return detail::nv_nv(true);
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace lacsim::presets
