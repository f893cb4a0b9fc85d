#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lacsim/evolution.hpp"
#include "lacsim/oracle.hpp"
#include "lacsim/presets.hpp"

using namespace lacsim;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

SpinSystem member(const char* preset, std::size_t k = 0) {
  return presets::load_preset(preset).components[0].ensemble.members[k].system;
}

SpinCenter lone_spin1(double alpha) {
  SpinCenter c;
  c.s = kSpinOne;
  c.zfs_d_mhz = 2872.0;
  c.alpha = alpha;
  return c;
}

// <rho00> for H = v sigma_x starting in |0>: 1 - x^2 / (2 (1 + x^2)), x = 2 pi (2v) tau'.
double two_level_analytic(double v_mhz, double tau_s) {
  const double x = 2.0 * M_PI * 2.0 * v_mhz * 1e6 * tau_s;
  return 1.0 - 0.5 * x * x / (1.0 + x * x);
}

struct TwoLevel {
  Matrix h{2, 2};
  DensityMatrix rho{Matrix::Zero(2, 2)};
  BrightProjector p{Matrix::Zero(2, 2), 0};
  explicit TwoLevel(double v) {
    h << 0.0, v, v, 0.0;
    rho.mat(0, 0) = 1.0;
    p.mat(0, 0) = 1.0;
  }
};

}  // namespace

TEST(InitialDensity, FullyPolarizedLoneCenter) {
  const DensityMatrix rho = initial_density(SpinSystem{lone_spin1(1.0), std::nullopt, 0.0, Vector3::UnitZ()});
  Matrix expect = Matrix::Zero(3, 3);
  expect(1, 1) = 1.0;
  EXPECT_LT(max_abs(rho.mat - expect), 1e-15);
}

TEST(InitialDensity, UnpolarizedIsMaximallyMixed) {
  const DensityMatrix rho = initial_density(SpinSystem{lone_spin1(0.0), std::nullopt, 0.0, Vector3::UnitZ()});
  EXPECT_LT(max_abs(rho.mat - Matrix::Identity(3, 3) / 3.0), 1e-15);
}

TEST(InitialDensity, NvP1KroneckerOracle) {
  const SpinSystem s = member("nv_p1", 1);
  const DensityMatrix rho = initial_density(s);
  ASSERT_EQ(rho.dim(), 54);
  EXPECT_LT(max_abs(rho.mat - Matrix(rho.mat.diagonal().asDiagonal())), 1e-15);
  int nonzero = 0;
  for (int i = 0; i < 54; ++i) {
    const int ms_index = i / 18;  // slowest index: NV electron, m = +1, 0, -1
    if (ms_index == 1) {
      EXPECT_NEAR(rho.mat(i, i).real(), 1.0 / 18.0, 1e-15);
      ++nonzero;
    } else {
      EXPECT_EQ(rho.mat(i, i), Complex(0.0, 0.0));
    }
  }
  EXPECT_EQ(nonzero, 18);
}

TEST(InitialDensity, SecondNvCarriesItsOwnAlpha) {
  const SpinSystem s = member("nv_nv", 0);
  const DensityMatrix rho = initial_density(s);
  const Matrix rho2 = 0.7 * zero_projection_projector(make_spin_operators(1.0), s.center2->zfs_axis) +
                      0.1 * Matrix::Identity(3, 3);
  Matrix rho1 = Matrix::Zero(3, 3);
  rho1(1, 1) = 1.0;
  const Matrix mixed = Matrix::Identity(3, 3) / 3.0;
  const std::vector<Matrix> factors{rho1, mixed, rho2, mixed};
  EXPECT_LT(max_abs(rho.mat - kron_chain(factors)), 1e-15);
}

TEST(InitialDensity, TracePositivityHermiticity) {
  for (const char* name : {"nv_isolated_tilted", "nv_p1_c13", "nv_nv_c13"}) {
    const DensityMatrix rho = initial_density(member(name));
    EXPECT_NEAR(rho.mat.trace().real(), 1.0, 1e-10) << name;
    EXPECT_LT(max_abs(rho.mat - rho.mat.adjoint()), 1e-12) << name;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10) << name;
  }
}

TEST(BrightProjector, IdempotentHermitianTrace) {
  for (const char* name : {"nv_isolated_parallel", "nv_p1", "nv_nv_c13"}) {
    const SpinSystem s = member(name);
    for (const auto& p : bright_projectors(s)) {
      EXPECT_LT(max_abs(p.mat * p.mat - p.mat), 1e-12);
      EXPECT_LT(max_abs(p.mat - p.mat.adjoint()), 1e-14);
      EXPECT_NEAR(p.mat.trace().real(), s.dimension() / 3.0, 1e-10);
    }
  }
  SpinCenter p1;
  p1.s = kSpinHalf;
  SpinSystem s{lone_spin1(1.0), p1, 1.0, Vector3::UnitX()};
  EXPECT_EQ(bright_projectors(s).size(), 1u);
  EXPECT_THROW(bright_projector(s, 1), ValidationError);
}

TEST(EigenDecompose, DiagonalGivesPermutation) {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 3.0, 1.0, 2.0;
  const EigenSystem es = eigen_decompose(h);
  EXPECT_EQ(es.energies, Eigen::Vector3d(1.0, 2.0, 3.0));
  Matrix perm = Matrix::Zero(3, 3);
  perm(1, 0) = perm(2, 1) = perm(0, 2) = 1.0;
  EXPECT_LT(max_abs(es.vectors - perm), 1e-15);
}

TEST(EigenDecompose, SymmetricTwoLevel) {
  const double v = 0.8;
  const EigenSystem es = eigen_decompose(TwoLevel(v).h);
  EXPECT_NEAR(es.energies(0), -v, 1e-15);
  EXPECT_NEAR(es.energies(1), v, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(es.vectors(0, 0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(1, 0) + r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(0, 1) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(1, 1) - r), 0.0, 1e-15);
}

TEST(EigenDecompose, NvP1ReconstructionAt512G) {
  const SpinSystem s = member("nv_p1", 2);
  const Matrix h = assemble_hamiltonian(s, {Vector3(0.0, 0.0, 512.0)});
  const EigenSystem es = eigen_decompose(h);
  const Matrix rec = es.vectors * es.energies.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  EXPECT_LT((rec - h).norm() / h.norm(), 1e-9);
  EXPECT_LT(max_abs(es.vectors.adjoint() * es.vectors - Matrix::Identity(54, 54)), 1e-10);
  for (int k = 1; k < es.dim(); ++k) EXPECT_LE(es.energies(k - 1), es.energies(k));
  // gauge: largest component of each column is real positive
  for (int c = 0; c < es.dim(); ++c) {
    Eigen::Index r = 0;
    es.vectors.col(c).cwiseAbs().maxCoeff(&r);
    EXPECT_NEAR(es.vectors(r, c).imag(), 0.0, 1e-15);
    EXPECT_GT(es.vectors(r, c).real(), 0.0);
  }
}

TEST(EigenDecompose, BasisChangeShortcutsMatchDense) {
  const SpinSystem s = member("nv_nv_c13", 1);
  const Matrix v = eigen_decompose(assemble_hamiltonian(s, {Vector3(30.0, -20.0, 700.0)})).vectors;
  std::vector<Matrix> cases{initial_density(s).mat, bright_projector(s, 0).mat, bright_projector(s, 1).mat};
  Matrix odd = Matrix::Zero(162, 162);
  odd(3, 7) = Complex(0.5, -1.0);
  odd(7, 3) = Complex(0.5, 1.0);
  odd(9, 9) = -2.0;
  cases.push_back(odd);
  cases.push_back(Matrix::Zero(162, 162));
  for (const Matrix& a : cases) {
    const Matrix dense = v.adjoint() * a * v;
    EXPECT_LT(max_abs(to_eigenbasis(a, v) - dense), 1e-13);
  }
}

TEST(EigenDecompose, RejectsBadInput) {
  Matrix h(2, 2);
  h << 1.0, 2.0, 0.5, 1.0;
  EXPECT_THROW(eigen_decompose(h), ValidationError);
  h << 1.0, std::nan(""), std::nan(""), 1.0;
  EXPECT_THROW(eigen_decompose(h), NumericalError);
  EXPECT_THROW(eigen_decompose(Matrix::Zero(2, 3)), ValidationError);
}

TEST(AveragedPopulation, StationaryStateIsTauIndependent) {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 5.0, -1.0, 2.0;
  const EigenSystem es = eigen_decompose(h);
  DensityMatrix rho{Matrix::Zero(3, 3)};
  rho.mat.diagonal() << 0.2, 0.5, 0.3;
  BrightProjector p{Matrix::Zero(3, 3), 0};
  p.mat(1, 1) = 1.0;
  for (double tau : {1e-9, 1e-4, 1.0}) EXPECT_DOUBLE_EQ(averaged_population(rho, es, p, tau), 0.5);
}

TEST(AveragedPopulation, TwoLevelAnalytic) {
  for (double v : {0.01, 0.5, 3.0}) {
    const TwoLevel t(v);
    const EigenSystem es = eigen_decompose(t.h);
    for (double tau : {1e-9, 1e-7, 1e-5, 1e-3}) {
      EXPECT_NEAR(averaged_population(t.rho, es, t.p, tau), two_level_analytic(v, tau), 1e-12)
          << "v=" << v << " tau=" << tau;
    }
  }
  const TwoLevel t(2.0);
  EXPECT_NEAR(averaged_population(t.rho, eigen_decompose(t.h), t.p, 1.0), 0.5, 1e-12);
}

TEST(AveragedPopulation, ShortTauLimit) {
  for (const char* name : {"nv_isolated_tilted", "nv_p1"}) {
    const SpinSystem s = member(name);
    const DensityMatrix rho = initial_density(s);
    const BrightProjector p = bright_projector(s);
    const EigenSystem es = eigen_decompose(assemble_hamiltonian(s, {Vector3(100.0, 0.0, 500.0)}));
    EXPECT_NEAR(averaged_population(rho, es, p, 1e-16), initial_population(rho, p), 1e-6) << name;
  }
}

TEST(AveragedPopulation, GaugeInvariance) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  const SpinSystem s = member("nv_p1", 3);
  const DensityMatrix rho = initial_density(s);
  const BrightProjector p = bright_projector(s);
  const EigenSystem es = eigen_decompose(assemble_hamiltonian(s, {Vector3(0.0, 0.0, 511.0)}));
  const double ref = averaged_population(rho, es, p, 1e-4);
  for (int trial = 0; trial < 5; ++trial) {
    EigenSystem g = es;
    for (int c = 0; c < g.dim(); ++c) g.vectors.col(c) *= std::polar(1.0, phase(rng));
    EXPECT_NEAR(averaged_population(rho, g, p, 1e-4), ref, 1e-12);
  }
}

TEST(AveragedPopulation, StationaryDensityKeepsTraceAndHermiticity) {
  const SpinSystem s = member("nv_nv", 1);
  const DensityMatrix rho = initial_density(s);
  const EigenSystem es = eigen_decompose(assemble_hamiltonian(s, {Vector3(0.0, 0.0, 3.0)}));
  const DensityMatrix st = stationary_density(rho, es, 1e-4);
  EXPECT_NEAR(st.mat.trace().real(), 1.0, 1e-10);
  EXPECT_NEAR(st.mat.trace().imag(), 0.0, 1e-12);
  EXPECT_LT(max_abs(st.mat - st.mat.adjoint()), 1e-12);
  // the filtered matrix gives the same population as the fused path
  const BrightProjector p = bright_projector(s, 1);
  EXPECT_NEAR((p.mat * st.mat).trace().real(), averaged_population(rho, es, p, 1e-4), 1e-12);
}

TEST(AveragedPopulation, BoundedOnRandomFields) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> b(0.0, 1200.0);
  const SpinSystem s = member("nv_p1", 1);
  const DensityMatrix rho = initial_density(s);
  const BrightProjector p = bright_projector(s);
  for (int k = 0; k < 20; ++k) {
    const double v =
        averaged_population(rho, eigen_decompose(assemble_hamiltonian(s, {Vector3(0.0, 0.0, b(rng))})), p, 1e-4);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(AveragedPopulation, SaturatesWithLongTau) {
  for (const char* name : {"nv_isolated_parallel", "nv_p1"}) {
    const SpinSystem s = member(name);
    const DensityMatrix rho = initial_density(s);
    const BrightProjector p = bright_projector(s);
    for (double b : {300.0, 512.0, 1024.5}) {
      const EigenSystem es = eigen_decompose(assemble_hamiltonian(s, {Vector3(0.0, 0.0, b)}));
      EXPECT_LT(std::abs(averaged_population(rho, es, p, 1e-3) - averaged_population(rho, es, p, 1e-2)), 1e-6)
          << name << " at " << b << " G";
    }
  }
}

TEST(AveragedPopulation, RejectsNonPositiveTau) {
  const TwoLevel t(1.0);
  const EigenSystem es = eigen_decompose(t.h);
  EXPECT_THROW(averaged_population(t.rho, es, t.p, 0.0), ValidationError);
  EXPECT_THROW(averaged_population(t.rho, es, t.p, -1e-4), ValidationError);
  EXPECT_THROW(averaged_population(t.rho, es, t.p, std::nan("")), ValidationError);
}

TEST(CheckedPopulation, ClampsWithinSlackOnly) {
  EXPECT_EQ(checked_population(Complex(1.0 + 5e-11, 0.0)), 1.0);
  EXPECT_EQ(checked_population(Complex(-5e-11, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(checked_population(Complex(1.5, 0.0), 2.0), 1.5);
  EXPECT_THROW(checked_population(Complex(0.5, 1e-6)), NumericalError);
}

TEST(TimeDomainOracle, TwoLevelAnalytic) {
  for (double v : {0.05, 1.0}) {
    const TwoLevel t(v);
    for (double tau : {1e-7, 1e-5}) {
      EXPECT_NEAR(time_domain_oracle(t.rho, t.h, t.p, tau), two_level_analytic(v, tau), 1e-6);
    }
  }
}

TEST(TimeDomainOracle, CommutingStateIsExact) {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 1000.0, -40.0, 7.0;
  DensityMatrix rho{Matrix::Zero(3, 3)};
  rho.mat.diagonal() << 0.1, 0.6, 0.3;
  BrightProjector p{Matrix::Zero(3, 3), 0};
  p.mat(1, 1) = 1.0;
  EXPECT_NEAR(time_domain_oracle(rho, h, p, 1e-4), 0.6, 1e-12);
}

TEST(TimeDomainOracle, MatchesEigenbasisAverage) {
  struct Case {
    const char* preset;
    std::size_t k;
    double b;
  };
  for (const Case& c : {Case{"nv_isolated_parallel", 0, 1024.0}, Case{"nv_isolated_tilted", 0, 600.0},
                        Case{"nv_p1", 1, 511.0}, Case{"nv_p1", 0, 1010.5}}) {
    const SpinSystem s = member(c.preset, c.k);
    const auto& dir = presets::load_preset(c.preset).grid.direction;
    const Matrix h = assemble_hamiltonian(s, {c.b * dir});
    const DensityMatrix rho = initial_density(s);
    const BrightProjector p = bright_projector(s);
    const double fast = averaged_population(rho, eigen_decompose(h), p, 1e-4);
    EXPECT_NEAR(time_domain_oracle(rho, h, p, 1e-4), fast, 1e-6) << c.preset << " " << c.b;
  }
}
