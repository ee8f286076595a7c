#include <random>

#include "dnsurf/moments.hpp"
#include "unit_util.hpp"

using namespace dnsurf;
using dnsurf::test::dataset;

namespace {

// Residue oracle for f = (z, z^2) on the unit disk: C_m = sum over z^2 = xi of z^m.
cplx disk_moment(int m, cplx xi) {
  cplx s = 0.0;
  for (const auto& z : dnsurf::test::disk_fiber(xi)) s += std::pow(z, m);
  return s;
}

// Roots of xi0 + xi1 z + z^2.
std::array<cplx, 2> quadratic_roots(cplx xi0, cplx xi1) {
  const cplx d = std::sqrt(xi1 * xi1 - 4.0 * xi0);
  return {(-xi1 + d) / 2.0, (-xi1 - d) / 2.0};
}

BoundaryDataset with_theta(const BoundaryDataset& ds, int l, const CurveField<cplx>& th) {
  BoundaryDataset out = ds;
  out.theta[l] = th;
  return out;
}

}  // namespace

TEST(CauchyMoment, DiskInsideImage) {
  const auto& ds = dataset("disk-z-z2");
  EXPECT_NEAR(std::abs(cauchy_moment(ds, 0, 0.3) - 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(cauchy_moment(ds, 1, 0.3)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(cauchy_moment(ds, 2, 0.3) - 0.6), 0.0, 1e-12);
}

TEST(CauchyMoment, DiskOutsideImageVanishes) {
  const auto& ds = dataset("disk-z-z2");
  for (int m = 0; m < 6; ++m) EXPECT_LT(std::abs(cauchy_moment(ds, m, 4.0)), 1e-12);
}

TEST(CauchyMoment, DiskPoleResidues) {
  const auto& ds = dataset("disk-pole");
  EXPECT_LT(std::abs(cauchy_moment(ds, 0, 4.0)), 1e-12);
  EXPECT_LT(std::abs(cauchy_moment(ds, 1, 4.0) - 0.25), 1e-12);
}

TEST(CauchyMoment, MatchesResidueOracleAtRandomNodes) {
  const auto& ds = dataset("disk-z-z2");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int trial = 0; trial < 30; ++trial) {
    const cplx xi(U(rng), U(rng));
    if (!passes_guard(ds, xi)) continue;
    for (int m = 0; m < 6; ++m) EXPECT_LT(std::abs(cauchy_moment(ds, m, xi) - disk_moment(m, xi)), 1e-10);
  }
}

TEST(CauchyMoment, GuardRejectsNodesOnTheImage) {
  EXPECT_DNSURF_ERROR(cauchy_moment(dataset("disk-z-z2"), 0, 1.0), errc::xi_too_close);
}

TEST(CauchyMoment, ZeroMomentConstantAlongLoops) {
  const auto& ds = dataset("disk-z-z2");
  for (double r : {0.5, 3.0}) {
    const cplx ref = cauchy_moment(ds, 0, r);
    for (int k = 0; k < 24; ++k) EXPECT_LT(std::abs(cauchy_moment(ds, 0, std::polar(r, two_pi * k / 24)) - ref), 1e-10);
    EXPECT_NEAR(ref.real(), r < 1.0 ? 2.0 : 0.0, 1e-10);
  }
}

TEST(MomentTable, MatchesPointwiseMoments) {
  const auto& ds = dataset("disk-z-z2");
  const std::vector<cplx> nodes{0.1, cplx(0.2, 0.1), cplx(-0.3, 0.2)};
  const auto t = build_moment_table(ds, nodes, 5);
  for (int m = 0; m < 5; ++m)
    for (std::size_t nu = 0; nu < nodes.size(); ++nu)
      EXPECT_LT(std::abs(t.values(m, static_cast<Eigen::Index>(nu)) - cauchy_moment(ds, m, nodes[nu])), 1e-13);
}

TEST(GFunction, IdentityScenario) {
  const auto& ds = dataset("identity");
  for (const auto& [x0, x1] : std::vector<std::pair<cplx, cplx>>{{0.1, 0.05}, {-0.2, 0.1}, {cplx(0.05, 0.1), -0.1}})
    EXPECT_LT(std::abs(G_function(ds, x0, x1) + x0 / (1.0 + x1)), 1e-12);
}

TEST(GFunction, DiskScenarioIsMinusXi1) {
  const auto& ds = dataset("disk-z-z2");
  for (const auto& [x0, x1] : std::vector<std::pair<cplx, cplx>>{{0.1, 0.05}, {-0.09, 0.1}, {cplx(0.05, 0.1), -0.2}})
    EXPECT_LT(std::abs(G_function(ds, x0, x1) + x1), 1e-12);
}

TEST(GFunction, ReversedOrientationNegates) {
  const auto& ds = dataset("disk-pole");
  const auto rev = dnsurf::test::reversed(ds);
  EXPECT_LT(std::abs(G_function(ds, -4.0, 0.05) + G_function(rev, -4.0, 0.05)), 1e-13);
}

TEST(GTilde, DiskFormZero) {
  const auto& ds = dataset("disk-z-z2");
  const cplx x0 = -0.09, x1 = 0.1;
  cplx expect = 0.0;
  for (const auto& h : quadratic_roots(x0, x1)) expect += 0.5 / (x1 + 2.0 * h);
  EXPECT_LT(std::abs(G_tilde(ds, 0, x0, x1) - expect), 1e-12);
}

TEST(GTilde, LinearInTheta) {
  const auto& ds = dataset("disk-z-z2");
  const cplx c(2.0, -0.5);
  CurveField<cplx> th{ds.theta[0][0] * c};
  EXPECT_LT(std::abs(G_tilde(with_theta(ds, 0, th), 0, 0.1, 0.2) - c * G_tilde(ds, 0, 0.1, 0.2)), 1e-13);
}

TEST(GTilde, ThetaOneEqualsF1TimesThetaZero) {
  const auto& ds = dataset("disk-pole");
  CurveField<cplx> th{ds.f[0][0] * ds.theta[0][0]};
  EXPECT_LT(std::abs(G_tilde(with_theta(ds, 1, th), 1, -4.0, 0.05) - G_tilde(ds, 1, -4.0, 0.05)), 1e-12);
}

TEST(Index, MatchesGroundTruthAtBaseLine) {
  for (const auto& name : dnsurf::test::all_scenarios()) {
    const auto& s = dnsurf::test::scenario(name);
    const GroundTruth gt(s);
    const auto w = index_p_minus_q(dataset(name), s.base_line[0], s.base_line[1]);
    EXPECT_EQ(w.value, gt.p(s.base_line[0], s.base_line[1]) - gt.q()) << name;
    EXPECT_LT(w.residual, 1e-6) << name;
  }
}

TEST(Index, DiskAndIdentityNearZero) {
  EXPECT_EQ(index_p_minus_q(dataset("disk-z-z2"), 0.05, 0.02).value, 2);
  EXPECT_EQ(index_p_minus_q(dataset("identity"), 0.05, 0.02).value, 1);
}

TEST(Index, LocallyConstant) {
  const auto& ds = dataset("disk-pole");
  const long ref = index_p_minus_q(ds, -4.0, 0.05).value;
  for (int k = 0; k < 8; ++k) {
    const cplx d = std::polar(0.05, two_pi * k / 8);
    EXPECT_EQ(index_p_minus_q(ds, -4.0 + d, 0.05 + 0.1 * d).value, ref);
  }
}

TEST(OrientationTest, WindingOfZ1) {
  const auto& ds = dataset("disk-z-z2");
  BivariatePolynomial z1{{{1, 0, 1.0}}};
  EXPECT_EQ(orientation_test(ds, z1).value, 1);
  EXPECT_EQ(orientation_test(dnsurf::test::reversed(ds), z1).value, -1);
  BivariatePolynomial shifted{{{1, 0, 1.0}, {0, 0, -3.0}}};
  EXPECT_EQ(orientation_test(ds, shifted).value, 0);
}

TEST(OrientationTest, VanishingPolynomialIsRejected) {
  BivariatePolynomial implicit{{{2, 0, 1.0}, {0, 1, -1.0}}};
  EXPECT_DNSURF_ERROR(orientation_test(dataset("disk-z-z2"), implicit), errc::near_zero_crossing);
}

TEST(IntersectionShift, DiskLines) {
  const auto& ds = dataset("disk-z-z2");
  const Line L{-3.0, 0.0, 1.0}, Lxi{-0.25, 0.0, 1.0};
  EXPECT_EQ(intersection_shift(ds, L, Lxi).value, 2);
  EXPECT_EQ(intersection_shift(ds, L, L).value, 0);
  EXPECT_EQ(intersection_shift(ds, Lxi, L).value, -2);
}

TEST(AffineMoments, HolomorphicDataPass) {
  const auto& ds = dataset("disk-z-z2");
  const auto rep = affine_moment_check(ds.curve, {ds.f[0], ds.f[1]}, 6);
  EXPECT_LT(rep.max_modulus, 1e-10);
  EXPECT_GT(rep.checked, 0u);
}

TEST(AffineMoments, ConjugateIsFlagged) {
  const auto& ds = dataset("disk-z-z2");
  CurveField<cplx> conj_z{ds.f[0][0].map([](const cplx& z) { return std::conj(z); })};
  const auto rep = affine_moment_check(ds.curve, {conj_z, ds.f[0]}, 1);
  EXPECT_GT(rep.max_modulus, 1e-1);
  EXPECT_NEAR(rep.max_modulus, two_pi, 1e-10);
  EXPECT_EQ(rep.worst_index, (std::vector<int>{0, 1}));
}

TEST(AffineMoments, ConstantsVanish) {
  const auto& ds = dataset("disk-z-z2");
  CurveField<cplx> c{ComplexSamples(ds.curve[0].n, cplx(1.5, 2.0))};
  EXPECT_LT(affine_moment_check(ds.curve, {c, c}, 3).max_modulus, 1e-14);
}

TEST(ConcentricNodes, SeededAndDistinct) {
  const auto a = concentric_nodes(0.1, 0.3, 3, 8, 5), b = concentric_nodes(0.1, 0.3, 3, 8, 5);
  ASSERT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) EXPECT_GT(std::abs(a[i] - a[j]), 1e-8);
}
