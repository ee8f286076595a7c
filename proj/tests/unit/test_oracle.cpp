#include "dnsurf/cli.hpp"
#include "dnsurf/moments.hpp"
#include "dnsurf/oracle.hpp"
#include "unit_util.hpp"

using namespace dnsurf;
using dnsurf::test::dataset;

namespace {

double max_diff(const CurveField<cplx>& a, const CurveField<cplx>& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t k = 0; k < a[c].size(); ++k) m = std::max(m, std::abs(a[c][k] - b[c][k]));
  return m;
}

double max_abs(const std::array<cplx, 3>& r) {
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

}  // namespace

TEST(CircleDN, FourierModesScaleByFrequency) {
  const CircleDN dn({1.0});
  for (int n : {1, 2, 5}) {
    const CurveField<double> v{RealSamples::generate(64, [n](double t) { return std::cos(n * t); })};
    const auto out = dn.apply(v);
    for (std::size_t k = 0; k < 64; ++k)
      EXPECT_NEAR(out[0][k], n * std::cos(n * two_pi * static_cast<double>(k) / 64.0), 1e-12);
  }
}

TEST(CircleDN, ConstantsAreHarmonicWithZeroFlux) {
  const CircleDN dn({2.0});
  const auto out = dn.apply(CurveField<double>{RealSamples(32, 1.0)});
  for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(out[0][k], 0.0, 1e-14);
}

TEST(CircleDN, Linear) {
  const CircleDN dn({1.0});
  const auto a = RealSamples::generate(64, [](double t) { return std::sin(3 * t); });
  const auto b = RealSamples::generate(64, [](double t) { return std::cos(t) + 0.2; });
  const auto ab = dn.apply(CurveField<double>{a * 2.0 + b});
  const auto ra = dn.apply(CurveField<double>{a}), rb = dn.apply(CurveField<double>{b});
  for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(ab[0][k], 2.0 * ra[0][k] + rb[0][k], 1e-12);
}

TEST(CircleDN, WrongComponentCount) {
  const CircleDN dn({1.0, 1.0});
  EXPECT_DNSURF_ERROR(dn.apply(CurveField<double>{RealSamples(16, 0.0)}), errc::invalid_grid);
}

TEST(ViaDn, ThetaMatchesExactOnDiskAndAnnulus) {
  for (const std::string name : {"disk-z-z2", "annulus"}) {
    const auto via = sample_dataset_via_dn(make_scenario(name), 256);
    const auto& exact = dataset(name);
    for (int l = 0; l < 3; ++l) EXPECT_LT(max_diff(via.theta[l], exact.theta[l]), 1e-8) << name << " l=" << l;
  }
}

TEST(Scenarios, UnknownNameIsRejected) {
  EXPECT_DNSURF_ERROR(make_scenario("nope"), errc::unknown_scenario);
}

TEST(Scenarios, TwoDisksHasTwoComponents) {
  EXPECT_EQ(make_scenario("two-disks").surface_components, 2);
  EXPECT_EQ(dataset("two-disks").curve.size(), 2u);
}

TEST(GroundTruth, MomentsAndGAgreeWithQuadrature) {
  for (const auto& name : dnsurf::test::all_scenarios()) {
    const auto& s = dnsurf::test::scenario(name);
    const GroundTruth gt(s);
    const auto& ds = dataset(name);
    for (int m = 0; m < 4; ++m) {
      const cplx want = gt.moment(m, s.base_fiber);
      EXPECT_LT(std::abs(cauchy_moment(ds, m, s.base_fiber) - want), 1e-9 * std::max(1.0, std::abs(want))) << name;
    }
    const cplx g = gt.G(s.base_line[0], s.base_line[1]);
    EXPECT_LT(std::abs(G_function(ds, s.base_line[0], s.base_line[1]) - g), 1e-9 * std::max(1.0, std::abs(g))) << name;
  }
}

TEST(GroundTruth, ReversalFlipsMomentsAndIndex) {
  const auto& s = dnsurf::test::scenario("disk-pole");
  const auto& ds = dataset("disk-pole");
  const auto rev = dnsurf::test::reversed(ds);
  EXPECT_LT(std::abs(cauchy_moment(ds, 2, 4.0) + cauchy_moment(rev, 2, 4.0)), 1e-13);
  EXPECT_EQ(index_p_minus_q(rev, s.base_line[0], s.base_line[1]).value,
            -index_p_minus_q(ds, s.base_line[0], s.base_line[1]).value);
}

TEST(GreenCheck, ExactDiskDataPass) {
  const auto& s = dnsurf::test::scenario("disk-z-z2");
  EXPECT_LT(max_abs(green_moment_check(s, dataset("disk-z-z2"), 2.0)), 1e-8);
  EXPECT_LT(max_abs(green_moment_check(s, dataset("disk-z-z2"), cplx(-1.0, 1.5))), 1e-8);
}

TEST(GreenCheck, AllScenariosPassAtExteriorPoints) {
  for (const auto& name : dnsurf::test::all_scenarios()) {
    const auto& s = dnsurf::test::scenario(name);
    for (const auto& z : cli::exterior_points(s, 8))
      EXPECT_LT(max_abs(green_moment_check(s, dataset(name), z)), 1e-8) << name << " z=" << z;
  }
}

TEST(GreenCheck, CorruptedThetaFails) {
  const auto& s = dnsurf::test::scenario("disk-z-z2");
  auto ds = dataset("disk-z-z2");
  ds.theta[0][0] = ds.theta[0][0] * cplx(1.1);
  EXPECT_GT(max_abs(green_moment_check(s, ds, 2.0)), 1e-2);
}

TEST(GreenCheck, ZeroDataGiveZero) {
  const auto& s = dnsurf::test::scenario("disk-z-z2");
  auto ds = dataset("disk-z-z2");
  for (int l = 0; l < 3; ++l) {
    ds.u[l][0] = RealSamples(ds.u[l][0].size(), 0.0);
    ds.theta[l][0] = ComplexSamples(ds.theta[l][0].size(), cplx(0.0));
  }
  EXPECT_EQ(max_abs(green_moment_check(s, ds, 2.0)), 0.0);
}

TEST(GreenCheck, InteriorPointIsPlacementError) {
  EXPECT_DNSURF_ERROR(green_moment_check(dnsurf::test::scenario("disk-z-z2"), dataset("disk-z-z2"), 0.2),
                      errc::placement);
}

TEST(JumpCheck, DiskMatchesBoundaryData) {
  const auto& ds = dataset("disk-z-z2");
  for (int l = 0; l < 3; ++l) {
    const auto r = jump_check(ds, l, 0, 17, 1e-2);
    EXPECT_LT(r.value_error, 1e-3) << l;
    EXPECT_LT(r.dbar_error, 1e-3) << l;
    EXPECT_LT(r.max_imag, 1e-3) << l;
  }
}

TEST(JumpCheck, ZeroDataGiveZeroJump) {
  auto ds = dataset("disk-z-z2");
  ds.u[0][0] = RealSamples(ds.u[0][0].size(), 0.0);
  ds.theta[0][0] = ComplexSamples(ds.theta[0][0].size(), cplx(0.0));
  const auto r = jump_check(ds, 0, 0, 3, 1e-2);
  EXPECT_EQ(r.value_error, 0.0);
  EXPECT_EQ(r.dbar_error, 0.0);
}

TEST(JumpCheck, BadIndexIsPrecondition) {
  EXPECT_DNSURF_ERROR(jump_check(dataset("disk-z-z2"), 0, 3, 0, 1e-2), errc::precondition);
}
