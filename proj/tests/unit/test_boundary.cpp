#include "dnsurf/boundary.hpp"
#include "dnsurf/oracle.hpp"
#include "unit_util.hpp"

using namespace dnsurf;
using dnsurf::test::dataset;

namespace {

const RealSamples unit_jac = RealSamples(64, 1.0);

double max_diff(const ComplexSamples& a, const ComplexSamples& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(BuildTheta, ZeroData) {
  const auto lam = build_theta(RealSamples(64, 0.0), RealSamples(64, 0.0), unit_jac);
  for (const auto& v : lam) EXPECT_EQ(v, cplx(0.0));
}

TEST(BuildTheta, FirstHarmonicIsHalfDz) {
  const auto u = RealSamples::generate(64, [](double t) { return std::cos(t); });
  const auto lam = build_theta(u, u, unit_jac);
  EXPECT_LT(max_diff(lam, ComplexSamples::generate(64, [](double t) { return 0.5 * I * std::polar(1.0, t); })), 1e-13);
}

TEST(BuildTheta, SecondHarmonicIsZDz) {
  const auto u = RealSamples::generate(64, [](double t) { return std::cos(2 * t); });
  const auto nu = RealSamples::generate(64, [](double t) { return 2 * std::cos(2 * t); });
  const auto lam = build_theta(u, nu, unit_jac);
  EXPECT_LT(max_diff(lam, ComplexSamples::generate(64, [](double t) { return I * std::polar(1.0, 2 * t); })), 1e-13);
}

TEST(BuildF, DiskScenarioGivesZAndZSquared) {
  const auto& ds = dataset("disk-z-z2", 128);
  const auto f = build_f(ds.theta);
  EXPECT_LT(max_diff(f[0][0], ComplexSamples::generate(128, [](double t) { return std::polar(1.0, t); })), 1e-13);
  EXPECT_LT(max_diff(f[1][0], ComplexSamples::generate(128, [](double t) { return std::polar(1.0, 2 * t); })), 1e-13);
}

TEST(BuildF, ConstantMapIsNotAnEmbedding) {
  const auto& ds = dataset("disk-z-z2", 64);
  std::array<CurveField<cplx>, 3> th{ds.theta[0], ds.theta[0], ds.theta[0]};
  EXPECT_DNSURF_ERROR(build_f(th), errc::not_an_embedding);
}

TEST(BuildF, CommonFactorCancels) {
  const auto& ds = dataset("disk-z-z2", 64);
  const auto phi = ComplexSamples::generate(64, [](double t) { return cplx(2.0 + std::cos(t), std::sin(3 * t)); });
  std::array<CurveField<cplx>, 3> th;
  for (int l = 0; l < 3; ++l) th[l] = {ds.theta[l][0] * phi};
  const auto f = build_f(th), g = build_f(ds.theta);
  EXPECT_LT(max_diff(f[0][0], g[0][0]), 1e-13);
  EXPECT_LT(max_diff(f[1][0], g[1][0]), 1e-13);
}

TEST(BuildF, ZeroLambdaZeroIsDivisionError) {
  const auto& ds = dataset("disk-z-z2", 64);
  auto th = ds.theta;
  th[0][0] = ComplexSamples(64, cplx(0.0));
  EXPECT_DNSURF_ERROR(build_f(th), errc::division_by_zero);
}

TEST(CountComponents, SingleCircle) {
  const auto s = make_scenario("disk-z-z2");
  EXPECT_EQ(count_components(*s.dn, dataset("disk-z-z2").curve), 1);
}

TEST(CountComponents, TwoDisjointDisks) {
  const auto s = make_scenario("two-disks");
  EXPECT_EQ(count_components(*s.dn, dataset("two-disks").curve), 2);
}

TEST(CountComponents, AnnulusCouplesItsCircles) {
  const auto s = make_scenario("annulus");
  EXPECT_EQ(count_components(*s.dn, dataset("annulus").curve), 1);
}

TEST(CountComponents, InvariantUnderPermutation) {
  const auto s = make_scenario("two-disks");
  auto comps = dataset("two-disks").curve.components();
  std::swap(comps[0], comps[1]);
  EXPECT_EQ(count_components(*s.dn, ClosedCurve(comps)), 2);
}

class DatasetInvariants : public ::testing::TestWithParam<std::string> {};

TEST_P(DatasetInvariants, CompatibilityLinksAndEmbedding) {
  const auto d = diagnose(dataset(GetParam()));
  EXPECT_LT(d.compatibility, 1e-8);
  EXPECT_LT(d.link, 1e-8);
  EXPECT_TRUE(d.embedding.ok);
  EXPECT_LT(d.spectral_tail, 1e-8);
}

TEST_P(DatasetInvariants, FFromDnDataMatchesAnalyticMap) {
  const auto s = make_scenario(GetParam());
  if (!s.dn) GTEST_SKIP() << "no DN operator for this scenario";
  const auto via = sample_dataset_via_dn(s, 256);
  const auto& exact = dataset(GetParam());
  for (int i = 0; i < 2; ++i)
    for (std::size_t c = 0; c < exact.curve.size(); ++c) EXPECT_LT(max_diff(via.f[i][c], exact.f[i][c]), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, DatasetInvariants, ::testing::ValuesIn(dnsurf::test::all_scenarios()),
                         [](const auto& info) {
                           std::string n = info.param;
                           for (auto& ch : n)
                             if (ch == '-') ch = '_';
                           return n;
                         });
