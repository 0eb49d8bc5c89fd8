#include "dpbeam/coupling.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace dpbeam;

namespace {

ArrayGeometry pair_at_distance(double d, double wavelength = 1.0) {
  return ArrayGeometry({Vec3(0, 0, 0), Vec3(d, 0, 0)}, wavelength);
}

double max_rel(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto rule = gauss_legendre(12);
  for (int p = 0; p <= 23; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], p);
    const double exact = (p % 2) ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(s, exact, 1e-14) << "degree " << p;
  }
  EXPECT_NEAR(gauss_legendre(1).weights[0], 2.0, 0.0);
  EXPECT_NEAR(gauss_legendre(3).nodes[1], 0.0, 1e-16);
}

TEST(CapNodes, WeightsSumToCapArea) {
  for (double r : {0.05, 0.5, kPi / 2, kPi}) {
    const auto nodes = cap_nodes(Direction{0.3, 1.1}, r, {16, 32});
    EXPECT_NEAR(nodes.total_weight(), cap_area(r), 1e-12);
    for (const auto& u : nodes.directions) EXPECT_NEAR(u.norm(), 1.0, 1e-12);
  }
}

TEST(CapNodes, RejectsTooFewNodes) {
  EXPECT_THROW(cap_nodes(Direction{}, 0.1, {1, 32}), InvalidArgument);
  EXPECT_THROW(cap_nodes(Direction{}, 0.1, {8, 2}), InvalidArgument);
}

TEST(SteeringVector, SingleElementAndBroadside) {
  const ArrayGeometry one({Vec3::Zero()}, 1.0);
  const CVector t1 = steering_vector(one, Direction{0.4, 0.2});
  EXPECT_NEAR(std::abs(t1[0] - Complex(1.0)), 0.0, 1e-15);

  const auto g = build_planar_array(4, 0.5, 1.0);
  const CVector tb = steering_vector(g, Direction{0.0, 0.0});
  for (Eigen::Index i = 0; i < tb.size(); ++i) EXPECT_NEAR(std::abs(tb[i] - Complex(1.0)), 0.0, 1e-15);
}

TEST(SteeringVector, HalfWavelengthPairAlongX) {
  const auto g = pair_at_distance(0.5);
  const CVector t = steering_vector(g, Vec3(1, 0, 0));
  EXPECT_NEAR(std::abs(t[0]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(t[1]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(std::remainder(std::arg(t[0]) - std::arg(t[1]), kTwoPi)), kPi, 1e-12);
}

TEST(ComputeB, SingleElementIsSphereArea) {
  const ArrayGeometry one({Vec3::Zero()}, 1.0);
  EXPECT_NEAR(std::abs(compute_B(one)(0, 0) - 4 * kPi), 0.0, 1e-15);
  BOptions quad;
  quad.method = BMethod::Quadrature;
  quad.quadrature = {16, 16};
  EXPECT_NEAR(std::abs(compute_B(one, quad)(0, 0) - 4 * kPi), 0.0, 1e-12);
}

TEST(ComputeB, PairMatchesSincClosedForm) {
  BOptions quad;
  quad.method = BMethod::Quadrature;
  quad.quadrature = {96, 128};
  for (double d : {0.1, 0.5, 0.73, 2.0, 5.25}) {
    const auto g = pair_at_distance(d);
    const CMatrix b = compute_B(g, quad);
    const double expected = 4 * kPi * std::sin(kTwoPi * d) / (kTwoPi * d);
    EXPECT_NEAR(b(0, 1).real(), expected, 1e-10) << d;
    EXPECT_NEAR(b(0, 1).imag(), 0.0, 1e-10) << d;
    EXPECT_NEAR(b(0, 0).real(), 4 * kPi, 1e-12);
  }
}

TEST(ComputeB, CoincidentElements) {
  const ArrayGeometry g({Vec3::Zero(), Vec3::Zero()}, 1.0);
  const CMatrix b = compute_B(g);
  EXPECT_DOUBLE_EQ(b(0, 1).real(), 4 * kPi);
  EXPECT_DOUBLE_EQ(b(1, 1).real(), 4 * kPi);
}

TEST(ComputeB, QuadratureMatchesSincOutToHundredWavelengths) {
  BOptions quad;
  quad.method = BMethod::Quadrature;
  quad.quadrature = {512, 8};  // collinear pair along z: integrand independent of azimuth
  for (double d : {10.0, 37.5, 100.0}) {
    const ArrayGeometry g({Vec3(0, 0, 0), Vec3(0, 0, d)}, 1.0);
    const CMatrix b = compute_B(g, quad);
    const double expected = 4 * kPi * std::sin(kTwoPi * d) / (kTwoPi * d);
    EXPECT_LT(std::abs(b(0, 1) - Complex(expected)) / (4 * kPi), 1e-6) << d;
  }
}

TEST(ComputeB, HemisphereIsHalfForPlanarArrays) {
  const auto g = build_planar_array(3, 0.5, 1.0);
  BOptions half;
  half.extent = SphereExtent::Hemisphere;
  const CMatrix analytic = compute_B(g, half);
  half.method = BMethod::Quadrature;
  half.quadrature = {64, 64};
  const CMatrix quad = compute_B(g, half);
  EXPECT_LT(max_rel(quad, analytic), 1e-10);
  EXPECT_LT(max_rel(analytic * 2.0, compute_B(g)), 1e-15);
}

TEST(ComputeA, SingleElementCapArea) {
  const ArrayGeometry one({Vec3::Zero()}, 1.0);
  for (double rho : {0.01, 0.05, 0.4, 1.2}) {
    const CMatrix a = compute_A(one, TargetRegion(Direction{0.3, 2.0}, rho));
    EXPECT_NEAR(a(0, 0).real(), 2 * kPi * (1 - std::cos(rho)), 1e-13);
  }
}

TEST(ComputeA, TraceIsElementCountTimesCapArea) {
  const auto g = build_planar_array(5, 0.5, 1.0);
  const TargetRegion r(Direction::from_degrees(20, 40), 0.1);
  const CMatrix a = compute_A(g, r);
  EXPECT_NEAR(a.trace().real(), 25 * cap_area(0.1), 1e-12);
}

TEST(ComputeA, FullSphereCapConvergesToB) {
  const auto g = build_planar_array(3, 0.5, 1.0);
  QuadratureInfo info;
  const CMatrix full = detail::cap_integral(g, Direction{0.4, 1.0}, kPi, {64, 128}, info);
  EXPECT_LT(max_rel(full, compute_B(g)), 1e-10);
}

TEST(ComputeA, BroadsideTargetGivesRealSymmetricMatrix) {
  const auto g = build_planar_array(6, 0.5, 1.0);
  const CMatrix a = compute_A(g, TargetRegion(Direction{0.0, 0.0}, 0.2));
  EXPECT_LT(a.imag().cwiseAbs().maxCoeff(), 1e-10 * a.cwiseAbs().maxCoeff());
  EXPECT_LT((a.real() - a.real().transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ComputeA, LatticeAndGeneralPathsAgree) {
  const auto g = build_planar_array(4, 0.5, 1.0);
  const ArrayGeometry plain(g.positions(), g.wavelength());
  const TargetRegion r(Direction::from_degrees(18.247, 18.247), 0.05);
  EXPECT_LT(max_rel(compute_A(g, r), compute_A(plain, r)), 1e-12);
}

TEST(ComputeA, DoublingNodesChangesLittle) {
  const auto g = build_planar_array(8, 0.5, 1.0);
  const TargetRegion r(Direction::from_degrees(12.38, 306.16), 0.05);
  QuadratureInfo info;
  const CMatrix a = compute_A(g, r, {64, 128}, &info);
  const CMatrix fine = compute_A(g, r, {128, 256});
  EXPECT_LT(max_rel(a, fine), 1e-8);
  EXPECT_EQ(info.polar_nodes, 64);
  EXPECT_TRUE(std::isfinite(info.estimated_error));
}

TEST(ComputeA, RejectsTooFewNodes) {
  const auto g = build_planar_array(2, 0.5, 1.0);
  EXPECT_THROW(compute_A(g, TargetRegion(Direction{}, 0.1), {1, 128}), InvalidArgument);
}

TEST(CouplingMatrices, HermitianPsdAndOrdered) {
  const auto g = build_planar_array(5, 0.5, 1.0);
  const auto m = compute_coupling(g, TargetRegion(Direction::from_degrees(25, 75), 0.08));
  EXPECT_EQ((m.A - m.A.adjoint()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((m.B - m.B.adjoint()).cwiseAbs().maxCoeff(), 0.0);

  Eigen::SelfAdjointEigenSolver<CMatrix> ea(m.A), eb(m.B), ed(m.B - m.A);
  EXPECT_GE(ea.eigenvalues().minCoeff(), -1e-8 * ea.eigenvalues().maxCoeff());
  EXPECT_GT(eb.eigenvalues().minCoeff(), 0.0);
  EXPECT_GE(ed.eigenvalues().minCoeff(), -1e-8 * eb.eigenvalues().maxCoeff());

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    CVector v(25);
    for (auto& c : v) c = Complex(normal(rng), normal(rng));
    const double fa = oracle::hermitian_form(v, m.A);
    const double fb = oracle::hermitian_form(v, m.B);
    EXPECT_GE(fa, -1e-8 * fb);
    EXPECT_GT(fb, 0.0);
    EXPECT_LE(fa, fb * (1 + 1e-8));
  }
}
