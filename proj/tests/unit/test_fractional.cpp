#include "dpbeam/coupling.hpp"
#include "dpbeam/fractional.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dpbeam;

TEST(PhaseAlphabet, StandardSets) {
  const auto two = PhaseAlphabet::standard(2);
  EXPECT_EQ(two.bits_per_element(), 1);
  EXPECT_EQ(two.phases().size(), 2u);
  EXPECT_TRUE(two.contains(1.0));
  EXPECT_TRUE(two.contains(-1.0));

  const auto four = PhaseAlphabet::standard(4);
  EXPECT_EQ(four.bits_per_element(), 2);
  const std::vector<Complex> expected{1.0, kJ, -1.0, -kJ};
  ASSERT_EQ(four.phases().size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(four.phases()[i] - expected[i]), 0.0, 1e-15);
  EXPECT_THROW(PhaseAlphabet::standard(3), InvalidArgument);
  EXPECT_THROW(PhaseAlphabet::two_phase(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(PhaseAlphabet::two_phase(1.0, 0.5), InvalidArgument);
}

TEST(BitsToWeights, TwoPhaseZerosAreAllOnes) {
  const auto w = bits_to_weights(Bits(5, 0), PhaseAlphabet::two_phase(), 5);
  EXPECT_EQ(w.label, WeightLabel::Discrete2);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(w.w[i], Complex(1.0));
  const auto w1 = bits_to_weights(Bits(5, 1), PhaseAlphabet::two_phase(), 5);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(w1.w[i], Complex(-1.0));
}

TEST(BitsToWeights, FourPhaseMap) {
  const auto four = PhaseAlphabet::four_phase();
  // Element 0: (u, v) = (0, 1) -> b + c = j; element 1: (1, 1) -> a + b + c = -1;
  // element 2: (1, 0) -> a + c = -j; element 3: (0, 0) -> c = 1.
  const Bits x{0, 1, 1, 0, 1, 1, 0, 0};
  const auto w = bits_to_weights(x, four, 4);
  EXPECT_EQ(w.w[0], kJ);
  EXPECT_EQ(w.w[1], Complex(-1.0));
  EXPECT_EQ(w.w[2], -kJ);
  EXPECT_EQ(w.w[3], Complex(1.0));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_TRUE(four.contains(w.w[i], 0.0));
}

TEST(BitsToWeights, LengthMismatch) {
  EXPECT_THROW(bits_to_weights(Bits(3, 0), PhaseAlphabet::four_phase(), 2), InvalidArgument);
  EXPECT_THROW(bits_to_weights(Bits(3, 0), PhaseAlphabet::two_phase(), 2), InvalidArgument);
}

namespace {

CouplingMatrices problem(int side) {
  const auto g = build_planar_array(side, 0.5, 1.0);
  return compute_coupling(g, TargetRegion(Direction::from_degrees(15, 222), 0.1));
}

void expect_forms_match(const CMatrix& a, const CMatrix& b, const PhaseAlphabet& alphabet, int samples, std::uint64_t seed) {
  const auto coeffs = build_fractional_coefficients(a, b, alphabet);
  const std::size_t n = static_cast<std::size_t>(a.rows());
  ASSERT_EQ(coeffs.variables(), static_cast<Eigen::Index>(n * alphabet.bits_per_element()));
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Bits x = oracle::random_bits(static_cast<std::size_t>(coeffs.variables()), rng);
    const auto w = bits_to_weights(x, alphabet, n);
    const double f = oracle::hermitian_form(w.w, a);
    const double g = oracle::hermitian_form(w.w, b);
    EXPECT_NEAR(coeffs.numerator(x), f, 1e-9 * std::abs(f));
    EXPECT_NEAR(coeffs.denominator(x), g, 1e-9 * std::abs(g));
  }
}

}  // namespace

TEST(FractionalCoefficients, ZeroBitsGiveConstantTerm) {
  const auto m = problem(3);
  for (int k : {2, 4}) {
    const auto alpha = PhaseAlphabet::standard(k);
    const auto c = build_fractional_coefficients(m.A, m.B, alpha);
    const CVector ones = CVector::Ones(9);
    EXPECT_NEAR(c.c0, oracle::hermitian_form(ones, m.A), 1e-12);
    EXPECT_NEAR(c.numerator(Bits(static_cast<std::size_t>(c.variables()), 0)), c.c0, 1e-15);
  }
}

TEST(FractionalCoefficients, SingleElementTwoPointEnumeration) {
  CMatrix a(1, 1), b(1, 1);
  a(0, 0) = 0.7;
  b(0, 0) = 4 * kPi;
  const auto alpha = PhaseAlphabet::two_phase(std::polar(1.0, 0.3), std::polar(1.0, 2.2));
  const auto c = build_fractional_coefficients(a, b, alpha);
  EXPECT_NEAR(c.numerator({0}), 0.7, 1e-15);
  EXPECT_NEAR(c.numerator({1}), 0.7, 1e-15);
  EXPECT_NEAR(c.denominator({1}), 4 * kPi, 1e-14);
}

TEST(FractionalCoefficients, ThreeByThreeFourPhaseMatchesDirectForm) {
  const auto m = problem(3);
  expect_forms_match(m.A, m.B, PhaseAlphabet::four_phase(), 1000, 1);
}

TEST(FractionalCoefficients, MatchesDirectFormForGeneralAlphabets) {
  std::mt19937_64 rng(9);
  const CMatrix a = oracle::random_hermitian_psd(5, rng);
  const CMatrix b = oracle::random_hermitian_psd(5, rng);
  expect_forms_match(a, b, PhaseAlphabet::two_phase(std::polar(1.0, 0.4), std::polar(1.0, 1.9)), 300, 2);
  expect_forms_match(a, b, PhaseAlphabet::two_phase(), 300, 3);
  // Rotated four-phase constellation: w = a u + b v + c with c = e^{j0.3}.
  const Complex c = std::polar(1.0, 0.3);
  expect_forms_match(a, b, PhaseAlphabet::four_phase(c * Complex(-1, -1), c * Complex(-1, 1), c), 300, 4);
}

TEST(FractionalCoefficients, RejectsNonHermitian) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = Complex(0.0, 1.0);
  EXPECT_THROW(build_fractional_coefficients(a, CMatrix::Identity(2, 2), PhaseAlphabet::two_phase()), InvalidArgument);
}

TEST(AssembleBisectionQubo, SignAtEndpoints) {
  const auto m = problem(3);
  for (int k : {2, 4}) {
    const auto alpha = PhaseAlphabet::standard(k);
    const auto coeffs = build_fractional_coefficients(m.A, m.B, alpha);
    const auto q0 = assemble_bisection_qubo(coeffs, 0.0);
    const auto q1 = assemble_bisection_qubo(coeffs, 1.0);
    std::mt19937_64 rng(17);
    for (int s = 0; s < 300; ++s) {
      const Bits x = oracle::random_bits(static_cast<std::size_t>(coeffs.variables()), rng);
      EXPECT_LE(qubo_energy(q0, x), 1e-12);
      EXPECT_GE(qubo_energy(q1, x), -1e-9);
      EXPECT_NEAR(qubo_energy(q0, x), -coeffs.numerator(x), 1e-9);
    }
  }
}

TEST(AssembleBisectionQubo, EnergyIsTGMinusF) {
  std::mt19937_64 rng(23);
  const CMatrix a = oracle::random_hermitian_psd(2, rng);
  const CMatrix b = oracle::random_hermitian_psd(2, rng);
  const auto alpha = PhaseAlphabet::four_phase();
  const auto coeffs = build_fractional_coefficients(a, b, alpha);
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    const auto q = assemble_bisection_qubo(coeffs, t);
    EXPECT_DOUBLE_EQ(q.t(), t);
    EXPECT_NEAR(qubo_energy(q, Bits(4, 0)), t * coeffs.c1 - coeffs.c0, 1e-12);
    for (int s = 0; s < 16; ++s) {
      Bits x(4);
      for (int i = 0; i < 4; ++i) x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((s >> i) & 1);
      const auto w = bits_to_weights(x, alpha, 2);
      const double expected = t * oracle::hermitian_form(w.w, b) - oracle::hermitian_form(w.w, a);
      EXPECT_NEAR(qubo_energy(q, x), expected, 1e-10 * (1 + std::abs(expected)));
      // Upper-triangular view agrees with the storage.
      EXPECT_NEAR(oracle::qubo_energy(q.upper_triangular(), q.offset(), x), qubo_energy(q, x), 1e-12);
    }
  }
  EXPECT_THROW(assemble_bisection_qubo(coeffs, 1.5), InvalidArgument);
}

TEST(QuboTriplets, RoundTripPreservesEnergies) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    RMatrix upper = oracle::random_upper(9, rng, 3.0);
    upper(2, 5) = 0.0;
    const auto q = QuboInstance::from_upper(upper, -1.25 + trial, 0.375);
    std::stringstream ss;
    write_qubo_triplets(ss, q);
    const auto back = read_qubo_triplets(ss);
    ASSERT_EQ(back.size(), q.size());
    EXPECT_EQ(back.upper_triangular(), q.upper_triangular());
    EXPECT_EQ(back.offset(), q.offset());
    for (int s = 0; s < 50; ++s) {
      const Bits x = oracle::random_bits(9, rng);
      EXPECT_EQ(qubo_energy(back, x), qubo_energy(q, x));
    }
  }
}

TEST(QuboTriplets, Format) {
  RMatrix upper = RMatrix::Zero(2, 2);
  upper << 1, 2, 0, 3;
  std::stringstream ss;
  write_qubo_triplets(ss, QuboInstance::from_upper(upper, 0.5));
  std::string header, dims;
  std::getline(ss, header);
  std::getline(ss, dims);
  EXPECT_EQ(header[0], '#');
  EXPECT_EQ(dims, "2 0.5");
  std::string rest((std::istreambuf_iterator<char>(ss)), std::istreambuf_iterator<char>());
  EXPECT_EQ(rest, "0 0 1\n0 1 2\n1 1 3\n");

  std::istringstream bad("2 0\n0 5 1\n");
  EXPECT_THROW(read_qubo_triplets(bad), InvalidArgument);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_qubo_triplets(empty), InvalidArgument);
}
