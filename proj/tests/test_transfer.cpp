#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "chamberflow/errors.hpp"
#include "chamberflow/transfer.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chamberflow;
using Complex = std::complex<double>;

namespace {

// Blockwise Kronecker product reference: entry ((m1 m2, p1 p2), (n1 n2, q1 q2))
// = A[(m1,p1),(n1,q1)] * B[(m2,p2),(n2,q2)], letter tuples lexicographic with
// the first factor major, node tuples row-major with the first factor most
// significant.
Eigen::MatrixXcd block_kron(const OperatorMatrix& A, const OperatorMatrix& B) {
  const int ba = static_cast<int>(A.blocks.size());
  const int bb = static_cast<int>(B.blocks.size());
  const int pa = A.block_rows;
  const int pb = B.block_rows;
  Eigen::MatrixXcd out(ba * bb * pa * pb, ba * bb * pa * pb);
  for (int m1 = 0; m1 < ba; ++m1)
    for (int m2 = 0; m2 < bb; ++m2)
      for (int p1 = 0; p1 < pa; ++p1)
        for (int p2 = 0; p2 < pb; ++p2)
          for (int n1 = 0; n1 < ba; ++n1)
            for (int n2 = 0; n2 < bb; ++n2)
              for (int q1 = 0; q1 < pa; ++q1)
                for (int q2 = 0; q2 < pb; ++q2) {
                  const int row = (m1 * bb + m2) * pa * pb + p1 * pb + p2;
                  const int col = (n1 * bb + n2) * pa * pb + q1 * pb + q2;
                  out(row, col) = A.mat(m1 * pa + p1, n1 * pa + q1) *
                                  B.mat(m2 * pb + p2, n2 * pb + q2);
                }
  return out;
}

}  // namespace

TEST_SUITE("transfer") {

TEST_CASE("collocation grids and cardinal functions") {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 8);
  CHECK(basis.degree() == 8);
  CHECK(basis.points_per_letter() == 9);

  const auto [lo, hi] = basis.interval(1);
  CHECK(lo == -7.0);
  CHECK(hi == -5.0);
  const auto& nodes = basis.nodes(1);
  REQUIRE(nodes.size() == 9);
  CHECK(nodes.front() == -7.0);
  CHECK(nodes.back() == -5.0);
  for (std::size_t p = 0; p + 1 < nodes.size(); ++p) CHECK(nodes[p] < nodes[p + 1]);

  // Cardinal values are exact indicators at the grid points.
  for (int p = 0; p < 9; ++p) {
    const auto row = basis.cardinal_row(1, nodes[p]);
    for (int q = 0; q < 9; ++q) CHECK(row[q] == (p == q ? 1.0 : 0.0));
  }

  // Partition of unity and reproduction of low-degree polynomials.
  for (double x : {-6.9, -6.3, -5.95, -5.2}) {
    const auto row = basis.cardinal_row(1, x);
    double sum = 0.0, quad = 0.0;
    for (int q = 0; q < 9; ++q) {
      sum += row[q];
      quad += row[q] * nodes[q] * nodes[q];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-13);
    CHECK(std::abs(quad - x * x) <= 1e-11);
  }

  SUBCASE("shrink scales the grid about the disk center") {
    const CollocationBasis half(f, 4, 0.5);
    CHECK(half.interval(2).first == 1.5);
    CHECK(half.interval(2).second == 2.5);
    CHECK(half.nodes(2).front() == 1.5);
  }

  SUBCASE("degenerate grids are rejected") {
    CHECK_THROWS_AS(CollocationBasis(f, -1), std::invalid_argument);
    CHECK_THROWS_AS(CollocationBasis(f, 65), std::invalid_argument);
    CHECK_THROWS_AS(CollocationBasis(f, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CollocationBasis(f, 8, 1.5), std::invalid_argument);
  }

  SUBCASE("degree zero collocates at the disk centers") {
    const CollocationBasis mid(f, 0);
    REQUIRE(mid.nodes(-1).size() == 1);
    CHECK(mid.nodes(-1)[0] == -2.0);
  }
}

TEST_CASE("operator at s = 0 and degree 0 is the subshift adjacency matrix") {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 0);
  const OperatorMatrix M = assemble_factor_operator(f, basis, Complex(0.0, 0.0));
  REQUIRE(M.rows() == 4);
  CHECK(M.block_rows == 1);
  REQUIRE(M.blocks.size() == 4);
  CHECK(M.blocks[0] == MultiIndex{-2});
  CHECK(M.blocks[3] == MultiIndex{2});

  // Letters in order -2,-1,1,2: the branch l = -k is forbidden, everything
  // else contributes weight 1.
  const int letters[4] = {-2, -1, 1, 2};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Complex expect(letters[j] == -letters[i] ? 0.0 : 1.0, 0.0);
      CHECK(M.mat(i, j) == expect);
    }
  }
  CHECK(leading_eigenvalue(M) == 3.0);

  const DetValue dv = fredholm_det(M);
  const Eigen::MatrixXcd A =
      Eigen::MatrixXcd::Identity(4, 4) - M.mat;
  CHECK(std::abs(dv.value - A.determinant()) <= 1e-12);
}

TEST_CASE("row sums match the direct branch-weight sums") {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 10);
  const double s = 0.7;
  const OperatorMatrix M = assemble_factor_operator(f, basis, Complex(s, 0.0));

  const Eigen::VectorXcd sums = M.mat * Eigen::VectorXcd::Ones(M.rows());
  const int P = basis.points_per_letter();
  const auto& letters = f.letters();
  for (int i = 0; i < 4; ++i) {
    for (int p = 0; p < P; ++p) {
      const double x = basis.nodes(letters[i])[p];
      double expect = 0.0;
      for (int l : letters) {
        if (l == -letters[i]) continue;
        expect += std::pow(boundary_derivative(f.generator(-l), x), s);
      }
      CHECK(std::abs(sums(i * P + p) - expect) <= 1e-13 * expect);
    }
  }
}

TEST_CASE("matrix action agrees with the pointwise preimage sum") {
  const ProductGroup G1 = testfx::fixture_rank1();
  const SchottkyFactor& f = G1.factor(0);
  const CollocationBasis basis(f, 12);
  const Complex s(0.6, 0.3);
  const OperatorMatrix M = assemble_factor_operator(f, basis, s);

  // A random coefficient vector defines a piecewise interpolant.
  std::mt19937 rng(55101);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd coef(M.rows());
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    coef(i) = Complex(unif(rng), unif(rng));
  }

  const int P = basis.points_per_letter();
  const auto& letters = f.letters();
  const auto interp = [&](const PointVector& x) -> Complex {
    const int letter = f.diameter_letter(x[0]);
    REQUIRE(letter != 0);
    int slot = 0;
    while (letters[slot] != letter) ++slot;
    const auto row = basis.cardinal_row(letter, x[0]);
    Complex acc(0.0, 0.0);
    for (int q = 0; q < P; ++q) acc += row[q] * coef(slot * P + q);
    return acc;
  };

  const Eigen::VectorXcd image = M.mat * coef;
  // Interior nodes only: the pointwise route locates its argument, and the
  // outermost grid nodes sit on the closed interval ends.
  for (int i = 0; i < 4; ++i) {
    for (int p = 1; p + 1 < P; p += 3) {
      const double x = basis.nodes(letters[i])[p];
      const Complex direct = apply_operator_pointwise(G1, {s}, interp, {x});
      CHECK(std::abs(image(i * P + p) - direct) <= 1e-10);
    }
  }
}

TEST_CASE("product operator equals the blockwise Kronecker product") {
  const ProductGroup G = testfx::fixture_product();
  const SchottkyFactor& f = G.factor(0);
  const CollocationBasis basis(f, 4);
  const std::vector<Complex> s{Complex(0.6, 0.0), Complex(1.1, 0.0)};

  const OperatorMatrix MP = assemble_product_operator(G, {basis, basis}, s);
  REQUIRE(MP.rows() == 16 * 25);
  CHECK(MP.blocks.size() == 16);
  CHECK(MP.blocks[0] == MultiIndex{-2, -2});
  CHECK(MP.blocks[1] == MultiIndex{-2, -1});
  CHECK(MP.block_rows == 25);

  const OperatorMatrix M1 = assemble_factor_operator(f, basis, s[0]);
  const OperatorMatrix M2 = assemble_factor_operator(f, basis, s[1]);
  const Eigen::MatrixXcd K = block_kron(M1, M2);
  CHECK((MP.mat - K).cwiseAbs().maxCoeff() <= 1e-12);

  // Forbidden product blocks vanish exactly whenever either component is a
  // forbidden factor branch.
  const int i0 = 0;  // block (-2,-2)
  const int j0 = 15; // block (2,2): first component forbidden after -2
  CHECK(MP.mat.block(i0 * 25, j0 * 25, 25, 25).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic orbit sums reproduce operator traces") {
  const SchottkyFactor f = testfx::fixture_factor();
  const double s3 = std::sqrt(3.0);
  const double mu = 7.0 - 4.0 * s3;

  // Length-one orbits by hand: four letters, all with the same multiplier.
  const Complex t1 = periodic_trace(f, Complex(0.5, 0.0), 1);
  CHECK(std::abs(t1 - Complex(4.0 * (2.0 - s3) / (1.0 - mu), 0.0)) <= 1e-14);

  const CollocationBasis basis(f, 16);
  for (const Complex s : {Complex(0.5, 0.0), Complex(1.0, 0.5)}) {
    const OperatorMatrix M = assemble_factor_operator(f, basis, s);
    Eigen::MatrixXcd Mn = M.mat;
    for (int n = 1; n <= 3; ++n) {
      if (n > 1) Mn = Mn * M.mat;
      const Complex direct = Mn.trace();
      const Complex orbit = periodic_trace(f, s, n);
      CHECK(std::abs(direct - orbit) <= 1e-9);
    }
  }
}

TEST_CASE("determinant values agree with dense determinants") {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 6);
  for (const Complex s : {Complex(0.4, 0.0), Complex(0.8, 0.3)}) {
    const OperatorMatrix M = assemble_factor_operator(f, basis, s);
    const DetValue dv = fredholm_det(M);
    const Eigen::MatrixXcd A =
        Eigen::MatrixXcd::Identity(M.rows(), M.rows()) - M.mat;
    const Complex direct = A.determinant();
    CHECK(std::abs(dv.value - direct) <= 1e-11 * std::abs(direct));
    CHECK(std::abs(dv.log_abs - std::log(std::abs(direct))) <= 1e-10);
    CHECK(std::abs(std::exp(Complex(dv.log_abs, dv.arg)) - direct) <=
          1e-10 * std::abs(direct));
  }
}

TEST_CASE("branch images must stay inside the collocation intervals") {
  const SchottkyFactor f = testfx::fixture_factor();
  // Branch images of fixture points keep distance >= 1/13 from the disk
  // centers, so a 0.05-shrunk grid cannot receive them ...
  const CollocationBasis tiny(f, 8, 0.05);
  CHECK_THROWS_AS(assemble_factor_operator(f, tiny, Complex(0.5, 0.0)),
                  NumericalError);
  // ... while a 0.5-shrunk grid still contains every image (max offset 1/3).
  const CollocationBasis half(f, 8, 0.5);
  const OperatorMatrix M = assemble_factor_operator(f, half, Complex(0.5, 0.0));
  CHECK(M.rows() == 36);
}

TEST_CASE("leading eigenvalue is real, positive, and decreasing in s") {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 16);
  const double l1 = leading_eigenvalue(
      assemble_factor_operator(f, basis, Complex(0.2, 0.0)));
  const double l2 = leading_eigenvalue(
      assemble_factor_operator(f, basis, Complex(0.31, 0.0)));
  const double l3 = leading_eigenvalue(
      assemble_factor_operator(f, basis, Complex(0.45, 0.0)));
  CHECK(l1 > l2);
  CHECK(l2 > l3);
  CHECK(l3 > 0.0);
  CHECK(l2 == doctest::Approx(1.0).epsilon(2e-3));

  CHECK_THROWS_AS(leading_eigenvalue(
                      assemble_factor_operator(f, basis, Complex(0.5, 0.1))),
                  std::invalid_argument);
}

}  // TEST_SUITE("transfer")
