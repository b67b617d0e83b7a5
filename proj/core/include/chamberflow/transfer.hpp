#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "chamberflow/coding.hpp"
#include "chamberflow/schottky.hpp"

namespace chamberflow {

// Chebyshev-Lobatto collocation grid on each letter's diameter (optionally
// shrunk about the center by a factor `shrink`), with barycentric weights
// for Lagrange interpolation on that grid.
class CollocationBasis {
 public:
  CollocationBasis(const SchottkyFactor& f, int degree, double shrink = 1.0);

  int degree() const { return degree_; }
  double shrink() const { return shrink_; }
  int points_per_letter() const { return degree_ + 1; }
  const std::vector<int>& letters() const { return letters_; }

  std::pair<double, double> interval(int letter) const;
  const std::vector<double>& nodes(int letter) const;
  const std::vector<double>& bary_weights(int letter) const;

  // Values of the Lagrange cardinal functions of a letter's grid at x.
  std::vector<double> cardinal_row(int letter, double x) const;

 private:
  int slot(int letter) const;

  int degree_;
  double shrink_;
  std::vector<int> letters_;
  std::vector<std::pair<double, double>> intervals_;
  std::vector<std::vector<double>> nodes_;
  std::vector<std::vector<double>> weights_;
};

// Dense collocation discretization of a transfer operator. Rows and columns
// are indexed by (letter tuple, node tuple): letter tuples lexicographic in
// the per-factor letter order, node tuples row-major with the first factor
// most significant. block_rows = prod_j (degree_j + 1).
struct OperatorMatrix {
  Eigen::MatrixXcd mat;
  std::vector<MultiIndex> blocks;
  int block_rows = 0;
  std::vector<std::complex<double>> s;
  std::vector<int> degrees;
  std::string fingerprint;

  Eigen::Index rows() const { return mat.rows(); }
};

// Transfer operator of one Schottky factor at parameter s: the (k,l) block,
// l != -k, evaluates the l-branch y = g_l^{-1}(x) at the k-nodes with weight
// ((g_l^{-1})'(x))^s; blocks (k,-k) vanish.
OperatorMatrix assemble_factor_operator(const SchottkyFactor& f,
                                        const CollocationBasis& basis,
                                        std::complex<double> s);

// Transfer operator of a rank-r product at a parameter vector s, assembled
// entrywise from the per-factor branch data. Coincides with the blockwise
// Kronecker product of the factor operators.
OperatorMatrix assemble_product_operator(const ProductGroup& G,
                                         const std::vector<CollocationBasis>& bases,
                                         const std::vector<std::complex<double>>& s);

// (L_s f)(x) summed directly over the preimage branches of x, with the
// forward-derivative weights |F'(y)|^{-s_j} per factor. Reference route for
// consistency checks against the collocation matrix.
std::complex<double> apply_operator_pointwise(
    const ProductGroup& G, const std::vector<std::complex<double>>& s,
    const std::function<std::complex<double>(const PointVector&)>& f,
    const PointVector& x);

// Sum of mu_w^s / (1 - mu_w) over all cyclically reduced letter sequences of
// length n, where mu_w is the contracting multiplier of the fixed point of
// the n-fold coding map along w. Equals the trace of the n-th operator power.
std::complex<double> periodic_trace(const SchottkyFactor& f, std::complex<double> s,
                                    int n);

struct DetValue {
  std::complex<double> value;  // det(I - M)
  double log_abs;              // log |det(I - M)|
  double arg;                  // accumulated argument (not reduced mod 2 pi)
};

DetValue fredholm_det(const OperatorMatrix& M);

// Perron eigenvalue of an operator assembled at real parameters.
double leading_eigenvalue(const OperatorMatrix& M);

}  // namespace chamberflow
