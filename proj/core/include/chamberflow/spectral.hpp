#pragma once

#include <complex>
#include <vector>

#include "chamberflow/schottky.hpp"
#include "chamberflow/transfer.hpp"

namespace chamberflow {

struct BowenOptions {
  int degree = 24;      // collocation degree for the eigenvalue route
  int cover_depth = 9;  // word depth for the refined-cover route
  double shrink = 1.0;
  double tol = 1e-7;    // budget for the agreement of the two routes
};

struct BowenResult {
  double delta;  // reported dimension (the collocation route)
  double delta_collocation;
  double delta_cover;
  double agreement;
  int iterations_collocation;
  int iterations_cover;
};

// Critical exponent of a rank-one factor, solved along two independent
// routes: the Perron eigenvalue of the collocation operator and the spectral
// radius of a refined-cover transition matrix. Throws NumericalError when
// the routes disagree beyond 10x the tolerance.
BowenResult bowen_dimension(const SchottkyFactor& f, const BowenOptions& opts = {});

struct ZetaResult {
  std::complex<double> value;
  std::complex<double> log_value;
  double tail_estimate;  // omitted classes + factor truncation, heuristic
  int classes;           // primitive classes summed
  int max_word_length;
  int k_max;
};

// Euler product over primitive closed-geodesic classes up to the given word
// length, with the (s+k)-factor cascade truncated at k_max.
ZetaResult euler_zeta(const SchottkyFactor& f, std::complex<double> s,
                      int max_word_length = 12, int k_max = 30);

struct ZeroRecord {
  std::complex<double> location;
  double residual;  // |det(I - M)| at the reported location
  int degree;
  int iterations;
};

// Zeros of s -> det(I - M_s) on a real interval, from grid sign changes
// refined by an Illinois iteration.
std::vector<ZeroRecord> zero_scan_real(const SchottkyFactor& f, double s_lo,
                                       double s_hi, int grid, int degree,
                                       double shrink = 1.0);

struct ComplexScanResult {
  std::vector<ZeroRecord> zeros;
  int boxes_flagged;  // boxes with nonzero boundary winding
  int dropped;        // flagged boxes where refinement did not converge
};

// Zeros in a rectangle: boundary-winding detection on a box grid, then a
// Newton polish from the flagged boxes.
ComplexScanResult zero_scan_complex(const SchottkyFactor& f,
                                    std::complex<double> corner_lo,
                                    std::complex<double> corner_hi, int nx, int ny,
                                    int degree, double shrink = 1.0);

struct ProductDetPoint {
  std::vector<std::complex<double>> s;
  std::complex<double> det;  // det(I - M_s) of the product operator
  double leading;            // product of the factor spectral radii
};

struct ProductDetScan {
  std::vector<ProductDetPoint> points;
  int cross_checks;
  double max_cross_check_error;
};

// det(I - M) of the product operator over a grid of parameter tuples,
// computed from cached per-factor spectra (the product spectrum is the set
// of products of factor eigenvalues). A few tuples are re-verified against
// dense determinants; disagreement raises NumericalError. With
// diagonal_only the axes are walked in lockstep instead of as a product.
ProductDetScan product_det_scan(
    const ProductGroup& G, const std::vector<std::vector<std::complex<double>>>& axes,
    int degree, double shrink = 1.0, bool diagonal_only = false);

}  // namespace chamberflow
