#include "chamberflow/transfer.hpp"

#include <cmath>
#include <stdexcept>

#include "chamberflow/errors.hpp"

namespace chamberflow {

namespace {

constexpr double kEscapeTol = 1e-12;

// Runs fn over all tuples idx with 0 <= idx[j] < dims[j], first slot most
// significant (row-major order).
template <typename Fn>
void for_each_tuple(const std::vector<int>& dims, Fn&& fn) {
  std::vector<int> idx(dims.size(), 0);
  for (;;) {
    fn(idx);
    int j = static_cast<int>(dims.size()) - 1;
    while (j >= 0 && ++idx[j] == dims[j]) idx[j--] = 0;
    if (j < 0) return;
  }
}

}  // namespace

CollocationBasis::CollocationBasis(const SchottkyFactor& f, int degree, double shrink)
    : degree_(degree), shrink_(shrink), letters_(f.letters()) {
  if (degree < 0 || degree > 64) {
    throw std::invalid_argument("CollocationBasis: degree must lie in 0..64");
  }
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw std::invalid_argument("CollocationBasis: shrink must lie in (0,1]");
  }
  for (int k : letters_) {
    const Disk& D = f.disk(k);
    const double half = shrink * D.radius;
    intervals_.emplace_back(D.center - half, D.center + half);

    std::vector<double> xs(degree + 1);
    if (degree == 0) {
      xs[0] = D.center;
    } else {
      for (int p = 0; p <= degree; ++p) {
        xs[p] = D.center - half * std::cos(M_PI * p / degree);
      }
    }
    nodes_.push_back(xs);

    // Generic barycentric weights; differences are measured in units of the
    // half-width, since a common scale cancels in the normalized form.
    std::vector<double> ws(degree + 1, 1.0);
    for (int p = 0; p <= degree; ++p) {
      double w = 1.0;
      for (int q = 0; q <= degree; ++q) {
        if (q != p) w *= (xs[p] - xs[q]) / half;
      }
      ws[p] = 1.0 / w;
    }
    weights_.push_back(ws);
  }
}

int CollocationBasis::slot(int letter) const {
  const int q = static_cast<int>(letters_.size()) / 2;
  if (letter == 0 || letter < -q || letter > q) {
    throw std::out_of_range("CollocationBasis: letter " + std::to_string(letter) +
                            " outside the alphabet");
  }
  return letter < 0 ? letter + q : q + letter - 1;
}

std::pair<double, double> CollocationBasis::interval(int letter) const {
  return intervals_[slot(letter)];
}

const std::vector<double>& CollocationBasis::nodes(int letter) const {
  return nodes_[slot(letter)];
}

const std::vector<double>& CollocationBasis::bary_weights(int letter) const {
  return weights_[slot(letter)];
}

std::vector<double> CollocationBasis::cardinal_row(int letter, double x) const {
  const std::vector<double>& xs = nodes_[slot(letter)];
  const std::vector<double>& ws = weights_[slot(letter)];
  std::vector<double> row(xs.size(), 0.0);
  for (std::size_t q = 0; q < xs.size(); ++q) {
    if (x == xs[q]) {
      row[q] = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    row[q] = ws[q] / (x - xs[q]);
    denom += row[q];
  }
  for (double& v : row) v /= denom;
  return row;
}

namespace {

struct BranchData {
  double log_dginv;       // log (g_l^{-1})'(x) at a row node
  std::vector<double> L;  // cardinal row of the l-grid at y = g_l^{-1}(x)
};

// Branch data of one factor, indexed [row letter slot][node][col letter slot];
// entries for the excluded branch l == -k stay empty.
std::vector<std::vector<std::vector<BranchData>>> factor_branches(
    const SchottkyFactor& f, const CollocationBasis& basis) {
  const auto& ls = basis.letters();
  if (ls != f.letters()) {
    throw std::invalid_argument("collocation basis does not match the factor alphabet");
  }
  const int B = static_cast<int>(ls.size());
  const int P = basis.points_per_letter();

  std::vector<std::vector<std::vector<BranchData>>> data(
      B, std::vector<std::vector<BranchData>>(P, std::vector<BranchData>(B)));
  for (int a = 0; a < B; ++a) {
    const int k = ls[a];
    const std::vector<double>& xs = basis.nodes(k);
    for (int i = 0; i < P; ++i) {
      const double x = xs[i];
      for (int b = 0; b < B; ++b) {
        const int l = ls[b];
        if (l == -k) continue;
        const Moebius& ginv = f.generator(-l);  // g_l^{-1}
        const double dg = boundary_derivative(ginv, x);
        if (!(dg > 0.0)) {
          throw NumericalError("transfer assembly: nonpositive branch derivative");
        }
        const Boundary yb = boundary_apply(ginv, Boundary::of(x));
        if (yb.is_infinity()) {
          throw NumericalError("transfer assembly: branch image at infinity");
        }
        const double y = yb.value();
        const auto [lo, hi] = basis.interval(l);
        if (y < lo - kEscapeTol || y > hi + kEscapeTol) {
          throw NumericalError("transfer assembly: branch image " + std::to_string(y) +
                               " escapes the collocation interval of letter " +
                               std::to_string(l));
        }
        data[a][i][b] = BranchData{std::log(dg), basis.cardinal_row(l, y)};
      }
    }
  }
  return data;
}

}  // namespace

OperatorMatrix assemble_factor_operator(const SchottkyFactor& f,
                                        const CollocationBasis& basis,
                                        std::complex<double> s) {
  const auto branches = factor_branches(f, basis);
  const auto& ls = basis.letters();
  const int B = static_cast<int>(ls.size());
  const int P = basis.points_per_letter();

  OperatorMatrix M;
  M.mat = Eigen::MatrixXcd::Zero(B * P, B * P);
  M.block_rows = P;
  M.s = {s};
  M.degrees = {basis.degree()};
  M.fingerprint = f.fingerprint();
  for (int k : ls) M.blocks.push_back(MultiIndex{k});

  for (int a = 0; a < B; ++a) {
    for (int i = 0; i < P; ++i) {
      const int row = a * P + i;
      for (int b = 0; b < B; ++b) {
        if (ls[b] == -ls[a]) continue;
        const BranchData& br = branches[a][i][b];
        const std::complex<double> w = std::exp(s * br.log_dginv);
        for (int p = 0; p < P; ++p) {
          M.mat(row, b * P + p) = w * br.L[p];
        }
      }
    }
  }
  return M;
}

OperatorMatrix assemble_product_operator(const ProductGroup& G,
                                         const std::vector<CollocationBasis>& bases,
                                         const std::vector<std::complex<double>>& s) {
  const int r = G.rank();
  if (static_cast<int>(bases.size()) != r || static_cast<int>(s.size()) != r) {
    throw std::invalid_argument(
        "assemble_product_operator: need one basis and one parameter per factor");
  }

  std::vector<std::vector<std::vector<std::vector<BranchData>>>> branches;
  std::vector<int> Bs(r), Ps(r);
  for (int j = 0; j < r; ++j) {
    branches.push_back(factor_branches(G.factor(j), bases[j]));
    Bs[j] = static_cast<int>(bases[j].letters().size());
    Ps[j] = bases[j].points_per_letter();
  }

  OperatorMatrix M;
  M.s = s;
  M.block_rows = 1;
  for (int j = 0; j < r; ++j) {
    M.degrees.push_back(bases[j].degree());
    M.block_rows *= Ps[j];
    if (j) M.fingerprint += " x ";
    M.fingerprint += G.factor(j).fingerprint();
  }
  int n_blocks = 1;
  for (int j = 0; j < r; ++j) n_blocks *= Bs[j];
  const Eigen::Index dim = static_cast<Eigen::Index>(n_blocks) * M.block_rows;
  M.mat = Eigen::MatrixXcd::Zero(dim, dim);

  for_each_tuple(Bs, [&](const std::vector<int>& slots) {
    MultiIndex m(r);
    for (int j = 0; j < r; ++j) m[j] = bases[j].letters()[slots[j]];
    M.blocks.push_back(m);
  });

  // Entry ((m,i),(n,p)) = prod_j exp(s_j log dg_j) * prod_j L_j[p_j], zero
  // whenever some n_j = -m_j.
  std::vector<int> row_slot(r), col_slot(r);
  int row_block = 0;
  for_each_tuple(Bs, [&](const std::vector<int>& a) {
    row_slot = a;
    int node_row = 0;
    for_each_tuple(Ps, [&](const std::vector<int>& i) {
      const Eigen::Index row =
          static_cast<Eigen::Index>(row_block) * M.block_rows + node_row;
      int col_block = 0;
      for_each_tuple(Bs, [&](const std::vector<int>& b) {
        col_slot = b;
        bool allowed = true;
        for (int j = 0; j < r; ++j) {
          if (bases[j].letters()[b[j]] == -bases[j].letters()[a[j]]) allowed = false;
        }
        if (allowed) {
          std::complex<double> w(1.0, 0.0);
          std::vector<const std::vector<double>*> Ls(r);
          for (int j = 0; j < r; ++j) {
            const BranchData& br = branches[j][a[j]][i[j]][b[j]];
            w *= std::exp(s[j] * br.log_dginv);
            Ls[j] = &br.L;
          }
          int node_col = 0;
          for_each_tuple(Ps, [&](const std::vector<int>& p) {
            double Lprod = 1.0;
            for (int j = 0; j < r; ++j) Lprod *= (*Ls[j])[p[j]];
            M.mat(row, static_cast<Eigen::Index>(col_block) * M.block_rows + node_col) =
                w * Lprod;
            ++node_col;
          });
        }
        ++col_block;
      });
      ++node_row;
    });
    ++row_block;
  });
  return M;
}

std::complex<double> apply_operator_pointwise(
    const ProductGroup& G, const std::vector<std::complex<double>>& s,
    const std::function<std::complex<double>(const PointVector&)>& f,
    const PointVector& x) {
  if (static_cast<int>(s.size()) != G.rank()) {
    throw std::invalid_argument("apply_operator_pointwise: one parameter per factor");
  }
  std::complex<double> acc(0.0, 0.0);
  for (const auto& [n, y] : preimages(G, x)) {
    std::complex<double> w(1.0, 0.0);
    for (int j = 0; j < G.rank(); ++j) {
      const double dfwd = boundary_derivative(G.factor(j).generator(n[j]), y[j]);
      w *= std::exp(-s[j] * std::log(dfwd));
    }
    acc += w * f(y);
  }
  return acc;
}

std::complex<double> periodic_trace(const SchottkyFactor& f, std::complex<double> s,
                                    int n) {
  if (n < 1) throw std::invalid_argument("periodic_trace: length must be >= 1");
  std::complex<double> acc(0.0, 0.0);
  for (const Word& w : enumerate_words(f, n, /*cyclic=*/true)) {
    // The fixed point of the coding map along w is the attracting fixed
    // point of the letterwise-negated word; its multiplier weights the term.
    Word neg;
    neg.cyclic = true;
    neg.letters.reserve(w.letters.size());
    for (int l : w.letters) neg.letters.push_back(-l);
    const double mu = closed_geodesic(f, neg).multiplier;
    acc += std::exp(s * std::log(mu)) / (1.0 - mu);
  }
  return acc;
}

DetValue fredholm_det(const OperatorMatrix& M) {
  const Eigen::Index n = M.mat.rows();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) - M.mat;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);

  DetValue d;
  d.log_abs = 0.0;
  d.arg = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> u = lu.matrixLU()(i, i);
    d.log_abs += std::log(std::abs(u));
    d.arg += std::arg(u);
  }
  if (lu.permutationP().determinant() < 0) d.arg += M_PI;
  d.value = std::polar(std::exp(d.log_abs), d.arg);
  return d;
}

double leading_eigenvalue(const OperatorMatrix& M) {
  for (const std::complex<double>& z : M.s) {
    if (z.imag() != 0.0) {
      throw std::invalid_argument("leading_eigenvalue: parameters must be real");
    }
  }
  const Eigen::MatrixXd R = M.mat.real();
  const Eigen::Index n = R.rows();

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd w = R * v;
    const double lam = v.dot(w) / v.dot(v);
    const double resid = (w - lam * v).lpNorm<Eigen::Infinity>();
    const double scale = w.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) break;
    v = w / scale;
    if (resid <= 1e-13 * std::max(1.0, std::abs(lam)) && lam > 0.0) {
      return lam;
    }
  }

  // Power iteration stalled (e.g. close leading pair); fall back to the
  // dense spectrum and take the Perron root.
  Eigen::EigenSolver<Eigen::MatrixXd> es(R);
  if (es.info() != Eigen::Success) {
    throw NumericalError("leading_eigenvalue: eigensolver failed");
  }
  double radius = 0.0;
  std::complex<double> top(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z) > radius) {
      radius = std::abs(z);
      top = z;
    }
  }
  if (radius > 0.0 && std::abs(top.imag()) <= 1e-9 * radius && top.real() > 0.0) {
    return top.real();
  }
  throw NumericalError("leading_eigenvalue: no positive leading eigenvalue found");
}

}  // namespace chamberflow
