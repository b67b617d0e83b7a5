// Release gate: twelve end-to-end checks with pinned tolerances, one line of
// output each, exit code = number of failures.

#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chamberflow/cli.hpp"
#include "chamberflow/coding.hpp"
#include "chamberflow/flow.hpp"
#include "chamberflow/moebius.hpp"
#include "chamberflow/schottky.hpp"
#include "chamberflow/spectral.hpp"
#include "chamberflow/transfer.hpp"
#include "fixtures.hpp"

using namespace chamberflow;
using Complex = std::complex<double>;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& label,
               const std::function<std::string()>& body) {
  bool ok = true;
  std::string detail;
  try {
    detail = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  std::printf("C%02d %s %s (%s)\n", id, ok ? "PASS" : "FAIL", label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

double forward_endpoint(const Moebius& h) {
  const Boundary v = boundary_apply(h, Boundary::infinity());
  require(!v.is_infinity(), "forward endpoint at infinity");
  return v.value();
}

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
                for (int q2 = 0; q2 < pb; ++q2)
                  out((m1 * bb + m2) * pa * pb + p1 * pb + p2,
                      (n1 * bb + n2) * pa * pb + q1 * pb + q2) =
                      A.mat(m1 * pa + p1, n1 * pa + q1) *
                      B.mat(m2 * pb + p2, n2 * pb + q2);
  return out;
}

Word word_of(std::initializer_list<int> letters) {
  Word w;
  w.letters = letters;
  w.cyclic = true;
  return w;
}

const std::string kConfig = std::string(CHAMBERFLOW_CONFIG_DIR) + "/fixture.json";
const std::string kProductConfig =
    std::string(CHAMBERFLOW_CONFIG_DIR) + "/fixture_product.json";
const std::string kGolden =
    std::string(CHAMBERFLOW_GOLDEN_DIR) + "/dimension_fixture.csv";

// --- C1 ---------------------------------------------------------------------
std::string c1_validation() {
  const FactorValidation fv = validate_factor(testfx::fixture_factor(), 64);
  require(fv.pairing_defect <= 1e-12, fmt("pairing defect %.3e", fv.pairing_defect));
  require(fv.inverse_defect <= 1e-14, fmt("inverse defect %.3e", fv.inverse_defect));
  require(fv.min_gap == 2.0, fmt("min gap %.17g != 2", fv.min_gap));
  require(fv.pass, "overall pass flag false");
  return fmt("pairing=%.2e inverse=%.2e gap=%.17g", fv.pairing_defect,
             fv.inverse_defect, fv.min_gap);
}

// --- C2 ---------------------------------------------------------------------
std::string c2_preimages() {
  const SchottkyFactor f = testfx::fixture_factor();
  const ProductGroup G = testfx::fixture_product();
  std::mt19937 rng(24680);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double x = testfx::random_diameter_point(rng, f);
    const auto pre = preimages(f, x);
    require(pre.size() == 3, fmt("rank-one count %zu != 3 at x=%.17g",
                                 pre.size(), x));
    for (const auto& [n, y] : pre) {
      worst = std::max(worst, std::abs(F_apply(f, y) - x));
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const PointVector x{testfx::random_diameter_point(rng, f),
                        testfx::random_diameter_point(rng, f)};
    const auto pre = preimages(G, x);
    require(pre.size() == 9, fmt("product count %zu != 9", pre.size()));
    for (const auto& [n, y] : pre) {
      const PointVector fx = F_apply(G, y);
      for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(fx[j] - x[j]));
    }
  }
  require(worst <= 1e-10, fmt("round-trip error %.3e > 1e-10", worst));
  return fmt("200 points, counts 3/9, max round-trip=%.2e", worst);
}

// --- C3 ---------------------------------------------------------------------
std::string c3_semiconjugacy() {
  const ProductGroup G = testfx::fixture_product();
  std::mt19937 rng(13579);
  std::uniform_int_distribution<int> len(1, 4);
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const std::vector<Word> words{
        testfx::random_cyclic_word(rng, G.factor(0), len(rng)),
        testfx::random_cyclic_word(rng, G.factor(1), len(rng))};
    const ChamberState start = flat_from_words(G, words);
    const auto steps = iterate_flat_returns(G, words, 20);
    require(steps.size() == 20, "short return sequence");
    PointVector p{forward_endpoint(start[0]), forward_endpoint(start[1])};
    for (const ReturnStep& st : steps) {
      require(st.letters == locate(G, p), "crossing letters != coding letters");
      const PointVector fp = F_apply(G, p);
      for (int j = 0; j < 2; ++j) {
        const double vnext = forward_endpoint(st.state[j]);
        worst = std::max(worst,
                         chordal(Boundary::of(vnext), Boundary::of(fp[j])));
        p[j] = vnext;
      }
    }
  }
  require(worst <= 1e-8, fmt("chordal deviation %.3e > 1e-8", worst));
  return fmt("100 pairs x 20 returns, max chordal dev=%.2e", worst);
}

// --- C4 ---------------------------------------------------------------------
std::string c4_section_hits() {
  const ProductGroup G = testfx::fixture_product();
  const ProductGroup G1 = testfx::fixture_rank1();
  std::mt19937 rng(86420);
  std::uniform_int_distribution<int> len(1, 4);
  const double horizon = default_horizon(G);
  double min_gap = 1e300;
  double worst_first = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const std::vector<Word> words{
        testfx::random_cyclic_word(rng, G.factor(0), len(rng)),
        testfx::random_cyclic_word(rng, G.factor(1), len(rng))};

    // Every compact flat meets the section within one period of each factor.
    for (int j = 0; j < 2; ++j) {
      const ClosedGeodesicInfo info = closed_geodesic(G.factor(j), words[j]);
      const Moebius axis = chamber_from_endpoints(info.repelling, info.attracting);
      const auto cr = next_crossing(G.factor(j), axis, horizon);
      require(cr.has_value(), "no crossing from the axis chamber");
      require(cr->time <= info.length + 1e-6,
              fmt("first crossing %.6f beyond one period %.6f", cr->time,
                  info.length));
      worst_first = std::max(worst_first, cr->time / info.length);
    }

    const auto steps = iterate_flat_returns(G, words, 20);
    for (const ReturnStep& st : steps) {
      for (int j = 0; j < 2; ++j) {
        require(st.times[j] >= 1e-6, fmt("crossing gap %.3e < 1e-6", st.times[j]));
        min_gap = std::min(min_gap, st.times[j]);
        require(check_section(G.factor(j), st.state[j]).pass,
                "state off the section");
      }
    }

    // The joint intersection times factor per coordinate: each factor's
    // return-time sequence is unchanged when the factor is run alone.
    for (int j = 0; j < 2; ++j) {
      const auto solo = iterate_flat_returns(G1, {words[j]}, 20);
      for (int t = 0; t < 20; ++t) {
        require(solo[t].times[0] == steps[t].times[j] &&
                    solo[t].letters[0] == steps[t].letters[j],
                "factor times depend on the other factor");
      }
    }
  }
  return fmt("50 flats x 20 returns, min gap=%.3f, first hit <= %.2f period",
             min_gap, worst_first);
}

// --- C5 ---------------------------------------------------------------------
std::string c5_return_times() {
  const ProductGroup G = testfx::fixture_product();
  const double period = 2.0 * std::acosh(2.0);
  const auto steps =
      iterate_flat_returns(G, {word_of({1}), word_of({1})}, 10);
  double worst = 0.0;
  for (const ReturnStep& st : steps) {
    for (int j = 0; j < 2; ++j) {
      worst = std::max(worst, std::abs(st.times[j] - period));
    }
  }
  require(worst <= 1e-9, fmt("return-time deviation %.3e > 1e-9", worst));
  return fmt("10 returns, max |t - 2acosh(2)|=%.2e", worst);
}

// --- C6 ---------------------------------------------------------------------
std::string c6_kronecker() {
  const ProductGroup G = testfx::fixture_product();
  const SchottkyFactor& f = G.factor(0);
  const CollocationBasis basis(f, 8);
  const std::vector<Complex> s{Complex(0.6, 0.0), Complex(1.1, 0.0)};
  const OperatorMatrix MP = assemble_product_operator(G, {basis, basis}, s);
  const OperatorMatrix M1 = assemble_factor_operator(f, basis, s[0]);
  const OperatorMatrix M2 = assemble_factor_operator(f, basis, s[1]);
  const double diff = (MP.mat - block_kron(M1, M2)).cwiseAbs().maxCoeff();
  require(diff <= 1e-12, fmt("max entry difference %.3e > 1e-12", diff));
  return fmt("r=2 N=8 s=(0.6,1.1), max entry diff=%.2e", diff);
}

// --- C7 ---------------------------------------------------------------------
std::string c7_traces() {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 24);
  double worst = 0.0;
  for (const double s : {0.5, 1.0}) {
    const OperatorMatrix M = assemble_factor_operator(f, basis, Complex(s, 0.0));
    Eigen::MatrixXcd P = M.mat;
    for (int n = 1; n <= 4; ++n) {
      if (n > 1) P = P * M.mat;
      const Complex diff = P.trace() - periodic_trace(f, Complex(s, 0.0), n);
      worst = std::max(worst, std::abs(diff));
    }
  }
  require(worst <= 1e-8, fmt("trace mismatch %.3e > 1e-8", worst));
  return fmt("n=1..4, s in {0.5,1.0}, N=24, max |diff|=%.2e", worst);
}

// --- C8 ---------------------------------------------------------------------
std::string c8_zeta() {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis basis(f, 24);
  double worst = 0.0;
  for (const double s : {0.8, 1.0, 1.2, 1.5}) {
    const DetValue dv =
        fredholm_det(assemble_factor_operator(f, basis, Complex(s, 0.0)));
    const ZetaResult z = euler_zeta(f, Complex(s, 0.0), 12, 30);
    worst = std::max(worst, std::abs(dv.value - z.value));
  }
  require(worst <= 1e-6, fmt("det vs euler product %.3e > 1e-6", worst));
  return fmt("s in {0.8,1.0,1.2,1.5}, W=12, K=30, N=24, max |diff|=%.2e", worst);
}

// --- C9 ---------------------------------------------------------------------
std::string c9_dimension() {
  const SchottkyFactor f = testfx::fixture_factor();
  const BowenResult r = bowen_dimension(f);
  require(r.agreement <= 1e-6, fmt("route disagreement %.3e > 1e-6", r.agreement));

  const CollocationBasis basis(f, 24);
  const DetValue dv = fredholm_det(
      assemble_factor_operator(f, basis, Complex(r.delta, 0.0)));
  require(std::abs(dv.value) <= 1e-8,
          fmt("|det| at the dimension %.3e > 1e-8", std::abs(dv.value)));

  std::ifstream in(kGolden);
  require(in.good(), "golden file missing: " + kGolden);
  double golden = -1.0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("delta,", 0) == 0) golden = std::stod(line.substr(6));
  }
  require(golden >= 0.0, "no delta row in " + kGolden);
  require(std::abs(r.delta - golden) <= 1e-9,
          fmt("delta %.17g vs golden %.17g", r.delta, golden));
  return fmt("delta=%.12f routes agree %.2e, |det|=%.2e, golden diff=%.2e",
             r.delta, r.agreement, std::abs(dv.value),
             std::abs(r.delta - golden));
}

// --- C10 --------------------------------------------------------------------
std::string c10_convergence() {
  const SchottkyFactor f = testfx::fixture_factor();
  const CollocationBasis base(f, 24), fine(f, 32), shrunk(f, 24, 0.95);
  double det_drift = 0.0;
  for (const double s : {0.8, 1.2}) {
    const Complex d24 =
        fredholm_det(assemble_factor_operator(f, base, Complex(s, 0.0))).value;
    const Complex d32 =
        fredholm_det(assemble_factor_operator(f, fine, Complex(s, 0.0))).value;
    const Complex d95 =
        fredholm_det(assemble_factor_operator(f, shrunk, Complex(s, 0.0))).value;
    det_drift = std::max({det_drift, std::abs(d32 - d24), std::abs(d95 - d24)});
  }
  require(det_drift <= 1e-8, fmt("determinant drift %.3e > 1e-8", det_drift));

  const auto zero_at = [&](int degree, double shrink) {
    const auto zs = zero_scan_real(f, 0.25, 0.40, 4, degree, shrink);
    require(zs.size() == 1, fmt("expected one zero, got %zu", zs.size()));
    return zs[0].location.real();
  };
  const double z24 = zero_at(24, 1.0);
  const double zero_drift = std::max(std::abs(zero_at(32, 1.0) - z24),
                                     std::abs(zero_at(24, 0.95) - z24));
  require(zero_drift <= 1e-8, fmt("zero drift %.3e > 1e-8", zero_drift));
  return fmt("N 24->32 and shrink 1->0.95: det drift=%.2e, zero drift=%.2e",
             det_drift, zero_drift);
}

// --- C11 --------------------------------------------------------------------
std::string c11_product_zero() {
  const SchottkyFactor f = testfx::fixture_factor();
  const ProductGroup G = testfx::fixture_product();
  const double delta = bowen_dimension(f).delta;

  const double step = 1e-4;
  std::vector<Complex> axis;
  for (int k = -100; k <= 100; ++k) axis.emplace_back(delta + k * step, 0.0);
  const ProductDetScan scan =
      product_det_scan(G, {axis, axis}, 8, 1.0, /*diagonal_only=*/true);

  int sign_changes = 0;
  double bracket = -1.0;
  std::size_t imin = 0;
  for (std::size_t k = 0; k + 1 < scan.points.size(); ++k) {
    if (std::abs(scan.points[k].det) < std::abs(scan.points[imin].det)) imin = k;
    if (scan.points[k].det.real() * scan.points[k + 1].det.real() < 0.0) {
      ++sign_changes;
      bracket = std::min(std::abs(axis[k].real() - delta),
                         std::abs(axis[k + 1].real() - delta));
    }
  }
  require(sign_changes == 1, fmt("%d sign changes on the diagonal", sign_changes));
  require(bracket <= step, fmt("sign change %.3e away from the dimension", bracket));
  require(std::abs(axis[imin].real() - delta) <= step,
          fmt("minimum at offset %.3e", std::abs(axis[imin].real() - delta)));
  return fmt("zero bracketed within %.0e of (delta,delta), min |det|=%.2e, "
             "cross-check err=%.1e",
             step, std::abs(scan.points[imin].det), scan.max_cross_check_error);
}

// --- C12 --------------------------------------------------------------------
std::string c12_cli_determinism() {
  const std::vector<std::vector<std::string>> cases = {
      {"validate", "--config", kConfig},
      {"limit-cover", "--config", kConfig, "--depth", "3"},
      {"dimension", "--config", kConfig, "--degree", "12", "--depth", "5",
       "--tol", "1e-3"},
      {"zeta", "--config", kConfig, "--s", "1.0", "--max-word-length", "8",
       "--kmax", "20"},
      {"trace-check", "--config", kConfig, "--s", "0.5", "--n", "2", "--degree",
       "12"},
      {"flow-sim", "--config", kProductConfig, "--words", "1,2;2,1",
       "--returns", "5"},
      {"product-det", "--config", kProductConfig, "--lo", "0.28", "--hi",
       "0.34", "--n", "2", "--degree", "6"},
      {"scan", "--config", kConfig, "--lo", "0.2", "--hi", "0.45", "--grid",
       "7", "--degree", "12"},
  };
  for (const auto& args : cases) {
    std::string out[2], err[2];
    int rc[2] = {0, 0};
    for (int run = 0; run < 2; ++run) {
      std::istringstream in;
      std::ostringstream o, e;
      rc[run] = run_cli(args, in, o, e);
      out[run] = o.str();
      err[run] = e.str();
    }
    require(rc[0] == 0, fmt("%s exited %d", args[0].c_str(), rc[0]));
    require(rc[0] == rc[1] && out[0] == out[1] && err[0] == err[1],
            args[0] + " output differs between runs");
  }
  return fmt("%zu subcommands, repeated runs byte-identical", cases.size());
}

}  // namespace

int main() {
  criterion(1, "disk pairing/inverse defects and gap", c1_validation);
  criterion(2, "preimage counts 3/9 and round-trip <= 1e-10", c2_preimages);
  criterion(3, "flow letters and endpoints match the coding map <= 1e-8",
            c3_semiconjugacy);
  criterion(4, "section hit within one period, gaps >= 1e-6, times factor",
            c4_section_hits);
  criterion(5, "unit-word return times = 2acosh(2) within 1e-9", c5_return_times);
  criterion(6, "product operator = Kronecker product within 1e-12", c6_kronecker);
  criterion(7, "operator traces match orbit sums within 1e-8", c7_traces);
  criterion(8, "determinant matches the Euler product within 1e-6", c8_zeta);
  criterion(9, "dimension routes within 1e-6, det zero, golden match", c9_dimension);
  criterion(10, "determinant/zero drift <= 1e-8 under refinement", c10_convergence);
  criterion(11, "product determinant vanishes on the diagonal within 1e-4",
            c11_product_zero);
  criterion(12, "CLI byte-identical across repeated runs", c12_cli_determinism);

  if (g_failures == 0) {
    std::printf("all 12 criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", g_failures);
  }
  return g_failures;
}
