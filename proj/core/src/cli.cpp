#include "chamberflow/cli.hpp"

#include <complex>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "chamberflow/config.hpp"
#include "chamberflow/errors.hpp"
#include "chamberflow/flow.hpp"
#include "chamberflow/spectral.hpp"
#include "chamberflow/threading.hpp"
#include "chamberflow/transfer.hpp"

namespace chamberflow {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::complex<double> parse_complex(const std::string& text) {
  std::istringstream ss(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(ss >> re)) {
    throw std::invalid_argument("cannot parse \"" + text + "\" as a number");
  }
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im)) {
      throw std::invalid_argument("cannot parse \"" + text + "\" as re[,im]");
    }
  }
  std::string rest;
  if (ss >> rest) {
    throw std::invalid_argument("trailing characters in \"" + text + "\"");
  }
  return {re, im};
}

// Word-per-factor syntax: letters comma-separated, factors split by ';',
// e.g. "1,2;2,1".
std::vector<Word> parse_words(const std::string& text) {
  std::vector<Word> words;
  std::istringstream factors(text);
  std::string part;
  while (std::getline(factors, part, ';')) {
    Word w;
    std::istringstream letters(part);
    std::string tok;
    while (std::getline(letters, tok, ',')) {
      std::size_t used = 0;
      int letter = 0;
      try {
        letter = std::stoi(tok, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse letter \"" + tok + "\"");
      }
      if (used != tok.size() || letter == 0) {
        throw std::invalid_argument("cannot parse letter \"" + tok + "\"");
      }
      w.letters.push_back(letter);
    }
    if (w.letters.empty()) {
      throw std::invalid_argument("empty word in \"" + text + "\"");
    }
    words.push_back(std::move(w));
  }
  if (words.empty()) throw std::invalid_argument("no words given");
  return words;
}

const SchottkyFactor& pick_factor(const ProductGroup& G, int factor_1based) {
  if (factor_1based < 1 || factor_1based > G.rank()) {
    throw std::invalid_argument("factor index " + std::to_string(factor_1based) +
                                " outside 1.." + std::to_string(G.rank()));
  }
  return G.factor(factor_1based - 1);
}

struct CommonOpts {
  std::string config;
  int factor = 1;
  int degree = -1;     // -1 = take the config default
  int depth = -1;
  double shrink = -1.0;
  double tol = -1.0;

  void resolve(const Defaults& d) {
    if (degree < 0) degree = d.degree;
    if (depth < 0) depth = d.depth;
    if (shrink < 0.0) shrink = d.shrink;
    if (tol < 0.0) tol = d.tolerance;
  }
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_numerics) {
  sub->add_option("--config", o.config, "group description (JSON)")->required();
  sub->add_option("--factor", o.factor, "factor index, 1-based");
  if (with_numerics) {
    sub->add_option("--degree", o.degree, "collocation degree");
    sub->add_option("--depth", o.depth, "refined-cover depth");
    sub->add_option("--shrink", o.shrink, "collocation interval shrink factor");
    sub->add_option("--tol", o.tol, "agreement tolerance");
  }
  sub->fallthrough();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream&, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"symbolic dynamics and transfer operators for products of Schottky groups"};
  app.name("chamberflow");
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = auto)");

  int rc = 0;

  // validate ---------------------------------------------------------------
  auto vo = std::make_shared<CommonOpts>();
  auto v_samples = std::make_shared<int>(64);
  {
    CLI::App* sub = app.add_subcommand("validate", "check disk and pairing data");
    add_common(sub, *vo, false);
    sub->add_option("--samples", *v_samples, "circle sample count per generator");
    sub->callback([&, vo, v_samples] {
      set_thread_cap(threads);
      const GroupConfig cfg = load_config(vo->config);
      const ProductGroup G = build_group(cfg);
      bool all = true;
      for (int j = 0; j < G.rank(); ++j) {
        const FactorValidation fv = validate_factor(G.factor(j), *v_samples);
        all = all && fv.pass;
        out << "factor " << (j + 1) << ": pairing_defect=" << num(fv.pairing_defect)
            << " inverse_defect=" << num(fv.inverse_defect)
            << " min_gap=" << num(fv.min_gap) << " pass=" << (fv.pass ? "true" : "false")
            << "\n";
      }
      out << "group: " << (all ? "PASS" : "FAIL") << "\n";
      if (!all) rc = 1;
    });
  }

  // limit-cover --------------------------------------------------------------
  auto lo_ = std::make_shared<CommonOpts>();
  auto lc_depth = std::make_shared<int>(2);
  {
    CLI::App* sub = app.add_subcommand("limit-cover", "refined interval cover of the limit set");
    add_common(sub, *lo_, false);
    sub->add_option("--depth", *lc_depth, "cover depth");
    sub->callback([&, lo_, lc_depth] {
      set_thread_cap(threads);
      const ProductGroup G = build_group(load_config(lo_->config));
      const SchottkyFactor& f = pick_factor(G, lo_->factor);
      out << "word,lo,hi,mid\n";
      for (const CoverInterval& I : limit_cover(f, *lc_depth)) {
        out << word_to_string(I.word) << "," << num(I.lo) << "," << num(I.hi) << ","
            << num(I.mid()) << "\n";
      }
    });
  }

  // dimension ----------------------------------------------------------------
  auto dopt = std::make_shared<CommonOpts>();
  {
    CLI::App* sub = app.add_subcommand("dimension", "critical exponent by two routes");
    add_common(sub, *dopt, true);
    sub->callback([&, dopt] {
      set_thread_cap(threads);
      const GroupConfig cfg = load_config(dopt->config);
      dopt->resolve(cfg.defaults);
      const ProductGroup G = build_group(cfg);
      const SchottkyFactor& f = pick_factor(G, dopt->factor);
      BowenOptions bo;
      bo.degree = dopt->degree;
      bo.cover_depth = dopt->depth;
      bo.shrink = dopt->shrink;
      bo.tol = dopt->tol;
      const BowenResult r = bowen_dimension(f, bo);
      out << "key,value\n";
      out << "delta," << num(r.delta) << "\n";
      out << "delta_collocation," << num(r.delta_collocation) << "\n";
      out << "delta_cover," << num(r.delta_cover) << "\n";
      out << "agreement," << num(r.agreement) << "\n";
      out << "iterations_collocation," << r.iterations_collocation << "\n";
      out << "iterations_cover," << r.iterations_cover << "\n";
      out << "degree," << dopt->degree << "\n";
      out << "depth," << dopt->depth << "\n";
      out << "shrink," << num(dopt->shrink) << "\n";
      out << "tolerance," << num(dopt->tol) << "\n";
    });
  }

  // zeta -----------------------------------------------------------------
  auto zopt = std::make_shared<CommonOpts>();
  auto z_s = std::make_shared<std::string>();
  auto z_len = std::make_shared<int>(12);
  auto z_kmax = std::make_shared<int>(30);
  {
    CLI::App* sub = app.add_subcommand("zeta", "Euler product over primitive classes");
    add_common(sub, *zopt, false);
    sub->add_option("--s", *z_s, "evaluation point re[,im]")->required();
    sub->add_option("--max-word-length", *z_len, "longest class words included");
    sub->add_option("--kmax", *z_kmax, "cascade truncation");
    sub->callback([&, zopt, z_s, z_len, z_kmax] {
      set_thread_cap(threads);
      const ProductGroup G = build_group(load_config(zopt->config));
      const SchottkyFactor& f = pick_factor(G, zopt->factor);
      const ZetaResult r = euler_zeta(f, parse_complex(*z_s), *z_len, *z_kmax);
      out << "key,value\n";
      out << "value_re," << num(r.value.real()) << "\n";
      out << "value_im," << num(r.value.imag()) << "\n";
      out << "log_re," << num(r.log_value.real()) << "\n";
      out << "log_im," << num(r.log_value.imag()) << "\n";
      out << "tail_estimate," << num(r.tail_estimate) << "\n";
      out << "classes," << r.classes << "\n";
      out << "max_word_length," << r.max_word_length << "\n";
      out << "k_max," << r.k_max << "\n";
    });
  }

  // trace-check ---------------------------------------------------------
  auto topt = std::make_shared<CommonOpts>();
  auto t_s = std::make_shared<std::string>();
  auto t_n = std::make_shared<int>(1);
  {
    CLI::App* sub = app.add_subcommand(
        "trace-check", "operator-power trace against the periodic-orbit sum");
    add_common(sub, *topt, true);
    sub->add_option("--s", *t_s, "evaluation point re[,im]")->required();
    sub->add_option("--n", *t_n, "word length / operator power")->required();
    sub->callback([&, topt, t_s, t_n] {
      set_thread_cap(threads);
      const GroupConfig cfg = load_config(topt->config);
      topt->resolve(cfg.defaults);
      const ProductGroup G = build_group(cfg);
      const SchottkyFactor& f = pick_factor(G, topt->factor);
      const std::complex<double> s = parse_complex(*t_s);
      const CollocationBasis basis(f, topt->degree, topt->shrink);
      const OperatorMatrix M = assemble_factor_operator(f, basis, s);
      Eigen::MatrixXcd P = M.mat;
      for (int k = 1; k < *t_n; ++k) P = P * M.mat;
      const std::complex<double> tm = P.trace();
      const std::complex<double> tp = periodic_trace(f, s, *t_n);
      out << "key,value\n";
      out << "trace_matrix_re," << num(tm.real()) << "\n";
      out << "trace_matrix_im," << num(tm.imag()) << "\n";
      out << "trace_periodic_re," << num(tp.real()) << "\n";
      out << "trace_periodic_im," << num(tp.imag()) << "\n";
      out << "abs_diff," << num(std::abs(tm - tp)) << "\n";
      out << "n," << *t_n << "\n";
      out << "degree," << topt->degree << "\n";
    });
  }

  // flow-sim -------------------------------------------------------------
  auto fopt = std::make_shared<CommonOpts>();
  auto f_words = std::make_shared<std::string>();
  auto f_returns = std::make_shared<int>(20);
  auto f_horizon = std::make_shared<double>(0.0);
  {
    CLI::App* sub = app.add_subcommand(
        "flow-sim", "cross-section returns of a periodic chamber state");
    add_common(sub, *fopt, false);
    sub->add_option("--words", *f_words, "one cyclically reduced word per factor, e.g. \"1,2;2,1\"")
        ->required();
    sub->add_option("--returns", *f_returns, "number of returns");
    sub->add_option("--horizon", *f_horizon, "crossing-time horizon (0 = auto)");
    sub->callback([&, fopt, f_words, f_returns, f_horizon] {
      set_thread_cap(threads);
      const GroupConfig cfg = load_config(fopt->config);
      const ProductGroup G = build_group(cfg);
      const std::vector<Word> words = parse_words(*f_words);
      if (static_cast<int>(words.size()) != G.rank()) {
        throw std::invalid_argument("got " + std::to_string(words.size()) +
                                    " words for a rank-" + std::to_string(G.rank()) +
                                    " group");
      }
      double horizon = *f_horizon;
      if (horizon <= 0.0) horizon = cfg.defaults.horizon;
      if (horizon <= 0.0) horizon = default_horizon(G);
      const std::vector<ReturnStep> steps =
          iterate_flat_returns(G, words, *f_returns, horizon);
      out << "step";
      for (int j = 1; j <= G.rank(); ++j) out << ",letter_" << j << ",time_" << j;
      out << "\n";
      for (std::size_t i = 0; i < steps.size(); ++i) {
        out << (i + 1);
        for (int j = 0; j < G.rank(); ++j) {
          out << "," << steps[i].letters[j] << "," << num(steps[i].times[j]);
        }
        out << "\n";
      }
    });
  }

  // product-det ----------------------------------------------------------
  auto popt = std::make_shared<CommonOpts>();
  auto p_lo = std::make_shared<double>(0.0);
  auto p_hi = std::make_shared<double>(0.0);
  auto p_n = std::make_shared<int>(0);
  auto p_im = std::make_shared<double>(0.0);
  auto p_diag = std::make_shared<bool>(false);
  {
    CLI::App* sub = app.add_subcommand(
        "product-det", "product-operator determinant over a parameter grid");
    sub->add_option("--config", popt->config, "group description (JSON)")->required();
    sub->add_option("--lo", *p_lo, "axis start (real part)")->required();
    sub->add_option("--hi", *p_hi, "axis end (real part)")->required();
    sub->add_option("--n", *p_n, "points per axis")->required();
    sub->add_option("--im", *p_im, "fixed imaginary part");
    sub->add_option("--degree", popt->degree, "collocation degree (default 8)");
    sub->add_option("--shrink", popt->shrink, "collocation interval shrink factor");
    sub->add_flag("--diag", *p_diag, "walk the diagonal instead of the full grid");
    sub->fallthrough();
    sub->callback([&, popt, p_lo, p_hi, p_n, p_im, p_diag] {
      set_thread_cap(threads);
      const GroupConfig cfg = load_config(popt->config);
      if (popt->degree < 0) popt->degree = 8;
      if (popt->shrink < 0.0) popt->shrink = cfg.defaults.shrink;
      const ProductGroup G = build_group(cfg);
      if (*p_n < 1) throw std::invalid_argument("--n must be >= 1");
      std::vector<std::complex<double>> axis;
      for (int i = 0; i < *p_n; ++i) {
        const double t = *p_n == 1 ? 0.0 : double(i) / (*p_n - 1);
        axis.emplace_back(*p_lo + (*p_hi - *p_lo) * t, *p_im);
      }
      const std::vector<std::vector<std::complex<double>>> axes(G.rank(), axis);
      const ProductDetScan scan =
          product_det_scan(G, axes, popt->degree, popt->shrink, *p_diag);
      for (int j = 1; j <= G.rank(); ++j) {
        out << "s_" << j << "_re,s_" << j << "_im,";
      }
      out << "det_re,det_im,leading\n";
      for (const ProductDetPoint& pt : scan.points) {
        for (int j = 0; j < G.rank(); ++j) {
          out << num(pt.s[j].real()) << "," << num(pt.s[j].imag()) << ",";
        }
        out << num(pt.det.real()) << "," << num(pt.det.imag()) << ","
            << num(pt.leading) << "\n";
      }
      err << "cross_checks=" << scan.cross_checks << "\n";
      err << "max_cross_check_error=" << num(scan.max_cross_check_error) << "\n";
    });
  }

  // scan -------------------------------------------------------------------
  auto sopt = std::make_shared<CommonOpts>();
  auto s_lo = std::make_shared<double>(0.0);
  auto s_hi = std::make_shared<double>(1.0);
  auto s_grid = std::make_shared<int>(40);
  auto s_complex = std::make_shared<bool>(false);
  auto s_imlo = std::make_shared<double>(-1.0);
  auto s_imhi = std::make_shared<double>(1.0);
  auto s_nx = std::make_shared<int>(8);
  auto s_ny = std::make_shared<int>(8);
  {
    CLI::App* sub = app.add_subcommand("scan", "determinant zeros on a line or a rectangle");
    add_common(sub, *sopt, true);
    sub->add_option("--lo", *s_lo, "real-part start");
    sub->add_option("--hi", *s_hi, "real-part end");
    sub->add_option("--grid", *s_grid, "grid points (real scan)");
    sub->add_flag("--complex", *s_complex, "scan a rectangle in the complex plane");
    sub->add_option("--im-lo", *s_imlo, "imaginary-part start (complex scan)");
    sub->add_option("--im-hi", *s_imhi, "imaginary-part end (complex scan)");
    sub->add_option("--nx", *s_nx, "boxes along the real axis (complex scan)");
    sub->add_option("--ny", *s_ny, "boxes along the imaginary axis (complex scan)");
    sub->callback([&, sopt, s_lo, s_hi, s_grid, s_complex, s_imlo, s_imhi, s_nx, s_ny] {
      set_thread_cap(threads);
      const GroupConfig cfg = load_config(sopt->config);
      sopt->resolve(cfg.defaults);
      const ProductGroup G = build_group(cfg);
      const SchottkyFactor& f = pick_factor(G, sopt->factor);
      out << "location_re,location_im,residual,degree,iterations\n";
      if (*s_complex) {
        const ComplexScanResult r = zero_scan_complex(
            f, {*s_lo, *s_imlo}, {*s_hi, *s_imhi}, *s_nx, *s_ny, sopt->degree,
            sopt->shrink);
        for (const ZeroRecord& z : r.zeros) {
          out << num(z.location.real()) << "," << num(z.location.imag()) << ","
              << num(z.residual) << "," << z.degree << "," << z.iterations << "\n";
        }
        err << "boxes_flagged=" << r.boxes_flagged << "\n";
        err << "dropped=" << r.dropped << "\n";
      } else {
        for (const ZeroRecord& z :
             zero_scan_real(f, *s_lo, *s_hi, *s_grid, sopt->degree, sopt->shrink)) {
          out << num(z.location.real()) << "," << num(z.location.imag()) << ","
              << num(z.residual) << "," << z.degree << "," << z.iterations << "\n";
        }
      }
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    return rc;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "chamberflow: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chamberflow
