#include <benchmark/benchmark.h>

#include <complex>

#include "chamberflow/coding.hpp"
#include "chamberflow/flow.hpp"
#include "chamberflow/schottky.hpp"
#include "chamberflow/spectral.hpp"
#include "chamberflow/transfer.hpp"

using namespace chamberflow;
using Complex = std::complex<double>;

namespace {

SchottkyFactor make_factor() {
  return SchottkyFactor::from_disks(
      {{1, -6.0, 1.0}, {-1, -2.0, 1.0}, {2, 2.0, 1.0}, {-2, 6.0, 1.0}});
}

Word make_word(std::initializer_list<int> letters) {
  Word w;
  w.letters = letters;
  w.cyclic = true;
  return w;
}

void BM_AssembleFactorOperator(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const CollocationBasis basis(f, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        assemble_factor_operator(f, basis, Complex(0.8, 0.0)));
  }
}
BENCHMARK(BM_AssembleFactorOperator)->Arg(8)->Arg(16)->Arg(24)->Arg(32);

void BM_FredholmDet(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const CollocationBasis basis(f, static_cast<int>(state.range(0)));
  const OperatorMatrix M = assemble_factor_operator(f, basis, Complex(0.8, 0.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fredholm_det(M));
  }
}
BENCHMARK(BM_FredholmDet)->Arg(16)->Arg(24)->Arg(32);

void BM_AssembleProductOperator(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const ProductGroup G({f, f});
  const CollocationBasis basis(f, static_cast<int>(state.range(0)));
  const std::vector<Complex> s{Complex(0.6, 0.0), Complex(1.1, 0.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_product_operator(G, {basis, basis}, s));
  }
}
BENCHMARK(BM_AssembleProductOperator)->Arg(4)->Arg(6)->Arg(8);

void BM_LimitCover(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  for (auto _ : state) {
    benchmark::DoNotOptimize(limit_cover(f, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_LimitCover)->Arg(4)->Arg(6)->Arg(8);

void BM_ProductPreimages(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const ProductGroup G({f, f});
  const PointVector x{-2.5, -6.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(preimages(G, x));
  }
}
BENCHMARK(BM_ProductPreimages);

void BM_FlatReturns(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const ProductGroup G({f, f});
  const std::vector<Word> words{make_word({1, 2}), make_word({2, 1})};
  const int count = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterate_flat_returns(G, words, count));
  }
}
BENCHMARK(BM_FlatReturns)->Arg(5)->Arg(20);

void BM_ClosedGeodesicLongWord(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const Word w = make_word({1, 2, 1, 2, -1, 2, 2, 1, 2, 1, 2, 2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_geodesic(f, w));
  }
}
BENCHMARK(BM_ClosedGeodesicLongWord);

void BM_EulerZeta(benchmark::State& state) {
  const SchottkyFactor f = make_factor();
  const int W = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(euler_zeta(f, Complex(1.0, 0.0), W, 30));
  }
}
BENCHMARK(BM_EulerZeta)->Arg(6)->Arg(8)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
