#include <benchmark/benchmark.h>

#include <omp.h>

#include "pberg/kernels.hpp"
#include "pberg/parallel.hpp"

using namespace pberg;

namespace {

const Domain kAnnulus = Domain::annulus(0.5);

struct GramCase {
  QuadGrid grid;
  std::vector<int> powers;
  Eigen::VectorXd weights;
  explicit GramCase(int N) : grid(build_grid(kAnnulus, 32, 64)), powers(make_basis(kAnnulus, 2.0, N).powers()) {
    weights = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), static_cast<Eigen::Index>(grid.size()));
  }
};

void BM_GramSerial(benchmark::State& st) {
  const GramCase c(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::serial::gram_hermitian(c.grid.nodes, c.powers, c.weights));
}

void BM_GramDense(benchmark::State& st) {
  const GramCase c(static_cast<int>(st.range(0)));
  const Basis b = make_basis(kAnnulus, 2.0, static_cast<int>(st.range(0)));
  const Eigen::MatrixXcd B = b.evaluate(c.grid.nodes);
  for (auto _ : st) benchmark::DoNotOptimize(par::dense_gram_hermitian(B, c.weights));
}

void BM_GramStructured(benchmark::State& st) {
  const GramCase c(static_cast<int>(st.range(0)));
  const par::GramPlan plan(*c.grid.layout, c.powers);
  for (auto _ : st) benchmark::DoNotOptimize(plan.hermitian(c.weights));
}

void BM_PnormSerial(benchmark::State& st) {
  const GramCase c(8);
  const Eigen::VectorXcd f = Eigen::VectorXcd::Random(c.weights.size());
  for (auto _ : st) benchmark::DoNotOptimize(par::serial::weighted_pnorm_pow(f, c.weights, 1.5));
}

void BM_PnormParallel(benchmark::State& st) {
  const GramCase c(8);
  const Eigen::VectorXcd f = Eigen::VectorXcd::Random(c.weights.size());
  for (auto _ : st) benchmark::DoNotOptimize(par::weighted_pnorm_pow(f, c.weights, 1.5));
}

/// K_1.5 at 16 annulus points; range(0) is the thread count.
void BM_KernelBatch(benchmark::State& st) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(st.range(0)));
  const KernelLab lab(kAnnulus, 1.5);
  std::vector<cplx> pts;
  for (int k = 0; k < 16; ++k) pts.push_back(std::polar(0.75, 0.4 * k));
  for (auto _ : st) {
    auto v = par::parallel_map(pts.size(), [&](std::size_t i) { return lab.kernel_diag(pts[i]).value; });
    benchmark::DoNotOptimize(v);
  }
  omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(12)->Arg(24);
BENCHMARK(BM_GramDense)->Arg(12)->Arg(24);
BENCHMARK(BM_GramStructured)->Arg(12)->Arg(24);
BENCHMARK(BM_PnormSerial);
BENCHMARK(BM_PnormParallel);
BENCHMARK(BM_KernelBatch)->Arg(1)->Arg(omp_get_num_procs())->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
