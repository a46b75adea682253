#include <benchmark/benchmark.h>

#include "flagein/curvature.hpp"
#include "flagein/einstein.hpp"

using namespace flagein;

namespace {

const char* kFlags[] = {"A:3:[2,1,1]:-", "D:5:[4,1]:-", "A:13:[4,5,5]:-"};

Frame frame_for(int i) {
  const auto ms = shared_metric_space(parse_flag_spec(kFlags[i]));
  Eigen::VectorXd c = normal_metric(ms).coeffs;
  for (int k = 0; k < ms->dim(); ++k)
    if (ms->kinds[k] == CoeffKind::Scale) c[k] = 1.0 + 0.3 * k;
  return orthonormal_frame(make_metric(ms, c));
}

void BM_FrameTensorParallel(benchmark::State& st) {
  const Frame fr = frame_for(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(frame_tensor(fr));
  st.SetLabel(kFlags[st.range(0)]);
}

void BM_FrameTensorSerial(benchmark::State& st) {
  const Frame fr = frame_for(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(frame_tensor_serial(fr));
  st.SetLabel(kFlags[st.range(0)]);
}

void BM_ReducedRho(benchmark::State& st) {
  const auto ms = shared_metric_space(parse_flag_spec(kFlags[st.range(0)]));
  const ReducedRicci rr(ms);
  const Eigen::VectorXd c = normal_metric(ms).coeffs;
  for (auto _ : st) benchmark::DoNotOptimize(rr.rho(c));
  st.SetLabel(kFlags[st.range(0)]);
}

void BM_NumericSweep(benchmark::State& st) {
  const auto spec = parse_flag_spec("D:5:[4,1]:-");
  NumericOptions opt;
  opt.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(numeric_sweep(spec, 13, opt));
  st.SetLabel(opt.parallel ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_FrameTensorParallel)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FrameTensorSerial)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ReducedRho)->DenseRange(0, 2)->Unit(benchmark::kNanosecond);
BENCHMARK(BM_NumericSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
