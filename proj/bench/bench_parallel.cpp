// Serial reference vs OpenMP timings for the enumeration-heavy kernels.
// Usage: bench_parallel [n_sites] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include <omp.h>

#include "dppdyn/exactcheck.hpp"
#include "dppdyn/rates.hpp"
#include "dppdyn/simulate.hpp"

using namespace dppdyn;

namespace {

double seconds(const std::function<void()>& body, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

void compare(const char* name, const std::function<void(Exec)>& body, int repeats) {
  const double serial = seconds([&] { body(Exec::Serial); }, repeats);
  const double parallel = seconds([&] { body(Exec::Parallel); }, repeats);
  std::printf("%-22s serial %10.4f s   parallel %10.4f s   speedup %6.2fx\n", name, serial, parallel,
              parallel > 0.0 ? serial / parallel : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 10;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  if (n < 2 || n > kMaxExhaustiveSites || repeats < 1) {
    std::fprintf(stderr, "usage: bench_parallel [n_sites in 2..%d] [repeats >= 1]\n", kMaxExhaustiveSites);
    return 2;
  }
  const SiteSpace space = SiteSpace::torus({n});
  const Kernel k = build_kernel(KernelSpec::torus_convolution(2.0, {0.4, 0.2}), space);
  const RateSpec spec = make_rate_spec(space, 0.5);
  std::printf("torus n=%d, %d threads, best of %d\n", n, omp_get_max_threads(), repeats);

  compare("alpha_table", [&](Exec e) { alpha_table(k, e); }, repeats);
  compare("detailed_balance", [&](Exec e) { detailed_balance_residual(k, spec, Dynamics::Glauber, e); }, repeats);
  compare("build_generator", [&](Exec e) { build_generator(k, spec, Dynamics::Kawasaki, e); }, repeats);
  compare("lemma41_bruteforce", [&](Exec e) { lemma41_bruteforce(k, e); }, repeats);
  compare("liggett_constants", [&](Exec e) { liggett_constants(k, spec, Dynamics::Glauber, true, e); }, repeats);

  SimConfig sim;
  sim.horizon = 200.0;
  sim.seed = 7;
  const std::vector<Observable> obs = {indicator_product({0}), indicator_product({0, 1})};
  compare("run_replicas(8)", [&](Exec e) { run_replicas(k, spec, sim, 8, obs, e); }, repeats);
  return 0;
}
