// Timing comparison of the parallel kernels against their serial reference
// implementations. Prints one row per kernel and size with both timings and
// the speedup; on a single-core host the columns simply agree.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rootlap/kernels.hpp"

namespace {

using rootlap::Matrix;
using clock_type = std::chrono::steady_clock;

double run_timed(const std::function<void()>& body, int reps) {
  body();  // warm up
  auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) body();
  auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void fill(std::vector<double>& v, unsigned seed) {
  unsigned s = seed;
  for (auto& x : v) {
    s = s * 1664525u + 1013904223u;
    x = static_cast<double>(s) / 4294967296.0 - 0.5;
  }
}

void bench_size(int n) {
  Matrix a(n, n);
  fill(a.a, 7u);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) a(j, i) = a(i, j);
  std::vector<double> x(n), y(n), z(n);
  fill(x, 11u);
  fill(y, 13u);

  int reps = n >= 2048 ? 3 : 20;
  struct Row {
    const char* name;
    std::function<void()> par, ser;
  };
  Matrix zt(64, n);
  fill(zt.a, 17u);
  Row rows[] = {
      {"matvec", [&] { rootlap::kernels::matvec(a, n, x.data(), z.data()); },
       [&] { rootlap::kernels::serial::matvec(a, n, x.data(), z.data()); }},
      {"sym_matvec_lower", [&] { rootlap::kernels::sym_matvec_lower(a, n, x.data(), z.data()); },
       [&] { rootlap::kernels::serial::sym_matvec_lower(a, n, x.data(), z.data()); }},
      {"rank2_update_lower", [&] { rootlap::kernels::rank2_update_lower(a, n, x.data(), y.data()); },
       [&] { rootlap::kernels::serial::rank2_update_lower(a, n, x.data(), y.data()); }},
      {"apply_reflector_rows", [&] { rootlap::kernels::apply_reflector_rows(zt, zt.rows, x.data(), n, 0.5); },
       [&] { rootlap::kernels::serial::apply_reflector_rows(zt, zt.rows, x.data(), n, 0.5); }},
      {"outer_accumulate", [&] { rootlap::kernels::outer_accumulate(a, 1e-9, x.data()); },
       [&] { rootlap::kernels::serial::outer_accumulate(a, 1e-9, x.data()); }},
  };
  for (const Row& r : rows) {
    double tp = run_timed(r.par, reps);
    double ts = run_timed(r.ser, reps);
    std::printf("%-22s n=%-5d parallel %9.3f ms   serial %9.3f ms   speedup %.2fx\n", r.name, n, tp, ts,
                tp > 0.0 ? ts / tp : 0.0);
  }
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif
  for (int n : {256, 1024, 2048}) bench_size(n);
  return 0;
}
