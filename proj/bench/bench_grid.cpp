// Compares serial vs OpenMP execution of the experiment grid and verifies
// both paths agree bit-for-bit on the emitted summary.

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cacesim/experiment.hpp"

using namespace cacesim;
using clock_type = std::chrono::steady_clock;

namespace {

double time_grid(const ExperimentConfig& cfg, const ModelCatalog& catalog,
                 bool parallel, std::string* summary) {
  auto t0 = clock_type::now();
  GridResult grid = run_grid(cfg, catalog, parallel);
  auto t1 = clock_type::now();
  *summary = emit_metrics_csv(grid.rows());
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = (argc > 1) ? std::atoi(argv[1]) : 3;

  ExperimentConfig cfg;
  cfg.variants = {Variant::Lru,        Variant::CaceFull,
                  Variant::CaceMinusP1, Variant::CaceMinusP2,
                  Variant::CaceMinusP3, Variant::CaceMinusP4};
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  ModelCatalog catalog = ModelCatalog::build_default();

#ifdef _OPENMP
  std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "openmp: not enabled\n";
#endif
  std::cout << "grid: " << cfg.patterns.size() << " patterns x "
            << cfg.variants.size() << " variants x " << cfg.seeds.size()
            << " seeds\n";

  double best_serial = 1e30, best_parallel = 1e30;
  std::string serial_summary, parallel_summary;
  for (int r = 0; r < repeats; ++r) {
    best_serial = std::min(best_serial,
                           time_grid(cfg, catalog, false, &serial_summary));
    best_parallel = std::min(best_parallel,
                             time_grid(cfg, catalog, true, &parallel_summary));
  }
  std::cout << "serial:   " << best_serial << " s\n";
  std::cout << "parallel: " << best_parallel << " s\n";
  std::cout << "speedup:  " << best_serial / best_parallel << "x\n";
  if (serial_summary != parallel_summary) {
    std::cerr << "MISMATCH: serial and parallel summaries differ\n";
    return 1;
  }
  std::cout << "summaries identical\n";
  return 0;
}
