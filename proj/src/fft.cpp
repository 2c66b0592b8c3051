#include "regcrit/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "regcrit/errors.hpp"

namespace regcrit::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanCache {
  PlanCache() { fftw_init_threads(); }
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
  int thread_count = 1;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

// FFTW_ESTIMATE keeps the chosen algorithm independent of timing, so the
// same inputs give the same bits on every run.
fftw_plan plan_for(int n, int sign) {
  std::lock_guard lock(planner_mutex());
  auto& c = cache();
  const auto key = std::make_tuple(n, sign, c.thread_count);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<std::complex<double>> scratch_in(total), scratch_out(total);
  fftw_plan_with_nthreads(c.thread_count);
  fftw_plan plan = fftw_plan_dft_3d(
      n, n, n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
      reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw Error("fft: failed to create plan for n = " + std::to_string(n));
  c.plans.emplace(key, plan);
  return plan;
}

void execute(int n, int sign, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  if (in.size() != total || out.size() != total) {
    throw InvalidArgument("fft: buffer size does not match n^3");
  }
  fftw_plan plan = plan_for(n, sign);
  // FFTW takes a non-const input pointer but does not modify it for
  // out-of-place complex transforms.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void set_threads(int threads) {
  std::lock_guard lock(planner_mutex());
  cache().thread_count = threads < 1 ? 1 : threads;
}

int threads() {
  std::lock_guard lock(planner_mutex());
  return cache().thread_count;
}

int configure_threads_from_env() {
  if (const char* value = std::getenv("REGCRIT_THREADS"); value != nullptr && *value != '\0') {
    char* end = nullptr;
    const long parsed = std::strtol(value, &end, 10);
    if (end != value && *end == '\0' && parsed > 0) set_threads(static_cast<int>(parsed));
  }
  return threads();
}

void forward(int n, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  execute(n, FFTW_FORWARD, in, out);
}

void backward(int n, std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out) {
  execute(n, FFTW_BACKWARD, in, out);
}

}  // namespace regcrit::fft
