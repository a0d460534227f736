#include "fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>

namespace biphoton::detail {

namespace {

// The FFTW planner is not reentrant.
std::mutex planner_mutex;

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer allocate(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return Buffer(p);
}

}  // namespace

std::vector<std::complex<double>> forward_dft(std::vector<std::complex<double>> x) {
  const std::size_t n = x.size();
  if (n == 0) return x;
  // fftw_malloc gives the same alignment on every run, so the planner picks the same
  // codelets and the rounding is reproducible.
  Buffer in = allocate(n);
  Buffer out = allocate(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
  std::copy(x.begin(), x.end(), reinterpret_cast<std::complex<double>*>(in.get()));
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  const auto* result = reinterpret_cast<const std::complex<double>*>(out.get());
  std::copy(result, result + n, x.begin());
  return x;
}

}  // namespace biphoton::detail
