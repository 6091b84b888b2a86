#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "sqmag/error.hpp"

namespace sqmag::detail {

namespace {
// the FFTW planner is not reentrant
std::mutex planner_mutex;
}  // namespace

std::vector<std::complex<double>> real_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "real_dft: need at least 2 samples");
  std::vector<double> in(x);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> real_idft(const std::vector<std::complex<double>>& half, std::size_t n) {
  if (half.size() != n / 2 + 1) fail(ErrorCode::InvalidArgument, "real_idft: size mismatch");
  std::vector<std::complex<double>> in(half);  // c2r overwrites its input
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace sqmag::detail
