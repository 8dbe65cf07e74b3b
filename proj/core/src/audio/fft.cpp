#include "playroom/audio/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace playroom::audio {
namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const size_t n = x.size();
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum,
                          size_t n) {
  std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(in.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> fractional_delay(std::span<const double> x, double delay_s,
                                     double sample_rate) {
  const size_t n = x.size();
  if (n == 0) return {};
  auto spectrum = rfft(x);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (size_t k = 0; k < spectrum.size(); ++k) {
    const double freq = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    const double phase = -two_pi * freq * delay_s;
    if (n % 2 == 0 && k + 1 == spectrum.size()) {
      // Nyquist bin must stay real for a real output.
      spectrum[k] *= std::cos(phase);
    } else {
      spectrum[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return irfft(spectrum, n);
}

}  // namespace playroom::audio
