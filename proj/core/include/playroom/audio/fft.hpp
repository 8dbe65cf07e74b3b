#pragma once

#include <complex>
#include <span>
#include <vector>

namespace playroom::audio {

// Real-input FFT helpers (FFTW behind the scenes; planning is serialized, so
// these are safe to call from any thread).

// n real samples -> n/2+1 complex bins.
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft, normalized so irfft(rfft(x), n) == x.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum,
                          size_t n);

// Circular shift by `delay_s` seconds: returns x(t - delay_s), implemented
// as a per-bin phase ramp. Integer-sample delays are exact.
std::vector<double> fractional_delay(std::span<const double> x, double delay_s,
                                     double sample_rate);

}  // namespace playroom::audio
