#pragma once

#include <complex>
#include <span>

namespace regcrit::fft {

/// Caps the number of threads used inside each 3D transform. Plans are
/// rebuilt lazily for the new count; results are reproducible for a fixed
/// count. Values below 1 are treated as 1.
void set_threads(int threads);
int threads();

/// Reads REGCRIT_THREADS and applies it; returns the count in effect.
int configure_threads_from_env();

/// Unnormalized complex-to-complex transforms of an n^3 cube stored x fastest.
/// `forward` uses the e^{-i k x} kernel, `backward` the e^{+i k x} kernel.
void forward(int n, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out);
void backward(int n, std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out);

}  // namespace regcrit::fft
