#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rcdenoise::fft {

/// Unnormalized forward real DFT; returns n/2+1 bins.
[[nodiscard]] std::vector<std::complex<double>> forward_real(std::span<const double> signal);

/// Inverse of forward_real for an n-sample signal, scaled by 1/n so that
/// inverse_real(forward_real(x), x.size()) == x.
[[nodiscard]] std::vector<double> inverse_real(std::span<const std::complex<double>> spectrum, std::size_t n);

}  // namespace rcdenoise::fft
