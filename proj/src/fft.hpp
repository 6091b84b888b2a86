#pragma once

#include <complex>
#include <vector>

namespace sqmag::detail {

/// Unnormalized forward real DFT, bins 0 .. N/2.
std::vector<std::complex<double>> real_dft(const std::vector<double>& x);

/// Inverse of real_dft without the 1/N factor: x_n = sum_k X_k e^{+i 2 pi k n / N}.
std::vector<double> real_idft(const std::vector<std::complex<double>>& half, std::size_t n);

}  // namespace sqmag::detail
