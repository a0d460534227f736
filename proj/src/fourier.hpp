#pragma once

#include <complex>
#include <vector>

namespace biphoton::detail {

// Unnormalized forward DFT, X_j = sum_k x_k e^{-2 pi i j k / n}.
std::vector<std::complex<double>> forward_dft(std::vector<std::complex<double>> x);

}  // namespace biphoton::detail
