#pragma once

#include <complex>
#include <span>
#include <vector>

namespace irtorus {

/// Smallest 2^a 3^b 5^c that is >= n.
int fft_size_at_least(int n);

/// In-place complex FFT on a row-major grid. `sign` = +1 computes
/// sum_k c_k exp(+2 pi i k.j / M) (synthesis), -1 the analysis direction.
/// No normalization is applied. Plans are shared and execution is
/// thread-safe.
void fft_inplace(std::span<std::complex<double>> data, std::span<const int> dims, int sign);

inline void fft_inplace_1d(std::vector<std::complex<double>>& data, int sign) {
  const int dims[1] = {static_cast<int>(data.size())};
  fft_inplace(data, dims, sign);
}

}  // namespace irtorus
