#include "irtorus/fft.h"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace irtorus {

int fft_size_at_least(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

class PlanCache {
 public:
  fftw_plan get(const std::vector<int>& dims, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(dims, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    auto* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (p == nullptr) throw std::runtime_error("fft: plan creation failed");
    plans_.emplace(key, Plan(p));
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::vector<int>, int>, Plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, std::span<const int> dims, int sign) {
  std::vector<int> d(dims.begin(), dims.end());
  std::size_t total = 1;
  for (int v : d) total *= static_cast<std::size_t>(v);
  if (total != data.size()) throw std::invalid_argument("fft: size does not match dims");
  fftw_plan p = cache().get(d, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace irtorus
