// SPDX-License-Identifier: Apache-2.0
#pragma once

// Thin FFTW wrapper for the 3-d transforms used by the spectral operators.
// Plans are built with FFTW_ESTIMATE so results are bit-reproducible run to run.
// Not thread-safe: the plan cache is shared by the process.

#include <fftw3.h>

#include <map>
#include <memory>
#include <span>
#include <tuple>

#include "spinframe/domain.hpp"

namespace spinframe {

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const Grid& g, int components, int sign) {
    const auto key = std::make_tuple(g.n(0), g.n(1), g.n(2), components, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();
    // FFTW is row-major (last index fastest); storage has x fastest.
    const int dims[3] = {g.n(2), g.n(1), g.n(0)};
    std::vector<Cplx> scratch(g.size() * components);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_many_dft(3, dims, components, buf, nullptr, components, 1, buf, nullptr, components, 1, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    auto [pos, inserted] = plans_.emplace(key, PlanHandle(p));
    return pos->second.get();
  }

 private:
  std::map<std::tuple<int, int, int, int, int>, PlanHandle> plans_;
};

}  // namespace detail

/// In-place unnormalized forward transform (exp(-2 pi i k.t)) of `components`
/// interleaved scalar fields.
inline void fft_forward(std::span<Cplx> data, const Grid& g, int components) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(detail::PlanCache::instance().get(g, components, FFTW_FORWARD), p, p);
}

/// In-place normalized inverse transform.
inline void fft_inverse(std::span<Cplx> data, const Grid& g, int components) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(detail::PlanCache::instance().get(g, components, FFTW_BACKWARD), p, p);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& z : data) z *= scale;
}

}  // namespace spinframe
