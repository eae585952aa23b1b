// Copyright 2026 The Tripex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tripex/kernels.hpp"

#include <atomic>

namespace tripex::kern {

namespace {
std::atomic<bool> g_parallel{true};

inline bool go_parallel(long work) {
  return g_parallel.load(std::memory_order_relaxed) && work >= kParallelMinWork;
}
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool enabled) { g_parallel.store(enabled, std::memory_order_relaxed); }

// C[i,j] accumulates over l ascending in every variant.

void matmul_nn_serial(const double* a, const double* b, double* c, int n, int m, int k) {
  for (int i = 0; i < n; ++i) {
    double* ci = c + static_cast<long>(i) * k;
    const double* ai = a + static_cast<long>(i) * m;
    for (int l = 0; l < m; ++l) {
      const double ail = ai[l];
      const double* bl = b + static_cast<long>(l) * k;
      for (int j = 0; j < k; ++j) ci[j] += ail * bl[j];
    }
  }
}

void matmul_nn_omp(const double* a, const double* b, double* c, int n, int m, int k) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double* ci = c + static_cast<long>(i) * k;
    const double* ai = a + static_cast<long>(i) * m;
    for (int l = 0; l < m; ++l) {
      const double ail = ai[l];
      const double* bl = b + static_cast<long>(l) * k;
      for (int j = 0; j < k; ++j) ci[j] += ail * bl[j];
    }
  }
}

void matmul_nn(const double* a, const double* b, double* c, int n, int m, int k) {
  if (go_parallel(static_cast<long>(n) * m * k)) {
    matmul_nn_omp(a, b, c, n, m, k);
  } else {
    matmul_nn_serial(a, b, c, n, m, k);
  }
}

void matmul_nt_serial(const double* a, const double* b, double* c, int n, int m, int k) {
  for (int i = 0; i < n; ++i) {
    const double* ai = a + static_cast<long>(i) * m;
    double* ci = c + static_cast<long>(i) * k;
    for (int j = 0; j < k; ++j) {
      const double* bj = b + static_cast<long>(j) * m;
      double acc = 0.0;
      for (int l = 0; l < m; ++l) acc += ai[l] * bj[l];
      ci[j] += acc;
    }
  }
}

void matmul_nt_omp(const double* a, const double* b, double* c, int n, int m, int k) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* ai = a + static_cast<long>(i) * m;
    double* ci = c + static_cast<long>(i) * k;
    for (int j = 0; j < k; ++j) {
      const double* bj = b + static_cast<long>(j) * m;
      double acc = 0.0;
      for (int l = 0; l < m; ++l) acc += ai[l] * bj[l];
      ci[j] += acc;
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c, int n, int m, int k) {
  if (go_parallel(static_cast<long>(n) * m * k)) {
    matmul_nt_omp(a, b, c, n, m, k);
  } else {
    matmul_nt_serial(a, b, c, n, m, k);
  }
}

void matmul_tn_serial(const double* a, const double* b, double* c, int n, int m, int k) {
  for (int l = 0; l < m; ++l) {
    double* cl = c + static_cast<long>(l) * k;
    for (int i = 0; i < n; ++i) {
      const double ail = a[static_cast<long>(i) * m + l];
      const double* bi = b + static_cast<long>(i) * k;
      for (int j = 0; j < k; ++j) cl[j] += ail * bi[j];
    }
  }
}

void matmul_tn_omp(const double* a, const double* b, double* c, int n, int m, int k) {
#pragma omp parallel for schedule(static)
  for (int l = 0; l < m; ++l) {
    double* cl = c + static_cast<long>(l) * k;
    for (int i = 0; i < n; ++i) {
      const double ail = a[static_cast<long>(i) * m + l];
      const double* bi = b + static_cast<long>(i) * k;
      for (int j = 0; j < k; ++j) cl[j] += ail * bi[j];
    }
  }
}

void matmul_tn(const double* a, const double* b, double* c, int n, int m, int k) {
  if (go_parallel(static_cast<long>(n) * m * k)) {
    matmul_tn_omp(a, b, c, n, m, k);
  } else {
    matmul_tn_serial(a, b, c, n, m, k);
  }
}

}  // namespace tripex::kern
