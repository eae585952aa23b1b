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

#pragma once

namespace tripex::kern {

// Matrix product kernels. Each accumulates into C (callers zero fresh
// outputs). Every variant exists as a serial reference and an OpenMP
// version; both run the per-element reduction in the same order, so their
// results are bitwise identical and the dispatching entry points below may
// pick either without affecting reproducibility.

// C[n x k] += A[n x m] * B[m x k]
void matmul_nn_serial(const double* a, const double* b, double* c, int n, int m, int k);
void matmul_nn_omp(const double* a, const double* b, double* c, int n, int m, int k);
void matmul_nn(const double* a, const double* b, double* c, int n, int m, int k);

// C[n x k] += A[n x m] * B[k x m]^T
void matmul_nt_serial(const double* a, const double* b, double* c, int n, int m, int k);
void matmul_nt_omp(const double* a, const double* b, double* c, int n, int m, int k);
void matmul_nt(const double* a, const double* b, double* c, int n, int m, int k);

// C[m x k] += A[n x m]^T * B[n x k]
void matmul_tn_serial(const double* a, const double* b, double* c, int n, int m, int k);
void matmul_tn_omp(const double* a, const double* b, double* c, int n, int m, int k);
void matmul_tn(const double* a, const double* b, double* c, int n, int m, int k);

// Global switch for the OpenMP paths (kernels and batch-level loops).
// Disabling it forces the serial reference everywhere.
bool parallel_enabled();
void set_parallel(bool enabled);

// Work threshold (n*m*k) below which the dispatchers stay serial; tiny
// products are cheaper than spinning up a team.
inline constexpr long kParallelMinWork = 1L << 16;

}  // namespace tripex::kern
