#pragma once

// Thin wrappers over the Fortran BLAS/LAPACK routines exported by OpenBLAS.
// All matrices are column-major.

#include <vector>

namespace invnorm::lapack {

// Lower band Cholesky in LAPACK band storage (ldab = kd + 1). Returns info.
int pbtrf(int n, int kd, double* ab);
// Solves L X = B (trans = false) or L^T X = B (trans = true) for band L.
void tbtrs(bool trans, int n, int kd, const double* ab, double* b, int ldb, int nrhs);
// x := L x or L^T x for band L.
void tbmv(bool trans, int n, int kd, const double* ab, double* x);
// Full band SPD solve with the factor from pbtrf.
void pbtrs(int n, int kd, const double* ab, double* b, int ldb, int nrhs);

// B := op(A)^{-1} B (left) or B op(A)^{-1} (right) for lower triangular A.
void trsm(bool left, bool trans, int m, int n, const double* a, int lda, double* b, int ldb);
// C := alpha op(A) op(B) + beta C
void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, int lda, const double* b, int ldb,
          double beta, double* c, int ldc);
// Lower triangle of C := alpha A^T A + beta C, A is k x n.
void syrk_t(int n, int k, double alpha, const double* a, int lda, double beta, double* c, int ldc);

// k smallest eigenpairs of a symmetric matrix (lower triangle referenced,
// destroyed). Returns info; w has k entries, z is n x k.
int syevr_smallest(int n, double* a, int lda, int k, std::vector<double>& w, std::vector<double>& z);

// General LU solve; returns info (> 0: singular).
int gesv(int n, double* a, double* b, int nrhs);

void set_threads(int n);

}  // namespace invnorm::lapack
