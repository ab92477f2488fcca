#include "linalg.hpp"

#include <cstddef>
#include <stdexcept>

extern "C" {
void dpbtrf_(const char* uplo, const int* n, const int* kd, double* ab, const int* ldab, int* info, std::size_t);
void dpbtrs_(const char* uplo, const int* n, const int* kd, const int* nrhs, const double* ab, const int* ldab,
             double* b, const int* ldb, int* info, std::size_t);
void dtbtrs_(const char* uplo, const char* trans, const char* diag, const int* n, const int* kd, const int* nrhs,
             const double* ab, const int* ldab, double* b, const int* ldb, int* info, std::size_t, std::size_t,
             std::size_t);
void dtbmv_(const char* uplo, const char* trans, const char* diag, const int* n, const int* k, const double* a,
            const int* lda, double* x, const int* incx, std::size_t, std::size_t, std::size_t);
void dtrsm_(const char* side, const char* uplo, const char* transa, const char* diag, const int* m, const int* n,
            const double* alpha, const double* a, const int* lda, double* b, const int* ldb, std::size_t,
            std::size_t, std::size_t, std::size_t);
void dgemm_(const char* ta, const char* tb, const int* m, const int* n, const int* k, const double* alpha,
            const double* a, const int* lda, const double* b, const int* ldb, const double* beta, double* c,
            const int* ldc, std::size_t, std::size_t);
void dsyrk_(const char* uplo, const char* trans, const int* n, const int* k, const double* alpha, const double* a,
            const int* lda, const double* beta, double* c, const int* ldc, std::size_t, std::size_t);
void dsyevr_(const char* jobz, const char* range, const char* uplo, const int* n, double* a, const int* lda,
             const double* vl, const double* vu, const int* il, const int* iu, const double* abstol, int* m,
             double* w, double* z, const int* ldz, int* isuppz, double* work, const int* lwork, int* iwork,
             const int* liwork, int* info, std::size_t, std::size_t, std::size_t);
void dgesv_(const int* n, const int* nrhs, double* a, const int* lda, int* ipiv, double* b, const int* ldb,
            int* info);
void openblas_set_num_threads(int);
}

namespace invnorm::lapack {

int pbtrf(int n, int kd, double* ab) {
  int ldab = kd + 1, info = 0;
  dpbtrf_("L", &n, &kd, ab, &ldab, &info, 1);
  return info;
}

void tbtrs(bool trans, int n, int kd, const double* ab, double* b, int ldb, int nrhs) {
  int ldab = kd + 1, info = 0;
  dtbtrs_("L", trans ? "T" : "N", "N", &n, &kd, &nrhs, ab, &ldab, b, &ldb, &info, 1, 1, 1);
  if (info != 0) throw std::runtime_error("triangular band solve failed");
}

void tbmv(bool trans, int n, int kd, const double* ab, double* x) {
  int ldab = kd + 1, inc = 1;
  dtbmv_("L", trans ? "T" : "N", "N", &n, &kd, ab, &ldab, x, &inc, 1, 1, 1);
}

void pbtrs(int n, int kd, const double* ab, double* b, int ldb, int nrhs) {
  int ldab = kd + 1, info = 0;
  dpbtrs_("L", &n, &kd, &nrhs, ab, &ldab, b, &ldb, &info, 1);
  if (info != 0) throw std::runtime_error("band Cholesky solve failed");
}

void trsm(bool left, bool trans, int m, int n, const double* a, int lda, double* b, int ldb) {
  const double one = 1.0;
  dtrsm_(left ? "L" : "R", "L", trans ? "T" : "N", "N", &m, &n, &one, a, &lda, b, &ldb, 1, 1, 1, 1);
}

void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, int lda, const double* b, int ldb,
          double beta, double* c, int ldc) {
  dgemm_(ta ? "T" : "N", tb ? "T" : "N", &m, &n, &k, &alpha, a, &lda, b, &ldb, &beta, c, &ldc, 1, 1);
}

void syrk_t(int n, int k, double alpha, const double* a, int lda, double beta, double* c, int ldc) {
  dsyrk_("L", "T", &n, &k, &alpha, a, &lda, &beta, c, &ldc, 1, 1);
}

int syevr_smallest(int n, double* a, int lda, int k, std::vector<double>& w, std::vector<double>& z) {
  int il = 1, iu = k, m = 0, info = 0, ldz = n;
  double vl = 0, vu = 0, abstol = 0;
  w.assign(n, 0.0);
  z.assign(static_cast<std::size_t>(n) * k, 0.0);
  std::vector<int> isuppz(2 * static_cast<std::size_t>(k));
  int lwork = -1, liwork = -1, iwq = 0;
  double wq = 0;
  dsyevr_("V", "I", "L", &n, a, &lda, &vl, &vu, &il, &iu, &abstol, &m, w.data(), z.data(), &ldz, isuppz.data(), &wq,
          &lwork, &iwq, &liwork, &info, 1, 1, 1);
  lwork = static_cast<int>(wq);
  liwork = iwq;
  std::vector<double> work(lwork);
  std::vector<int> iwork(liwork);
  dsyevr_("V", "I", "L", &n, a, &lda, &vl, &vu, &il, &iu, &abstol, &m, w.data(), z.data(), &ldz, isuppz.data(),
          work.data(), &lwork, iwork.data(), &liwork, &info, 1, 1, 1);
  w.resize(k);
  if (info == 0 && m != k) info = -1000;
  return info;
}

int gesv(int n, double* a, double* b, int nrhs) {
  std::vector<int> ipiv(n);
  int info = 0;
  dgesv_(&n, &nrhs, a, &n, ipiv.data(), b, &n, &info);
  return info;
}

void set_threads(int n) { openblas_set_num_threads(n); }

}  // namespace invnorm::lapack
