#pragma once

#include "pttk/tensor.hpp"

namespace pttk::linalg {

// Dense linear-algebra capability boundary. Everything below is backed by
// Eigen (Householder QR, BDC/Jacobi SVD, self-adjoint eigensolver), which
// meets the usual backward-error contracts for these factorizations.

struct ThinQr {
    Matrix q; // m x k, orthonormal columns, k = min(m, n)
    Matrix r; // k x n, upper triangular (trapezoidal when m < n)
};
ThinQr thin_qr(const Matrix& a);

struct Svd {
    Matrix u;
    Vector s; // descending
    Matrix v;
};
Svd thin_svd(const Matrix& a);

/// Singular values only, descending.
Vector singular_values(const Matrix& a);

/// Smallest rank r such that sqrt(sum_{i>=r} s_i^2) <= delta; ties at equality
/// keep the smaller rank. Never returns less than 1.
Index truncation_rank(const Vector& s, double delta);

struct SymEig {
    Vector values; // ascending (Eigen convention)
    Matrix vectors;
};
SymEig sym_eig(const Matrix& a);

/// 2-norm condition number of a 2x2 matrix [[a, b], [c, d]] via the closed
/// form of its singular values. Returns +inf when singular.
double cond_2x2(double a, double b, double c, double d);

/// 2-norm condition number from singular values (inf when the smallest is 0).
double cond_from_singular_values(const Vector& s);

double spectral_norm(const Matrix& a);

} // namespace pttk::linalg
