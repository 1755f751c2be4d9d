#include "pttk/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace pttk::linalg {

ThinQr thin_qr(const Matrix& a) {
    const Index k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Matrix> qr(a);
    ThinQr out;
    out.q = qr.householderQ() * Matrix::Identity(a.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return out;
}

namespace {

template <typename SvdT>
Svd pack_svd(const SvdT& svd) {
    return Svd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

} // namespace

Svd thin_svd(const Matrix& a) {
    // BDC is much faster for anything but tiny blocks; Jacobi is more robust
    // at small sizes.
    if (std::min(a.rows(), a.cols()) <= 16) {
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        return pack_svd(svd);
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return pack_svd(svd);
}

Vector singular_values(const Matrix& a) {
    if (std::min(a.rows(), a.cols()) <= 16) {
        Eigen::JacobiSVD<Matrix> svd(a);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

Index truncation_rank(const Vector& s, double delta) {
    const Index n = s.size();
    double tail2 = 0.0;
    Index rank = n;
    // Walk from the smallest singular value, dropping while the discarded
    // energy stays within delta.
    for (Index i = n - 1; i >= 0; --i) {
        tail2 += s[i] * s[i];
        if (std::sqrt(tail2) <= delta)
            rank = i;
        else
            break;
    }
    return std::max<Index>(rank, 1);
}

SymEig sym_eig(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("sym_eig: eigendecomposition failed");
    return SymEig{es.eigenvalues(), es.eigenvectors()};
}

double cond_2x2(double a, double b, double c, double d) {
    const double f = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * det * det));
    const double smax2 = 0.5 * (f + disc);
    const double smin2 = 0.5 * (f - disc);
    if (smax2 <= 0.0) return std::numeric_limits<double>::infinity();
    if (smin2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(smax2 / smin2);
}

double cond_from_singular_values(const Vector& s) {
    if (s.size() == 0 || s[0] <= 0.0) return std::numeric_limits<double>::infinity();
    const double smin = s[s.size() - 1];
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s[0] / smin;
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Vector s = singular_values(a);
    return s.size() > 0 ? s[0] : 0.0;
}

} // namespace pttk::linalg
