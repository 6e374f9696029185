#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "gframelab/errors.hpp"

// Dense linear-algebra substrate shared by all frame layers: Hermitian
// eigendecomposition, PSD functional calculus, Moore-Penrose pseudoinverse,
// operator norms and commutator diagnostics. Eigen does the factorizations;
// this header owns the contracts (tolerances, error semantics, Hermitian-part
// policy).

namespace gframelab {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

// Default tolerances. Double precision with condition numbers <= 1e4 leaves
// about six digits of headroom over the tightest of these.
inline constexpr double kHermitianTol = 1e-10;  // relative Hermitian defect
inline constexpr double kEigTol = 1e-10;        // reconstruction residual
inline constexpr double kPinvTol = 1e-9;        // Penrose-condition residual
inline constexpr double kPsdFloor = 1e-12;      // positivity floor

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline void require_finite(const Mat& m, const std::string& what) {
    if (!m.allFinite()) throw NonFiniteValue(what + ": non-finite entries");
}

/// Largest singular value. Computed from the smaller Gram matrix so tall
/// stacked operators (e.g. 1024 x 2) stay cheap.
inline double operator_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Mat gram;
    if (m.rows() <= m.cols()) {
        gram = m * m.adjoint();
    } else {
        gram = m.adjoint() * m;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.adjoint()),
                                          Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

inline Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

/// ||M - M*||, the probe for "should have been self-adjoint".
inline double hermitian_defect(const Mat& m) {
    return operator_norm(m - m.adjoint());
}

struct HermitianEig {
    RealVec eigenvalues;  // ascending
    Mat eigenvectors;     // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix: M = V diag(lambda) V*.
/// Rejects non-square input and input whose Hermitian defect exceeds
/// kHermitianTol * ||M||.
inline HermitianEig hermitian_eigendecomposition(const Mat& m) {
    if (m.rows() != m.cols())
        throw NotSquare("hermitian_eigendecomposition: matrix is " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    require_finite(m, "hermitian_eigendecomposition");
    const double scale = operator_norm(m);
    if (hermitian_defect(m) > kHermitianTol * std::max(scale, 1e-300))
        throw NotHermitian("hermitian_eigendecomposition: defect " +
                           std::to_string(hermitian_defect(m)) + " exceeds tolerance");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
    if (es.info() != Eigen::Success)
        throw Error("hermitian_eigendecomposition: solver did not converge");
    return HermitianEig{es.eigenvalues(), es.eigenvectors()};
}

enum class PsdFn { Sqrt, Inv, InvSqrt };

/// Functional calculus on a Hermitian PSD matrix: V f(diag(lambda)) V*.
/// Sqrt tolerates eigenvalues down to -kPsdFloor*scale (clamped to zero);
/// Inv and InvSqrt require every eigenvalue strictly above kPsdFloor.
inline Mat psd_function(const Mat& m, PsdFn fn) {
    const HermitianEig eig = hermitian_eigendecomposition(m);
    const Eigen::Index n = eig.eigenvalues.size();
    const double top = n > 0 ? std::abs(eig.eigenvalues(n - 1)) : 0.0;
    RealVec mapped(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lam = eig.eigenvalues(i);
        switch (fn) {
            case PsdFn::Sqrt: {
                if (lam < -kPsdFloor * std::max(top, 1.0))
                    throw NotPositive("psd_function(sqrt): eigenvalue " +
                                      std::to_string(lam) + " below zero");
                mapped(i) = std::sqrt(std::max(lam, 0.0));
                break;
            }
            case PsdFn::Inv: {
                if (lam <= kPsdFloor)
                    throw NotPositive("psd_function(inv): eigenvalue " +
                                      std::to_string(lam) + " at or below floor");
                mapped(i) = 1.0 / lam;
                break;
            }
            case PsdFn::InvSqrt: {
                if (lam <= kPsdFloor)
                    throw NotPositive("psd_function(inv_sqrt): eigenvalue " +
                                      std::to_string(lam) + " at or below floor");
                mapped(i) = 1.0 / std::sqrt(lam);
                break;
            }
        }
    }
    const Mat result = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
    return hermitian_part(result);
}

/// Hermitian square root with negative eigenvalues clamped to zero. Never
/// throws; for diagnostics where an indefinite input is data, not an error.
inline Mat psd_sqrt_clamped(const Mat& m, double* min_eigenvalue = nullptr) {
    const HermitianEig eig = hermitian_eigendecomposition(m);
    if (min_eigenvalue) *min_eigenvalue = eig.eigenvalues(0);
    RealVec mapped = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return hermitian_part(eig.eigenvectors * mapped.asDiagonal() *
                          eig.eigenvectors.adjoint());
}

/// Moore-Penrose pseudoinverse (always defined). Singular values below
/// max(m,n) * eps * sigma_max are treated as zero.
inline Mat pseudo_inverse(const Mat& m) {
    require_finite(m, "pseudo_inverse");
    if (m.size() == 0) return m.adjoint();
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVec& sigma = svd.singularValues();
    const double cutoff = std::max(m.rows(), m.cols()) *
                          std::numeric_limits<double>::epsilon() *
                          (sigma.size() > 0 ? sigma(0) : 0.0);
    RealVec inv_sigma(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        inv_sigma(i) = sigma(i) > cutoff ? 1.0 / sigma(i) : 0.0;
    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().adjoint();
}

inline double smallest_singular_value(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    const RealVec& sigma = svd.singularValues();
    return sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
}

/// ||AB - BA||. Both operands must be square and of equal size.
inline double commutator_norm(const Mat& a, const Mat& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw ShapeMismatch("commutator_norm: operands must be square and equally sized");
    return operator_norm(a * b - b * a);
}

inline Mat identity_matrix(Eigen::Index n) { return Mat::Identity(n, n); }

/// |a - b| relative to the larger magnitude (floored to dodge 0/0).
inline double relative_diff(Complex a, Complex b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / denom;
}

inline double relative_diff(double a, double b) {
    return relative_diff(Complex(a, 0.0), Complex(b, 0.0));
}

}  // namespace gframelab
