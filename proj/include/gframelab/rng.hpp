#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gframelab/linops.hpp"

namespace gframelab {

/// Seeded random source used by every generator in the project.
/// mt19937_64 is the fixed project-wide engine; uniforms come straight from
/// the raw 64-bit stream and normals from Box-Muller, so the value stream is
/// fully specified by the seed (libstdc++ distribution internals never enter).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform01_open0() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Standard complex Gaussian (unit total variance).
    Complex cnormal() {
        const double re = normal();
        const double im = normal();
        return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
    }

    Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cnormal();
        return m;
    }

    Vec gaussian_vector(Eigen::Index n) {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
        return v;
    }

    /// Random point on the unit sphere of C^n.
    Vec unit_vector(Eigen::Index n) {
        Vec v = gaussian_vector(n);
        const double norm = v.norm();
        return norm > 0.0 ? Vec(v / norm) : unit_vector(n);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Haar-distributed unitary: QR of a Gaussian matrix with the R-diagonal
/// phases folded into Q.
inline Mat random_unitary(Eigen::Index n, Rng& rng) {
    const Mat g = rng.gaussian_matrix(n, n);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(j) *= d / mag;
    }
    return q;
}

}  // namespace gframelab
