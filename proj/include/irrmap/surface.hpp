#pragma once

// Polarized complex torus C^2 / (Omega Z^2 + D Z^2) with D = diag(1, d).
// Holds the period matrix, cached real/imaginary splits used by lattice
// reduction, the sixteen two-torsion points in a fixed ordering, and exact
// integer helpers (Smith form, Pfaffian) for the alternating Riemann form.

#include "irrmap/errors.hpp"
#include "irrmap/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace irrmap {

using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec2i = Eigen::Vector2i;
using Mat4i = Eigen::Matrix<std::int64_t, 4, 4>;

// Half-lattice point (Omega a + D b)/2 with bit vectors a, b in {0,1}^2.
// `index` is the 1-based position 1 + 8 a1 + 4 a2 + 2 b1 + b2.
struct TwoTorsionPoint {
    Vec2i a;
    Vec2i b;
    Vec2c z;
    int index = 0;
};

class PolarizedAbelianSurface {
public:
    // Validates d >= 1, symmetry of omega, and positive definiteness of
    // Im(omega); throws errc::invalid_period_matrix / invalid_config.
    static PolarizedAbelianSurface make(int d, const Mat2c& omega,
                                        double sym_tol = 1e-12);

    int d() const { return d_; }
    const Mat2c& omega() const { return omega_; }
    const Mat2& x() const { return x_; }
    const Mat2& y() const { return y_; }
    const Mat2& yinv() const { return yinv_; }
    // Smallest eigenvalue of Im(omega); controls theta-series decay.
    double y_min_eig() const { return ymin_; }
    // Diagonal of the polarization type matrix D = diag(1, d).
    Vec2 dvec() const { return Vec2(1.0, static_cast<double>(d_)); }

    // z = Omega * alpha + D * beta for t = (alpha1, alpha2, beta1, beta2).
    Vec2c from_torus(const Vec4& t) const;
    // Inverse of from_torus with each coordinate wrapped into [0, 1).
    Vec4 torus_coords(const Vec2c& z) const;

    // Nearest-lattice-point reduction: returns z' with torus coordinates in
    // [-1/2, 1/2) and fills j, k so that z = z' + Omega j + D k.
    Vec2c reduce(const Vec2c& z, Vec2i& j, Vec2i& k) const;

    // Euclidean distance from z to the nearest lattice point.
    double lattice_dist(const Vec2c& z) const;
    bool in_lattice(const Vec2c& z, double tol = 1e-9) const;

    // All 16 two-torsion points, position i holds index i+1.
    std::array<TwoTorsionPoint, 16> two_torsion() const;

private:
    PolarizedAbelianSurface() = default;

    int d_ = 0;
    Mat2c omega_;
    Mat2 x_, y_, yinv_;
    double ymin_ = 0.0;
};

// Random period matrix with Re(omega) entries in (-0.45, 0.45), diagonal of
// Im(omega) in (0.9, 1.6) and off-diagonal in (-0.2, 0.2): always in the
// Siegel upper half space with min eigenvalue of Im(omega) at least 0.7.
// Draw order is fixed (x11, x12, x22, y11, y12, y22) for reproducibility.
Mat2c random_siegel(rng& r);

// Gram matrix of the alternating form E(Omega a + D b, Omega a' + D b') =
// a^T D b' - b^T D a', scaled by `multiple`, on the symplectic-ordered basis
// (Omega e1, D e1, Omega e2, D e2).
Mat4i polarization_gram(int d, std::int64_t multiple = 1);

// Smith normal form invariants (d1 | d2 | d3 | d4, nonnegative).
std::array<std::int64_t, 4> smith_invariants(Mat4i m);

// Pfaffian of an antisymmetric 4x4 integer matrix; throws
// errc::invalid_audit_input when m is not antisymmetric.
std::int64_t pfaffian4(const Mat4i& m);

} // namespace irrmap
