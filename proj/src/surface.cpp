#include "irrmap/surface.hpp"

#include <cmath>
#include <numeric>

namespace irrmap {

namespace {

double wrap_unit(double x) {
    double w = x - std::floor(x);
    // floor can round a tiny negative up to exactly 1.0
    if (w >= 1.0) w = 0.0;
    return w;
}

int nearest_int(double x) { return static_cast<int>(std::floor(x + 0.5)); }

} // namespace

PolarizedAbelianSurface PolarizedAbelianSurface::make(int d, const Mat2c& omega,
                                                      double sym_tol) {
    if (d < 1) fail(errc::invalid_config, "polarization type requires d >= 1");
    const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
    if (std::abs(omega(0, 1) - omega(1, 0)) > sym_tol * scale)
        fail(errc::invalid_period_matrix, "period matrix is not symmetric");

    PolarizedAbelianSurface s;
    s.d_ = d;
    s.omega_ = omega;
    s.omega_(1, 0) = s.omega_(0, 1); // symmetrize exactly
    s.x_ = s.omega_.real();
    s.y_ = s.omega_.imag();

    // 2x2 positive definiteness: positive diagonal and determinant.
    const double det = s.y_.determinant();
    if (s.y_(0, 0) <= 0.0 || det <= 0.0)
        fail(errc::invalid_period_matrix, "Im(omega) is not positive definite");

    s.yinv_ = s.y_.inverse();
    const double tr = s.y_.trace();
    s.ymin_ = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    return s;
}

Vec2c PolarizedAbelianSurface::from_torus(const Vec4& t) const {
    const Vec2 alpha = t.head<2>();
    const Vec2 beta = t.tail<2>();
    const Vec2 db(beta(0), beta(1) * d_);
    Vec2c z;
    z(0) = std::complex<double>(x_.row(0).dot(alpha) + db(0), y_.row(0).dot(alpha));
    z(1) = std::complex<double>(x_.row(1).dot(alpha) + db(1), y_.row(1).dot(alpha));
    return z;
}

Vec4 PolarizedAbelianSurface::torus_coords(const Vec2c& z) const {
    const Vec2 im(z(0).imag(), z(1).imag());
    const Vec2 re(z(0).real(), z(1).real());
    const Vec2 alpha = yinv_ * im;
    const Vec2 rem = re - x_ * alpha;
    Vec4 t;
    t << wrap_unit(alpha(0)), wrap_unit(alpha(1)), wrap_unit(rem(0)),
        wrap_unit(rem(1) / d_);
    return t;
}

Vec2c PolarizedAbelianSurface::reduce(const Vec2c& z, Vec2i& j, Vec2i& k) const {
    const Vec2 im(z(0).imag(), z(1).imag());
    const Vec2 re(z(0).real(), z(1).real());
    const Vec2 alpha = yinv_ * im;
    const Vec2 rem = re - x_ * alpha;
    const Vec2 beta(rem(0), rem(1) / d_);
    j << nearest_int(alpha(0)), nearest_int(alpha(1));
    k << nearest_int(beta(0)), nearest_int(beta(1));
    Vec4 t;
    t << alpha(0) - j(0), alpha(1) - j(1), beta(0) - k(0), beta(1) - k(1);
    return from_torus(t);
}

double PolarizedAbelianSurface::lattice_dist(const Vec2c& z) const {
    Vec2i j, k;
    const Vec2c r = reduce(z, j, k);
    return r.norm();
}

bool PolarizedAbelianSurface::in_lattice(const Vec2c& z, double tol) const {
    return lattice_dist(z) <= tol;
}

std::array<TwoTorsionPoint, 16> PolarizedAbelianSurface::two_torsion() const {
    std::array<TwoTorsionPoint, 16> pts;
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2)
            for (int b1 = 0; b1 < 2; ++b1)
                for (int b2 = 0; b2 < 2; ++b2) {
                    const int idx = 1 + 8 * a1 + 4 * a2 + 2 * b1 + b2;
                    TwoTorsionPoint& p = pts[idx - 1];
                    p.a << a1, a2;
                    p.b << b1, b2;
                    p.index = idx;
                    Vec4 t;
                    t << 0.5 * a1, 0.5 * a2, 0.5 * b1, 0.5 * b2;
                    p.z = from_torus(t);
                }
    return pts;
}

Mat2c random_siegel(rng& r) {
    const double x11 = r.uniform(-0.45, 0.45);
    const double x12 = r.uniform(-0.45, 0.45);
    const double x22 = r.uniform(-0.45, 0.45);
    const double y11 = r.uniform(0.9, 1.6);
    const double y12 = r.uniform(-0.2, 0.2);
    const double y22 = r.uniform(0.9, 1.6);
    Mat2c omega;
    omega(0, 0) = {x11, y11};
    omega(0, 1) = {x12, y12};
    omega(1, 0) = {x12, y12};
    omega(1, 1) = {x22, y22};
    return omega;
}

Mat4i polarization_gram(int d, std::int64_t multiple) {
    // Basis order (Omega e1, D e1, Omega e2, D e2): two symplectic pairs with
    // pairings 1 and d, so the Pfaffian comes out as +d for multiple = 1.
    Mat4i m = Mat4i::Zero();
    m(0, 1) = multiple;
    m(1, 0) = -multiple;
    m(2, 3) = multiple * d;
    m(3, 2) = -multiple * d;
    return m;
}

std::array<std::int64_t, 4> smith_invariants(Mat4i m) {
    constexpr int n = 4;
    using std::swap;
    for (int t = 0; t < n; ++t) {
        // Find the nonzero entry of least magnitude in the trailing block.
        int pr = -1, pc = -1;
        std::int64_t best = 0;
        for (int i = t; i < n; ++i)
            for (int j = t; j < n; ++j)
                if (m(i, j) != 0 &&
                    (pr < 0 || std::abs(m(i, j)) < std::abs(best))) {
                    pr = i;
                    pc = j;
                    best = m(i, j);
                }
        if (pr < 0) break; // trailing block is zero

        m.row(t).swap(m.row(pr));
        m.col(t).swap(m.col(pc));

        // Euclidean reduction of row t and column t against the pivot.
        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (int i = t + 1; i < n; ++i) {
                if (m(i, t) == 0) continue;
                const std::int64_t q = m(i, t) / m(t, t);
                m.row(i) -= q * m.row(t);
                if (m(i, t) != 0) { // remainder becomes the smaller pivot
                    m.row(t).swap(m.row(i));
                    dirty = true;
                }
            }
            for (int j = t + 1; j < n; ++j) {
                if (m(t, j) == 0) continue;
                const std::int64_t q = m(t, j) / m(t, t);
                m.col(j) -= q * m.col(t);
                if (m(t, j) != 0) {
                    m.col(t).swap(m.col(j));
                    dirty = true;
                }
            }
            // Pivot must divide the whole trailing block; if not, fold the
            // offending row in and restart the reduction.
            if (!dirty) {
                for (int i = t + 1; i < n && !dirty; ++i)
                    for (int j = t + 1; j < n && !dirty; ++j)
                        if (m(i, j) % m(t, t) != 0) {
                            m.row(t) += m.row(i);
                            dirty = true;
                        }
            }
        }
    }
    std::array<std::int64_t, 4> inv{};
    for (int i = 0; i < n; ++i) inv[i] = std::abs(m(i, i));
    return inv;
}

std::int64_t pfaffian4(const Mat4i& m) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (m(i, j) != -m(j, i))
                fail(errc::invalid_audit_input, "pfaffian of a non-antisymmetric matrix");
    return m(0, 1) * m(2, 3) - m(0, 2) * m(1, 3) + m(0, 3) * m(1, 2);
}

} // namespace irrmap
