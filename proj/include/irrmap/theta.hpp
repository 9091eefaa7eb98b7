#pragma once

// Theta-function basis of H^0(A, O(2L)) for A = C^2/(Omega Z^2 + D Z^2),
// D = diag(1, d), and its even subspace of dimension 2d + 2.
//
// Convention: for a characteristic c = (k1/2, k2/(2d)), k1 in {0,1},
// k2 in {0,..,2d-1},
//
//   theta_c(z) = sum_{m in Z^2} exp(2 pi i [ (m+c)^T Omega (m+c)
//                                            + 2 (m+c)^T z ]).
//
// These 4d functions share the factor of automorphy
//   theta_c(z + Omega j + D k) = exp(-2 pi i (j^T Omega j + 2 j^T z))
//                                 * theta_c(z),
// satisfy theta_c(-z) = theta_{-c}(z), and have pairwise disjoint Fourier
// supports (hence are linearly independent).
//
// Evaluation splits the truncated sum into the separable contraction
//   theta_c(z) = P_c(z) * sum_{ij} Q_c[i,j] A_i(z1) B_j(z2),
// where Q_c depends only on Omega and A/B are shared geometric vectors;
// the contraction is routed through the runtime-dispatched kernels.

#include "irrmap/kernels.hpp"
#include "irrmap/surface.hpp"

#include <memory>
#include <vector>

namespace irrmap {

using cdouble = kern::cdouble;

struct TruncationParams {
    int radius = 0;        // window |m|_inf <= radius
    double tail_bound = 0; // certified bound on the omitted tail at reduced z
};

// Smallest window radius whose Gaussian tail estimate is below tol, valid
// for evaluation points with centered torus coordinates (|alpha| <= 1/2).
TruncationParams truncation_radius(const PolarizedAbelianSurface& s, double tol);

// Value and first-order jet of all basis functions at one point.
struct Jet {
    Eigen::VectorXcd v;  // values
    Eigen::VectorXcd d1; // d/dz1
    Eigen::VectorXcd d2; // d/dz2
};

// Taylor coefficients of the parity-adapted germs at a two-torsion point
// p = (Omega a + D b)/2: for each basis function f the expansion of
//   h_f(w) = exp(2 pi i a^T w) * f(p + w)
// in powers of w, up to a total degree. The unit prefactor makes h_f(-w) =
// h_f(w) for even sections (so odd-degree coefficients vanish) and does not
// change vanishing orders. Coefficients of degree e are stored in the order
// alpha = (e,0), (e-1,1), ..., (0,e).
class TaylorTable {
public:
    TaylorTable(int functions, int max_degree);

    int max_degree() const { return max_degree_; }
    int functions() const { return functions_; }
    cdouble& coeff(int f, int a1, int a2);
    cdouble coeff(int f, int a1, int a2) const;
    // k+1 coefficients of total degree k for function f.
    std::vector<cdouble> slice(int f, int k) const;

private:
    int functions_;
    int max_degree_;
    int stride_; // coefficients per function
    std::vector<cdouble> data_;
};

class ThetaBasis {
public:
    ThetaBasis(const PolarizedAbelianSurface& s, double tail_tol);

    const PolarizedAbelianSurface& surface() const { return surf_; }
    const TruncationParams& truncation() const { return trunc_; }
    int size() const { return 4 * surf_.d(); }

    // Characteristic of basis function f as (k1, k2): c = (k1/2, k2/(2d)).
    std::pair<int, int> characteristic(int f) const;
    // Index f' with theta_f(-z) = theta_{f'}(z).
    int negation_partner(int f) const;

    // Production path: reduce z to the fundamental domain, contract the
    // precomputed tables, and transport value + first derivatives back.
    void eval_jet(const Vec2c& z, Jet& out) const;
    Eigen::VectorXcd eval_values(const Vec2c& z) const;

    // Oracle path: direct summation at unreduced z over a window enlarged by
    // `extra` beyond what |z| requires. Slow; used by tests as an
    // independent check of reduction and truncation.
    Eigen::VectorXcd eval_raw(const Vec2c& z, int extra = 2) const;

    // e_{Omega j + D k}(z) = exp(-2 pi i (j^T Omega j + 2 j^T z)).
    cdouble automorphy_factor(const Vec2c& z, const Vec2i& j, const Vec2i& k) const;

    // Adapted-germ Taylor coefficients at a two-torsion point (see
    // TaylorTable above) by term-wise differentiation of the series.
    TaylorTable taylor(const TwoTorsionPoint& p, int max_degree) const;

private:
    struct Workspace;
    Workspace& workspace() const;
    void contract(const Vec2c& zred, Workspace& ws) const;

    PolarizedAbelianSurface surf_;
    TruncationParams trunc_;
    int w_ = 0; // window width 2*radius + 1
    std::vector<cdouble> qtab_; // [f][i][j], row-major blocks of w_ x w_
};

// Orthonormal coefficient basis of the even subspace, built by symmetrizing
// the full basis and selecting the row space by singular value decomposition.
class EvenBasis {
public:
    // Throws errc::dimension_mismatch when the symmetrized rank is not 2d+2.
    EvenBasis(std::shared_ptr<const ThetaBasis> full, double rank_tol = 1e-8);

    const ThetaBasis& full() const { return *full_; }
    std::shared_ptr<const ThetaBasis> full_ptr() const { return full_; }
    const PolarizedAbelianSurface& surface() const { return full_->surface(); }
    int size() const { return static_cast<int>(coeff_.rows()); }
    // Rows express even functions in the full theta basis.
    const Eigen::MatrixXcd& coeff() const { return coeff_; }

    Eigen::VectorXcd eval_sections(const Vec2c& z) const;
    void eval_jet(const Vec2c& z, Jet& out) const;
    TaylorTable eval_taylor(const TwoTorsionPoint& p, int max_degree) const;

private:
    std::shared_ptr<const ThetaBasis> full_;
    Eigen::MatrixXcd coeff_;
    mutable Jet scratch_;
};

EvenBasis even_basis(const PolarizedAbelianSurface& s, double tail_tol = 1e-14,
                     double rank_tol = 1e-8);

} // namespace irrmap
