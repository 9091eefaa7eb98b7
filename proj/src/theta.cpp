#include "irrmap/theta.hpp"

#include <cmath>

namespace irrmap {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
const cdouble kI(0.0, 1.0);

cdouble cis(double t) { return {std::cos(t), std::sin(t)}; }

// exp(2 pi i w) for complex w.
cdouble e2pi(cdouble w) {
    return std::exp(-kTwoPi * w.imag()) * cis(kTwoPi * w.real());
}

} // namespace

TruncationParams truncation_radius(const PolarizedAbelianSurface& s, double tol) {
    if (!(tol > 0.0 && tol < 1.0))
        fail(errc::invalid_config, "truncation tolerance must lie in (0,1)");
    const double lmin = s.y_min_eig();
    if (lmin <= 0.0)
        fail(errc::invalid_period_matrix, "decay form is not positive definite");
    const double lmax = s.y().trace() - lmin;

    // Summand magnitude at reduced z (centered alpha, |alpha|_2^2 <= 1/2):
    //   |term_m| = exp(-2 pi [(m+c+alpha)^T Y (m+c+alpha) - alpha^T Y alpha])
    // with |c + alpha|_inf < 3/2, so the shell |m|_inf = k contributes at
    // most 8k exp(-pi sigma_min (k - 3/2)^2) exp(pi lmax), sigma_min = 2 lmin.
    const double c0 = std::exp(M_PI * lmax);
    for (int radius = 1; radius <= 60; ++radius) {
        double tail = 0.0;
        for (int k = radius + 1; k <= radius + 200; ++k) {
            const double gap = std::max(0.0, k - 1.5);
            tail += 8.0 * k * std::exp(-kTwoPi * lmin * gap * gap);
        }
        tail *= c0;
        if (tail < tol) return {radius, tail};
    }
    fail(errc::invalid_config, "tolerance unreachable within window radius 60");
}

// ---------------------------------------------------------------------------
// TaylorTable

TaylorTable::TaylorTable(int functions, int max_degree)
    : functions_(functions),
      max_degree_(max_degree),
      stride_((max_degree + 1) * (max_degree + 2) / 2),
      data_(static_cast<std::size_t>(functions) * stride_, cdouble(0, 0)) {}

static int taylor_index(int a1, int a2) {
    const int e = a1 + a2;
    return e * (e + 1) / 2 + a2;
}

cdouble& TaylorTable::coeff(int f, int a1, int a2) {
    return data_[static_cast<std::size_t>(f) * stride_ + taylor_index(a1, a2)];
}

cdouble TaylorTable::coeff(int f, int a1, int a2) const {
    return data_[static_cast<std::size_t>(f) * stride_ + taylor_index(a1, a2)];
}

std::vector<cdouble> TaylorTable::slice(int f, int k) const {
    std::vector<cdouble> out(k + 1);
    for (int a2 = 0; a2 <= k; ++a2) out[a2] = coeff(f, k - a2, a2);
    return out;
}

// ---------------------------------------------------------------------------
// ThetaBasis

struct ThetaBasis::Workspace {
    std::vector<cdouble> a0, a1, b0, b1;
    std::vector<cdouble> r0, r1;
    std::vector<cdouble> s00, s10, s01, pf;
};

ThetaBasis::Workspace& ThetaBasis::workspace() const {
    thread_local Workspace ws;
    return ws;
}

ThetaBasis::ThetaBasis(const PolarizedAbelianSurface& s, double tail_tol)
    : surf_(s), trunc_(truncation_radius(s, tail_tol)) {
    const int d = surf_.d();
    const int m = trunc_.radius;
    w_ = 2 * m + 1;
    const int n = 4 * d;
    qtab_.resize(static_cast<std::size_t>(n) * w_ * w_);

    const Mat2c& omega = surf_.omega();
    for (int f = 0; f < n; ++f) {
        const auto [k1, k2] = characteristic(f);
        const double c1 = 0.5 * k1;
        const double c2 = static_cast<double>(k2) / (2.0 * d);
        cdouble* block = qtab_.data() + static_cast<std::size_t>(f) * w_ * w_;
        for (int i = 0; i < w_; ++i) {
            const double m1 = (i - m) + c1;
            for (int j = 0; j < w_; ++j) {
                const double m2 = (j - m) + c2;
                const cdouble quad = omega(0, 0) * (m1 * m1) +
                                     2.0 * omega(0, 1) * (m1 * m2) +
                                     omega(1, 1) * (m2 * m2);
                block[i * w_ + j] = e2pi(quad);
            }
        }
    }
}

std::pair<int, int> ThetaBasis::characteristic(int f) const {
    const int twod = 2 * surf_.d();
    return {f / twod, f % twod};
}

int ThetaBasis::negation_partner(int f) const {
    const int twod = 2 * surf_.d();
    const auto [k1, k2] = characteristic(f);
    // -c = (-k1/2, -k2/(2d)) = (k1/2 mod 1, (2d-k2)/(2d) mod 1)
    return k1 * twod + (twod - k2) % twod;
}

void ThetaBasis::contract(const Vec2c& zred, Workspace& ws) const {
    const int m = trunc_.radius;
    const int w = w_;
    const int n = size();
    const int d = surf_.d();

    ws.a0.resize(w);
    ws.a1.resize(w);
    ws.b0.resize(w);
    ws.b1.resize(w);
    ws.r0.resize(static_cast<std::size_t>(n) * w);
    ws.r1.resize(static_cast<std::size_t>(n) * w);
    ws.s00.resize(n);
    ws.s10.resize(n);
    ws.s01.resize(n);
    ws.pf.resize(n);

    // A_i = exp(4 pi i m1 z1), B_j = exp(4 pi i m2 z2), m1 = i - m.
    const cdouble e1 = e2pi(2.0 * zred(0));
    const cdouble e2 = e2pi(2.0 * zred(1));
    ws.a0[0] = e2pi(-2.0 * static_cast<double>(m) * zred(0));
    ws.b0[0] = e2pi(-2.0 * static_cast<double>(m) * zred(1));
    for (int i = 1; i < w; ++i) {
        ws.a0[i] = ws.a0[i - 1] * e1;
        ws.b0[i] = ws.b0[i - 1] * e2;
    }
    for (int i = 0; i < w; ++i) {
        const double mi = i - m;
        ws.a1[i] = mi * ws.a0[i];
        ws.b1[i] = mi * ws.b0[i];
    }

    // R0[f*w + i] = sum_j Q_f[i,j] B0[j]; R1 likewise with B1.
    kern::dual_matvec(qtab_.data(), static_cast<std::size_t>(n) * w, w,
                      ws.b0.data(), ws.b1.data(), ws.r0.data(), ws.r1.data());
    for (int f = 0; f < n; ++f) {
        const cdouble* r0 = ws.r0.data() + static_cast<std::size_t>(f) * w;
        const cdouble* r1 = ws.r1.data() + static_cast<std::size_t>(f) * w;
        ws.s00[f] = kern::cdot(ws.a0.data(), r0, w);
        ws.s10[f] = kern::cdot(ws.a1.data(), r0, w);
        ws.s01[f] = kern::cdot(ws.a0.data(), r1, w);
    }

    // P_f = exp(4 pi i c_f . z) = u^{k1} * v^{k2}, v = exp(2 pi i z2 / d).
    const cdouble u = e2pi(zred(0));
    const cdouble v = e2pi(zred(1) / static_cast<double>(d));
    cdouble vp(1.0, 0.0);
    std::vector<cdouble> vpow(2 * d);
    for (int k2 = 0; k2 < 2 * d; ++k2) {
        vpow[k2] = vp;
        vp *= v;
    }
    for (int f = 0; f < n; ++f) {
        const auto [k1, k2] = characteristic(f);
        ws.pf[f] = (k1 ? u : cdouble(1.0, 0.0)) * vpow[k2];
    }
}

void ThetaBasis::eval_jet(const Vec2c& z, Jet& out) const {
    const int n = size();
    Workspace& ws = workspace();
    Vec2i j, k;
    const Vec2c zred = surf_.reduce(z, j, k);
    contract(zred, ws);
    const cdouble e = automorphy_factor(zred, j, k);

    out.v.resize(n);
    out.d1.resize(n);
    out.d2.resize(n);
    const cdouble fourpii = 2.0 * kTwoPi * kI;
    const cdouble shift1 = fourpii * static_cast<double>(j(0));
    const cdouble shift2 = fourpii * static_cast<double>(j(1));
    const int d = surf_.d();
    for (int f = 0; f < n; ++f) {
        const auto [k1, k2] = characteristic(f);
        const double c1 = 0.5 * k1;
        const double c2 = static_cast<double>(k2) / (2.0 * d);
        const cdouble val = ws.pf[f] * ws.s00[f];
        const cdouble g1 = ws.pf[f] * fourpii * (c1 * ws.s00[f] + ws.s10[f]);
        const cdouble g2 = ws.pf[f] * fourpii * (c2 * ws.s00[f] + ws.s01[f]);
        out.v(f) = e * val;
        out.d1(f) = e * (g1 - shift1 * val);
        out.d2(f) = e * (g2 - shift2 * val);
    }
}

Eigen::VectorXcd ThetaBasis::eval_values(const Vec2c& z) const {
    thread_local Jet jet;
    eval_jet(z, jet);
    return jet.v;
}

Eigen::VectorXcd ThetaBasis::eval_raw(const Vec2c& z, int extra) const {
    const int d = surf_.d();
    const int n = size();
    const Vec2 im(z(0).imag(), z(1).imag());
    const Vec2 alpha = surf_.yinv() * im;
    const int margin = static_cast<int>(std::ceil(alpha.cwiseAbs().maxCoeff()));
    const int m = trunc_.radius + margin + std::max(extra, 0);

    Eigen::VectorXcd out(n);
    const Mat2c& omega = surf_.omega();
    for (int f = 0; f < n; ++f) {
        const auto [k1, k2] = characteristic(f);
        const double c1 = 0.5 * k1;
        const double c2 = static_cast<double>(k2) / (2.0 * d);
        cdouble sum(0.0, 0.0);
        for (int i = -m; i <= m; ++i) {
            const double m1 = i + c1;
            for (int j = -m; j <= m; ++j) {
                const double m2 = j + c2;
                const cdouble quad = omega(0, 0) * (m1 * m1) +
                                     2.0 * omega(0, 1) * (m1 * m2) +
                                     omega(1, 1) * (m2 * m2);
                const cdouble lin = 2.0 * (m1 * z(0) + m2 * z(1));
                sum += e2pi(quad + lin);
            }
        }
        out(f) = sum;
    }
    return out;
}

cdouble ThetaBasis::automorphy_factor(const Vec2c& z, const Vec2i& j,
                                      const Vec2i& k) const {
    (void)k; // the factor is independent of the D-translation part
    const Mat2c& omega = surf_.omega();
    const double j1 = j(0), j2 = j(1);
    const cdouble quad = omega(0, 0) * (j1 * j1) + 2.0 * omega(0, 1) * (j1 * j2) +
                         omega(1, 1) * (j2 * j2);
    const cdouble lin = 2.0 * (j1 * z(0) + j2 * z(1));
    return e2pi(-(quad + lin));
}

TaylorTable ThetaBasis::taylor(const TwoTorsionPoint& p, int max_degree) const {
    const int d = surf_.d();
    const int n = size();
    const int m = trunc_.radius + 2;
    TaylorTable table(n, max_degree);

    const Mat2c& omega = surf_.omega();
    const double a1 = p.a(0), a2 = p.a(1);
    for (int f = 0; f < n; ++f) {
        const auto [k1, k2] = characteristic(f);
        const double c1 = 0.5 * k1;
        const double c2 = static_cast<double>(k2) / (2.0 * d);
        for (int i = -m; i <= m; ++i) {
            const double m1 = i + c1;
            for (int j = -m; j <= m; ++j) {
                const double m2 = j + c2;
                const cdouble quad = omega(0, 0) * (m1 * m1) +
                                     2.0 * omega(0, 1) * (m1 * m2) +
                                     omega(1, 1) * (m2 * m2);
                const cdouble lin = 2.0 * (m1 * p.z(0) + m2 * p.z(1));
                const cdouble q = e2pi(quad + lin);
                // frequency of the adapted germ: W = 2(m + c) + a
                const double w1 = 2.0 * m1 + a1;
                const double w2 = 2.0 * m2 + a2;
                double pow1 = 1.0;
                for (int b1 = 0; b1 <= max_degree; ++b1) {
                    double pow12 = pow1;
                    for (int b2 = 0; b1 + b2 <= max_degree; ++b2) {
                        table.coeff(f, b1, b2) += q * pow12;
                        pow12 *= w2;
                    }
                    pow1 *= w1;
                }
            }
        }
    }

    // scale by (2 pi i)^{|alpha|} / (alpha1! alpha2!)
    std::vector<double> fact(max_degree + 1, 1.0);
    for (int i = 1; i <= max_degree; ++i) fact[i] = fact[i - 1] * i;
    std::vector<cdouble> tpw(max_degree + 1);
    tpw[0] = {1.0, 0.0};
    for (int i = 1; i <= max_degree; ++i) tpw[i] = tpw[i - 1] * (kTwoPi * kI);
    for (int f = 0; f < n; ++f)
        for (int b1 = 0; b1 <= max_degree; ++b1)
            for (int b2 = 0; b1 + b2 <= max_degree; ++b2)
                table.coeff(f, b1, b2) *= tpw[b1 + b2] / (fact[b1] * fact[b2]);
    return table;
}

// ---------------------------------------------------------------------------
// EvenBasis

EvenBasis::EvenBasis(std::shared_ptr<const ThetaBasis> full, double rank_tol)
    : full_(std::move(full)) {
    const int n = full_->size();
    const int d = full_->surface().d();

    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
    for (int f = 0; f < n; ++f) {
        sym(f, f) += 1.0;
        sym(f, full_->negation_partner(f)) += 1.0;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * smax) ++rank;
    if (rank != 2 * d + 2)
        fail(errc::dimension_mismatch,
             "even subspace rank " + std::to_string(rank) + ", expected " +
                 std::to_string(2 * d + 2));
    coeff_ = svd.matrixV().leftCols(rank).transpose().cast<cdouble>();
}

Eigen::VectorXcd EvenBasis::eval_sections(const Vec2c& z) const {
    return coeff_ * full_->eval_values(z);
}

void EvenBasis::eval_jet(const Vec2c& z, Jet& out) const {
    thread_local Jet fj;
    full_->eval_jet(z, fj);
    out.v = coeff_ * fj.v;
    out.d1 = coeff_ * fj.d1;
    out.d2 = coeff_ * fj.d2;
}

TaylorTable EvenBasis::eval_taylor(const TwoTorsionPoint& p, int max_degree) const {
    const TaylorTable raw = full_->taylor(p, max_degree);
    TaylorTable out(size(), max_degree);
    for (int g = 0; g < size(); ++g)
        for (int b1 = 0; b1 <= max_degree; ++b1)
            for (int b2 = 0; b1 + b2 <= max_degree; ++b2) {
                cdouble acc(0.0, 0.0);
                for (int f = 0; f < full_->size(); ++f)
                    acc += coeff_(g, f) * raw.coeff(f, b1, b2);
                out.coeff(g, b1, b2) = acc;
            }
    return out;
}

EvenBasis even_basis(const PolarizedAbelianSurface& s, double tail_tol,
                     double rank_tol) {
    return EvenBasis(std::make_shared<ThetaBasis>(s, tail_tol), rank_tol);
}

} // namespace irrmap
