#pragma once

// Closed-form eigenvectors and generalized eigenvectors of the spatial-
// dynamics operator L in mode-k form, the mode-0 Jordan chain, application of
// the explicit operator on a collocation grid in y, and the symplectic
// pairing used for normalisation.
//
// A mode-k field is (eta, rho, Gamma, zeta, xi, Psi) e^{ikz} with scalar
// eta, rho, zeta, xi and y-profiles Gamma, Psi on (-1/beta, 0). Profiles are
// stored as closed-form records  sum_j c_j y^{m_j} e^{lambda_j y}  so that
// derivatives are exact; a sampled representation with spectral
// differentiation exists as a fallback.

#include <cmath>
#include <complex>
#include <vector>

#include "hydrobif/numerics.hpp"
#include "hydrobif/resonance.hpp"

namespace hydrobif {

using cplx = std::complex<double>;

struct ModeQuantities {
    double sigma = 0.0;  // sqrt(s^2 + 2 k nu0 s cos(theta1-theta2) + k^2 nu0^2)
    double a = 0.0;      // s + k nu0 cos(theta1-theta2)
    double b = 0.0;      // k nu0 sin(theta1) + s sin(theta2)
    double t = 0.0;      // tanh(sigma/beta), 1 at beta = 0
    double c = 0.0;      // 2 (sigma/beta) cosech(2 sigma/beta), 0 at beta = 0
};

inline ModeQuantities mode_quantities(int k, double s, const FluidParams& p,
                                      const WaveGeometry& g) {
    ModeQuantities q;
    q.sigma = sigma_k(k, s, g);
    if (q.sigma <= 0.0) throw DegenerateCaseError("mode_quantities: sigma vanishes");
    q.a = s + k * g.nu0 * std::cos(g.theta1 - g.theta2);
    q.b = b_k(k, s, g);
    if (p.beta == 0.0) {
        q.t = 1.0;
        q.c = 0.0;
    } else {
        const double x = q.sigma / p.beta;
        q.t = std::tanh(x);
        q.c = 2.0 * x / std::sinh(2.0 * x);  // underflows cleanly to 0 for large x
    }
    return q;
}

// --- profiles -------------------------------------------------------------------

struct ProfileTerm {
    cplx coeff;
    int ypow = 0;     // 0, 1 or 2
    double rate = 0;  // exponent lambda in e^{lambda y}
};

struct Profile {
    std::vector<ProfileTerm> terms;

    cplx eval(double y) const {
        cplx v = 0.0;
        for (const auto& t : terms) v += t.coeff * pow_int(y, t.ypow) * std::exp(t.rate * y);
        return v;
    }
    Profile deriv() const {
        Profile d;
        for (const auto& t : terms) {
            if (t.rate != 0.0) d.terms.push_back({t.coeff * t.rate, t.ypow, t.rate});
            if (t.ypow > 0) d.terms.push_back({t.coeff * double(t.ypow), t.ypow - 1, t.rate});
        }
        return d;
    }
    Profile scaled(cplx f) const {
        Profile s = *this;
        for (auto& t : s.terms) t.coeff *= f;
        return s;
    }
    Profile plus(const Profile& o, cplx f = 1.0) const {
        Profile s = *this;
        for (auto t : o.terms) {
            t.coeff *= f;
            s.terms.push_back(t);
        }
        return s;
    }
    bool empty() const { return terms.empty(); }
};

inline Profile exp_profile(cplx coeff, double rate, int ypow = 0) {
    if (coeff == cplx(0.0)) return {};
    return Profile{{{coeff, ypow, rate}}};
}

// Exact integral over (-1/beta, 0), or (-inf, 0) for beta = 0, of a profile.
// Terms are y^m e^{lambda y} with m <= 2; at beta = 0 only lambda > 0 occurs.
inline cplx integrate_profile(const Profile& f, double beta) {
    auto anti = [](const ProfileTerm& t) {
        // antiderivative of y^m e^{l y}; returns evaluator
        return [t](double y) -> cplx {
            const double l = t.rate;
            if (l == 0.0) return t.coeff * pow_int(y, t.ypow + 1) / double(t.ypow + 1);
            const double e = std::exp(l * y);
            switch (t.ypow) {
                case 0: return t.coeff * e / l;
                case 1: return t.coeff * e * (y / l - 1.0 / (l * l));
                default: return t.coeff * e * (y * y / l - 2.0 * y / (l * l) + 2.0 / (l * l * l));
            }
        };
    };
    cplx total = 0.0;
    for (const auto& t : f.terms) {
        auto F = anti(t);
        if (beta == 0.0) {
            if (t.rate <= 0.0) throw std::invalid_argument("integrate_profile: divergent at beta = 0");
            total += F(0.0);  // F(-inf) = 0 for decaying terms
        } else {
            total += F(0.0) - F(-1.0 / beta);
        }
    }
    return total;
}

// --- y-grid ---------------------------------------------------------------------

struct YGrid {
    double beta = 1.0;
    std::vector<double> y;
    std::vector<double> w;       // quadrature weights (beta > 0 only)
    std::vector<double> diff;    // spectral differentiation matrix, row-major

    static YGrid make(double beta, int n = 64) {
        YGrid g;
        g.beta = beta;
        if (beta > 0.0) {
            auto cg = ChebGrid::make(-1.0 / beta, 0.0, n - 1);
            g.y = cg.x;
            g.w = cg.w;
            g.diff = cheb_diff_matrix(-1.0 / beta, 0.0, n - 1);
        } else {
            // exponential map y = log(u): Chebyshev nodes in u on (0,1],
            // dropping the u = 0 endpoint.
            const double pi = std::acos(-1.0);
            g.y.resize(n);
            for (int j = 0; j < n; ++j) {
                const double u = 0.5 * (1.0 + std::cos(j * pi / n));
                g.y[j] = std::log(u);
            }
        }
        return g;
    }
};

// --- mode-k fields -------------------------------------------------------------

struct EigenFunction {
    int k = 0;
    cplx eta = 0.0, rho = 0.0, zeta = 0.0, xi = 0.0;
    Profile Gamma, Psi;

    // sampled fallback (used only when closed-form records are absent)
    bool sampled_only = false;
    std::vector<cplx> Gamma_s, Psi_s;
};

inline EigenFunction conjugated(const EigenFunction& f) {
    EigenFunction g;
    g.k = -f.k;
    g.eta = std::conj(f.eta);
    g.rho = std::conj(f.rho);
    g.zeta = std::conj(f.zeta);
    g.xi = std::conj(f.xi);
    for (auto t : f.Gamma.terms) g.Gamma.terms.push_back({std::conj(t.coeff), t.ypow, t.rate});
    for (auto t : f.Psi.terms) g.Psi.terms.push_back({std::conj(t.coeff), t.ypow, t.rate});
    return g;
}

// Reverser: (eta, rho, Gamma, zeta, xi, Psi)(z) -> (eta, -rho, -Gamma, -zeta, xi, Psi)(-z).
inline EigenFunction reversed(const EigenFunction& f) {
    EigenFunction g = f;
    g.k = -f.k;
    g.rho = -f.rho;
    g.zeta = -f.zeta;
    g.Gamma = f.Gamma.scaled(-1.0);
    return g;
}

inline EigenFunction scaled(const EigenFunction& f, cplx c) {
    EigenFunction g = f;
    g.eta *= c;
    g.rho *= c;
    g.zeta *= c;
    g.xi *= c;
    g.Gamma = f.Gamma.scaled(c);
    g.Psi = f.Psi.scaled(c);
    for (auto& v : g.Gamma_s) v *= c;
    for (auto& v : g.Psi_s) v *= c;
    return g;
}

inline EigenFunction axpy(const EigenFunction& f, const EigenFunction& g, cplx c) {
    EigenFunction r = f;
    r.eta += c * g.eta;
    r.rho += c * g.rho;
    r.zeta += c * g.zeta;
    r.xi += c * g.xi;
    r.Gamma = f.Gamma.plus(g.Gamma, c);
    r.Psi = f.Psi.plus(g.Psi, c);
    return r;
}

inline double sup_norm(const EigenFunction& f, const YGrid& grid) {
    double m = std::max({std::abs(f.eta), std::abs(f.rho), std::abs(f.zeta), std::abs(f.xi)});
    if (f.sampled_only) {
        for (const auto& v : f.Gamma_s) m = std::max(m, std::abs(v));
        for (const auto& v : f.Psi_s) m = std::max(m, std::abs(v));
    } else {
        for (double y : grid.y) m = std::max({m, std::abs(f.Gamma.eval(y)), std::abs(f.Psi.eval(y))});
    }
    return m;
}

// --- closed forms ---------------------------------------------------------------

constexpr double kEigenvalueRelTol = 1e-8;

inline void require_eigenvalue(int k, double s, const FluidParams& p, const WaveGeometry& g) {
    if (std::abs(eig_scalar(k, s, p, g)) > kEigenvalueRelTol * eig_scalar_scale(k, s, p, g))
        throw PreconditionError("(k,s) does not satisfy the eigenvalue equation");
}

inline EigenFunction eigenvector(int k, double s, const FluidParams& p, const WaveGeometry& g) {
    require_eigenvalue(k, s, p, g);
    const auto q = mode_quantities(k, s, p, g);
    const double a2k = s + 2.0 * k * g.nu0 * std::cos(g.theta1 - g.theta2);
    const double d = 1.0 + pow_int(q.sigma, 4);
    EigenFunction v;
    v.k = k;
    v.eta = cplx(0.0, p.gamma * q.b / d);
    v.rho = -s * p.gamma * q.b / d;
    v.Gamma = exp_profile(0.5 * (1.0 - q.t), -q.sigma).plus(exp_profile(0.5 * (1.0 + q.t), q.sigma));
    v.zeta = p.gamma * std::sin(g.theta2) - p.gamma * q.sigma * q.sigma * a2k * q.b / d;
    v.xi = cplx(0.0, -p.gamma * q.sigma * q.sigma * q.b / d);
    v.Psi = exp_profile(cplx(0.0, 0.5 * q.a) * (1.0 - q.t), -q.sigma)
                .plus(exp_profile(cplx(0.0, 0.5 * q.a) * (1.0 + q.t), q.sigma));
    return v;
}

// Generalized eigenvector for a Jordan chain of length >= 2; valid on the
// C_k locus (beta > 0) and under the deep-water condition (beta = 0).
inline EigenFunction generalized_eigenvector(int k, double s, const FluidParams& p,
                                             const WaveGeometry& g) {
    const auto info = detect_jordan(k, s, p, g);
    if (!info.chain_length_at_least_2)
        throw PreconditionError("generalized_eigenvector: no Jordan chain at (k,s)");
    if (info.mechanism == JordanInfo::Mechanism::DegenerateB)
        throw PreconditionError("generalized_eigenvector: degenerate theta2 = 0 mechanism unsupported");
    const auto q = mode_quantities(k, s, p, g);
    const double a2k = s + 2.0 * k * g.nu0 * std::cos(g.theta1 - g.theta2);
    const double sig = q.sigma, sig2 = sig * sig;
    const double d = 1.0 + sig2 * sig2;
    const double K1 = 2.0 * sig2 / (d * d) + q.c / (2.0 * sig2 * d);
    const double K2 = 2.0 * sig2 * sig2 / (d * d) + (q.c - 2.0) / (2.0 * d);
    const double gam = p.gamma, st2 = std::sin(g.theta2);

    EigenFunction w;
    w.k = k;
    w.eta = gam * st2 / d - 2.0 * gam * q.a * q.b * K1;
    w.rho = cplx(0.0, gam * q.b / d + s * gam * st2 / d - 2.0 * gam * s * q.a * q.b * K1);
    w.Gamma = exp_profile(cplx(0.0, q.a / (2.0 * sig)) * (1.0 - q.t), -sig, 1)
                  .plus(exp_profile(cplx(0.0, -q.a / (2.0 * sig)) * (1.0 + q.t), sig, 1))
                  .plus(exp_profile(cplx(0.0, q.c * q.a / (2.0 * sig2)), -sig))
                  .plus(exp_profile(cplx(0.0, q.c * q.a / (2.0 * sig2)), sig));
    w.zeta = cplx(0.0, (q.c * q.a / sig2 + sig2 * a2k / d) * gam * st2 + gam * sig2 * q.b / d -
                           2.0 * gam * q.a * a2k * q.b * K2);
    w.xi = -sig2 / d * gam * st2 + 2.0 * gam * q.a * q.b * K2;
    w.Psi = exp_profile(0.5 * (1.0 - q.t) - q.c * q.a * q.a / (2.0 * sig2), -sig)
                .plus(exp_profile(-(1.0 - q.t) * q.a * q.a / (2.0 * sig), -sig, 1))
                .plus(exp_profile(0.5 * (1.0 + q.t) - q.c * q.a * q.a / (2.0 * sig2), sig))
                .plus(exp_profile((1.0 + q.t) * q.a * q.a / (2.0 * sig), sig, 1));
    return w;
}

// Mode-0 Jordan chain at the origin: (f1, f2) always for beta > 0, extended by
// (f3, f4) exactly on the set gamma^{-2} = beta sin^2(theta2).
inline std::vector<EigenFunction> mode0_chain(const FluidParams& p, const WaveGeometry& g) {
    p.validate();
    g.validate();
    if (p.beta == 0.0)
        throw DegenerateCaseError("mode0_chain: essential spectrum at the origin for beta = 0");
    const double gs = p.gamma * std::sin(g.theta2);
    std::vector<EigenFunction> chain(2);
    chain[0].Gamma = exp_profile(1.0, 0.0);
    chain[0].zeta = gs;
    chain[1].eta = gs;
    chain[1].Psi = exp_profile(1.0, 0.0);
    const double lhs = 1.0 / (p.gamma * p.gamma);
    const double rhs = p.beta * std::sin(g.theta2) * std::sin(g.theta2);
    if (std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs))) {
        // quadratic profile -y^2/2 - y/beta
        Profile quad{{{-0.5, 2, 0.0}, {-1.0 / p.beta, 1, 0.0}}};
        EigenFunction f3, f4;
        f3.rho = gs;
        f3.Gamma = quad;
        f4.xi = gs;
        f4.Psi = quad;
        chain.push_back(f3);
        chain.push_back(f4);
    }
    return chain;
}

// --- the operator --------------------------------------------------------------

// Applies the explicit mode-k form of L. Closed-form profile records are
// differentiated analytically; a sampled-only field falls back to spectral
// differentiation on the grid (profiles then carry no records and the result
// is sampled as well).
inline EigenFunction apply_L_mode(int k, const EigenFunction& f, const FluidParams& p,
                                  const WaveGeometry& g, const YGrid* grid = nullptr) {
    p.validate();
    g.validate();
    const double cd = std::cos(g.theta1 - g.theta2);
    const double sd = std::sin(g.theta1 - g.theta2);
    const double nu = g.nu0;
    const cplx ik(0.0, double(k));

    EigenFunction r;
    r.k = k;
    if (!f.sampled_only) {
        const Profile dG = f.Gamma.deriv();
        const Profile ddG = dG.deriv();
        const cplx G0 = f.Gamma.eval(0.0);
        r.eta = f.rho;
        r.rho = f.xi + nu * nu * double(k) * double(k) * f.eta - 2.0 * nu * cd * ik * f.rho;
        r.Gamma = f.Psi.plus(f.Gamma, -nu * cd * ik);
        r.zeta = -nu * nu * double(k) * double(k) * f.xi + f.eta - p.gamma * nu * std::sin(g.theta1) * ik * G0;
        r.xi = -f.zeta + p.gamma * std::sin(g.theta2) * G0 - 2.0 * nu * cd * ik * f.xi;
        r.Psi = ddG.scaled(-1.0)
                    .plus(f.Gamma, nu * nu * sd * sd * double(k) * double(k))
                    .plus(f.Psi, -nu * cd * ik);
        return r;
    }
    if (!grid || grid->diff.empty())
        throw std::invalid_argument("apply_L_mode: sampled field needs a grid with a differentiation matrix");
    // accuracy warning path: spectral differentiation of sampled profiles
    const int n = static_cast<int>(grid->y.size());
    auto matvec = [&](const std::vector<cplx>& v) {
        std::vector<cplx> out(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[i] += grid->diff[i * n + j] * v[j];
        return out;
    };
    const auto dG = matvec(f.Gamma_s);
    const auto ddG = matvec(dG);
    const cplx G0 = f.Gamma_s.front();  // grid descends from y = 0
    r.sampled_only = true;
    r.eta = f.rho;
    r.rho = f.xi + nu * nu * double(k) * double(k) * f.eta - 2.0 * nu * cd * ik * f.rho;
    r.zeta = -nu * nu * double(k) * double(k) * f.xi + f.eta - p.gamma * nu * std::sin(g.theta1) * ik * G0;
    r.xi = -f.zeta + p.gamma * std::sin(g.theta2) * G0 - 2.0 * nu * cd * ik * f.xi;
    r.Gamma_s.resize(n);
    r.Psi_s.resize(n);
    for (int i = 0; i < n; ++i) {
        r.Gamma_s[i] = f.Psi_s[i] - nu * cd * ik * f.Gamma_s[i];
        r.Psi_s[i] = -ddG[i] + nu * nu * sd * sd * double(k) * double(k) * f.Gamma_s[i] -
                     nu * cd * ik * f.Psi_s[i];
    }
    return r;
}

// Residual of the boundary conditions defining the domain of L.
inline double bc_residual(const EigenFunction& f, const FluidParams& p, const WaveGeometry& g) {
    const Profile dG = f.Gamma.deriv();
    double r = 0.0;
    if (p.beta > 0.0) r = std::abs(dG.eval(-1.0 / p.beta));
    const cplx ik(0.0, double(f.k));
    r = std::max(r, std::abs(dG.eval(0.0) + p.gamma * (f.rho * std::sin(g.theta2) +
                                                       g.nu0 * ik * f.eta * std::sin(g.theta1))));
    return r;
}

inline double eigenpair_residual(int k, double s, const EigenFunction& v, const FluidParams& p,
                                 const WaveGeometry& g, const YGrid& grid) {
    const auto Lv = apply_L_mode(k, v, p, g, &grid);
    const auto res = axpy(Lv, v, cplx(0.0, -s));
    const double nv = sup_norm(v, grid);
    return sup_norm(res, grid) / (nv > 0.0 ? nv : 1.0);
}

inline double jordan_residual(int k, double s, const EigenFunction& w, const EigenFunction& v,
                              const FluidParams& p, const WaveGeometry& g, const YGrid& grid) {
    const auto Lw = apply_L_mode(k, w, p, g, &grid);
    const auto res = axpy(axpy(Lw, w, cplx(0.0, -s)), v, -1.0);
    const double nw = sup_norm(w, grid);
    return sup_norm(res, grid) / (nw > 0.0 ? nw : 1.0);
}

// --- symplectic pairing ----------------------------------------------------------

// Omega(f,g) for mode-k fields, extended bilinearly; nonzero only when the
// modes sum to zero. The y-integral of the profile products is exact (the
// records are polynomials times exponentials).
inline cplx symplectic_pair(const EigenFunction& f, const EigenFunction& g, const FluidParams& p) {
    if (f.k + g.k != 0) return 0.0;
    cplx v = g.zeta * f.eta - g.eta * f.zeta + g.xi * f.rho - g.rho * f.xi;
    Profile prod;
    for (const auto& a : g.Psi.terms)
        for (const auto& b : f.Gamma.terms)
            prod.terms.push_back({a.coeff * b.coeff, a.ypow + b.ypow, a.rate + b.rate});
    for (const auto& a : g.Gamma.terms)
        for (const auto& b : f.Psi.terms)
            prod.terms.push_back({-a.coeff * b.coeff, a.ypow + b.ypow, a.rate + b.rate});
    return v + integrate_profile(prod, p.beta);
}

// Scales f2 so that Omega(f1, f2) = 1.
inline void normalize_chain_pair(EigenFunction& f1, EigenFunction& f2, const FluidParams& p) {
    const cplx om = symplectic_pair(f1, f2, p);
    if (std::abs(om) < 1e-13) throw DegenerateCaseError("normalize_chain_pair: Omega(f1,f2) = 0");
    f2 = scaled(f2, 1.0 / om);
}

// Scales the eigenvector so that Omega(e, conj e) = +-i and reports the sign.
inline int normalize_eigenvector(EigenFunction& e, const FluidParams& p) {
    const cplx om = symplectic_pair(e, conjugated(e), p);
    const double im = om.imag();
    if (std::abs(im) < 1e-13) throw DegenerateCaseError("normalize_eigenvector: Im Omega(e, conj e) = 0");
    e = scaled(e, 1.0 / std::sqrt(std::abs(im)));
    return im > 0.0 ? 1 : -1;
}

}  // namespace hydrobif
