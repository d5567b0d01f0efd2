#pragma once

// Geometry of the purely imaginary spectrum: the line family S_k in the
// (l1,l2)-plane, per-mode eigenvalue scans, Jordan-chain detection, the
// nonresonance certificate, inverse parameter selection and the eigenvalue
// collision transversality.
//
// A mode-k eigenvalue is corresponds to an intersection of S_k with the
// dispersion curve; the scalar form of that statement is
//
//   W_k(s) = (1 + sigma_k^4) sigma_k tanh(sigma_k/beta) - gamma^2 b_k^2 = 0,
//   sigma_k^2 = s^2 + 2 k nu0 s cos(theta1-theta2) + k^2 nu0^2,
//   b_k = k nu0 sin(theta1) + s sin(theta2).

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hydrobif/dispersion.hpp"
#include "hydrobif/numerics.hpp"

namespace hydrobif {

struct WaveGeometry {
    double theta1 = 0.0;  // angle of the z-periodic direction, in [0, pi)
    double theta2 = 0.0;  // angle of the x-periodic direction, in [0, pi)
    double nu0 = 1.0;     // transverse wavenumber, > 0

    void validate() const {
        require_finite(theta1, "theta1");
        require_finite(theta2, "theta2");
        require_finite(nu0, "nu0");
        if (nu0 <= 0.0) throw std::invalid_argument("nu0 must be > 0");
        if (theta1 == theta2) throw std::invalid_argument("theta1 and theta2 must differ");
    }
};

inline std::pair<double, double> line_Sk(int k, double s, const WaveGeometry& g) {
    return {s * std::sin(g.theta2) + g.nu0 * k * std::sin(g.theta1),
            -s * std::cos(g.theta2) - g.nu0 * k * std::cos(g.theta1)};
}

inline double sigma_k(int k, double s, const WaveGeometry& g) {
    const double cd = std::cos(g.theta1 - g.theta2);
    const double sig2 = s * s + 2.0 * k * g.nu0 * s * cd + k * k * g.nu0 * g.nu0;
    return std::sqrt(std::max(0.0, sig2));
}

inline double b_k(int k, double s, const WaveGeometry& g) {
    return k * g.nu0 * std::sin(g.theta1) + s * std::sin(g.theta2);
}

// W_k(s); identical to dispersion_value at line_Sk(k,s).
inline double eig_scalar(int k, double s, const FluidParams& p, const WaveGeometry& g) {
    const double sig = sigma_k(k, s, g);
    const double b = b_k(k, s, g);
    const double sig2 = sig * sig;
    return (1.0 + sig2 * sig2) * sig * depth_factor(sig, p.beta) - p.gamma * p.gamma * b * b;
}

inline double eig_scalar_scale(int k, double s, const FluidParams& p, const WaveGeometry& g) {
    const double sig = sigma_k(k, s, g);
    const double b = b_k(k, s, g);
    const double sig2 = sig * sig;
    return std::abs((1.0 + sig2 * sig2) * sig) + p.gamma * p.gamma * b * b + 1.0;
}

// --- Jordan-chain detection ----------------------------------------------------

struct JordanInfo {
    enum class Mechanism { None, CurveCk, DegenerateB, DeepwaterC };
    bool chain_length_at_least_2 = false;
    Mechanism mechanism = Mechanism::None;
};

inline const char* to_string(JordanInfo::Mechanism m) {
    switch (m) {
        case JordanInfo::Mechanism::None: return "NONE";
        case JordanInfo::Mechanism::CurveCk: return "CURVE_CK";
        case JordanInfo::Mechanism::DegenerateB: return "DEGENERATE_B";
        case JordanInfo::Mechanism::DeepwaterC: return "DEEPWATER_C";
    }
    return "?";
}

constexpr double kJordanRelTol = 1e-8;

// (k,s) must already satisfy the eigenvalue equation. For beta > 0 membership
// of (beta,gamma) on the curve C_k is tested through the closed form; for
// beta = 0 the separate deep-water condition applies.
inline JordanInfo detect_jordan(int k, double s, const FluidParams& p, const WaveGeometry& g) {
    p.validate();
    g.validate();
    if (std::abs(eig_scalar(k, s, p, g)) > 1e-8 * eig_scalar_scale(k, s, p, g))
        throw PreconditionError("detect_jordan: (k,s) is not an eigenvalue");
    JordanInfo info;
    if (p.beta == 0.0) {
        const double sig = sigma_k(k, s, g);
        const double a = s + k * g.nu0 * std::cos(g.theta1 - g.theta2);
        const double b = b_k(k, s, g);
        const double sig2 = sig * sig;
        const double lhs = 2.0 * std::sin(g.theta2) - 4.0 * sig2 * a * b / (1.0 + sig2 * sig2);
        const double rhs = a * b / sig2;
        const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
        if (std::abs(lhs - rhs) <= kJordanRelTol * scale) {
            info.chain_length_at_least_2 = true;
            info.mechanism = JordanInfo::Mechanism::DeepwaterC;
        }
        return info;
    }
    const double a = s / p.beta;
    const double nu_tilde = g.nu0 / p.beta;
    if (a <= 0.0) {
        // The curve parametrisation covers a > 0; use mode/eigenvalue symmetry.
        if (s == 0.0) return info;
        return detect_jordan(-k, -s, p, g);
    }
    try {
        const auto pt = curve_Ck(a, k, g.theta1, g.theta2, nu_tilde);
        if (pt && std::abs(pt->beta_k - p.beta) <= kJordanRelTol * p.beta &&
            std::abs(pt->gamma_k - p.gamma) <= kJordanRelTol * p.gamma) {
            info.chain_length_at_least_2 = true;
            info.mechanism = JordanInfo::Mechanism::CurveCk;
        }
    } catch (const DegenerateCaseError&) {
        info.chain_length_at_least_2 = true;
        info.mechanism = JordanInfo::Mechanism::DegenerateB;
    }
    return info;
}

// --- per-mode eigenvalue scans --------------------------------------------------

struct ModeEigenvalue {
    int k = 0;
    double s = 0.0;      // eigenvalue is i*s
    double sigma = 0.0;
    double b = 0.0;      // sign recorded; the eigenvector formula assumes b > 0
    int geometric_mult = 1;
    JordanInfo jordan;
    bool near_window_edge = false;
};

constexpr int kScanPoints = 2048;

namespace detail {

// Roots of W_k on [lo,hi]. For k = 0 the factored form G(|s|) - gamma^2
// sin^2(theta2) removes the trivial double zero at s = 0.
inline std::vector<double> mode_roots(int k, const FluidParams& p, const WaveGeometry& g,
                                      double lo, double hi) {
    std::vector<double> roots;
    if (k == 0) {
        const double target = p.gamma * p.gamma * std::sin(g.theta2) * std::sin(g.theta2);
        auto f = [&](double s) { return axis_ratio(s, p.beta) - target; };
        const double pmax = std::max(std::abs(lo), std::abs(hi));
        if (pmax <= 0.0) return roots;
        for (const auto& [a, b] : scan_brackets(f, log_spaced(1e-9, pmax, kScanPoints))) {
            const double r = (a == b) ? a : bisect_root(f, a, b);
            if (r >= lo && r <= hi) roots.push_back(r);
            if (-r >= lo && -r <= hi) roots.push_back(-r);
        }
    } else {
        auto f = [&](double s) { return eig_scalar(k, s, p, g); };
        for (const auto& [a, b] : scan_brackets(f, lin_spaced(lo, hi, kScanPoints)))
            roots.push_back(a == b ? a : bisect_root(f, a, b));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace detail

// All mode-k eigenvalues with s in [s_lo, s_hi], sorted by s, each with its
// Jordan information. geometric_mult counts the modes |j| <= j_max sharing the
// eigenvalue is.
inline std::vector<ModeEigenvalue> mode_eigenvalues(int k, const FluidParams& p,
                                                    const WaveGeometry& g, double s_lo,
                                                    double s_hi, int j_max = 6) {
    p.validate();
    g.validate();
    if (!(s_lo < s_hi)) throw std::invalid_argument("mode_eigenvalues: empty window");
    std::vector<ModeEigenvalue> out;
    const double edge = (s_hi - s_lo) / kScanPoints;
    for (double s : detail::mode_roots(k, p, g, s_lo, s_hi)) {
        if (k == 0 && std::abs(s) < 1e-12) continue;  // (k,s) = (0,0) excluded
        ModeEigenvalue ev;
        ev.k = k;
        ev.s = s;
        ev.sigma = sigma_k(k, s, g);
        ev.b = b_k(k, s, g);
        ev.jordan = detect_jordan(k, s, p, g);
        ev.near_window_edge = (s - s_lo < edge) || (s_hi - s < edge);
        ev.geometric_mult = 0;
        for (int j = -j_max; j <= j_max; ++j) {
            if (j == 0 && std::abs(s) < 1e-12) continue;
            const double w = eig_scalar(j, s, p, g);
            const double dw = (eig_scalar(j, s + 1e-6, p, g) - eig_scalar(j, s - 1e-6, p, g)) / 2e-6;
            // Accept j if s is within one Newton step of a root of W_j.
            if (std::abs(w) <= 1e-9 * eig_scalar_scale(j, s, p, g) ||
                (dw != 0.0 && std::abs(w / dw) <= 1e-9 * (1.0 + std::abs(s))))
                ++ev.geometric_mult;
        }
        ev.geometric_mult = std::max(1, ev.geometric_mult);
        out.push_back(ev);
    }
    return out;
}

// --- resonant configuration and certification -----------------------------------

struct ResonanceConfig {
    FluidParams params;
    WaveGeometry geom;
    double s = 0.0;      // colliding frequency, > 0
    int K_checked = 0;   // modes certified by the last check_nonresonance run
};

struct CertEntry {
    int k = 0;
    int roots_found = 0;
    double scalar_margin = 0.0;  // min |W_k| / scale over the scan window
    double clearance = 0.0;      // geometric distance from S_k to the traced curve
};

struct CertViolation {
    int k = 0;
    double s = 0.0;
};

struct CertReport {
    bool pass = false;
    double curve_radius = 0.0;       // largest radius on C_dr
    int k_geometric_bound = 0;       // |k| > bound misses the curve by distance
    double intersection_residual = 0.0;  // worst |D| at the four (+-s, +-nu0) points
    std::vector<CertEntry> entries;
    std::vector<CertViolation> violations;
};

namespace detail {

inline double line_clearance(int k, const FluidParams& p, const WaveGeometry& g, double radius) {
    if (radius <= 0.0) return std::numeric_limits<double>::infinity();
    const auto branches = trace_curve(p, 1e-6, radius * 1.0000001, 4096);
    const double ex = std::sin(g.theta2), ey = -std::cos(g.theta2);  // direction of S_k
    const double px = k * g.nu0 * std::sin(g.theta1), py = -k * g.nu0 * std::cos(g.theta1);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& br : branches)
        for (const auto& smp : br.samples)
            for (int sx : {-1, 1})
                for (int sy : {-1, 1}) {
                    const double dx = sx * smp.l1 - px, dy = sy * smp.l2 - py;
                    best = std::min(best, std::abs(ex * dy - ey * dx));
                }
    return best;
}

}  // namespace detail

// Certifies, for the configuration built around the double eigenvalues +-is in
// modes +-1: S_0 does not meet the dispersion curve, S_{+-1} meet it exactly
// at parameter values +-s, S_k misses it for 2 <= |k| <= max(K_max, geometric
// bound), and every |k| beyond that misses it because the parallel lines S_k
// leave the bounded curve.
inline CertReport check_nonresonance(const ResonanceConfig& cfg, int K_max) {
    if (K_max < 2) throw std::invalid_argument("check_nonresonance: K_max must be >= 2");
    cfg.params.validate();
    cfg.geom.validate();
    CertReport rep;
    const FluidParams& p = cfg.params;
    const WaveGeometry& g = cfg.geom;

    rep.curve_radius = curve_max_radius(p);
    const double spacing = g.nu0 * std::abs(std::sin(g.theta1 - g.theta2));
    rep.k_geometric_bound =
        spacing > 0.0 ? static_cast<int>(std::ceil(rep.curve_radius / spacing)) : std::numeric_limits<int>::max();
    const int K_eff = std::max(K_max, std::min(rep.k_geometric_bound, 64));

    // residuals at the four stated intersection points
    for (int k : {-1, 1})
        for (double s : {-cfg.s, cfg.s}) {
            const auto [l1, l2] = line_Sk(k, s, g);
            rep.intersection_residual =
                std::max(rep.intersection_residual, std::abs(dispersion_value(l1, l2, p)));
        }

    const double reach = rep.curve_radius + 2.0 * g.nu0 * K_eff + 1.0;
    for (int k = -K_eff; k <= K_eff; ++k) {
        const auto roots = detail::mode_roots(k, p, g, -reach, reach);
        CertEntry e;
        e.k = k;
        e.roots_found = static_cast<int>(roots.size());
        double m = std::numeric_limits<double>::infinity();
        for (double s : lin_spaced(-reach, reach, 512))
            if (k != 0 || std::abs(s) > 1e-6)
                m = std::min(m, std::abs(eig_scalar(k, s, p, g)) / eig_scalar_scale(k, s, p, g));
        e.scalar_margin = m;
        e.clearance = detail::line_clearance(k, p, g, rep.curve_radius);
        rep.entries.push_back(e);

        if (k == 1 || k == -1) {
            bool ok = roots.size() == 2;
            if (ok)
                ok = std::abs(roots[0] + cfg.s) <= 1e-7 * std::max(1.0, cfg.s) &&
                     std::abs(roots[1] - cfg.s) <= 1e-7 * std::max(1.0, cfg.s);
            if (!ok)
                for (double r : roots)
                    if (std::abs(std::abs(r) - cfg.s) > 1e-7 * std::max(1.0, cfg.s))
                        rep.violations.push_back({k, r});
            if (roots.size() != 2) rep.violations.push_back({k, roots.empty() ? 0.0 : roots[0]});
        } else {
            for (double r : roots) rep.violations.push_back({k, r});
        }
    }
    rep.pass = rep.violations.empty() && rep.intersection_residual <= 1e-10;
    return rep;
}

// --- inverse parameter selection -------------------------------------------------

struct SelectedParameters {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double gamma = 0.0;
};

// R(sigma) = tanh(sigma/beta) (1+sigma^4) sigma, the radial part of the
// dispersion relation.
inline double radial_dispersion(double sigma, double beta) {
    return depth_factor(sigma, beta) * (1.0 + pow_int(sigma, 4)) * sigma;
}

// Given the periodic cell (s, nu0, dtheta = theta2 - theta1) and beta, finds
// theta1, theta2 and gamma placing the double eigenvalues +-is in modes +-1:
// solves (v.l1)^2 = R(|l1|), (v.l2)^2 = R(|l2|) for v with v.l1 > 0, v.l2 > 0
// and rotates the frame so that v = gamma * (1,0). The working frame angle is
// arbitrary; the result is invariant under it up to the mod-pi reduction.
inline std::optional<SelectedParameters> select_parameters(double beta, double s, double nu0,
                                                           double dtheta,
                                                           double frame_angle = 1.5707963267948966) {
    require_finite(beta, "beta");
    require_finite(s, "s");
    require_finite(nu0, "nu0");
    require_finite(dtheta, "dtheta");
    if (beta < 0.0 || s <= 0.0 || nu0 <= 0.0) throw std::invalid_argument("select_parameters: invalid inputs");
    const double pi = std::acos(-1.0);
    const double ph1 = frame_angle, ph2 = frame_angle + dtheta;
    const double ex[2] = {std::sin(ph1), -std::cos(ph1)};
    const double ez[2] = {std::sin(ph2), -std::cos(ph2)};
    const double L1[2] = {s * ez[0] + nu0 * ex[0], s * ez[1] + nu0 * ex[1]};
    const double L2[2] = {-s * ez[0] + nu0 * ex[0], -s * ez[1] + nu0 * ex[1]};
    const double det = L1[0] * L2[1] - L1[1] * L2[0];
    const double n1 = std::hypot(L1[0], L1[1]), n2 = std::hypot(L2[0], L2[1]);
    if (std::abs(det) <= 1e-12 * n1 * n2) return std::nullopt;  // l1 parallel to l2
    const double r1 = std::sqrt(radial_dispersion(n1, beta));
    const double r2 = std::sqrt(radial_dispersion(n2, beta));
    // v . L1 = r1, v . L2 = r2 picks the solution with b_{+-1} > 0.
    const double vx = (r1 * L2[1] - r2 * L1[1]) / det;
    const double vy = (r2 * L1[0] - r1 * L2[0]) / det;
    const double gamma = std::hypot(vx, vy);
    if (!(gamma > 0.0)) return std::nullopt;
    const double delta = -std::atan2(vy, vx);
    auto mod_pi = [&](double th) {
        th = std::fmod(th, pi);
        if (th < 0.0) th += pi;
        return th;
    };
    SelectedParameters out;
    out.theta1 = mod_pi(ph1 + delta);
    out.theta2 = mod_pi(ph2 + delta);
    out.gamma = gamma;
    return out;
}

// --- eigenvalue branches under detuning -------------------------------------------

// g(t, nu, k) for k = +-1: the mode-k eigenvalue scalar with nu0 replaced by nu.
inline double branch_scalar(double t, double nu, int k, const FluidParams& p,
                            const WaveGeometry& g) {
    WaveGeometry gg = g;
    gg.nu0 = nu;
    return eig_scalar(k, t, p, gg);
}

namespace detail {

struct BranchPartials {
    double g_t, g_nu;
};

inline BranchPartials branch_partials(double t, double nu, int k, const FluidParams& p,
                                      const WaveGeometry& g) {
    const double cd = std::cos(g.theta1 - g.theta2);
    const double sig2 = t * t + 2.0 * k * nu * t * cd + k * k * nu * nu;
    const double sig = std::sqrt(sig2);
    const double b = k * nu * std::sin(g.theta1) + t * std::sin(g.theta2);
    const double T = depth_factor(sig, p.beta);
    // d/dsigma [ (1+sigma^4) sigma T(sigma) ]
    double dradial = (5.0 * sig2 * sig2 + 1.0) * T;
    if (p.beta > 0.0) dradial += (1.0 + sig2 * sig2) * sig * (1.0 - T * T) / p.beta;
    const double dsig_dt = (t + k * nu * cd) / sig;
    const double dsig_dnu = (k * k * nu + k * t * cd) / sig;
    const double g2 = p.gamma * p.gamma;
    return {dradial * dsig_dt - 2.0 * g2 * b * std::sin(g.theta2),
            dradial * dsig_dnu - 2.0 * g2 * b * k * std::sin(g.theta1)};
}

}  // namespace detail

// Continuation of the two mode +-1 eigenvalue branches s_{+-1}^{mu1} from the
// collision at mu1 = 0, by Newton in t on g(t, nu0 + mu1, +-1) = 0.
inline std::pair<double, double> eigenvalue_branches(double mu1, const ResonanceConfig& cfg) {
    const double nu = cfg.geom.nu0 + mu1;
    double out[2];
    for (int idx : {0, 1}) {
        const int k = idx == 0 ? 1 : -1;
        double t = cfg.s;
        bool done = false;
        for (int it = 0; it < 50; ++it) {
            const double f = branch_scalar(t, nu, k, cfg.params, cfg.geom);
            const auto pd = detail::branch_partials(t, nu, k, cfg.params, cfg.geom);
            if (pd.g_t == 0.0) break;
            const double step = f / pd.g_t;
            t -= step;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(t))) {
                done = true;
                break;
            }
        }
        const double res = branch_scalar(t, nu, k, cfg.params, cfg.geom);
        if (!done && std::abs(res) > 1e-10 * eig_scalar_scale(k, t, cfg.params, cfg.geom))
            throw SolverError("eigenvalue_branches: Newton lost the branch");
        out[idx] = t;
    }
    return {out[0], out[1]};
}

// d/dmu1 (s_1 - s_{-1}) at mu1 = 0; zero exactly when the two solution curves
// of g(t,nu,+-1) = 0 are tangent at (s, nu0).
inline double transversality(const ResonanceConfig& cfg) {
    const auto pp = detail::branch_partials(cfg.s, cfg.geom.nu0, 1, cfg.params, cfg.geom);
    const auto pm = detail::branch_partials(cfg.s, cfg.geom.nu0, -1, cfg.params, cfg.geom);
    const double scale = std::abs(pp.g_t) + std::abs(pm.g_t) + std::abs(pp.g_nu) + std::abs(pm.g_nu);
    if (std::abs(pp.g_t) <= 1e-12 * scale || std::abs(pm.g_t) <= 1e-12 * scale)
        throw DegenerateCaseError("transversality: g_t vanishes (tangency with the S direction)");
    return (pp.g_t * pm.g_nu - pm.g_t * pp.g_nu) / (pp.g_t * pm.g_t);
}

// Convenience builder: select parameters, assemble the configuration and
// certify it.
inline std::optional<std::pair<ResonanceConfig, CertReport>> build_certified_config(
    double beta, double s, double nu0, double dtheta, int K_max = 8) {
    const auto sel = select_parameters(beta, s, nu0, dtheta);
    if (!sel) return std::nullopt;
    ResonanceConfig cfg;
    cfg.params = {beta, sel->gamma};
    cfg.geom = {sel->theta1, sel->theta2, nu0};
    cfg.s = s;
    const auto rep = check_nonresonance(cfg, K_max);
    cfg.K_checked = K_max;
    return std::make_pair(cfg, rep);
}

}  // namespace hydrobif
