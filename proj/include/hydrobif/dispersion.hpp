#pragma once

// Hydroelastic dispersion relation
//
//   D(l1,l2) = (1 + r^4) r tanh(r/beta) - gamma^2 l1^2,   r = sqrt(l1^2+l2^2),
//
// its zero set C_dr traced in the positive quadrant, and the classification of
// the (beta,gamma) parameter plane by the delimiting curves D1 (first
// appearance of C_dr, a double root of D(.,0) on the l1 axis) and D2
// (gamma = beta^{-1/2}, double zero root). beta = 0 is the infinite-depth
// branch with the tanh factor identically one.

#include <cmath>
#include <optional>
#include <vector>

#include "hydrobif/numerics.hpp"

namespace hydrobif {

struct FluidParams {
    double beta = 0.0;   // dimensionless depth parameter, >= 0 (0 = infinite depth)
    double gamma = 1.0;  // dimensionless wave speed, > 0

    void validate() const {
        require_finite(beta, "beta");
        require_finite(gamma, "gamma");
        if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
        if (gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");
    }
};

inline double depth_factor(double r, double beta) {
    return beta == 0.0 ? 1.0 : std::tanh(r / beta);
}

inline double dispersion_value(double l1, double l2, const FluidParams& p) {
    require_finite(l1, "l1");
    require_finite(l2, "l2");
    p.validate();
    const double r2 = l1 * l1 + l2 * l2;
    const double r = std::sqrt(r2);
    return (1.0 + r2 * r2) * r * depth_factor(r, p.beta) - p.gamma * p.gamma * l1 * l1;
}

// G(x) = (1+x^4) tanh(x/beta) / x for x > 0; axis roots of D(.,0) solve
// G(x) = gamma^2 and C_dr contains radius a iff G(a) <= gamma^2.
inline double axis_ratio(double x, double beta) {
    return (1.0 + x * x * x * x) * depth_factor(x, beta) / x;
}

namespace detail {

inline double axis_ratio_min_arg(double beta, double a_max = 50.0) {
    const auto grid = log_spaced(1e-6, a_max, 512);
    std::size_t best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = axis_ratio(grid[i], beta);
        if (f < fbest) {
            fbest = f;
            best = i;
        }
    }
    const double lo = grid[best > 0 ? best - 1 : 0];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    return golden_min([&](double x) { return axis_ratio(x, beta); }, lo, hi);
}

}  // namespace detail

// Ordinate of the curve D1 at the given beta: the gamma at which C_dr first
// appears (tangentially, on the l1 axis).
inline double d1_gamma(double beta) {
    const double xmin = detail::axis_ratio_min_arg(beta);
    return std::sqrt(axis_ratio(xmin, beta));
}

inline std::vector<double> axis_roots(const FluidParams& p, double a_max = 50.0) {
    const double g2 = p.gamma * p.gamma;
    auto f = [&](double x) { return axis_ratio(x, p.beta) - g2; };
    std::vector<double> roots;
    for (const auto& [lo, hi] : scan_brackets(f, log_spaced(1e-6, a_max, 512)))
        roots.push_back(lo == hi ? lo : bisect_root(f, lo, hi));
    return roots;
}

// --- curve tracing -----------------------------------------------------------

struct CurvePoint {
    double a;   // radius parameter
    double l1;  // positive-quadrant representative
    double l2;
};

struct CurveTrace {
    std::vector<CurvePoint> samples;
    int branch_id = 0;
};

// Positive-quadrant branches of C_dr sampled at n uniformly spaced radii in
// [a_min, a_max]. Radii with l2^2 < 0 do not lie on the curve; contiguous
// valid runs become separate branches. An empty result is a valid outcome.
inline std::vector<CurveTrace> trace_curve(const FluidParams& p, double a_min, double a_max, int n) {
    p.validate();
    if (!(0.0 < a_min && a_min < a_max)) throw std::invalid_argument("trace_curve: need 0 < a_min < a_max");
    if (n < 2) throw std::invalid_argument("trace_curve: need n >= 2");
    const double g2 = p.gamma * p.gamma;
    std::vector<CurveTrace> branches;
    CurveTrace cur;
    int next_id = 0;
    auto flush = [&]() {
        if (!cur.samples.empty()) {
            cur.branch_id = next_id++;
            branches.push_back(std::move(cur));
            cur = CurveTrace{};
        }
    };
    for (int i = 0; i < n; ++i) {
        const double a = a_min + (a_max - a_min) * i / (n - 1);
        const double l1sq = (1.0 + a * a * a * a) * a * depth_factor(a, p.beta) / g2;
        const double l2sq = a * a - l1sq;
        if (l2sq < 0.0) {
            flush();
            continue;
        }
        cur.samples.push_back({a, std::sqrt(l1sq), std::sqrt(std::max(0.0, l2sq))});
    }
    flush();
    return branches;
}

// Largest radius on C_dr (0 when the curve is empty).
inline double curve_max_radius(const FluidParams& p, double a_max = 50.0) {
    const double g2 = p.gamma * p.gamma;
    auto f = [&](double x) { return axis_ratio(x, p.beta) - g2; };
    const auto roots = axis_roots(p, a_max);
    if (roots.empty()) return 0.0;
    return roots.back();
}

// --- parameter-plane classification ------------------------------------------

enum class Region {
    EmptyBelowD1,
    BetweenNonconvex,
    BetweenConvex,
    AboveD2,
    OnD1,
    OnD2,
};

inline const char* to_string(Region r) {
    switch (r) {
        case Region::EmptyBelowD1: return "EMPTY_BELOW_D1";
        case Region::BetweenNonconvex: return "BETWEEN_NONCONVEX";
        case Region::BetweenConvex: return "BETWEEN_CONVEX";
        case Region::AboveD2: return "ABOVE_D2";
        case Region::OnD1: return "ON_D1";
        case Region::OnD2: return "ON_D2";
    }
    return "?";
}

struct RegionClass {
    Region region = Region::EmptyBelowD1;
    std::vector<double> axis_roots;
    std::optional<double> origin_angle;
};

namespace detail {

// Inflection count of the positive-quadrant branch via sign changes of the
// parametric curvature numerator x'y'' - y'x'' (centred differences in a).
inline int inflection_count(const FluidParams& p) {
    const auto roots = axis_roots(p);
    if (roots.empty()) return 0;
    const double a_lo = roots.size() >= 2 ? roots[roots.size() - 2] : 1e-5;
    const double a_hi = roots.back();
    if (a_hi - a_lo < 1e-8) return 0;
    const auto branches = trace_curve(p, a_lo + 1e-9 * (a_hi - a_lo), a_hi - 1e-9 * (a_hi - a_lo), 2001);
    int count = 0;
    for (const auto& br : branches) {
        const auto& s = br.samples;
        if (s.size() < 5) continue;
        std::vector<double> f(s.size(), 0.0);
        double scale = 0.0;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            const double x1 = (s[i + 1].l1 - s[i - 1].l1) / 2.0;
            const double y1 = (s[i + 1].l2 - s[i - 1].l2) / 2.0;
            const double x2 = s[i + 1].l1 - 2.0 * s[i].l1 + s[i - 1].l1;
            const double y2 = s[i + 1].l2 - 2.0 * s[i].l2 + s[i - 1].l2;
            f[i] = x1 * y2 - y1 * x2;
            scale = std::max(scale, std::abs(f[i]));
        }
        if (scale == 0.0) continue;
        int prev = 0;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (std::abs(f[i]) < 1e-6 * scale) continue;  // hysteresis against noise
            const int sgn = f[i] > 0.0 ? 1 : -1;
            if (prev != 0 && sgn != prev) ++count;
            prev = sgn;
        }
    }
    return count;
}

}  // namespace detail

constexpr double kBoundaryRelTol = 1e-9;  // ON_D1 / ON_D2 membership

inline RegionClass classify_region(const FluidParams& p) {
    p.validate();
    RegionClass rc;
    rc.axis_roots = axis_roots(p);

    const double gd1 = d1_gamma(p.beta);
    const double gd2 = p.beta > 0.0 ? 1.0 / std::sqrt(p.beta) : std::numeric_limits<double>::infinity();

    if (std::abs(p.gamma - gd1) <= kBoundaryRelTol * std::max(1.0, gd1)) {
        rc.region = Region::OnD1;
        return rc;
    }
    if (p.beta > 0.0 && std::abs(p.gamma - gd2) <= kBoundaryRelTol * std::max(1.0, gd2)) {
        rc.region = Region::OnD2;
        return rc;
    }
    if (p.gamma < gd1) {
        rc.region = Region::EmptyBelowD1;
        rc.axis_roots.clear();
        return rc;
    }
    if (p.gamma > gd2) {
        rc.region = Region::AboveD2;
        rc.origin_angle = std::atan(std::sqrt(p.gamma * p.gamma * p.beta - 1.0));
        return rc;
    }
    rc.region = detail::inflection_count(p) >= 2 ? Region::BetweenNonconvex : Region::BetweenConvex;
    return rc;
}

// --- tangency curves C_k ------------------------------------------------------

struct CurveCkPoint {
    double beta_k;
    double gamma_k;
};

// Point of the curve C_k at scaled eigenvalue parameter a (s = a beta,
// nu0 = nu_tilde beta). Returns nullopt when beta_k^4 <= 0 or gamma_k^2 <= 0;
// throws DegenerateCaseError when the denominator vanishes (theta2 = 0 case).
inline std::optional<CurveCkPoint> curve_Ck(double a, int k, double theta1, double theta2,
                                            double nu_tilde) {
    if (!(a > 0.0)) throw std::invalid_argument("curve_Ck: a must be > 0");
    const double cd = std::cos(theta1 - theta2);
    const double sig2 = a * a + 2.0 * k * nu_tilde * a * cd + k * k * nu_tilde * nu_tilde;
    if (sig2 <= 0.0) throw DegenerateCaseError("curve_Ck: sigma vanishes");
    const double sig = std::sqrt(sig2);
    const double at = a + k * nu_tilde * cd;
    const double bt = a * std::sin(theta2) + k * nu_tilde * std::sin(theta1);
    const double ct = 2.0 * sig / std::sinh(2.0 * sig);
    const double den = (5.0 + ct) * at * bt - 2.0 * std::sin(theta2) * sig2;
    const double scale = std::abs((5.0 + ct) * at * bt) + std::abs(2.0 * std::sin(theta2) * sig2);
    if (std::abs(den) <= 1e-12 * std::max(1.0, scale))
        throw DegenerateCaseError("curve_Ck: vanishing denominator (degenerate tangency)");
    const double b4 = (2.0 * std::sin(theta2) * sig2 - (1.0 + ct) * at * bt) / (den * sig2 * sig2);
    if (b4 <= 0.0) return std::nullopt;
    const double bk = std::pow(b4, 0.25);
    if (bt == 0.0) return std::nullopt;
    const double g2 = (1.0 + b4 * sig2 * sig2) * sig * std::tanh(sig) / (bk * bt * bt);
    if (g2 <= 0.0) return std::nullopt;
    return CurveCkPoint{bk, std::sqrt(g2)};
}

// --- mode-0 eigenvalue diagram ------------------------------------------------

struct Mode0Diagram {
    int nonzero_pairs = 0;
    int zero_chain_length = 0;  // 2 or 4 for beta > 0, 0 for beta = 0
    bool essential_origin = false;
};

// Nonzero mode-0 eigenvalues +-is solve (1+s^4) s tanh(s/beta) = gamma^2
// sin^2(theta2) s^2; the zero eigenvalue has chain length 4 exactly on the
// codimension-one set gamma^{-2} = beta sin^2(theta2).
inline Mode0Diagram mode0_diagram(const FluidParams& p, double theta2, double s_max = 50.0) {
    p.validate();
    Mode0Diagram d;
    const double target = p.gamma * p.gamma * std::sin(theta2) * std::sin(theta2);
    auto f = [&](double s) { return axis_ratio(s, p.beta) - target; };
    d.nonzero_pairs = static_cast<int>(scan_brackets(f, log_spaced(1e-6, s_max, 512)).size());
    if (p.beta == 0.0) {
        d.zero_chain_length = 0;
        d.essential_origin = true;
    } else {
        const double lhs = 1.0 / (p.gamma * p.gamma);
        const double rhs = p.beta * std::sin(theta2) * std::sin(theta2);
        d.zero_chain_length = std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)) ? 4 : 2;
    }
    return d;
}

}  // namespace hydrobif
