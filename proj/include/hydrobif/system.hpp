#pragma once

// Finite-dimensional reversible Hamiltonian systems supplied by callbacks:
// Hamiltonian (with analytic gradient/Hessian or a dual-number fallback),
// symplectic operator J, reverser R, eigendata for the colliding pair and an
// optional zero chain. Includes the polynomial-Hamiltonian representation
// shared by the builtin test systems and the declarative file format.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hydrobif/numerics.hpp"

namespace hydrobif {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

// --- polynomial Hamiltonians ------------------------------------------------------

struct Monomial {
    std::vector<int> powers;  // one exponent per state coordinate
    double coeff = 0.0;
    int mu1_degree = 0;
};

struct PolynomialH {
    int dim = 0;
    std::vector<Monomial> monomials;

    double eval(std::span<const double> v, double mu1) const {
        double s = 0.0;
        for (const auto& m : monomials) {
            double t = m.coeff * pow_int(mu1, m.mu1_degree);
            for (int i = 0; i < dim; ++i) t *= pow_int(v[i], m.powers[i]);
            s += t;
        }
        return s;
    }

    template <class T>
    T eval_generic(std::span<const T> v, double mu1) const {
        T s{};
        for (const auto& m : monomials) {
            T t{m.coeff * pow_int(mu1, m.mu1_degree)};
            for (int i = 0; i < dim; ++i) t = t * pow_int(v[i], m.powers[i]);
            s += t;
        }
        return s;
    }

    void grad(std::span<const double> v, double mu1, std::span<double> out) const {
        for (int i = 0; i < dim; ++i) out[i] = 0.0;
        for (const auto& m : monomials) {
            const double base = m.coeff * pow_int(mu1, m.mu1_degree);
            for (int i = 0; i < dim; ++i) {
                if (m.powers[i] == 0) continue;
                double t = base * m.powers[i] * pow_int(v[i], m.powers[i] - 1);
                for (int j = 0; j < dim; ++j)
                    if (j != i) t *= pow_int(v[j], m.powers[j]);
                out[i] += t;
            }
        }
    }

    void hess(std::span<const double> v, double mu1, Mat& out) const {
        out.setZero(dim, dim);
        for (const auto& m : monomials) {
            const double base = m.coeff * pow_int(mu1, m.mu1_degree);
            for (int i = 0; i < dim; ++i) {
                if (m.powers[i] == 0) continue;
                for (int j = 0; j < dim; ++j) {
                    const int pj = j == i ? m.powers[i] - 1 : m.powers[j];
                    if (pj == 0 && j != i) continue;
                    double t = base * m.powers[i];
                    if (j == i) {
                        if (m.powers[i] < 2) continue;
                        t *= (m.powers[i] - 1) * pow_int(v[i], m.powers[i] - 2);
                    } else {
                        t *= m.powers[j] * pow_int(v[i], m.powers[i] - 1) * pow_int(v[j], m.powers[j] - 1);
                    }
                    for (int l = 0; l < dim; ++l)
                        if (l != i && l != j) t *= pow_int(v[l], m.powers[l]);
                    out(i, j) += t;
                }
            }
        }
    }
};

// --- system specification ---------------------------------------------------------

using HFn = std::function<double(std::span<const double>, double)>;
using GradFn = std::function<void(std::span<const double>, double, std::span<double>)>;
using HessFn = std::function<void(std::span<const double>, double, Mat&)>;
using DualHFn = std::function<Dual<double>(std::span<const Dual<double>>, double)>;

struct HamiltonianSystemSpec {
    int dim = 0;  // 2n
    HFn H;
    GradFn gradH;          // optional; derived from H_dual when absent
    HessFn hessH;          // optional; derived from gradH by dual evaluation when absent
    DualHFn H_dual;        // generic evaluation used for derivative fallbacks
    std::function<Mat(double)> J;  // J(mu1) at the origin; constant in the state
    Mat R;
    double kappa = 1.0;
    CVec e1, e2;           // normalized: Omega(e_i, conj e_i) = i s_i
    std::optional<Vec> f1, f2;  // zero chain, normalized: Omega(f1, f2) = 1
    int s1 = 0, s2 = 0;

    bool has_zero_chain() const { return f1.has_value() && f2.has_value(); }

    Mat J0(double mu1) const { return J(mu1); }

    void grad(std::span<const double> v, double mu1, std::span<double> out) const {
        if (gradH) {
            gradH(v, mu1, out);
            return;
        }
        // forward-mode dual evaluation, one direction at a time
        std::vector<Dual<double>> dv(dim);
        for (int i = 0; i < dim; ++i) dv[i] = Dual<double>(v[i]);
        for (int i = 0; i < dim; ++i) {
            dv[i].d = 1.0;
            out[i] = H_dual(dv, mu1).d;
            dv[i].d = 0.0;
        }
    }

    void hess(std::span<const double> v, double mu1, Mat& out) const {
        if (hessH) {
            hessH(v, mu1, out);
            return;
        }
        out.resize(dim, dim);
        std::vector<double> vp(v.begin(), v.end()), gp(dim), gm(dim);
        const double h = 1e-6;
        for (int j = 0; j < dim; ++j) {
            vp[j] = v[j] + h;
            grad(vp, mu1, gp);
            vp[j] = v[j] - h;
            grad(vp, mu1, gm);
            vp[j] = v[j];
            for (int i = 0; i < dim; ++i) out(i, j) = (gp[i] - gm[i]) / (2.0 * h);
        }
        out = 0.5 * (out + out.transpose()).eval();
    }

    // Linearisation of the Hamiltonian vector field at the origin.
    Mat linear_operator(double mu1) const {
        Mat Hm;
        std::vector<double> zero(dim, 0.0);
        hess(zero, mu1, Hm);
        return J(mu1).partialPivLu().solve(Hm);
    }
};

// Symplectic pairing at the origin, extended bilinearly.
inline std::complex<double> omega0(const HamiltonianSystemSpec& sys, const CVec& u, const CVec& v) {
    const Mat J = sys.J0(0.0);
    return (J.cast<std::complex<double>>() * u).transpose() * v;
}

// --- validation ------------------------------------------------------------------

// Normalises the eigendata (Omega(e_i, conj e_i) = +-i, Omega(f1,f2) = 1),
// computes the signature signs and verifies the structural hypotheses:
// J skew and invertible, R an involution anticommuting with the linearisation,
// H(Rv) = H(v), eigenvectors of the stated eigenvalue, conj e_i = R e_i, and
// the trivial-direction property when a zero chain is present.
inline void validate_and_normalize(HamiltonianSystemSpec& sys, double tol = 1e-9) {
    using namespace std::complex_literals;
    const int n = sys.dim;
    if (n < 2 || n % 2) throw std::invalid_argument("system: dim must be even and >= 2");
    const Mat J = sys.J0(0.0);
    if ((J + J.transpose()).norm() > tol * (1.0 + J.norm()))
        throw std::invalid_argument("system: J is not skew-symmetric");
    if (std::abs(J.determinant()) < 1e-12) throw std::invalid_argument("system: J is singular");
    if ((sys.R * sys.R - Mat::Identity(n, n)).norm() > tol)
        throw std::invalid_argument("system: R is not an involution");

    const Mat L = sys.linear_operator(0.0);
    if ((sys.R * L + L * sys.R).norm() > tol * (1.0 + L.norm()))
        throw std::invalid_argument("system: R does not anticommute with the linearisation");

    // H(Rv) = H(v) and H(0) = 0, dH[0] = 0 on a few deterministic samples
    std::vector<double> v(n), g(n);
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> uni(-0.3, 0.3);
    for (int trial = 0; trial < 8; ++trial) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = uni(rng);
        Vec rx = sys.R * x;
        std::vector<double> xs(x.data(), x.data() + n), rxs(rx.data(), rx.data() + n);
        if (std::abs(sys.H(xs, 0.137) - sys.H(rxs, 0.137)) > tol * (1.0 + std::abs(sys.H(xs, 0.137))))
            throw std::invalid_argument("system: H(Rv) != H(v)");
    }
    std::vector<double> zero(n, 0.0);
    if (std::abs(sys.H(zero, 0.2)) > tol) throw std::invalid_argument("system: H(0) != 0");
    sys.grad(zero, 0.2, g);
    for (double gi : g)
        if (std::abs(gi) > tol) throw std::invalid_argument("system: dH[0] != 0");

    auto check_eig = [&](const CVec& e) {
        const CVec r = L.cast<std::complex<double>>() * e - std::complex<double>(0, sys.kappa) * e;
        if (r.norm() > 1e-7 * e.norm()) throw std::invalid_argument("system: e is not an i*kappa eigenvector");
    };
    check_eig(sys.e1);
    check_eig(sys.e2);
    if ((sys.R.cast<std::complex<double>>() * sys.e1 - sys.e1.conjugate()).norm() > 1e-7 * sys.e1.norm() ||
        (sys.R.cast<std::complex<double>>() * sys.e2 - sys.e2.conjugate()).norm() > 1e-7 * sys.e2.norm())
        throw std::invalid_argument("system: conj e_i != R e_i");

    auto norm_pair = [&](CVec& e) {
        const std::complex<double> om = omega0(sys, e, e.conjugate());
        if (std::abs(om.imag()) < 1e-12) throw std::invalid_argument("system: Omega(e, conj e) degenerate");
        e /= std::sqrt(std::abs(om.imag()));
        return om.imag() > 0.0 ? 1 : -1;
    };
    sys.s1 = norm_pair(sys.e1);
    sys.s2 = norm_pair(sys.e2);
    if (std::abs(omega0(sys, sys.e1, sys.e2)) > 1e-8 ||
        std::abs(omega0(sys, sys.e1, sys.e2.conjugate())) > 1e-8)
        throw std::invalid_argument("system: eigenvectors are not Omega-orthogonal");

    if (sys.has_zero_chain()) {
        if ((L * *sys.f1).norm() > 1e-8) throw std::invalid_argument("system: L f1 != 0");
        if ((sys.R * *sys.f1 + *sys.f1).norm() > 1e-8) throw std::invalid_argument("system: R f1 != -f1");
        if ((sys.R * *sys.f2 - *sys.f2).norm() > 1e-8) throw std::invalid_argument("system: R f2 != f2");
        const std::complex<double> om =
            omega0(sys, sys.f1->cast<std::complex<double>>(), sys.f2->cast<std::complex<double>>());
        if (std::abs(om) < 1e-12) throw std::invalid_argument("system: Omega(f1,f2) = 0");
        *sys.f2 /= om.real();
        if ((L * *sys.f2 - *sys.f1).norm() > 1e-7 * (1.0 + sys.f1->norm()))
            throw std::invalid_argument("system: L f2 != f1 after normalisation");
        // trivial direction: H and J must not depend on the f1 coordinate
        for (int trial = 0; trial < 4; ++trial) {
            Vec x(n);
            for (int i = 0; i < n; ++i) x[i] = uni(rng);
            Vec xq = x + 0.37 * *sys.f1;
            std::vector<double> xs(x.data(), x.data() + n), xqs(xq.data(), xq.data() + n);
            if (std::abs(sys.H(xs, 0.11) - sys.H(xqs, 0.11)) > tol * (1.0 + std::abs(sys.H(xs, 0.11))))
                throw std::invalid_argument("system: H depends on the trivial direction");
        }
    }
}

// --- builtin test systems ----------------------------------------------------------

enum class TestSystemKind { Basic4D, Translation6D };

inline HamiltonianSystemSpec from_polynomial(PolynomialH poly, Mat J, Mat R, double kappa,
                                             CVec e1, CVec e2, std::optional<Vec> f1 = {},
                                             std::optional<Vec> f2 = {}) {
    HamiltonianSystemSpec sys;
    sys.dim = poly.dim;
    auto p = std::make_shared<PolynomialH>(std::move(poly));
    sys.H = [p](std::span<const double> v, double mu1) { return p->eval(v, mu1); };
    sys.gradH = [p](std::span<const double> v, double mu1, std::span<double> out) {
        p->grad(v, mu1, out);
    };
    sys.hessH = [p](std::span<const double> v, double mu1, Mat& out) { p->hess(v, mu1, out); };
    sys.H_dual = [p](std::span<const Dual<double>> v, double mu1) {
        return p->eval_generic<Dual<double>>(v, mu1);
    };
    Mat Jc = std::move(J);
    sys.J = [Jc](double) { return Jc; };
    sys.R = std::move(R);
    sys.kappa = kappa;
    sys.e1 = std::move(e1);
    sys.e2 = std::move(e2);
    sys.f1 = std::move(f1);
    sys.f2 = std::move(f2);
    validate_and_normalize(sys);
    return sys;
}

// BASIC_4D: two oscillators with frequencies kappa +- mu1/2 and a quartic
// coupling; eigenvalues +-i(kappa +- mu1/2) collide semisimply at mu1 = 0.
// TRANSLATION_6D: the same plus a cyclic pair (q3, p3), H += p3^2/2 +
// coupling p3 q1^2, giving a trivial double zero eigenvalue.
inline HamiltonianSystemSpec make_test_system(TestSystemKind kind, double kappa, double coupling) {
    if (!(kappa > 0.0)) throw std::invalid_argument("make_test_system: kappa must be > 0");
    const bool six = kind == TestSystemKind::Translation6D;
    const int nq = six ? 3 : 2;
    const int dim = 2 * nq;
    auto P = [&](std::initializer_list<int> qp) { return std::vector<int>(qp); };

    PolynomialH poly;
    poly.dim = dim;
    auto mono = [&](std::vector<int> pw, double c, int md) {
        poly.monomials.push_back({std::move(pw), c, md});
    };
    // (kappa + mu1/2)(q1^2 + p1^2)/2 + (kappa - mu1/2)(q2^2 + p2^2)/2 + c q1^2 q2^2
    if (!six) {
        mono(P({2, 0, 0, 0}), kappa / 2, 0);
        mono(P({2, 0, 0, 0}), 0.25, 1);
        mono(P({0, 0, 2, 0}), kappa / 2, 0);
        mono(P({0, 0, 2, 0}), 0.25, 1);
        mono(P({0, 2, 0, 0}), kappa / 2, 0);
        mono(P({0, 2, 0, 0}), -0.25, 1);
        mono(P({0, 0, 0, 2}), kappa / 2, 0);
        mono(P({0, 0, 0, 2}), -0.25, 1);
        mono(P({2, 2, 0, 0}), coupling, 0);
    } else {
        mono(P({2, 0, 0, 0, 0, 0}), kappa / 2, 0);
        mono(P({2, 0, 0, 0, 0, 0}), 0.25, 1);
        mono(P({0, 0, 0, 2, 0, 0}), kappa / 2, 0);
        mono(P({0, 0, 0, 2, 0, 0}), 0.25, 1);
        mono(P({0, 2, 0, 0, 0, 0}), kappa / 2, 0);
        mono(P({0, 2, 0, 0, 0, 0}), -0.25, 1);
        mono(P({0, 0, 0, 0, 2, 0}), kappa / 2, 0);
        mono(P({0, 0, 0, 0, 2, 0}), -0.25, 1);
        mono(P({2, 2, 0, 0, 0, 0}), coupling, 0);
        mono(P({0, 0, 0, 0, 0, 2}), 0.5, 0);
        mono(P({2, 0, 0, 0, 0, 1}), coupling, 0);
    }

    Mat J = Mat::Zero(dim, dim);
    for (int i = 0; i < nq; ++i) {
        J(i, nq + i) = 1.0;
        J(nq + i, i) = -1.0;
    }
    Mat R = Mat::Zero(dim, dim);
    for (int i = 0; i < nq; ++i) {
        R(i, i) = 1.0;
        R(nq + i, nq + i) = -1.0;
    }
    if (six) {
        // the cyclic coordinate is R-odd, its momentum R-even
        R(2, 2) = -1.0;
        R(nq + 2, nq + 2) = 1.0;
    }

    CVec e1 = CVec::Zero(dim), e2 = CVec::Zero(dim);
    e1[0] = 1.0;
    e1[nq] = std::complex<double>(0.0, -1.0);
    e2[1] = 1.0;
    e2[nq + 1] = std::complex<double>(0.0, -1.0);

    std::optional<Vec> f1, f2;
    if (six) {
        Vec v1 = Vec::Zero(dim), v2 = Vec::Zero(dim);
        v1[2] = 1.0;        // q3 direction
        v2[nq + 2] = -1.0;  // -p3 direction: L f2 = f1
        f1 = v1;
        f2 = v2;
    }
    return from_polynomial(std::move(poly), std::move(J), std::move(R), kappa, std::move(e1),
                           std::move(e2), std::move(f1), std::move(f2));
}

}  // namespace hydrobif
