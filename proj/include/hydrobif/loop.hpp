#pragma once

// Truncated Fourier loops u(tau) = sum_{|k|<=N} c_k e^{ik tau} in R^dim with
// the reality constraint c_{-k} = conj(c_k), collocation transforms on
// M = 4N+1 nodes (exact dealiasing for quartic Hamiltonians), and the loop
// symmetries: phase translation T_theta and the reversing operation T.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hydrobif/numerics.hpp"
#include "hydrobif/system.hpp"

namespace hydrobif {

struct LoopState {
    int N = 0;
    int dim = 0;
    // coefficient matrix: dim rows, 2N+1 columns for k = -N..N
    Eigen::MatrixXcd c;

    LoopState() = default;
    LoopState(int N_, int dim_) : N(N_), dim(dim_), c(Eigen::MatrixXcd::Zero(dim_, 2 * N_ + 1)) {}

    Eigen::MatrixXcd::ColXpr mode(int k) { return c.col(k + N); }
    Eigen::VectorXcd mode(int k) const { return c.col(k + N); }

    void enforce_reality() {
        for (int k = 1; k <= N; ++k) {
            const Eigen::VectorXcd avg = 0.5 * (c.col(N + k) + c.col(N - k).conjugate());
            c.col(N + k) = avg;
            c.col(N - k) = avg.conjugate();
        }
        c.col(N) = c.col(N).real().cast<std::complex<double>>();
    }

    double norm() const { return c.norm(); }
};

inline LoopState operator+(const LoopState& a, const LoopState& b) {
    LoopState r = a;
    r.c += b.c;
    return r;
}

inline LoopState operator-(const LoopState& a, const LoopState& b) {
    LoopState r = a;
    r.c -= b.c;
    return r;
}

inline LoopState operator*(double s, const LoopState& a) {
    LoopState r = a;
    r.c *= s;
    return r;
}

// Mean over tau of the pointwise real inner product <u(tau), v(tau)>; equals
// sum_k <c_k(u), conj(c_k(v))> for real loops.
inline double loop_inner(const LoopState& a, const LoopState& b) {
    return (a.c.array() * b.c.array().conjugate()).sum().real();
}

// tau-derivative in coefficient space.
inline LoopState loop_derivative(const LoopState& u) {
    LoopState d = u;
    for (int k = -u.N; k <= u.N; ++k) d.c.col(k + u.N) *= std::complex<double>(0.0, double(k));
    return d;
}

// Phase translation u(tau) -> u(tau + theta).
inline LoopState translate(const LoopState& u, double theta) {
    LoopState t = u;
    for (int k = -u.N; k <= u.N; ++k)
        t.c.col(k + u.N) *= std::exp(std::complex<double>(0.0, k * theta));
    return t;
}

// Reversing operation (T u)(tau) = R u(-tau).
inline LoopState reverse(const LoopState& u, const Mat& R) {
    LoopState t = u;
    for (int k = -u.N; k <= u.N; ++k)
        t.c.col(k + u.N) = R.cast<std::complex<double>>() * u.c.col(-k + u.N);
    return t;
}

// Collocation transforms between coefficients and M = 4N+1 nodes.
struct Collocation {
    int N = 0, M = 0, dim = 0;
    Eigen::MatrixXcd synth;  // M x (2N+1): e^{ik tau_j}
    Eigen::MatrixXcd anal;   // (2N+1) x M: e^{-ik tau_j} / M

    Collocation(int N_, int dim_) : N(N_), M(4 * N_ + 1), dim(dim_) {
        synth.resize(M, 2 * N + 1);
        anal.resize(2 * N + 1, M);
        const double pi = std::acos(-1.0);
        for (int j = 0; j < M; ++j) {
            const double tau = 2.0 * pi * j / M;
            for (int k = -N; k <= N; ++k) {
                synth(j, k + N) = std::exp(std::complex<double>(0.0, k * tau));
                anal(k + N, j) = std::exp(std::complex<double>(0.0, -k * tau)) / double(M);
            }
        }
    }

    // nodes: dim x M real values
    Eigen::MatrixXd to_nodes(const LoopState& u) const {
        return (u.c * synth.transpose()).real();
    }
    LoopState to_coeffs(const Eigen::MatrixXd& nodes) const {
        LoopState u(N, dim);
        u.c = nodes.cast<std::complex<double>>() * anal.transpose();
        return u;
    }
};

// F(u, mu1, mu2) = (kappa + mu2) J(u) u_tau - grad H(u), evaluated pointwise
// on the collocation nodes and transformed back; spectrally exact for
// polynomial H of degree <= 4 at M = 4N+1.
inline LoopState residual_F(const LoopState& u, double mu1, double mu2,
                            const HamiltonianSystemSpec& sys, const Collocation& col) {
    const Eigen::MatrixXd un = col.to_nodes(u);
    const Eigen::MatrixXd ut = col.to_nodes(loop_derivative(u));
    Eigen::MatrixXd F(sys.dim, col.M);
    const Mat J = sys.J0(mu1);
    std::vector<double> g(sys.dim);
    for (int j = 0; j < col.M; ++j) {
        std::span<const double> vj(un.col(j).data(), sys.dim);
        sys.grad(vj, mu1, g);
        F.col(j) = (sys.kappa + mu2) * (J * ut.col(j));
        for (int i = 0; i < sys.dim; ++i) F(i, j) -= g[i];
    }
    return col.to_coeffs(F);
}

// Directional derivative of F at u in the direction v (same mu), using the
// analytic Hessian of H. J is constant in the state.
inline LoopState apply_dF(const LoopState& u, const LoopState& v, double mu1, double mu2,
                          const HamiltonianSystemSpec& sys, const Collocation& col) {
    const Eigen::MatrixXd un = col.to_nodes(u);
    const Eigen::MatrixXd vn = col.to_nodes(v);
    const Eigen::MatrixXd vt = col.to_nodes(loop_derivative(v));
    Eigen::MatrixXd F(sys.dim, col.M);
    const Mat J = sys.J0(mu1);
    Mat Hm(sys.dim, sys.dim);
    for (int j = 0; j < col.M; ++j) {
        std::span<const double> vj(un.col(j).data(), sys.dim);
        sys.hess(vj, mu1, Hm);
        F.col(j) = (sys.kappa + mu2) * (J * vt.col(j)) - Hm * vn.col(j);
    }
    return col.to_coeffs(F);
}

// Action S(u) = mean{ -(kappa+mu2) <alpha(u), u_tau> - H(u) } with the
// constant-J potential alpha(v) = J v / 2.
inline double action(const LoopState& u, double mu1, double mu2, const HamiltonianSystemSpec& sys,
                     const Collocation& col) {
    const Eigen::MatrixXd un = col.to_nodes(u);
    const Eigen::MatrixXd ut = col.to_nodes(loop_derivative(u));
    const Mat J = sys.J0(mu1);
    double s = 0.0;
    for (int j = 0; j < col.M; ++j) {
        std::span<const double> vj(un.col(j).data(), sys.dim);
        s += -(sys.kappa + mu2) * 0.5 * (J * un.col(j)).dot(ut.col(j)) - sys.H(vj, mu1);
    }
    return s / col.M;
}

}  // namespace hydrobif
