#pragma once

// Shared numerical utilities: root bracketing and refinement, 1-D
// minimisation, Chebyshev grids with Clenshaw-Curtis weights, forward-mode
// dual numbers, and a deterministic parallel map.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hydrobif {

struct DegenerateCaseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_finite(double x, const char* name) {
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string("non-finite input: ") + name);
}

inline std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        v[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return v;
}

inline std::vector<double> lin_spaced(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

// Bisection on a bracketing interval, refined by one safeguarded Newton step
// using a centred difference derivative.
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol = 1e-14) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw std::invalid_argument("bisect_root: interval does not bracket a root");
    for (int it = 0; it < 200 && (hi - lo) > tol * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    const double h = std::max(1e-9, 1e-7 * std::abs(x));
    const double d = (f(x + h) - f(x - h)) / (2 * h);
    if (d != 0.0) {
        const double xn = x - f(x) / d;
        if (xn > lo && xn < hi) x = xn;
    }
    return x;
}

// All sign-change brackets of f over the ordered grid.
template <class F>
std::vector<std::pair<double, double>> scan_brackets(F&& f, const std::vector<double>& grid) {
    std::vector<std::pair<double, double>> out;
    double prev = f(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = f(grid[i]);
        if (prev == 0.0)
            out.emplace_back(grid[i - 1], grid[i - 1]);
        else if (std::isfinite(prev) && std::isfinite(cur) && std::signbit(prev) != std::signbit(cur))
            out.emplace_back(grid[i - 1], grid[i]);
        prev = cur;
    }
    return out;
}

template <class F>
double golden_min(F&& f, double lo, double hi, double tol = 1e-13) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Chebyshev-Lobatto grid on [a,b] with Clenshaw-Curtis quadrature weights and
// the spectral differentiation matrix (used only by the sampled-profile
// fallback).

struct ChebGrid {
    std::vector<double> x;  // nodes, descending from b to a
    std::vector<double> w;  // quadrature weights for integral over [a,b]

    static ChebGrid make(double a, double b, int n) {
        ChebGrid g;
        g.x.resize(n + 1);
        g.w.resize(n + 1);
        const double pi = std::acos(-1.0);
        for (int j = 0; j <= n; ++j) {
            const double xr = std::cos(j * pi / n);  // [-1,1]
            g.x[j] = 0.5 * (b - a) * xr + 0.5 * (a + b);
        }
        for (int j = 0; j <= n; ++j) {
            const double th = j * pi / n;
            double s = 0.0;
            for (int m = 1; m <= n / 2; ++m) {
                const double bm = (2 * m == n) ? 1.0 : 2.0;
                s += bm / (4.0 * m * m - 1.0) * std::cos(2.0 * m * th);
            }
            const double cj = (j == 0 || j == n) ? 1.0 : 2.0;
            g.w[j] = (cj / n) * (1.0 - s) * 0.5 * (b - a);
        }
        return g;
    }
};

// First-derivative matrix for Chebyshev-Lobatto points on [a,b], row-major.
inline std::vector<double> cheb_diff_matrix(double a, double b, int n) {
    const double pi = std::acos(-1.0);
    const int m = n + 1;
    std::vector<double> xr(m), c(m);
    for (int j = 0; j <= n; ++j) {
        xr[j] = std::cos(j * pi / n);
        c[j] = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    }
    std::vector<double> D(m * m, 0.0);
    for (int i = 0; i <= n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            const double v = (c[i] / c[j]) / (xr[i] - xr[j]);
            D[i * m + j] = v;
            rowsum += v;
        }
        D[i * m + i] = -rowsum;  // negative sum trick
    }
    const double scale = 2.0 / (b - a);
    for (auto& v : D) v *= scale;
    return D;
}

// ---------------------------------------------------------------------------
// Forward-mode dual numbers. Enough surface for polynomial Hamiltonians plus
// the usual transcendentals.

template <class T>
struct Dual {
    T v{};
    T d{};

    Dual() = default;
    Dual(T value) : v(value) {}
    Dual(T value, T deriv) : v(value), d(deriv) {}

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
    friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
    friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
    friend Dual operator/(const Dual& a, const Dual& b) {
        return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    Dual& operator+=(const Dual& o) { return *this = *this + o; }
    Dual& operator-=(const Dual& o) { return *this = *this - o; }
    Dual& operator*=(const Dual& o) { return *this = *this * o; }
};

template <class T> Dual<T> sin(const Dual<T>& a) { using std::sin; using std::cos; return {sin(a.v), a.d * cos(a.v)}; }
template <class T> Dual<T> cos(const Dual<T>& a) { using std::sin; using std::cos; return {cos(a.v), -a.d * sin(a.v)}; }
template <class T> Dual<T> exp(const Dual<T>& a) { using std::exp; T e = exp(a.v); return {e, a.d * e}; }
template <class T> Dual<T> tanh(const Dual<T>& a) { using std::tanh; T t = tanh(a.v); return {t, a.d * (T(1) - t * t)}; }
template <class T> Dual<T> pow_int(Dual<T> a, int n) {
    Dual<T> r{T(1)};
    for (int i = 0; i < n; ++i) r *= a;
    return r;
}
inline double pow_int(double a, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= a;
    return r;
}

// ---------------------------------------------------------------------------
// Deterministic fan-out: results land by index regardless of thread count.

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace hydrobif
