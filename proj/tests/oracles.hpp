// Test-only reference computations, independent of the library's solvers:
// adaptive quadrature, polynomial roots, bisection.  Expected values frozen
// in the test files were produced with these (cross-checked at high
// precision offline).
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;

// adaptive Simpson; good to ~tol for smooth integrands
template <class F, class R = std::invoke_result_t<F, double>>
R adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int depth = 24) {
    auto simpson = [&f](double x0, double x2) {
        double x1 = 0.5 * (x0 + x2);
        return (x2 - x0) / 6.0 * (f(x0) + 4.0 * f(x1) + f(x2));
    };
    std::function<R(double, double, R, double, int)> rec =
        [&](double x0, double x2, R whole, double eps, int d) -> R {
        double x1 = 0.5 * (x0 + x2);
        R left = simpson(x0, x1), right = simpson(x1, x2);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        return rec(x0, x1, left, eps / 2.0, d - 1) +
               rec(x1, x2, right, eps / 2.0, d - 1);
    };
    return rec(a, b, simpson(a, b), tol, depth);
}

// Durand-Kerner roots of a monic-izable polynomial, coefficients highest first
inline std::vector<Complex> poly_roots(std::vector<Complex> c) {
    int n = static_cast<int>(c.size()) - 1;
    Complex lead = c.front() == Complex{} ? Complex{1.0} : c.front();
    for (auto& v : c) v /= lead;
    std::vector<Complex> r(n);
    for (int i = 0; i < n; ++i)
        r[i] = std::pow(Complex{0.4, 0.9}, i + 1);
    auto eval = [&](Complex x) {
        Complex acc = 0.0;
        for (auto& v : c) acc = acc * x + v;
        return acc;
    };
    for (int it = 0; it < 400; ++it) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= r[i] - r[j];
            Complex step = eval(r[i]) / denom;
            r[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return r;
}

// m for nu = (d_{-a} + d_{a})/2 at coupling theta: clearing denominators in
// m = w/(theta^2 a^2 - w^2), w = z + m, gives the cubic
//   -m^3 - 2 z m^2 + (theta^2 a^2 - 1 - z^2) m - z = 0.
// The physical branch has maximal imaginary part for Im z > 0.
inline Complex mfc_two_point(double a, double theta, Complex z) {
    double ta = theta * a;
    std::vector<Complex> coeff = {{-1.0, 0.0}, -2.0 * z, ta * ta - 1.0 - z * z, -z};
    auto roots = poly_roots(coeff);
    Complex best = roots[0];
    for (auto& r : roots)
        if (r.imag() > best.imag()) best = r;
    return best;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
    double flo = f(lo);
    for (int k = 0; k < 200; ++k) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((flo <= 0) == (fm <= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < tol) break;
    }
    return 0.5 * (lo + hi);
}

inline double semicircle_density(double E) {
    double d = 4.0 - E * E;
    return d > 0 ? std::sqrt(d) / (2.0 * std::acos(-1.0)) : 0.0;
}

inline double semicircle_cdf(double E) {
    const double pi = std::acos(-1.0);
    if (E <= -2) return 0.0;
    if (E >= 2) return 1.0;
    return 0.5 + E * std::sqrt(4.0 - E * E) / (4.0 * pi) + std::asin(E / 2.0) / pi;
}

// mean and standard error
struct MeanSE {
    double mean = 0.0, se = 0.0;
    std::size_t n = 0;
};

inline MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / r.n;
    double v = 0.0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    r.se = r.n > 1 ? std::sqrt(v / (r.n * (r.n - 1.0))) : 0.0;
    return r;
}

} // namespace oracles
