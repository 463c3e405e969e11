#include "rmtlab/free_convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmtlab {

namespace {
const double kPi = std::acos(-1.0);
}

// ---------------------------------------------------------------- MfcSolver

MfcSolver::MfcSolver(const SpectralMeasure& nu, double theta, SolverOptions opts)
    : nu_(&nu), theta_(theta), opts_(opts) {
    if (theta < 0.0 || theta > 1.0 + opts.varpi / 10.0 + 1e-12)
        throw ThetaOutOfRange("coupling theta = " + std::to_string(theta) +
                              " outside [0, 1 + varpi/10]");
}

Complex MfcSolver::integral(Complex m, Complex z) const {
    const auto& p = nu_->points();
    const auto& w = nu_->masses();
    Complex acc{0.0, 0.0};
    Complex zm = z + m;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc += w[i] / (theta_ * p[i] - zm);
    return acc;
}

Complex MfcSolver::integral_deriv(Complex m, Complex z) const {
    const auto& p = nu_->points();
    const auto& w = nu_->masses();
    Complex acc{0.0, 0.0};
    Complex zm = z + m;
    for (std::size_t i = 0; i < p.size(); ++i) {
        Complex d = theta_ * p[i] - zm;
        acc += w[i] / (d * d);
    }
    return acc;
}

StieltjesSolution MfcSolver::solve_at(Complex z, Complex m0) const {
    StieltjesSolution sol;
    Complex m = m0;
    if (!(m.imag() > 0)) m = Complex{0.0, 1.0};
    Complex f = integral(m, z) - m;
    double resid = std::abs(f);
    int it = 0;
    for (; it < opts_.max_iter && resid > opts_.tol; ++it) {
        if (resid < opts_.newton_threshold) {
            // Newton on f(m) = S(m) - m, kept only while it improves; near the
            // edge |S' - 1| ~ sqrt(kappa + eta) and a bad step can overshoot
            Complex fp = integral_deriv(m, z) - 1.0;
            if (std::abs(fp) > 1e-300) {
                Complex mn = m - f / fp;
                Complex fn = integral(mn, z) - mn;
                if (std::abs(fn) < resid) {
                    m = mn;
                    f = fn;
                    resid = std::abs(f);
                    continue;
                }
            }
        }
        m += opts_.damping * f;
        f = integral(m, z) - m;
        resid = std::abs(f);
    }
    sol.m = m;
    sol.iterations = it;
    sol.residual = resid;
    sol.branch_ok = m.imag() >= -1e-8;
    return sol;
}

StieltjesSolution MfcSolver::continued(Complex z) const {
    double eta_target = z.imag();
    double eta = std::max(opts_.eta_start, eta_target);
    Complex m{0.0, 1.0};
    StieltjesSolution sol;
    for (;;) {
        sol = solve_at(Complex{z.real(), eta}, m);
        if (sol.residual > opts_.tol)
            throw NonConvergence("fixed point stalled at eta = " + std::to_string(eta));
        if (!sol.branch_ok)
            throw BranchViolation("Im m < 0 during continuation");
        m = sol.m;
        if (eta <= eta_target) break;
        eta = std::max(eta * opts_.eta_ratio, eta_target);
    }
    return sol;
}

StieltjesSolution MfcSolver::at(ComplexPoint zp) const {
    if (!(zp.eta > 0.0))
        throw PreconditionViolated("solve_mfc: eta > 0 (use boundary() for eta = 0)");
    Complex z = zp.z();
    // The Im >= 0 solution is unique on the upper half plane, so a converged
    // warm-started solve is always the right branch; fall back to
    // continuation from eta_start when it stalls.
    if (have_warm_) {
        StieltjesSolution sol = solve_at(z, warm_);
        if (sol.residual <= opts_.tol && sol.branch_ok) {
            warm_ = sol.m;
            return sol;
        }
    }
    StieltjesSolution sol = continued(z);
    warm_ = sol.m;
    have_warm_ = true;
    return sol;
}

Complex MfcSolver::boundary(double E) const {
    double e1 = opts_.eta_floor, e2 = 2.0 * opts_.eta_floor;
    Complex m2 = at({E, e2}).m;
    Complex m1 = at({E, e1}).m;
    return 2.0 * m1 - m2;  // linear Richardson in eta
}

StieltjesSolution solve_mfc(const SpectralMeasure& nu, double theta,
                            ComplexPoint z, const SolverOptions& opts) {
    MfcSolver solver(nu, theta, opts);
    if (z.eta > 0.0) return solver.at(z);
    StieltjesSolution sol;
    sol.m = solver.boundary(z.E);
    sol.residual = opts.tol;
    sol.branch_ok = sol.m.imag() >= -1e-8;
    return sol;
}

double sum_rule_residual(const SpectralMeasure& nu, double theta, ComplexPoint z,
                         Complex m) {
    const auto& p = nu.points();
    const auto& w = nu.masses();
    Complex zm = z.z() + m;
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc += w[i] / std::norm(theta * p[i] - zm);
    return std::abs(acc - m.imag() / (m.imag() + z.eta));
}

// --------------------------------------------------------------- endpoints

namespace {

double h_of(const SpectralMeasure& nu, double theta, double zeta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nu.points().size(); ++i) {
        double d = theta * nu.points()[i] - zeta;
        acc += nu.masses()[i] / (d * d);
    }
    return acc;
}

double f_of(const SpectralMeasure& nu, double theta, double zeta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nu.points().size(); ++i)
        acc += nu.masses()[i] / (theta * nu.points()[i] - zeta);
    return zeta - acc;
}

// root of H(zeta) = 1 on one side of theta*I_nu; H decreases away from the hull
double edge_root(const SpectralMeasure& nu, double theta, double hull_edge,
                 int dir) {
    double step = 1e-6;
    double a = hull_edge + dir * step;
    // move outward until H < 1
    while (h_of(nu, theta, a) >= 1.0 && step < 1e12) {
        step *= 2.0;
        a = hull_edge + dir * step;
    }
    if (step >= 1e12) throw NoBracketing("H(zeta) = 1 never crossed");
    double inner = hull_edge + dir * (step / 2.0);
    if (h_of(nu, theta, inner) < 1.0) {
        // even the first probe was below 1: shrink towards the hull
        double lo = hull_edge, hi = inner;
        for (int k = 0; k < 200 && h_of(nu, theta, hi) < 1.0; ++k) {
            hi = 0.5 * (lo + hi);
            if (std::abs(hi - lo) < 1e-15)
                throw NoBracketing("H(zeta) stays below 1 near the hull");
        }
        inner = hi;
    }
    double lo = inner, hi = a;  // H(lo) >= 1 > H(hi)
    for (int k = 0; k < 200; ++k) {
        double mid = 0.5 * (lo + hi);
        if (h_of(nu, theta, mid) >= 1.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(hi - lo) < 1e-13 * std::max(1.0, std::abs(hi))) break;
    }
    double zeta = 0.5 * (lo + hi);
    // one Newton polish on H - 1
    double hp = 0.0;
    for (std::size_t i = 0; i < nu.points().size(); ++i) {
        double d = theta * nu.points()[i] - zeta;
        hp += 2.0 * nu.masses()[i] / (d * d * d);
    }
    if (std::abs(hp) > 1e-300) zeta -= (h_of(nu, theta, zeta) - 1.0) / hp;
    return zeta;
}

} // namespace

Endpoints find_endpoints(const SpectralMeasure& nu, double theta) {
    double hull_lo = std::min(theta * nu.lo(), theta * nu.hi());
    double hull_hi = std::max(theta * nu.lo(), theta * nu.hi());
    Endpoints ep;
    ep.zeta_plus = edge_root(nu, theta, hull_hi, +1);
    ep.zeta_minus = edge_root(nu, theta, hull_lo, -1);
    ep.L_plus = f_of(nu, theta, ep.zeta_plus);
    ep.L_minus = f_of(nu, theta, ep.zeta_minus);
    ep.gap = std::min(ep.zeta_plus - hull_hi, hull_lo - ep.zeta_minus);
    if (!(ep.L_minus < 0.0 && 0.0 < ep.L_plus))
        throw NoBracketing("support endpoints do not straddle zero");
    // more than two roots of H = 1 means the support splits; fail loudly
    // rather than pick a pair.  Scan the interior gaps between atoms.
    if (nu.kind() != MeasureKind::Density && nu.points().size() > 1 && theta > 0) {
        const auto& p = nu.points();
        const auto& w = nu.masses();
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            double a = theta * p[i], b = theta * p[i + 1];
            // a gap can only dip below 1 if it is wide relative to the
            // adjacent masses: H(mid) >= 4 w_adj / gap^2
            double wadj = std::max(w[i], w[i + 1]);
            if (b - a <= 2.0 * std::sqrt(wadj)) continue;
            double interior_min = std::numeric_limits<double>::infinity();
            for (int g = 1; g < 32; ++g)
                interior_min =
                    std::min(interior_min, h_of(nu, theta, a + (b - a) * g / 32.0));
            if (interior_min < 1.0)
                throw NoBracketing("H = 1 has interior roots: split support");
        }
    }
    return ep;
}

// ------------------------------------------------------- FreeConvolutionLaw

FreeConvolutionLaw FreeConvolutionLaw::solve(const SpectralMeasure& nu,
                                             double theta,
                                             const SolverOptions& opts,
                                             int grid_n) {
    if (grid_n <= 0) grid_n = 2049;
    if (grid_n % 2 == 0) ++grid_n;  // composite Simpson wants an odd count
    FreeConvolutionLaw law;
    law.nu_ = nu;
    law.theta_ = theta;
    law.opts_ = opts;
    law.ep_ = find_endpoints(nu, theta);
    law.center_ = 0.5 * (law.ep_.L_minus + law.ep_.L_plus);
    law.radius_ = 0.5 * (law.ep_.L_plus - law.ep_.L_minus);
    law.hs_ = kPi / (grid_n - 1);

    law.nodes_.resize(grid_n);
    law.rho_.resize(grid_n);
    law.mvals_.resize(grid_n);
    MfcSolver solver(nu, theta, opts);
    for (int k = 0; k < grid_n; ++k) {
        double s = k * law.hs_;
        double E = law.center_ - law.radius_ * std::cos(s);
        law.nodes_[k] = E;
        Complex m = solver.boundary(E);
        law.mvals_[k] = m;
        law.rho_[k] = std::max(m.imag(), 0.0) / kPi;
    }
    // quadrature weights for int f(E) rho(E) dE = int f(E(s)) rho r sin(s) ds
    law.qw_.assign(grid_n, 0.0);
    for (int k = 0; k < grid_n; ++k) {
        double simpson = (k == 0 || k == grid_n - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        law.qw_[k] = simpson * (law.hs_ / 3.0) * law.radius_ * std::sin(k * law.hs_);
    }
    // cumulative CDF at nodes: composite Simpson to even nodes, local
    // quadratic for the odd half-steps
    std::vector<double> g(grid_n);
    for (int k = 0; k < grid_n; ++k)
        g[k] = law.rho_[k] * law.radius_ * std::sin(k * law.hs_);
    law.cum_.assign(grid_n, 0.0);
    for (int k = 2; k < grid_n; k += 2)
        law.cum_[k] =
            law.cum_[k - 2] + (law.hs_ / 3.0) * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
    for (int k = 1; k < grid_n; k += 2)
        law.cum_[k] =
            law.cum_[k - 1] + (law.hs_ / 12.0) * (5.0 * g[k - 1] + 8.0 * g[k] - g[k + 1]);
    law.mass_ = law.cum_.back();
    if (std::abs(law.mass_ - 1.0) > 1e-6)
        throw InsufficientResolution("density grid mass " + std::to_string(law.mass_));
    // strict interior positivity
    for (int k = 1; k + 1 < grid_n; ++k)
        if (!(law.rho_[k] > 0.0))
            throw InsufficientResolution("density vanishes inside the support");
    return law;
}

Complex FreeConvolutionLaw::m_boundary(double E) const {
    MfcSolver solver(nu_, theta_, opts_);
    return solver.boundary(E);
}

StieltjesSolution FreeConvolutionLaw::m_at(ComplexPoint z) const {
    MfcSolver solver(nu_, theta_, opts_);
    return solver.at(z);
}

double FreeConvolutionLaw::density_at(double E) const {
    if (E < ep_.L_minus - 1e-6 || E > ep_.L_plus + 1e-6) return 0.0;
    return std::max(m_boundary(E).imag(), 0.0) / kPi;
}

std::vector<double> FreeConvolutionLaw::density_profile(
    const std::vector<double>& Es) const {
    MfcSolver solver(nu_, theta_, opts_);
    std::vector<double> out(Es.size(), 0.0);
    for (std::size_t i = 0; i < Es.size(); ++i) {
        double E = Es[i];
        if (E < ep_.L_minus - 1e-6 || E > ep_.L_plus + 1e-6) continue;
        out[i] = std::max(solver.boundary(E).imag(), 0.0) / kPi;
    }
    return out;
}

double FreeConvolutionLaw::cdf_param(double s) const {
    s = std::clamp(s, 0.0, kPi);
    int k = std::min<int>(static_cast<int>(s / hs_), static_cast<int>(nodes_.size()) - 2);
    double s0 = k * hs_;
    // integrate the quadratic through (k, k+1, k+2) (or ending triple) from s0 to s
    int base = std::min<int>(k, static_cast<int>(nodes_.size()) - 3);
    auto gval = [&](int j) {
        return rho_[j] * radius_ * std::sin(j * hs_);
    };
    double g0 = gval(base), g1 = gval(base + 1), g2 = gval(base + 2);
    double a = (g2 - 2 * g1 + g0) / (2 * hs_ * hs_);
    double b = (g1 - g0) / hs_ - a * (2 * base + 1) * hs_;
    double c = g0 - a * base * hs_ * base * hs_ - b * base * hs_;
    auto prim = [&](double x) { return ((a / 3 * x + b / 2) * x + c) * x; };
    return cum_[k] + prim(s) - prim(s0);
}

double FreeConvolutionLaw::cdf(double E) const {
    if (E <= ep_.L_minus) return 0.0;
    if (E >= ep_.L_plus) return mass_;
    double s = std::acos(std::clamp((center_ - E) / radius_, -1.0, 1.0));
    return cdf_param(s);
}

double FreeConvolutionLaw::quantile(double p) const {
    if (p <= 0.0) return ep_.L_minus;
    if (p >= mass_) return ep_.L_plus;
    auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
    int k = std::clamp<int>(static_cast<int>(it - cum_.begin()), 1,
                            static_cast<int>(cum_.size()) - 1);
    double lo = (k - 1) * hs_, hi = k * hs_;
    for (int it2 = 0; it2 < 100; ++it2) {
        double mid = 0.5 * (lo + hi);
        if (cdf_param(mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    double s = 0.5 * (lo + hi);
    return center_ - radius_ * std::cos(s);
}

std::vector<double> FreeConvolutionLaw::classical_locations(int N) const {
    if (N < 1) throw PreconditionViolated("classical_locations: N >= 1");
    std::vector<double> g(N);
    for (int i = 1; i <= N; ++i) g[i - 1] = quantile((i - 0.5) / N);
    for (int i = 1; i < N; ++i)
        if (!(g[i] > g[i - 1]))
            throw InsufficientResolution("classical locations not strictly increasing");
    return g;
}

Complex FreeConvolutionLaw::stieltjes_quadrature(Complex z) const {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        acc += qw_[k] * rho_[k] / (nodes_[k] - z);
    return acc;
}

double edge_exponent(const FreeConvolutionLaw& law, EdgeSide side) {
    const double k_lo = 1e-4, k_hi = 1e-2;
    if (law.eta_floor() > k_lo / 10.0)
        throw InsufficientResolution("eta_floor too large for the edge-fit window");
    const int npts = 25;
    std::vector<double> lx, ly;
    for (int i = 0; i < npts; ++i) {
        double kappa = k_lo * std::pow(k_hi / k_lo, i / double(npts - 1));
        double E = side == EdgeSide::Upper ? law.endpoints().L_plus - kappa
                                           : law.endpoints().L_minus + kappa;
        double rho = law.density_at(E);
        if (!(rho > 0.0))
            throw InsufficientResolution("density not resolved in the fit window");
        lx.push_back(std::log(kappa));
        ly.push_back(std::log(rho));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < npts; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
}

FreeConvolutionLaw law_at_time(const SpectralMeasure& nu, double t0, double t,
                               const SolverOptions& opts, int grid_n) {
    if (t < 0.0 || t0 < 0.0) throw PreconditionViolated("law_at_time: t, t0 >= 0");
    double theta_max = 1.0 + opts.varpi / 10.0;
    if (std::exp(t0 / 2.0) > theta_max + 1e-12)
        throw ThetaOutOfRange("exp(t0/2) outside the admissible coupling range");
    double theta = std::exp(-(t - t0) / 2.0);
    if (theta > theta_max + 1e-12)
        throw ThetaOutOfRange("theta(t) outside the admissible coupling range");
    return FreeConvolutionLaw::solve(nu, theta, opts, grid_n);
}

double burger_residual(const SpectralMeasure& nu, double t0, double t,
                       ComplexPoint z, double h, const SolverOptions& opts) {
    if (z.eta < 0.05) throw PreconditionViolated("burger_residual: eta >= 0.05");
    if (h > 1e-3 || h <= 0.0) throw PreconditionViolated("burger_residual: 0 < h <= 1e-3");
    if (t < h) throw PreconditionViolated("burger_residual: need t >= h");
    auto m_of = [&](double tt, Complex zz) {
        MfcSolver s(nu, std::exp(-(tt - t0) / 2.0), opts);
        return s.at({zz.real(), zz.imag()}).m;
    };
    Complex z0 = z.z();
    Complex dm_dt = (m_of(t + h, z0) - m_of(t - h, z0)) / (2.0 * h);
    auto flux = [&](Complex zz) {
        Complex m = m_of(t, zz);
        return m * (m + zz);
    };
    Complex dg_dz = (flux(z0 + h) - flux(z0 - h)) / (2.0 * h);
    return std::abs(dm_dt - 0.5 * dg_dz);
}

} // namespace rmtlab
