#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/measure.hpp"

#include <optional>
#include <vector>

namespace rmtlab {

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 400;
    double damping = 0.5;           // plain iteration can cycle near edges
    double newton_threshold = 1e-4; // switch to Newton once this close
    double eta_start = 2.0;         // contraction regime for continuation
    double eta_ratio = 0.7;
    double eta_floor = 1e-7;        // boundary-value extraction scale
    double varpi = 0.1;             // admissibility margin; Theta = [0, 1+varpi/10]
};

struct StieltjesSolution {
    Complex m{0.0, 0.0};
    int iterations = 0;
    double residual = 0.0;
    bool branch_ok = true;
};

/// Solves m = int d nu(v) / (theta v - z - m) on the Im m >= 0 branch.
/// For z.eta = 0 the boundary value is extracted by geometric eta-continuation
/// down to opts.eta_floor plus two-point Richardson extrapolation.
StieltjesSolution solve_mfc(const SpectralMeasure& nu, double theta,
                            ComplexPoint z, const SolverOptions& opts = {});

/// |int d nu / |theta v - z - m|^2  -  Im m / (Im m + eta)|; identically zero
/// at the exact fixed point.
double sum_rule_residual(const SpectralMeasure& nu, double theta, ComplexPoint z,
                         Complex m);

struct Endpoints {
    double zeta_minus = 0.0, zeta_plus = 0.0;
    double L_minus = 0.0, L_plus = 0.0;
    double gap = 0.0;  // dist({zeta_pm}, theta * I_nu), must be > 0
};

/// Support endpoints: the two real roots of H(zeta) = int d nu/(theta v - zeta)^2 = 1
/// outside theta*I_nu, mapped through F(zeta) = zeta - int d nu/(theta v - zeta).
/// Throws NoBracketing when H=1 has extra roots inside the hull (split support).
Endpoints find_endpoints(const SpectralMeasure& nu, double theta);

/// Stateful solver with warm starts; cheap repeated boundary evaluations.
class MfcSolver {
  public:
    MfcSolver(const SpectralMeasure& nu, double theta, SolverOptions opts = {});
    StieltjesSolution at(ComplexPoint z) const;
    /// Boundary value m(E + i0) via eta_floor + Richardson.
    Complex boundary(double E) const;
    double theta() const { return theta_; }

  private:
    Complex integral(Complex m, Complex z) const;
    Complex integral_deriv(Complex m, Complex z) const;
    StieltjesSolution solve_at(Complex z, Complex m0) const;
    StieltjesSolution continued(Complex z) const;

    const SpectralMeasure* nu_;
    double theta_;
    SolverOptions opts_;
    mutable Complex warm_{0.0, 1.0};
    mutable bool have_warm_ = false;
};

/// Solved deformed semicircle law at coupling theta: endpoints, boundary
/// values of m on an edge-clustered grid, cumulative distribution, quantiles.
class FreeConvolutionLaw {
  public:
    static FreeConvolutionLaw solve(const SpectralMeasure& nu, double theta,
                                    const SolverOptions& opts = {},
                                    int grid_n = 0 /* default 2049 */);

    const SpectralMeasure& nu() const { return nu_; }
    double theta() const { return theta_; }
    const Endpoints& endpoints() const { return ep_; }
    double eta_floor() const { return opts_.eta_floor; }
    double total_mass() const { return mass_; }

    /// (1/pi) Im m(E + i0) by a fresh solve; 0 outside the support band.
    double density_at(double E) const;
    /// Batched boundary densities sharing one warm-started solver.
    std::vector<double> density_profile(const std::vector<double>& Es) const;
    /// Full boundary value m(E + i0).
    Complex m_boundary(double E) const;
    StieltjesSolution m_at(ComplexPoint z) const;

    double cdf(double E) const;
    double quantile(double p) const;
    std::vector<double> classical_locations(int N) const;

    /// int f(E) rho(E) dE over the stored grid.
    Complex stieltjes_quadrature(Complex z) const;

    // grid access (ascending in E)
    const std::vector<double>& grid() const { return nodes_; }
    const std::vector<double>& density_values() const { return rho_; }
    const std::vector<double>& quad_weights() const { return qw_; }
    const std::vector<Complex>& m_values() const { return mvals_; }

    std::uint64_t nu_digest() const { return nu_.digest(); }

  private:
    FreeConvolutionLaw() = default;
    double cdf_param(double s) const;  // cumulative in the grid parameter

    SpectralMeasure nu_ = SpectralMeasure::point_mass();
    double theta_ = 1.0;
    SolverOptions opts_;
    Endpoints ep_;
    double mass_ = 0.0;
    // E(s) = c - r cos(s), s in [0, pi]; spacing ~ sqrt(edge distance)
    double center_ = 0.0, radius_ = 1.0, hs_ = 0.0;
    std::vector<double> nodes_, rho_, qw_, cum_;
    std::vector<Complex> mvals_;
};

enum class EdgeSide { Lower, Upper };

/// Log-log slope of rho(L +/- kappa) over kappa in [1e-4, 1e-2]; the
/// square-root edge gives 1/2.
double edge_exponent(const FreeConvolutionLaw& law, EdgeSide side);

/// theta(t) = exp(-(t - t0)/2); the law of the matrix flow at time t.
FreeConvolutionLaw law_at_time(const SpectralMeasure& nu, double t0, double t,
                               const SolverOptions& opts = {}, int grid_n = 0);

/// |d_t m - (1/2) d_z [m (m + z)]| by central differences with step h.
double burger_residual(const SpectralMeasure& nu, double t0, double t,
                       ComplexPoint z, double h, const SolverOptions& opts = {});

} // namespace rmtlab
