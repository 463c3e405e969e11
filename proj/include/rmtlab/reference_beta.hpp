#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/dbm.hpp"
#include "rmtlab/free_convolution.hpp"

#include <memory>
#include <vector>

namespace rmtlab {

/// Time-dependent reference potential: on the support of the time-t law,
/// U'(x) = -x - 2 Re m(x + i0); outside, a one-sided cubic matching value,
/// slope and curvature at each endpoint, joined to a linear far-field ramp
/// with U'(x) + x growing like x.  U itself is recovered by quadrature with
/// the gauge U(center) = 0.
class PotentialModel {
  public:
    struct BuildOptions {
        SolverOptions solver{};
        int grid_n = 0;          // density grid size (default 2049)
        double ext_width = 1.0;  // cubic window width before the linear ramp
        bool check_majorization = true;
    };

    static PotentialModel build(const SpectralMeasure& nu, double t0, double t,
                                const BuildOptions& opts);
    static PotentialModel build(const SpectralMeasure& nu, double t0, double t) {
        return build(nu, t0, t, BuildOptions{});
    }

    double t() const { return t_; }
    const FreeConvolutionLaw& law() const { return *law_; }

    double uprime(double x) const;
    double usecond(double x) const;
    /// U(x) with gauge U(support center) = 0, plus the additive offset.
    double u(double x) const { return u_base(x) + offset_; }
    /// U(x) without the offset; Metropolis ratios use differences of this, so
    /// the offset cancels exactly.
    double u_base(double x) const;

    double convexity_floor() const { return convexity_floor_; }
    double majorization_margin() const { return majorization_margin_; }
    double offset() const { return offset_; }
    PotentialModel shifted(double c) const;

    // in-support grid export
    const std::vector<double>& grid() const { return law_->grid(); }
    const std::vector<double>& uprime_values() const { return up_; }

  private:
    PotentialModel() = default;
    void build_extension(const BuildOptions& opts);

    std::shared_ptr<const FreeConvolutionLaw> law_;
    double t_ = 0.0;
    std::vector<double> up_;    // U' at the law grid nodes
    std::vector<double> upp_;   // U'' at the law grid nodes
    std::vector<double> cumU_;  // cumulative integral of U' from the center
    std::vector<double> gU_;    // integrand U'(E(s)) r sin(s) for queries
    // per-side extension: U'(L +/- u) = g0 + g1 u + g2/2 u^2 + a u^3 on
    // |u| <= w, then U'(x) = ramp * x beyond
    struct Side {
        double edge = 0.0, g0 = 0.0, g1 = 0.0, g2 = 0.0, a = 0.0;
        double width = 1.0, ramp = 0.0, junction = 0.0;
        double u_at_junction = 0.0;  // antiderivative bookkeeping
    };
    Side upper_, lower_;
    double center_ = 0.0;
    double convexity_floor_ = 0.0;
    double majorization_margin_ = 0.0;
    double offset_ = 0.0;
};

/// RK4 integration of d gamma_i/dt = (1/2) U'(t, gamma_i) from classical
/// locations at t_grid.front(); returns one configuration per grid time.
std::vector<ParticleConfiguration> eom_propagate(const SpectralMeasure& nu,
                                                 double t0,
                                                 const std::vector<double>& t_grid,
                                                 int N,
                                                 double dt_internal = 0.02);

/// Unnormalized log density of the beta-ensemble:
/// -beta N sum_i [U(x_i)/2 + x_i^2/4] + beta sum_{i<j} log(x_j - x_i).
/// U = nullptr means the Gaussian case (U == 0).
double beta_log_density(const ParticleConfiguration& x, const PotentialModel* U,
                        double beta, int N);

struct McmcOptions {
    int burn_in_sweeps = 2000;
    int thin_sweeps = 4;
    double target_accept = 0.3;  // tuned into the 0.2-0.4 band
    double initial_step = 0.0;   // 0: auto from mean spacing
};

struct McmcDiagnostics {
    double acceptance_rate = 0.0;
    double step = 0.0;
    double ess = 0.0;  // effective samples of the center-of-mass trace
};

struct McmcResult {
    std::vector<ParticleConfiguration> samples;
    McmcDiagnostics diag;
};

/// Random-walk Metropolis on unordered coordinates (symmetrized density),
/// sorted on output; N capped at 64.
McmcResult mcmc_sample(const PotentialModel* U, double beta, int N,
                       int n_samples, std::uint64_t seed,
                       const McmcOptions& opts = {});

/// |m_U(z)^2 - int (x + U'(x)) rho(x)/(z - x) dx| by quadrature over the
/// density grid; analytically zero at equilibrium.
double loop_equation_residual(const PotentialModel& U,
                              const FreeConvolutionLaw& law, ComplexPoint z);

/// Single-window external potential obtained by conditioning a log-gas on
/// its exterior points:
/// V(x) = U(x) + x^2/2 - (2/N) sum_{i outside} log|x - y_i|.
class ConditionedPotential {
  public:
    ConditionedPotential(std::vector<double> exterior, double a, double b,
                         const PotentialModel* U, int N);

    double value(double x) const;
    double deriv(double x) const;
    double second(double x) const;
    double a() const { return a_; }
    double b() const { return b_; }
    double interval_length() const { return b_ - a_; }

  private:
    void check(double x) const;
    std::vector<double> y_;
    double a_, b_;
    const PotentialModel* U_;
    int N_;
};

/// Splits a full ordered configuration at the index window
/// [L-K, L+K] (0-based) and conditions on the exterior.
ConditionedPotential conditioned_external_potential(
    const std::vector<double>& full_config, int L, int K,
    const PotentialModel* U);

struct RegularityThresholds {
    double interval = 8.0;  // slack cap for the interval-length condition
    double vprime = 8.0;    // slack cap for the V' profile condition
};

struct RegularityReport {
    double interval_slack = 0.0;  // | |I| - K/(N rho) | * N / K^chi
    double vprime_slack = 0.0;    // max |V' - rho log(d+/d-)| * N d / K^chi
    double curvature_margin = 0.0;  // min (V'' - 1 - inf U'') * d
    bool interval_ok = false, vprime_ok = false, curvature_ok = false;
    bool all_ok() const { return interval_ok && vprime_ok && curvature_ok; }
};

/// Quantitative regularity of the external potential: interval length,
/// V' profile against rho log(d+/d-), and the convexity lower bound.
RegularityReport regularity_check(const ConditionedPotential& Vy, int K,
                                  double chi, double rho_bar, int N,
                                  double inf_usecond = 0.0,
                                  const RegularityThresholds& thr = {});

} // namespace rmtlab
