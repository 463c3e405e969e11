#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/spectral.hpp"

#include <vector>

namespace rmtlab {

/// Ordered point configuration in the Weyl chamber x_1 <= ... <= x_N.
struct ParticleConfiguration {
    std::vector<double> x;
    double t = 0.0;
    int beta = 2;

    int n() const { return int(x.size()); }
    void require_ordered() const;
};

struct DbmOptions {
    double dt_max = 1e-3;
    double gap_factor = 0.1;  // substep cap c * N * (min gap)^2
    int max_halvings = 20;
    bool noise = true;  // test hook: db == 0 gives the deterministic flow
};

/// Drift of the interacting SDE: -x_i/2 + (1/N) sum_{j != i} 1/(x_i - x_j).
std::vector<double> dbm_drift(const std::vector<double>& x);

/// Euler-Maruyama with gap-adaptive substepping; any step that would cross
/// particles is retried at half the step (fresh noise), up to
/// opts.max_halvings, after which StepCollapse is thrown.  Ordering is
/// preserved on every accepted step.  Brownian increments use one stream per
/// particle derived from (seed, i).
std::vector<ParticleConfiguration> dbm_integrate(
    const ParticleConfiguration& x0, double t_end, const DbmOptions& opts,
    std::uint64_t seed, const std::vector<double>& checkpoints = {});

/// Exact-law sample of the time-t flow: spectrum of
/// e^{-(t-t0)/2} V + e^{-t/2} W + (1-e^{-t})^{1/2} W'.
SpectrumSample matrix_flow_sample(const EnsembleSpec& spec, double t,
                                  std::uint64_t sample_index = 0);

struct StatComparison {
    std::string name;
    double mean_a = 0, mean_b = 0, var_a = 0, var_b = 0;
    double z_mean = 0, z_var = 0;
};

struct AgreementReport {
    std::vector<StatComparison> stats;  // median eigenvalue, trace, trace^2
    int samples = 0;
    double max_abs_z() const;
};

/// Cross-validation of the particle SDE against the exact matrix flow:
/// distributions of {lambda_median, sum lambda, sum lambda^2} compared by
/// mean/variance z-scores.  The matrix flow is the ground truth; the SDE
/// integrator is the method under test.
AgreementReport flow_agreement(const EnsembleSpec& spec, double t, int samples,
                               const DbmOptions& opts = {}, int threads = 0);

struct FlowRigidityPoint {
    double t = 0.0;
    double mean_quad_dev = 0.0;    // E[(1/N) sum (lambda_i - gamma_i(t))^2]
    double median_quad_dev = 0.0;
};

/// Quadratic rigidity along the flow, against classical locations of the
/// time-t law built from the realized potential.
std::vector<FlowRigidityPoint> flow_rigidity_scan(const EnsembleSpec& spec,
                                                  const std::vector<double>& t_list,
                                                  int samples, int threads = 0);

} // namespace rmtlab
