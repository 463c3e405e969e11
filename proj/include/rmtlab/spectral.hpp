#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/free_convolution.hpp"

#include <Eigen/Dense>

namespace rmtlab {

struct SpectrumSample {
    Eigen::VectorXd lambda;  // ascending
    std::uint64_t spec_digest = 0;
    std::uint64_t seed = 0;
    double trace_error = 0.0;  // |sum lambda - Tr H|, a backward-error proxy

    int n() const { return int(lambda.size()); }
};

/// Full spectrum, ascending, via a backward-stable dense symmetric/Hermitian
/// solver (LAPACK tridiagonalization + implicit-shift QR).  The trace
/// identity is checked on every solve.
SpectrumSample eigenvalues(const MatrixSample& H);

struct EigenSystem {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vectors_real;   // real symmetric case
    Eigen::MatrixXcd vectors_cplx;  // complex Hermitian case
    bool is_real = true;
};

/// Spectrum plus eigenvectors (divide and conquer).
EigenSystem eigensystem(const MatrixSample& H);

/// max_k ||H u_k - lambda_k u_k|| / ||H|| over `count` evenly spread
/// eigenpairs; the solver contract keeps this at the 1e-10 scale.
double eigenpair_residual(const MatrixSample& H, int count = 5);

/// (1/N) sum 1/(lambda_i - z)
Complex empirical_stieltjes(const SpectrumSample& s, ComplexPoint z);

/// Diagonal of (H - z)^{-1} through the eigendecomposition; one
/// decomposition serves every z.
std::vector<Complex> green_diag(const EigenSystem& es, ComplexPoint z);
std::vector<Complex> green_diag(const MatrixSample& H, ComplexPoint z);

struct RigidityReport {
    double max_scaled_dev = 0.0;  // max_i N^{2/3} alphahat_i^{1/3} |lambda_i - gamma_i|
    double quad_dev = 0.0;        // N * sum (lambda_i - gamma_i)^2
};

RigidityReport rigidity_report(const SpectrumSample& s,
                               const std::vector<double>& gammas);

struct LocalLawPoint {
    double E = 0.0, eta = 0.0, n_eta = 0.0;
    double median_dev = 0.0, p90_dev = 0.0;  // of (N eta) |m_N - mhat_fc|
    int samples = 0;
};

struct LocalLawReport {
    std::vector<LocalLawPoint> points;
    // Entrywise resolvent deviation max_i |G_ii - ghat_i| normalized by
    // sqrt(Im mhat/(N eta)) + 1/(N eta); per-sample maxima summarized.
    double entrywise_median = 0.0, entrywise_p90 = 0.0;
    bool has_entrywise = false;
    double eta_floor_used = 0.0;  // practical desk-scale floor, not the
                                  // polylog-constrained theoretical one
};

struct LocalLawOptions {
    bool entrywise = false;
    ComplexPoint entrywise_z{0.0, 0.3};
    int threads = 0;
};

/// Monte Carlo scan of (N eta)|m_N - mhat_fc| over an (E, eta) grid.  The
/// reference mhat_fc is always built from the realized potential entries of
/// each sample (conditioning on V), never from the limiting measure.
LocalLawReport local_law_scan(const EnsembleSpec& spec,
                              const std::vector<double>& E_list,
                              const std::vector<double>& eta_list, int samples,
                              const LocalLawOptions& opts = {});

} // namespace rmtlab
