#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/free_convolution.hpp"
#include "rmtlab/spectral.hpp"

#include <functional>
#include <span>
#include <vector>

namespace rmtlab {

/// Bulk index window [lo, hi] (0-based, inclusive) with unfolding data
/// gamma_j (classical locations) and rho_j (density at gamma_j).
struct UnfoldingTable {
    int lo = 0, hi = 0;
    std::vector<double> gamma;  // size N
    std::vector<double> rho;    // size N; only [lo, hi] entries are used
};

/// Precomputes classical locations and densities for a bulk window.
/// alpha is the edge-exclusion fraction; J must sit inside
/// [alpha N, (1-alpha) N).
UnfoldingTable make_unfolding_table(const FreeConvolutionLaw& law, int N,
                                    int j_lo, int j_hi, double alpha = 1.0 / 6.0);

struct GapStatistics {
    std::vector<double> gaps;  // N rho_j (lambda_{j+m} - lambda_j)
    int j_lo = 0, j_hi = 0;
    double alpha = 1.0 / 6.0;
    std::vector<int> m_offsets;
};

/// Normalized gaps of one spectrum sample; appendable across samples.
GapStatistics unfold_gaps(const SpectrumSample& s, const UnfoldingTable& table,
                          const std::vector<int>& m_offsets = {1});
void append_gaps(GapStatistics& acc, const SpectrumSample& s,
                 const UnfoldingTable& table);

/// 1 - (sin(pi r)/(pi r))^2, the determinantal pair correlation; 0 at r = 0.
double sine_kernel_pair_correlation(double r);

struct CorrelationEstimate {
    int order = 2;
    double E = 0.0, b = 0.0;
    std::vector<double> r_centers;
    std::vector<double> values;
    std::vector<double> stderr_values;
    int samples = 0;
    double one_point = 0.0;     // windowed unfolded density, should be ~1
    double one_point_se = 0.0;
};

/// Window-averaged rescaled two-point correlation at scale 1/N: histogram of
/// unfolded pair separations with the reference member inside [E-b, E+b],
/// normalized so that independent (Poisson) points give 1.
CorrelationEstimate pair_correlation_estimate(
    const std::vector<SpectrumSample>& samples, const FreeConvolutionLaw& law,
    double E, double b, const std::vector<double>& r_edges);

/// Same estimator on raw point sets (test hook for synthetic input in
/// already-unfolded coordinates, density 1).
CorrelationEstimate pair_correlation_points(
    const std::vector<std::vector<double>>& point_sets, double window_lo,
    double window_hi, const std::vector<double>& r_edges);

struct DistributionDistance {
    double ks = 0.0;
    double wasserstein1 = 0.0;
    std::size_t n_a = 0, n_b = 0;
};

/// Two-sample Kolmogorov-Smirnov and 1-Wasserstein distances on normalized
/// gaps; both inputs need >= 1000 gaps.
DistributionDistance gap_distribution_distance(const GapStatistics& a,
                                               const GapStatistics& b);

/// (1/|J|) sum_j O(N rho_j (x_{j+m_1} - x_j), ...), averaged over samples;
/// returns the Monte Carlo mean and standard error.
struct ObservableAverage {
    double mean = 0.0, se = 0.0;
    int samples = 0;
};

using NParticleObservable = std::function<double(std::span<const double>)>;

ObservableAverage observable_average(const std::vector<SpectrumSample>& samples,
                                     const UnfoldingTable& table,
                                     const NParticleObservable& obs,
                                     const std::vector<int>& m_offsets);

} // namespace rmtlab
