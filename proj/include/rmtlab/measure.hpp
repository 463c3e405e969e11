#pragma once

#include "rmtlab/common.hpp"

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rmtlab {

enum class MeasureKind { Atoms, Density, Empirical };

/// Centered compactly supported probability measure on the real line.
///
/// Three representations share one storage scheme: a list of point locations with
/// point masses.  For the gridded-density kind the mass at a node is
/// density * quadrature weight and the raw density values are kept alongside.
/// Invariants enforced at construction: total mass 1 (1e-12), support
/// containment, first moment zero (1e-10).
class SpectralMeasure {
  public:
    static SpectralMeasure atoms(std::vector<std::pair<double, double>> atom_list);
    static SpectralMeasure density(std::vector<double> nodes,
                                   std::vector<double> values,
                                   std::vector<double> quad_weights,
                                   double lo, double hi);
    static SpectralMeasure empirical(std::vector<double> sorted_sample);

    // measure catalog used throughout the experiments
    static SpectralMeasure point_mass();                     // delta_0
    static SpectralMeasure two_point(double a);              // (d_{-a} + d_{a})/2
    static SpectralMeasure uniform(double lo, double hi, int n = 512);
    /// Centered Jacobi-type density ~ (1+v)^a (1-v)^b on [-1,1], discretized
    /// on a trigonometric grid and normalized to unit mass exactly.
    static SpectralMeasure jacobi(double a, double b, int n = 512);

    MeasureKind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mean() const;

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& masses() const { return masses_; }
    /// Raw density values (Density kind only; empty otherwise).
    const std::vector<double>& density_values() const { return values_; }

    Complex stieltjes(Complex z) const;
    /// H0(x) = integral of d nu(v) / (v-x)^2.
    double second_inverse_moment(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;

    std::uint64_t digest() const;
    nlohmann::json to_json() const;
    static SpectralMeasure from_json(const nlohmann::json& j);

  private:
    SpectralMeasure() = default;
    void validate() const;
    void build_cdf();

    MeasureKind kind_ = MeasureKind::Atoms;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> points_;
    std::vector<double> masses_;
    std::vector<double> values_;  // density kind only
    std::vector<double> cum_;     // cumulative masses
    nlohmann::json meta_;         // construction parameters, for round trips
};

/// m_nu(z) pointwise; requires eta > 0.
Complex stieltjes_of_measure(const SpectralMeasure& nu, ComplexPoint z);

struct SupportConditionReport {
    double min_value = 0.0;     // +inf when the quadrature detects divergence
    bool divergent = false;
    double argmin = 0.0;
    bool passes(double varpi) const { return divergent || min_value >= 1.0 + varpi; }
};

/// Grid-minimizes H0(x) = int d nu / (v-x)^2 over the support hull I_nu.
/// Points within one grid cell of an atom, or inside a region of strictly
/// positive density, count as divergent (the integral genuinely blows up
/// there); divergence is a passing outcome.
SupportConditionReport check_support_condition(const SpectralMeasure& nu,
                                               int grid_size = 256);

/// v_i = quantile((i - 1/2)/N); the deterministic potential whose empirical
/// measure tracks nu.
std::vector<double> deterministic_quantile_potential(const SpectralMeasure& nu, int N);

/// N iid draws from nu, sorted ascending; reproducible from seed.
std::vector<double> sample_iid_potential(const SpectralMeasure& nu, int N,
                                         std::uint64_t seed);

/// max_z |m_A(z) - m_B(z)| over a compact test set away from the supports
/// (a horizontal segment at Im z = 1 plus real segments at distance >= 1).
double stieltjes_distance(const SpectralMeasure& a, const SpectralMeasure& b);

} // namespace rmtlab
