#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/measure.hpp"

#include <array>
#include <filesystem>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

namespace rmtlab {

enum class BetaClass : int { RealSymmetric = 1, ComplexHermitian = 2 };

/// Gaussian-divisible law zeta' = sqrt(1-gamma) zeta_g + sqrt(gamma) zeta_G
/// with zeta_g a three-atom distribution solving the moment system; first
/// three moments exact, fourth within O(gamma) of the target.
struct MatchedLaw {
    std::array<double, 3> atom_x{0.0, 0.0, 0.0};
    std::array<double, 3> atom_p{0.0, 0.0, 1.0};
    double gamma = 0.1;
    double m3_target = 0.0, m4_target = 3.0;

    double moment(int k) const;  // exact mixture moments, k in [1,8]
    double sample(std::mt19937_64& rng) const;
};

/// Throws PreconditionViolated when m4 < 2 (no Gaussian-divisible match
/// exists), or when m4 exceeds c1_cap, or gamma is out of range.
MatchedLaw matched_entry_law(double m3, double m4, double gamma,
                             double c1_cap = 20.0);

struct EntryLaw {
    enum class Kind { Gaussian, Rademacher, Uniform, Laplace, Matched };
    Kind kind = Kind::Gaussian;
    MatchedLaw matched{};

    /// centered, unit-variance draw
    double sample_standard(std::mt19937_64& rng) const;
    std::string name() const;
    static EntryLaw parse(const std::string& name);
};

/// Tail diagnostic P(sqrt(N)|w| > x) at x in {3, 5, 8}, measured by direct
/// sampling of the standardized law.
std::array<double, 3> tail_probabilities(const EntryLaw& law, int draws,
                                         std::uint64_t seed);

struct IidPotential {
    SpectralMeasure nu;
    std::uint64_t seed = 0;
};

/// deterministic entries, or iid draws from nu (fresh per sample index)
using PotentialSpec = std::variant<std::vector<double>, IidPotential>;

struct EnsembleSpec {
    BetaClass beta_class = BetaClass::RealSymmetric;
    int N = 100;
    EntryLaw entry_law{};
    PotentialSpec potential = std::vector<double>{};
    double t0 = 0.0;
    double t = 0.0;
    std::uint64_t seed = 0;

    int beta() const { return static_cast<int>(beta_class); }
    /// e^{-(t-t0)/2}, the effective coupling of the potential
    double coupling() const { return std::exp(-(t - t0) / 2.0); }
    std::vector<double> realize_potential(std::uint64_t sample_index = 0) const;
    nlohmann::json to_json() const;
    std::uint64_t digest() const;
};

struct MatrixSample {
    BetaClass beta = BetaClass::RealSymmetric;
    Eigen::MatrixXd real;
    Eigen::MatrixXcd cplx;
    std::uint64_t spec_digest = 0;
    std::uint64_t seed = 0;
    double t = 0.0;

    bool is_real() const { return beta == BetaClass::RealSymmetric; }
    int n() const { return is_real() ? int(real.rows()) : int(cplx.rows()); }
    double trace() const;
    double fro_norm() const;
};

/// Wigner matrix with the standard normalization: off-diagonal variance 1/N,
/// diagonal variance 2/N (real symmetric) or 1/N (complex Hermitian, with
/// independent real/imaginary parts so E w_ij^2 = 0).
MatrixSample sample_wigner(BetaClass beta, int N, const EntryLaw& law,
                           std::uint64_t seed);

/// H[i][i] += theta v_i; off-diagonals untouched.
void assemble_deformed(double theta, const std::vector<double>& v, MatrixSample& W);

/// e^{-(t-t0)/2} V + e^{-t/2} W + (1 - e^{-t})^{1/2} W', W' Gaussian.
/// The combined Wigner part keeps off-diagonal variance exactly 1/N.
MatrixSample interpolating_matrix(const EnsembleSpec& spec,
                                  std::uint64_t sample_index = 0);

/// Debug dump: 16-byte header {int64 N, int64 beta} then little-endian f64
/// entries (column-major; complex interleaved re,im).
void dump_matrix(const MatrixSample& m, const std::filesystem::path& path);

constexpr int kMaxMatrixSize = 4096;

} // namespace rmtlab
