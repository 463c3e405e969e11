#include "rmtlab/ensembles.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace rmtlab {

// --------------------------------------------------------------- MatchedLaw

double MatchedLaw::moment(int k) const {
    if (k < 1 || k > 8) throw PreconditionViolated("moment order in [1,8]");
    // moments of the discrete part
    auto atom_moment = [&](int p) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += atom_p[i] * std::pow(atom_x[i], p);
        return acc;
    };
    // standard gaussian moments 0,1,0,3,0,15,0,105
    static const double gm[9] = {1, 0, 1, 0, 3, 0, 15, 0, 105};
    double a = std::sqrt(1.0 - gamma), b = std::sqrt(gamma);
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        double binom = 1.0;
        for (int i = 0; i < j; ++i) binom = binom * (k - i) / (i + 1);
        acc += binom * std::pow(a, k - j) * atom_moment(k - j) * std::pow(b, j) * gm[j];
    }
    return acc;
}

double MatchedLaw::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    double r = u(rng);
    double x = r < atom_p[0]             ? atom_x[0]
               : r < atom_p[0] + atom_p[1] ? atom_x[1]
                                           : atom_x[2];
    return std::sqrt(1.0 - gamma) * x + std::sqrt(gamma) * g(rng);
}

MatchedLaw matched_entry_law(double m3, double m4, double gamma, double c1_cap) {
    if (m4 - 1.0 - 1.0 < 0.0)
        throw PreconditionViolated("matched law: m4 - m2^2 - 1 >= 0 fails (m4 < 2)");
    if (m4 > c1_cap)
        throw PreconditionViolated("matched law: m4 exceeds the cap");
    if (!(gamma > 0.0 && gamma <= 0.5))
        throw PreconditionViolated("matched law: gamma in (0, 1/2]");
    MatchedLaw law;
    law.gamma = gamma;
    law.m3_target = m3;
    law.m4_target = m4;
    // required moments of the discrete part so that the mixture matches
    double mu3 = m3 / std::pow(1.0 - gamma, 1.5);
    double mu4 = (m4 - 6.0 * gamma * (1.0 - gamma) - 3.0 * gamma * gamma) /
                 ((1.0 - gamma) * (1.0 - gamma));
    // a (0,1,mu3,mu4) law on three atoms exists iff mu4 >= mu3^2 + 1; clamp to
    // the two-atom boundary otherwise (fourth moment then misses by O(gamma))
    if (mu4 < mu3 * mu3 + 1.0) mu4 = mu3 * mu3 + 1.0;
    // atoms at -b < 0 <= c with p b = q c: closed-form solution of the moment
    // system (sum S = b + c, product P = b c)
    double S = std::sqrt(std::max(4.0 * mu4 - 3.0 * mu3 * mu3, 0.0));
    double P = mu4 - mu3 * mu3;
    double disc = std::sqrt(std::max(S * S - 4.0 * P, 0.0));
    double b = 0.5 * (S - disc);  // c - b = mu3
    double c = 0.5 * (S + disc);
    if (mu3 < 0) std::swap(b, c);
    double p = 1.0 / (b * (b + c));
    double q = 1.0 / (c * (b + c));
    law.atom_x = {-b, 0.0, c};
    law.atom_p = {p, std::max(1.0 - p - q, 0.0), q};
    return law;
}

// ----------------------------------------------------------------- EntryLaw

double EntryLaw::sample_standard(std::mt19937_64& rng) const {
    switch (kind) {
        case Kind::Gaussian: {
            std::normal_distribution<double> g(0.0, 1.0);
            return g(rng);
        }
        case Kind::Rademacher: {
            return (rng() & 1ull) ? 1.0 : -1.0;
        }
        case Kind::Uniform: {
            std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
            return u(rng);
        }
        case Kind::Laplace: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double r = u(rng);
            double scale = 1.0 / std::sqrt(2.0);
            return r < 0.5 ? scale * std::log(2.0 * r) : -scale * std::log(2.0 * (1.0 - r));
        }
        case Kind::Matched:
            return matched.sample(rng);
    }
    return 0.0;
}

std::string EntryLaw::name() const {
    switch (kind) {
        case Kind::Gaussian: return "gaussian";
        case Kind::Rademacher: return "rademacher";
        case Kind::Uniform: return "uniform";
        case Kind::Laplace: return "laplace";
        case Kind::Matched: return "matched";
    }
    return "?";
}

EntryLaw EntryLaw::parse(const std::string& name) {
    EntryLaw law;
    if (name == "gaussian") law.kind = Kind::Gaussian;
    else if (name == "rademacher") law.kind = Kind::Rademacher;
    else if (name == "uniform") law.kind = Kind::Uniform;
    else if (name == "laplace") law.kind = Kind::Laplace;
    else if (name == "matched") law.kind = Kind::Matched;
    else throw ConfigInvalid("unknown entry law '" + name + "'");
    return law;
}

std::array<double, 3> tail_probabilities(const EntryLaw& law, int draws,
                                         std::uint64_t seed) {
    auto rng = make_rng(derive_seed(seed, "tail-probe"));
    std::array<double, 3> thresholds{3.0, 5.0, 8.0};
    std::array<int, 3> counts{0, 0, 0};
    for (int i = 0; i < draws; ++i) {
        double x = std::abs(law.sample_standard(rng));
        for (int k = 0; k < 3; ++k)
            if (x > thresholds[k]) ++counts[k];
    }
    return {double(counts[0]) / draws, double(counts[1]) / draws,
            double(counts[2]) / draws};
}

// ------------------------------------------------------------- EnsembleSpec

std::vector<double> EnsembleSpec::realize_potential(std::uint64_t sample_index) const {
    if (std::holds_alternative<std::vector<double>>(potential)) {
        const auto& v = std::get<std::vector<double>>(potential);
        if (!v.empty() && int(v.size()) != N)
            throw ConfigInvalid("potential length != N");
        if (v.empty()) return std::vector<double>(N, 0.0);
        return v;
    }
    const auto& iid = std::get<IidPotential>(potential);
    return sample_iid_potential(iid.nu, N, derive_seed(iid.seed, "sample", sample_index));
}

nlohmann::json EnsembleSpec::to_json() const {
    nlohmann::json j{{"beta", beta()},
                     {"N", N},
                     {"entry_law", entry_law.name()},
                     {"t0", t0},
                     {"t", t},
                     {"seed", seed}};
    if (entry_law.kind == EntryLaw::Kind::Matched)
        j["matched"] = {{"m3", entry_law.matched.m3_target},
                        {"m4", entry_law.matched.m4_target},
                        {"gamma", entry_law.matched.gamma}};
    if (std::holds_alternative<IidPotential>(potential)) {
        const auto& iid = std::get<IidPotential>(potential);
        j["potential"] = {{"type", "iid"}, {"measure", iid.nu.to_json()},
                          {"seed", iid.seed}};
    } else {
        j["potential"] = {{"type", "deterministic"},
                          {"size", std::get<std::vector<double>>(potential).size()}};
    }
    return j;
}

std::uint64_t EnsembleSpec::digest() const {
    std::uint64_t h = fnv1a(to_json().dump());
    if (std::holds_alternative<std::vector<double>>(potential))
        for (double v : std::get<std::vector<double>>(potential)) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            h = splitmix64(h ^ bits);
        }
    return h;
}

// ------------------------------------------------------------ matrix sampling

MatrixSample sample_wigner(BetaClass beta, int N, const EntryLaw& law,
                           std::uint64_t seed) {
    if (N < 1 || N > kMaxMatrixSize)
        throw ConfigInvalid("matrix size outside [1, " +
                            std::to_string(kMaxMatrixSize) + "]");
    MatrixSample out;
    out.beta = beta;
    out.seed = seed;
    auto rng = make_rng(derive_seed(seed, "wigner"));
    double inv_sqrt_n = 1.0 / std::sqrt(double(N));
    if (beta == BetaClass::RealSymmetric) {
        out.real.setZero(N, N);
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i <= j; ++i) {
                double x = law.sample_standard(rng) * inv_sqrt_n;
                if (i == j) x *= std::sqrt(2.0);
                out.real(i, j) = x;
                out.real(j, i) = x;
            }
        }
    } else {
        out.cplx.setZero(N, N);
        double half = 1.0 / std::sqrt(2.0);
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i <= j; ++i) {
                if (i == j) {
                    out.cplx(i, i) = law.sample_standard(rng) * inv_sqrt_n;
                } else {
                    Complex x{law.sample_standard(rng) * half,
                              law.sample_standard(rng) * half};
                    x *= inv_sqrt_n;
                    out.cplx(i, j) = x;
                    out.cplx(j, i) = std::conj(x);
                }
            }
        }
    }
    return out;
}

void assemble_deformed(double theta, const std::vector<double>& v, MatrixSample& W) {
    int N = W.n();
    if (int(v.size()) != N) throw ConfigInvalid("assemble: potential length != N");
    if (W.is_real())
        for (int i = 0; i < N; ++i) W.real(i, i) += theta * v[i];
    else
        for (int i = 0; i < N; ++i) W.cplx(i, i) += theta * v[i];
}

MatrixSample interpolating_matrix(const EnsembleSpec& spec,
                                  std::uint64_t sample_index) {
    if (spec.t < 0.0 || spec.t0 < 0.0)
        throw PreconditionViolated("interpolating matrix: t, t0 >= 0");
    auto W = sample_wigner(spec.beta_class, spec.N, spec.entry_law,
                           derive_seed(spec.seed, "wigner", sample_index));
    double wt = std::exp(-spec.t / 2.0);
    double gt = std::sqrt(1.0 - std::exp(-spec.t));
    if (spec.beta_class == BetaClass::RealSymmetric)
        W.real *= wt;
    else
        W.cplx *= wt;
    if (gt > 0.0) {
        EntryLaw gaussian{};
        auto Wp = sample_wigner(spec.beta_class, spec.N, gaussian,
                                derive_seed(spec.seed, "ou-refresh", sample_index));
        if (spec.beta_class == BetaClass::RealSymmetric)
            W.real += gt * Wp.real;
        else
            W.cplx += gt * Wp.cplx;
    }
    auto v = spec.realize_potential(sample_index);
    assemble_deformed(spec.coupling(), v, W);
    W.spec_digest = spec.digest();
    W.seed = derive_seed(spec.seed, "sample", sample_index);
    W.t = spec.t;
    return W;
}

double MatrixSample::trace() const {
    if (is_real()) return real.trace();
    return cplx.trace().real();
}

double MatrixSample::fro_norm() const {
    return is_real() ? real.norm() : cplx.norm();
}

void dump_matrix(const MatrixSample& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string());
    std::int64_t header[2] = {m.n(), static_cast<std::int64_t>(m.beta)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    if (m.is_real()) {
        out.write(reinterpret_cast<const char*>(m.real.data()),
                  sizeof(double) * m.real.size());
    } else {
        out.write(reinterpret_cast<const char*>(m.cplx.data()),
                  sizeof(double) * 2 * m.cplx.size());
    }
}

} // namespace rmtlab
