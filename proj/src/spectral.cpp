#include "rmtlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

namespace rmtlab {

namespace {

void check_finite(const MatrixSample& H) {
    bool ok = H.is_real() ? H.real.allFinite() : H.cplx.allFinite();
    if (!ok) throw NonFinite("matrix has non-finite entries");
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    double idx = p * (v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = idx - lo;
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

SpectrumSample eigenvalues(const MatrixSample& H) {
    check_finite(H);
    int N = H.n();
    SpectrumSample s;
    s.spec_digest = H.spec_digest;
    s.seed = H.seed;
    s.lambda.resize(N);
    lapack_int info;
    if (H.is_real()) {
        Eigen::MatrixXd work = H.real;
        info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', N, work.data(), N,
                             s.lambda.data());
    } else {
        Eigen::MatrixXcd work = H.cplx;
        info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L', N,
                             reinterpret_cast<lapack_complex_double*>(work.data()),
                             N, s.lambda.data());
    }
    if (info != 0) throw Error("symmetric eigensolver failed, info = " + std::to_string(info));
    s.trace_error = std::abs(s.lambda.sum() - H.trace());
    double scale = std::max(1.0, H.fro_norm());
    if (s.trace_error > 1e-9 * N * scale)
        throw Error("eigensolver trace identity violated");
    return s;
}

EigenSystem eigensystem(const MatrixSample& H) {
    check_finite(H);
    int N = H.n();
    EigenSystem es;
    es.is_real = H.is_real();
    es.lambda.resize(N);
    lapack_int info;
    if (es.is_real) {
        es.vectors_real = H.real;
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', N, es.vectors_real.data(),
                              N, es.lambda.data());
    } else {
        es.vectors_cplx = H.cplx;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', N,
                              reinterpret_cast<lapack_complex_double*>(es.vectors_cplx.data()),
                              N, es.lambda.data());
    }
    if (info != 0) throw Error("symmetric eigensolver failed, info = " + std::to_string(info));
    return es;
}

double eigenpair_residual(const MatrixSample& H, int count) {
    auto es = eigensystem(H);
    int N = H.n();
    double norm = H.fro_norm();
    if (norm == 0.0) norm = 1.0;
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        int idx = static_cast<int>((k + 0.5) / count * N);
        idx = std::clamp(idx, 0, N - 1);
        double r;
        if (es.is_real) {
            Eigen::VectorXd u = es.vectors_real.col(idx);
            r = (H.real * u - es.lambda(idx) * u).norm();
        } else {
            Eigen::VectorXcd u = es.vectors_cplx.col(idx);
            r = (H.cplx * u - es.lambda(idx) * u).norm();
        }
        worst = std::max(worst, r / norm);
    }
    return worst;
}

Complex empirical_stieltjes(const SpectrumSample& s, ComplexPoint z) {
    if (!(z.eta > 0.0)) throw PreconditionViolated("empirical_stieltjes: eta > 0");
    Complex acc{0.0, 0.0};
    Complex zz = z.z();
    for (int i = 0; i < s.n(); ++i) acc += 1.0 / (s.lambda(i) - zz);
    return acc / double(s.n());
}

std::vector<Complex> green_diag(const EigenSystem& es, ComplexPoint z) {
    if (!(z.eta > 0.0)) throw PreconditionViolated("green_diag: eta > 0");
    int N = int(es.lambda.size());
    Complex zz = z.z();
    std::vector<Complex> inv(N);
    for (int k = 0; k < N; ++k) inv[k] = 1.0 / (es.lambda(k) - zz);
    std::vector<Complex> g(N, Complex{0.0, 0.0});
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < N; ++i) {
            double w = es.is_real ? es.vectors_real(i, k) * es.vectors_real(i, k)
                                  : std::norm(es.vectors_cplx(i, k));
            g[i] += w * inv[k];
        }
    }
    return g;
}

std::vector<Complex> green_diag(const MatrixSample& H, ComplexPoint z) {
    return green_diag(eigensystem(H), z);
}

RigidityReport rigidity_report(const SpectrumSample& s,
                               const std::vector<double>& gammas) {
    int N = s.n();
    if (int(gammas.size()) != N)
        throw ConfigInvalid("rigidity_report: length mismatch");
    RigidityReport rep;
    double n23 = std::pow(double(N), 2.0 / 3.0);
    double sq = 0.0;
    for (int i = 1; i <= N; ++i) {
        double dev = std::abs(s.lambda(i - 1) - gammas[i - 1]);
        double alpha = std::min(i, N - i);  // vacuous weight at i = N
        rep.max_scaled_dev =
            std::max(rep.max_scaled_dev, n23 * std::cbrt(double(alpha)) * dev);
        sq += dev * dev;
    }
    rep.quad_dev = N * sq;
    return rep;
}

LocalLawReport local_law_scan(const EnsembleSpec& spec,
                              const std::vector<double>& E_list,
                              const std::vector<double>& eta_list, int samples,
                              const LocalLawOptions& opts) {
    const int N = spec.N;
    const double theta = spec.coupling();
    // domain guard: E inside [-E0, E0] with E0 from the limiting law when the
    // potential is iid, otherwise from the realized empirical law
    for (double eta : eta_list) {
        if (!(N * eta >= 1.0 && N * eta <= 3.0 * N))
            throw ConfigInvalid("local law scan: need 1 <= N eta <= 3N");
    }
    struct PerSample {
        std::vector<double> devs;  // one per (E, eta) pair
        double entry_dev = 0.0;
    };
    std::vector<PerSample> results(samples);
    const bool deterministic_v =
        std::holds_alternative<std::vector<double>>(spec.potential);

    // For deterministic V all samples share the reference; solve it once.
    std::vector<Complex> shared_ref;
    SolverOptions sopts;
    auto solve_refs = [&](const std::vector<double>& v) {
        auto nuhat = SpectralMeasure::empirical(v);
        MfcSolver solver(nuhat, theta, sopts);
        std::vector<Complex> refs;
        refs.reserve(E_list.size() * eta_list.size());
        for (double E : E_list)
            for (double eta : eta_list) refs.push_back(solver.at({E, eta}).m);
        return refs;
    };
    if (deterministic_v) shared_ref = solve_refs(spec.realize_potential());

    parallel_for(
        samples,
        [&](std::size_t si) {
            auto H = interpolating_matrix(spec, si);
            auto spectrum = eigenvalues(H);
            auto v = spec.realize_potential(si);
            std::vector<Complex> refs =
                deterministic_v ? shared_ref : solve_refs(v);
            auto& out = results[si];
            std::size_t k = 0;
            for (double E : E_list) {
                for (double eta : eta_list) {
                    Complex mN = empirical_stieltjes(spectrum, {E, eta});
                    out.devs.push_back(N * eta * std::abs(mN - refs[k]));
                    ++k;
                }
            }
            if (opts.entrywise) {
                auto es = eigensystem(H);
                auto g = green_diag(es, opts.entrywise_z);
                auto nuhat = SpectralMeasure::empirical(v);
                MfcSolver solver(nuhat, theta, sopts);
                Complex mhat = solver.at(opts.entrywise_z).m;
                double neta = N * opts.entrywise_z.eta;
                double rhs = std::sqrt(std::max(mhat.imag(), 0.0) / neta) + 1.0 / neta;
                Complex zz = opts.entrywise_z.z();
                double worst = 0.0;
                for (int i = 0; i < N; ++i) {
                    Complex ghat = 1.0 / (theta * v[i] - zz - mhat);
                    worst = std::max(worst, std::abs(g[i] - ghat));
                }
                out.entry_dev = worst / rhs;
            }
        },
        opts.threads);

    LocalLawReport rep;
    rep.eta_floor_used = *std::min_element(eta_list.begin(), eta_list.end());
    std::size_t k = 0;
    for (double E : E_list) {
        for (double eta : eta_list) {
            std::vector<double> devs(samples);
            for (int s = 0; s < samples; ++s) devs[s] = results[s].devs[k];
            LocalLawPoint pt;
            pt.E = E;
            pt.eta = eta;
            pt.n_eta = N * eta;
            pt.median_dev = percentile(devs, 0.5);
            pt.p90_dev = percentile(devs, 0.9);
            pt.samples = samples;
            rep.points.push_back(pt);
            ++k;
        }
    }
    if (opts.entrywise) {
        std::vector<double> ed(samples);
        for (int s = 0; s < samples; ++s) ed[s] = results[s].entry_dev;
        rep.entrywise_median = percentile(ed, 0.5);
        rep.entrywise_p90 = percentile(ed, 0.9);
        rep.has_entrywise = true;
    }
    return rep;
}

} // namespace rmtlab
