#include "rmtlab/acceptance.hpp"

#include "rmtlab/dbm.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/free_convolution.hpp"
#include "rmtlab/local_stats.hpp"
#include "rmtlab/measure.hpp"
#include "rmtlab/reference_beta.hpp"
#include "rmtlab/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace rmtlab::acceptance {

namespace {

const double kPi = std::acos(-1.0);

struct Outcome {
    bool pass = true;
    std::ostringstream details;
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        details << (ok ? "[ok] " : "[FAIL] ") << what << "; ";
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// -------------------------------------------------------------- criterion 1

Outcome semicircle_recovery(int) {
    Outcome o;
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    double dLp = std::abs(law.endpoints().L_plus - 2.0);
    double dLm = std::abs(law.endpoints().L_minus + 2.0);
    double drho = std::abs(law.density_at(0.0) - 1.0 / kPi);
    o.require(dLp <= 1e-10 && dLm <= 1e-10,
              "endpoints +/-2 within 1e-10 (dev " + num(std::max(dLp, dLm)) + ")");
    o.require(drho <= 1e-8, "rho(0) = 1/pi within 1e-8 (dev " + num(drho) + ")");
    return o;
}

// -------------------------------------------------------------- criterion 2

Outcome fixed_point_invariants(int) {
    Outcome o;
    std::vector<std::pair<std::string, SpectralMeasure>> measures = {
        {"point_mass", SpectralMeasure::point_mass()},
        {"two_point(0.5)", SpectralMeasure::two_point(0.5)},
        {"jacobi(1/2,1/2)", SpectralMeasure::jacobi(0.5, 0.5, 256)}};
    for (auto& [name, nu] : measures) {
        double worst_sum = 0.0, worst_mod = 0.0, worst_im = 0.0;
        int points = 0;
        for (int ie = 0; ie < 20; ++ie) {
            double E = -2.5 + 5.0 * ie / 19.0;
            for (int ih = 0; ih < 10; ++ih) {
                double eta = 1e-3 * std::pow(2000.0, ih / 9.0);
                auto sol = solve_mfc(nu, 1.0, {E, eta});
                worst_sum = std::max(worst_sum,
                                     sum_rule_residual(nu, 1.0, {E, eta}, sol.m));
                worst_mod = std::max(worst_mod, std::abs(sol.m) - 1.0);
                worst_im = std::min(worst_im, sol.m.imag());
                ++points;
            }
        }
        o.require(worst_sum <= 1e-10,
                  name + ": sum rule <= 1e-10 over " + std::to_string(points) +
                      " grid points (worst " + num(worst_sum) + ")");
        o.require(worst_mod <= 1e-10, name + ": |m| <= 1 + 1e-10");
        o.require(worst_im >= 0.0, name + ": Im m >= 0");
    }
    return o;
}

// -------------------------------------------------------------- criterion 3

Outcome edge_exponents(int) {
    Outcome o;
    std::vector<std::pair<std::string, SpectralMeasure>> measures = {
        {"two_point(0.5)", SpectralMeasure::two_point(0.5)},
        {"jacobi(1/2,1/2)", SpectralMeasure::jacobi(0.5, 0.5, 512)}};
    for (auto& [name, nu] : measures) {
        auto law = FreeConvolutionLaw::solve(nu, 1.0);
        for (auto side : {EdgeSide::Lower, EdgeSide::Upper}) {
            double ex = edge_exponent(law, side);
            o.require(ex >= 0.45 && ex <= 0.55,
                      name + (side == EdgeSide::Lower ? " lower" : " upper") +
                          " edge exponent in [0.45, 0.55] (got " + num(ex) + ")");
        }
    }
    return o;
}

// -------------------------------------------------------------- criterion 4

Outcome burger_consistency(int) {
    Outcome o;
    auto nu = SpectralMeasure::two_point(0.5);
    std::vector<std::pair<double, ComplexPoint>> pts = {
        {0.2, {0.2, 0.5}},  {0.2, {-0.6, 0.8}}, {0.4, {0.0, 1.0}},
        {0.5, {0.9, 0.3}},  {0.5, {0.2, 0.5}},  {0.7, {-1.1, 0.6}},
        {0.8, {0.4, 0.05}}, {1.0, {0.0, 0.5}},  {1.2, {1.3, 0.4}},
        {1.5, {-0.3, 0.7}}};
    double worst = 0.0, worst_ratio_lo = 1e9, worst_ratio_hi = 0.0;
    for (auto& [t, z] : pts) {
        double r1 = burger_residual(nu, 0.0, t, z, 1e-3);
        double r2 = burger_residual(nu, 0.0, t, z, 5e-4);
        worst = std::max(worst, r1);
        double ratio = r1 / std::max(r2, 1e-16);
        worst_ratio_lo = std::min(worst_ratio_lo, ratio);
        worst_ratio_hi = std::max(worst_ratio_hi, ratio);
    }
    o.require(worst <= 1e-4,
              "residual <= 1e-4 at 10 (t,z) points, h = 1e-3 (worst " + num(worst) + ")");
    o.require(worst_ratio_lo >= 2.5,
              "halving h shrinks the residual >= 2.5x (worst ratio " +
                  num(worst_ratio_lo) + ")");
    return o;
}

// -------------------------------------------------------------- criterion 5

Outcome eom_vs_quantile(int) {
    Outcome o;
    int N = 100;
    auto nu = SpectralMeasure::two_point(0.5);
    auto traj = eom_propagate(nu, 0.0, {0.0, 0.25, 0.5, 0.75, 1.0}, N);
    auto law = law_at_time(nu, 0.0, 1.0);
    auto want = law.classical_locations(N);
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
        worst = std::max(worst, std::abs(traj.back().x[i] - want[i]));
    o.require(worst <= 1e-4,
              "N = 100 equation-of-motion vs quantile recomputation at t = 1: "
              "max dev " + num(worst) + " <= 1e-4");
    return o;
}

// -------------------------------------------------------------- criterion 6

Outcome loop_equation(int) {
    Outcome o;
    {
        auto pm = PotentialModel::build(SpectralMeasure::point_mass(), 0.0, 0.0);
        double worst = 0.0;
        for (double E = -0.8; E <= 0.81; E += 0.2)
            worst = std::max(worst,
                             loop_equation_residual(pm, pm.law(), {E, 0.5}));
        o.require(worst <= 1e-6,
                  "flat-potential residual <= 1e-6 on the Im z = 0.5 grid (worst " +
                      num(worst) + ")");
    }
    {
        auto pm = PotentialModel::build(SpectralMeasure::two_point(0.5), 0.0, 0.0);
        double worst = 0.0;
        for (double E = -0.8; E <= 0.81; E += 0.2)
            worst = std::max(worst,
                             loop_equation_residual(pm, pm.law(), {E, 0.5}));
        o.require(worst <= 1e-3,
                  "built-potential residual <= 1e-3 on the Im z = 0.5 grid (worst " +
                      num(worst) + ")");
    }
    return o;
}

// -------------------------------------------------------------- criterion 7

Outcome local_law_shape(int threads) {
    Outcome o;
    int N = 1000;
    auto nu = SpectralMeasure::two_point(0.5);
    EnsembleSpec spec;
    spec.beta_class = BetaClass::RealSymmetric;
    spec.N = N;
    spec.potential = deterministic_quantile_potential(nu, N);
    spec.seed = 20250101;
    LocalLawOptions opts;
    opts.threads = threads;
    auto rep = local_law_scan(spec, {0.0}, {10.0 / N, 100.0 / N, 1000.0 / N}, 100,
                              opts);
    double cap = 30.0 * std::log(double(N));
    double lo = 1e300, hi = 0.0;
    for (auto& pt : rep.points) {
        lo = std::min(lo, pt.median_dev);
        hi = std::max(hi, pt.median_dev);
        o.require(pt.median_dev <= cap,
                  "median (N eta)|m_N - mhat| at eta = " + num(pt.eta) + " is " +
                      num(pt.median_dev) + " <= " + num(cap));
    }
    o.require(hi / std::max(lo, 1e-12) < 2.0,
              "medians vary by < 2x across the eta range (ratio " +
                  num(hi / lo) + ")");
    return o;
}

// -------------------------------------------------------------- criterion 8

Outcome rigidity_scaling(int threads) {
    Outcome o;
    auto nu = SpectralMeasure::two_point(0.5);
    // The median bound runs at the stated 20 samples; the scaling fit uses a
    // larger farm (still far inside the runtime budget) since the exponent
    // estimator carries ~0.1 statistical error at 20 samples.
    auto run = [&](int N, int samples) {
        auto v = deterministic_quantile_potential(nu, N);
        auto law = FreeConvolutionLaw::solve(SpectralMeasure::empirical(v), 1.0);
        auto gammas = law.classical_locations(N);
        std::vector<double> quad(samples), norm_quad(samples);
        parallel_for(
            samples,
            [&](std::size_t r) {
                EnsembleSpec spec;
                spec.N = N;
                spec.potential = v;
                spec.seed = 555000 + N;
                auto s = eigenvalues(interpolating_matrix(spec, r));
                auto rep = rigidity_report(s, gammas);
                quad[r] = rep.quad_dev;            // N sum (lambda - gamma)^2
                norm_quad[r] = rep.quad_dev / (double(N) * N);  // (1/N) sum
            },
            threads);
        std::sort(quad.begin(), quad.end());
        double mean_norm = 0.0;
        for (double q : norm_quad) mean_norm += q;
        return std::pair{quad[samples / 2], mean_norm / samples};
    };
    auto [median1000, mean_small] = run(1000, 20);
    (void)mean_small;
    double logN = std::log(1000.0);
    double cap = 10.0 * std::pow(logN, 4);
    o.require(median1000 <= cap, "median N sum(lambda-gamma)^2 at N = 1000 over "
                                 "20 samples is " + num(median1000) + " <= " + num(cap));
    auto [med1000b, mean1000] = run(1000, 200);
    auto [med500, mean500] = run(500, 200);
    (void)med1000b;
    (void)med500;
    double exponent = std::log(mean1000 / mean500) / std::log(2.0);
    o.require(std::abs(exponent + 2.0) <= 0.3,
              "fitted exponent of the normalized quadratic deviation between "
              "N = 500 and 1000 (200 samples each) is " + num(exponent) +
                  ", within -2 +/- 0.3");
    return o;
}

// -------------------------------------------------------------- criterion 9

Outcome dbm_cross_validation(int threads) {
    Outcome o;
    auto nu = SpectralMeasure::two_point(0.5);
    EnsembleSpec spec;
    spec.N = 50;
    spec.beta_class = BetaClass::RealSymmetric;
    spec.potential = deterministic_quantile_potential(nu, 50);
    spec.seed = 90909;
    DbmOptions opts;
    opts.dt_max = 1e-3;
    auto rep = flow_agreement(spec, 0.5, 2000, opts, threads);
    for (auto& s : rep.stats)
        o.require(std::abs(s.z_mean) <= 4.0 && std::abs(s.z_var) <= 4.0,
                  s.name + ": z_mean " + num(s.z_mean) + ", z_var " +
                      num(s.z_var) + " within +/-4");
    return o;
}

// ------------------------------------------------------------- criterion 10

Outcome beta_sampler_law(int threads) {
    Outcome o;
    int N = 8;
    // MCMC arm
    McmcOptions mopts;
    mopts.burn_in_sweeps = 4000;
    mopts.thin_sweeps = 8;
    auto chain = mcmc_sample(nullptr, 2.0, N, 30000, 77007, mopts);
    // matrix arm: diagonalized GUE(8)
    int reps = 200000;
    std::vector<std::vector<double>> evs(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            EnsembleSpec spec;
            spec.beta_class = BetaClass::ComplexHermitian;
            spec.N = N;
            spec.seed = 31337;
            auto s = eigenvalues(interpolating_matrix(spec, r));
            evs[r].assign(s.lambda.data(), s.lambda.data() + N);
        },
        threads);
    // per-index comparison; MCMC standard errors by batch means
    int B = 60;
    int per = int(chain.samples.size()) / B;
    for (int k = 0; k < N; ++k) {
        double m_mcmc = 0.0;
        for (auto& s : chain.samples) m_mcmc += s.x[k];
        m_mcmc /= chain.samples.size();
        double bvar = 0.0;
        for (int b = 0; b < B; ++b) {
            double bm = 0.0;
            for (int i = b * per; i < (b + 1) * per; ++i) bm += chain.samples[i].x[k];
            bm /= per;
            bvar += (bm - m_mcmc) * (bm - m_mcmc);
        }
        double se_mcmc = std::sqrt(bvar / (B * (B - 1.0)));
        double m_mat = 0.0, v_mat = 0.0;
        for (auto& e : evs) m_mat += e[k];
        m_mat /= reps;
        for (auto& e : evs) v_mat += (e[k] - m_mat) * (e[k] - m_mat);
        double se_mat = std::sqrt(v_mat / (double(reps) * (reps - 1.0)));
        double z = (m_mcmc - m_mat) / std::sqrt(se_mcmc * se_mcmc + se_mat * se_mat);
        o.require(std::abs(z) <= 3.0, "index " + std::to_string(k + 1) + ": z = " +
                                          num(z) + " within +/-3");
    }
    return o;
}

// ------------------------------------------------------------- criterion 11

Outcome universality_gaps(int threads) {
    Outcome o;
    const int N = 1000, reps = 200;
    auto nu = SpectralMeasure::two_point(0.5);
    int jlo = int(std::ceil(N / 6.0)), jhi = int(std::floor(5.0 * N / 6.0)) - 1;

    auto collect = [&](const EnsembleSpec& spec, bool per_sample_law) {
        GapStatistics acc;
        acc.m_offsets = {1};
        std::vector<GapStatistics> parts(reps);
        UnfoldingTable shared;
        if (!per_sample_law) {
            auto v = spec.realize_potential();
            auto law = v.empty() || std::abs(v.front()) < 1e-14
                           ? FreeConvolutionLaw::solve(
                                 SpectralMeasure::point_mass(), spec.coupling())
                           : FreeConvolutionLaw::solve(
                                 SpectralMeasure::empirical(v), spec.coupling());
            shared = make_unfolding_table(law, N, jlo, jhi);
        }
        parallel_for(
            reps,
            [&](std::size_t r) {
                auto s = eigenvalues(interpolating_matrix(spec, r));
                if (per_sample_law) {
                    auto v = spec.realize_potential(r);
                    auto law = FreeConvolutionLaw::solve(
                        SpectralMeasure::empirical(v), spec.coupling(),
                        SolverOptions{}, 257);
                    auto table = make_unfolding_table(law, N, jlo, jhi);
                    parts[r] = unfold_gaps(s, table, {1});
                } else {
                    parts[r] = unfold_gaps(s, shared, {1});
                }
            },
            threads);
        for (auto& p : parts)
            acc.gaps.insert(acc.gaps.end(), p.gaps.begin(), p.gaps.end());
        return acc;
    };

    EnsembleSpec goe;
    goe.N = N;
    goe.seed = 111;
    auto goe_gaps = collect(goe, false);

    EnsembleSpec gue;
    gue.N = N;
    gue.beta_class = BetaClass::ComplexHermitian;
    gue.seed = 222;
    auto gue_gaps = collect(gue, false);

    EnsembleSpec det;
    det.N = N;
    det.potential = deterministic_quantile_potential(nu, N);
    det.seed = 333;
    auto det_gaps = collect(det, false);

    EnsembleSpec iid;
    iid.N = N;
    iid.potential = IidPotential{nu, 444};
    iid.entry_law = EntryLaw{EntryLaw::Kind::Rademacher, {}};
    iid.seed = 555;
    auto iid_gaps = collect(iid, true);

    auto d_det = gap_distribution_distance(det_gaps, goe_gaps);
    auto d_ctrl = gap_distribution_distance(goe_gaps, gue_gaps);
    auto d_iid = gap_distribution_distance(iid_gaps, goe_gaps);
    o.require(d_det.ks <= 0.02, "deformed GOE (deterministic V) vs GOE: KS = " +
                                    num(d_det.ks) + " <= 0.02");
    o.require(d_ctrl.ks >= 0.05,
              "GOE vs GUE control: KS = " + num(d_ctrl.ks) + " >= 0.05");
    o.require(d_iid.ks <= 0.02,
              "deformed GOE (iid V, Rademacher entries) vs GOE: KS = " +
                  num(d_iid.ks) + " <= 0.02");
    return o;
}

// ------------------------------------------------------------- criterion 12

Outcome sine_kernel_pair(int threads) {
    Outcome o;
    const int N = 1000, reps = 500;
    std::vector<double> edges;
    for (int i = 0; i <= 36; ++i) edges.push_back(0.2 + 1.8 * i / 36.0);

    auto run_arm = [&](const EnsembleSpec& spec, const FreeConvolutionLaw& law,
                       const std::string& name) {
        std::vector<SpectrumSample> samples(reps);
        parallel_for(
            reps,
            [&](std::size_t r) {
                samples[r] = eigenvalues(interpolating_matrix(spec, r));
            },
            threads);
        auto est = pair_correlation_estimate(samples, law, 0.0, 0.1, edges);
        double rms = 0.0;
        for (std::size_t b = 0; b < est.values.size(); ++b) {
            double d = est.values[b] - sine_kernel_pair_correlation(est.r_centers[b]);
            rms += d * d;
        }
        rms = std::sqrt(rms / est.values.size());
        o.require(rms <= 0.05, name + ": RMS distance to 1 - sinc^2 over [0.2, 2] is " +
                                   num(rms) + " <= 0.05");
    };

    EnsembleSpec gue;
    gue.beta_class = BetaClass::ComplexHermitian;
    gue.N = N;
    gue.seed = 1212;
    run_arm(gue, FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0),
            "GUE");

    auto nu = SpectralMeasure::two_point(0.5);
    EnsembleSpec dgue;
    dgue.beta_class = BetaClass::ComplexHermitian;
    dgue.N = N;
    dgue.potential = deterministic_quantile_potential(nu, N);
    dgue.seed = 1313;
    auto v = std::get<std::vector<double>>(dgue.potential);
    run_arm(dgue, FreeConvolutionLaw::solve(SpectralMeasure::empirical(v), 1.0),
            "deformed GUE");
    return o;
}

// ------------------------------------------------------------- criterion 13

Outcome moment_matching(int) {
    Outcome o;
    struct Target {
        double m3, m4, gamma;
    };
    for (auto [m3, m4, gamma] : {Target{0.0, 3.0, 0.1}, Target{0.2, 3.5, 0.1},
                                 Target{0.0, 4.0, 0.1}}) {
        auto law = matched_entry_law(m3, m4, gamma);
        bool exact = std::abs(law.moment(1)) <= 1e-10 &&
                     std::abs(law.moment(2) - 1.0) <= 1e-10 &&
                     std::abs(law.moment(3) - m3) <= 1e-10;
        double m4dev = std::abs(law.moment(4) - m4);
        o.require(exact, "target (" + num(m3) + ", " + num(m4) +
                             "): m1, m2, m3 exact to 1e-10");
        o.require(m4dev <= 0.5, "target (" + num(m3) + ", " + num(m4) +
                                    "): |m4 - target| = " + num(m4dev) + " <= 0.5");
    }
    bool rejected = false;
    try {
        matched_entry_law(0.0, 1.0, 0.1);
    } catch (const PreconditionViolated&) {
        rejected = true;
    }
    o.require(rejected, "Rademacher target (0, 1) rejected");
    return o;
}

// ------------------------------------------------------------- criterion 14

Outcome regularity_harness(int) {
    Outcome o;
    int N = 1000, K = 31, L = N / 2;
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    auto y = law.classical_locations(N);
    double ybar = 0.5 * (y[L - K - 1] + y[L + K + 1]);
    double rho_bar = law.density_at(ybar);

    auto Vy = conditioned_external_potential(y, L, K, nullptr);
    auto rep = regularity_check(Vy, K, 0.5, rho_bar, N);
    o.require(rep.interval_ok, "classical-location exterior: interval slack " +
                                   num(rep.interval_slack) + " passes");
    o.require(rep.vprime_ok, "classical-location exterior: V' slack " +
                                 num(rep.vprime_slack) + " passes");
    o.require(rep.curvature_ok, "classical-location exterior: curvature margin " +
                                    num(rep.curvature_margin) + " > 0");

    // negative control: the boundary-defining exterior point moves out by
    // O(1); the tuple keeps its labels, so the old neighbors now sit inside
    // the conditioning interval and wreck the V' profile near that edge
    auto displaced = y;
    displaced[L + K + 1] += 1.0;
    std::vector<double> exterior;
    for (int i = 0; i < N; ++i)
        if (i < L - K || i > L + K) exterior.push_back(displaced[i]);
    ConditionedPotential Vbad(exterior, displaced[L - K - 1], displaced[L + K + 1],
                              nullptr, N);
    auto bad = regularity_check(Vbad, K, 0.5, rho_bar, N);
    o.require(!bad.vprime_ok, "displaced-point control: V' condition fails (slack " +
                                  num(bad.vprime_slack) + ")");
    return o;
}

using CriterionFn = std::function<Outcome(int)>;

const std::vector<std::pair<std::string, CriterionFn>>& registry() {
    static const std::vector<std::pair<std::string, CriterionFn>> reg = {
        {"semicircle-recovery", semicircle_recovery},
        {"fixed-point-invariants", fixed_point_invariants},
        {"edge-exponents", edge_exponents},
        {"burger-consistency", burger_consistency},
        {"eom-vs-quantile", eom_vs_quantile},
        {"loop-equation", loop_equation},
        {"local-law-shape", local_law_shape},
        {"rigidity-scaling", rigidity_scaling},
        {"dbm-cross-validation", dbm_cross_validation},
        {"beta-sampler-law", beta_sampler_law},
        {"universality-gaps", universality_gaps},
        {"sine-kernel-pair-correlation", sine_kernel_pair},
        {"moment-matching", moment_matching},
        {"regularity-harness", regularity_harness},
    };
    return reg;
}

} // namespace

std::vector<std::string> criterion_names() {
    std::vector<std::string> names;
    for (auto& [name, fn] : registry()) names.push_back(name);
    return names;
}

CriterionResult run_criterion(const std::string& name, int threads) {
    for (auto& [n, fn] : registry()) {
        if (n != name) continue;
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult res;
        res.name = name;
        try {
            Outcome o = fn(threads);
            res.pass = o.pass;
            res.details = o.details.str();
        } catch (const std::exception& e) {
            res.pass = false;
            res.details = std::string("exception: ") + e.what();
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        return res;
    }
    throw ConfigInvalid("unknown criterion '" + name + "'");
}

std::vector<CriterionResult> run_all(int threads, bool verbose) {
    std::vector<CriterionResult> out;
    for (auto& name : criterion_names()) {
        auto res = run_criterion(name, threads);
        if (verbose)
            std::printf("[%s] %-30s (%.1f s) %s\n", res.pass ? "PASS" : "FAIL",
                        res.name.c_str(), res.seconds, res.details.c_str());
        out.push_back(std::move(res));
    }
    return out;
}

nlohmann::json to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json j = nlohmann::json::array();
    for (auto& r : results)
        j.push_back({{"name", r.name},
                     {"pass", r.pass},
                     {"seconds", r.seconds},
                     {"details", r.details}});
    return j;
}

} // namespace rmtlab::acceptance
