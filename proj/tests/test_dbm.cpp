#include <doctest.h>

#include "oracles.hpp"
#include "rmtlab/dbm.hpp"

#include <cmath>

using namespace rmtlab;

TEST_CASE("single particle is an OU process with stationary variance 2/(beta N)") {
    // independent endpoint samples after t = 8 >> relaxation time 2
    int reps = 600;
    std::vector<double> endpoints(reps);
    DbmOptions opts;
    for (int r = 0; r < reps; ++r) {
        ParticleConfiguration x0;
        x0.x = {0.0};
        x0.beta = 2;
        auto traj = dbm_integrate(x0, 8.0, opts, derive_seed(101, "traj", r));
        endpoints[r] = traj.back().x[0];
    }
    double var = 0.0, mean = 0.0;
    for (double v : endpoints) mean += v;
    mean /= reps;
    for (double v : endpoints) var += (v - mean) * (v - mean);
    var /= (reps - 1);
    double want = 2.0 / (2.0 * 1.0);  // beta = 2, N = 1
    double se = want * std::sqrt(2.0 / (reps - 1.0));
    CHECK(std::abs(var - want) < 3.0 * se);
}

TEST_CASE("center of mass of a pair decouples as an OU process") {
    int reps = 600;
    std::vector<double> mids(reps);
    DbmOptions opts;
    for (int r = 0; r < reps; ++r) {
        ParticleConfiguration x0;
        x0.x = {-0.7, 0.7};
        x0.beta = 2;
        auto traj = dbm_integrate(x0, 8.0, opts, derive_seed(202, "traj", r));
        mids[r] = 0.5 * (traj.back().x[0] + traj.back().x[1]);
    }
    double var = 0.0, mean = 0.0;
    for (double v : mids) mean += v;
    mean /= reps;
    for (double v : mids) var += (v - mean) * (v - mean);
    var /= (reps - 1);
    double want = 1.0 / (2.0 * 2.0);  // 1/(beta N)
    double se = want * std::sqrt(2.0 / (reps - 1.0));
    CHECK(std::abs(var - want) < 3.0 * se);
}

TEST_CASE("zero-noise flow settles at the drift fixed point +/- 1/sqrt(N)") {
    ParticleConfiguration x0;
    x0.x = {-1.0, 1.0};
    x0.beta = 2;
    DbmOptions opts;
    opts.noise = false;
    auto traj = dbm_integrate(x0, 30.0, opts, 1);
    double want = 1.0 / std::sqrt(2.0);
    CHECK(traj.back().x[1] == doctest::Approx(want).epsilon(1e-6));
    CHECK(traj.back().x[0] == doctest::Approx(-want).epsilon(1e-6));
    // the fixed point balances x/2 = 1/(2 N x) exactly
    double x = traj.back().x[1];
    CHECK(std::abs(x / 2.0 - 1.0 / (2.0 * 2.0 * x)) < 1e-6);
}

TEST_CASE("ordering is preserved along trajectories") {
    ParticleConfiguration x0;
    x0.x = {-0.02, -0.01, 0.0, 0.013, 0.3};
    x0.beta = 1;
    auto traj = dbm_integrate(x0, 0.5, {}, 55, {0.1, 0.3});
    CHECK(traj.size() == 3);
    for (auto& cfg : traj) {
        cfg.require_ordered();
        CHECK(cfg.beta == 1);
    }
    CHECK(traj.back().t == doctest::Approx(0.5));
}

TEST_CASE("center of mass relaxes like a pure OU process") {
    // the pair interactions cancel in the mean, so m(t+D) regressed on m(t)
    // at stationarity has slope e^{-D/2} regardless of N
    int reps = 500, N = 5;
    double D = 0.2;
    std::vector<double> m0(reps), m1(reps);
    parallel_for(reps, [&](std::size_t r) {
        ParticleConfiguration x0;
        for (int i = 0; i < N; ++i) x0.x.push_back(-0.4 + 0.2 * i);
        x0.beta = 1;
        auto traj = dbm_integrate(x0, 3.0 + D, {}, derive_seed(606, "t", r),
                                  {3.0, 3.0 + D});
        auto mean_of = [&](const std::vector<double>& x) {
            double m = 0;
            for (double v : x) m += v;
            return m / N;
        };
        m0[r] = mean_of(traj[0].x);
        m1[r] = mean_of(traj[1].x);
    });
    double mx = 0, my = 0;
    for (int r = 0; r < reps; ++r) {
        mx += m0[r];
        my += m1[r];
    }
    mx /= reps;
    my /= reps;
    double cov = 0, var = 0;
    for (int r = 0; r < reps; ++r) {
        cov += (m0[r] - mx) * (m1[r] - my);
        var += (m0[r] - mx) * (m0[r] - mx);
    }
    double slope = cov / var;
    double want = std::exp(-D / 2.0);
    // slope estimator noise ~ sqrt((1-rho^2)/reps) ~ 0.014
    CHECK(std::abs(slope - want) < 0.05);
}

TEST_CASE("drift has the exchange/parity symmetry") {
    std::vector<double> x{-0.9, -0.1, 0.4, 1.3};
    auto d = dbm_drift(x);
    std::vector<double> rx(x.rbegin(), x.rend());
    for (auto& v : rx) v = -v;
    auto rd = dbm_drift(rx);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(d[i] == doctest::Approx(-rd[x.size() - 1 - i]).epsilon(1e-12));
}

TEST_CASE("matrix flow sampling") {
    SUBCASE("N = 1 keeps unit variance for all t") {
        EnsembleSpec spec;
        spec.beta_class = BetaClass::ComplexHermitian;
        spec.N = 1;
        spec.seed = 7;
        for (double t : {0.0, 0.7, 2.5}) {
            int reps = 4000;
            double ss = 0.0;
            for (int r = 0; r < reps; ++r) {
                EnsembleSpec s2 = spec;
                s2.seed = derive_seed(7, "rep", r);
                ss += std::pow(matrix_flow_sample(s2, t).lambda(0), 2);
            }
            CHECK(ss / reps == doctest::Approx(1.0).epsilon(0.1));
        }
    }

    SUBCASE("largest eigenvalue of the relaxed flow sits near the semicircle edge") {
        EnsembleSpec spec;
        spec.N = 500;
        spec.seed = 8;
        std::vector<double> lmax;
        for (int r = 0; r < 5; ++r) {
            EnsembleSpec s2 = spec;
            s2.seed = derive_seed(8, "rep", r);
            lmax.push_back(matrix_flow_sample(s2, 6.0).lambda(499));
        }
        for (double v : lmax) {
            CHECK(v > 1.8);
            CHECK(v < 2.2);
        }
    }

    SUBCASE("fixed seed is deterministic") {
        EnsembleSpec spec;
        spec.N = 12;
        spec.seed = 99;
        auto a = matrix_flow_sample(spec, 0.4, 3);
        auto b = matrix_flow_sample(spec, 0.4, 3);
        CHECK((a.lambda - b.lambda).norm() == 0.0);
    }
}

TEST_CASE("flow agreement between the SDE and the exact matrix flow") {
    EnsembleSpec spec;
    spec.N = 30;
    spec.beta_class = BetaClass::RealSymmetric;
    spec.seed = 404;
    spec.t0 = 0.0;
    spec.potential = deterministic_quantile_potential(SpectralMeasure::two_point(0.5), 30);

    SUBCASE("t = 0 distributions coincide") {
        // zero integration time: both pipelines sample the same matrix law
        auto rep = flow_agreement(spec, 0.0, 300, {});
        CHECK(rep.max_abs_z() <= 3.5);
    }

    SUBCASE("t = 0.3 cross-validation") {
        auto rep = flow_agreement(spec, 0.3, 300, {});
        CHECK(rep.max_abs_z() <= 4.0);
    }
}

TEST_CASE("rigidity along the flow decays with N") {
    auto nu = SpectralMeasure::two_point(0.5);
    auto quad_at = [&](int N) {
        EnsembleSpec spec;
        spec.N = N;
        spec.seed = 777;
        spec.potential = deterministic_quantile_potential(nu, N);
        auto pts = flow_rigidity_scan(spec, {0.0, 0.5}, 8);
        return pts;
    };
    auto q250 = quad_at(250);
    auto q500 = quad_at(500);
    for (std::size_t i = 0; i < q250.size(); ++i) {
        double logN = std::log(500.0);
        CHECK(q500[i].mean_quad_dev <=
              10.0 * std::pow(logN, 4) / (500.0 * 500.0));
        // ~ N^{-2} scaling up to polylog drift
        double ratio = q250[i].mean_quad_dev / q500[i].mean_quad_dev;
        CHECK(ratio > 1.5);
        CHECK(ratio < 12.0);
    }
}

TEST_CASE("step collapse reports crossings once retries are disabled") {
    // moderate gap where the noise dominates both the gap and the repulsion;
    // with zero halvings the first crossing trips the safety valve
    ParticleConfiguration x0;
    x0.x = {0.0, 0.03};
    x0.beta = 1;
    DbmOptions opts;
    opts.max_halvings = 0;
    CHECK_THROWS_AS(dbm_integrate(x0, 0.1, opts, 3), StepCollapse);
    // with the default retry budget the same start integrates fine
    auto traj = dbm_integrate(x0, 0.1, {}, 3);
    traj.back().require_ordered();
}
