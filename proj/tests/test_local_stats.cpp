#include <doctest.h>

#include "oracles.hpp"
#include "rmtlab/local_stats.hpp"

#include <cmath>

using namespace rmtlab;

namespace {
const double kPi = std::acos(-1.0);

SpectrumSample from_vector(const std::vector<double>& v) {
    SpectrumSample s;
    s.lambda = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    return s;
}
} // namespace

TEST_CASE("sine kernel pair correlation values") {
    CHECK(sine_kernel_pair_correlation(0.0) == 0.0);
    CHECK(sine_kernel_pair_correlation(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sine_kernel_pair_correlation(0.5) ==
          doctest::Approx(1.0 - 4.0 / (kPi * kPi)).epsilon(1e-14));
    CHECK(sine_kernel_pair_correlation(0.5) == doctest::Approx(0.59471).epsilon(1e-4));
}

TEST_CASE("unfolding classical locations gives unit gaps") {
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    auto run = [&](int N) {
        auto table = make_unfolding_table(law, N, N / 3, 2 * N / 3);
        auto s = from_vector(law.classical_locations(N));
        auto g = unfold_gaps(s, table);
        double worst = 0.0;
        for (double v : g.gaps) worst = std::max(worst, std::abs(v - 1.0));
        return worst;
    };
    double w500 = run(500), w1000 = run(1000);
    CHECK(w500 < 0.05);
    CHECK(w1000 < 0.6 * w500);  // error halves with N
}

TEST_CASE("offset gaps add up") {
    // equispaced spectrum with unit unfolded spacing
    int N = 600;
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    auto table = make_unfolding_table(law, N, 200, 400);
    auto s = from_vector(law.classical_locations(N));
    auto g2 = unfold_gaps(s, table, {2});
    for (double v : g2.gaps) CHECK(v == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("bulk window validation") {
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    CHECK_THROWS_AS(make_unfolding_table(law, 100, 2, 50), IndexOutOfBulk);
    CHECK_THROWS_AS(make_unfolding_table(law, 100, 50, 95), IndexOutOfBulk);
}

TEST_CASE("pair correlation of independent points is flat") {
    auto rng = make_rng(808);
    std::uniform_real_distribution<double> u(0.0, 400.0);
    std::vector<std::vector<double>> sets(300);
    for (auto& s : sets) {
        s.resize(400);  // density 1 on [0, 400]
        for (auto& x : s) x = u(rng);
        std::sort(s.begin(), s.end());
    }
    std::vector<double> edges;
    for (int i = 0; i <= 18; ++i) edges.push_back(0.2 + 0.1 * i);
    auto est = pair_correlation_points(sets, 150.0, 250.0, edges);
    CHECK(std::abs(est.one_point - 1.0) <= 3.0 * est.one_point_se + 0.01);
    for (std::size_t b = 0; b < est.values.size(); ++b)
        CHECK(std::abs(est.values[b] - 1.0) <= 4.0 * est.stderr_values[b] + 0.02);
}

TEST_CASE("GUE pair correlation approaches the sine kernel") {
    int N = 400, reps = 150;
    std::vector<SpectrumSample> samples(reps);
    parallel_for(reps, [&](std::size_t r) {
        EnsembleSpec spec;
        spec.beta_class = BetaClass::ComplexHermitian;
        spec.N = N;
        spec.seed = 9090;
        samples[r] = eigenvalues(interpolating_matrix(spec, r));
    });
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    std::vector<double> edges;
    for (int i = 0; i <= 18; ++i) edges.push_back(0.2 + 0.1 * i);
    auto est = pair_correlation_estimate(samples, law, 0.0, 0.1, edges);
    double rms = 0.0;
    for (std::size_t b = 0; b < est.values.size(); ++b) {
        double diff = est.values[b] - sine_kernel_pair_correlation(est.r_centers[b]);
        rms += diff * diff;
    }
    rms = std::sqrt(rms / est.values.size());
    CHECK(rms < 0.1);
    CHECK(std::abs(est.one_point - 1.0) < 0.05);
}

TEST_CASE("distribution distances") {
    GapStatistics a, b;
    auto rng = make_rng(4);
    std::normal_distribution<double> g(1.0, 0.3);
    for (int i = 0; i < 4000; ++i) {
        double v = std::abs(g(rng));
        a.gaps.push_back(v);
        b.gaps.push_back(v);
    }

    SUBCASE("identical samples have zero distance") {
        auto d = gap_distribution_distance(a, b);
        CHECK(d.ks == 0.0);
        CHECK(d.wasserstein1 == 0.0);
    }

    SUBCASE("order does not matter") {
        std::shuffle(b.gaps.begin(), b.gaps.end(), rng);
        auto d = gap_distribution_distance(a, b);
        CHECK(d.ks == 0.0);
        CHECK(d.wasserstein1 == 0.0);
    }

    SUBCASE("sample-size precondition") {
        GapStatistics small;
        small.gaps.assign(100, 1.0);
        CHECK_THROWS_AS(gap_distribution_distance(a, small), TooFewSamples);
    }

    SUBCASE("split halves of one ensemble stay within the KS critical band") {
        GapStatistics h1, h2;
        h1.gaps.assign(a.gaps.begin(), a.gaps.begin() + 2000);
        h2.gaps.assign(a.gaps.begin() + 2000, a.gaps.end());
        auto d = gap_distribution_distance(h1, h2);
        // 5% two-sample critical value: 1.36 sqrt((n+m)/(nm))
        double crit = 1.36 * std::sqrt(2.0 / 2000.0);
        CHECK(d.ks <= 2.0 * crit);
    }
}

TEST_CASE("GOE and GUE bulk gaps are distinguishable") {
    int N = 300, reps = 60;
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    auto table = make_unfolding_table(law, N, N / 3, 2 * N / 3);
    GapStatistics goe, gue;
    goe.m_offsets = gue.m_offsets = {1};
    for (int r = 0; r < reps; ++r) {
        EnsembleSpec s1;
        s1.N = N;
        s1.seed = 11;
        append_gaps(goe, eigenvalues(interpolating_matrix(s1, r)), table);
        EnsembleSpec s2;
        s2.beta_class = BetaClass::ComplexHermitian;
        s2.N = N;
        s2.seed = 12;
        append_gaps(gue, eigenvalues(interpolating_matrix(s2, r)), table);
    }
    auto d = gap_distribution_distance(goe, gue);
    CHECK(d.ks >= 0.05);
}

TEST_CASE("observable averages") {
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    int N = 200;
    auto table = make_unfolding_table(law, N, 70, 130);
    std::vector<SpectrumSample> samples;
    for (int r = 0; r < 5; ++r) {
        EnsembleSpec spec;
        spec.N = N;
        spec.seed = 313;
        samples.push_back(eigenvalues(interpolating_matrix(spec, r)));
    }

    SUBCASE("constant observable averages to one exactly") {
        auto res = observable_average(
            samples, table, [](std::span<const double>) { return 1.0; }, {1});
        CHECK(res.mean == 1.0);
        CHECK(res.se == 0.0);
    }

    SUBCASE("linearity holds to machine precision") {
        auto o1 = [](std::span<const double> g) { return std::exp(-g[0] * g[0]); };
        auto o2 = [](std::span<const double> g) { return g[0]; };
        auto r1 = observable_average(samples, table, o1, {1});
        auto r2 = observable_average(samples, table, o2, {1});
        auto r12 = observable_average(
            samples, table,
            [&](std::span<const double> g) { return 2.0 * o1(g) - 0.5 * o2(g); },
            {1});
        CHECK(r12.mean ==
              doctest::Approx(2.0 * r1.mean - 0.5 * r2.mean).epsilon(1e-13));
    }

    SUBCASE("shift invariance: moving spectrum and unfolding data together") {
        double c = 0.37;
        auto shifted_table = table;
        for (auto& g : shifted_table.gamma) g += c;
        std::vector<SpectrumSample> shifted = samples;
        for (auto& s : shifted) s.lambda.array() += c;
        auto obs = [](std::span<const double> g) { return std::exp(-g[0]); };
        auto r0 = observable_average(samples, table, obs, {1});
        auto rc = observable_average(shifted, shifted_table, obs, {1});
        CHECK(r0.mean == doctest::Approx(rc.mean).epsilon(1e-13));
    }
}

TEST_CASE("smoothed gap indicator agrees between GUE and deformed GUE") {
    int N = 300, reps = 40;
    auto obs = [](std::span<const double> g) {
        return 1.0 / (1.0 + std::exp(10.0 * (g[0] - 0.5)));
    };
    // pure GUE arm
    auto sc_law = FreeConvolutionLaw::solve(SpectralMeasure::point_mass(), 1.0);
    auto sc_table = make_unfolding_table(sc_law, N, N / 3, 2 * N / 3);
    std::vector<SpectrumSample> gue(reps);
    parallel_for(reps, [&](std::size_t r) {
        EnsembleSpec spec;
        spec.beta_class = BetaClass::ComplexHermitian;
        spec.N = N;
        spec.seed = 21;
        gue[r] = eigenvalues(interpolating_matrix(spec, r));
    });
    auto rg = observable_average(gue, sc_table, obs, {1});
    // deformed arm, conditioned on the realized quantile potential
    auto nu = SpectralMeasure::two_point(0.5);
    auto v = deterministic_quantile_potential(nu, N);
    auto law = FreeConvolutionLaw::solve(SpectralMeasure::empirical(v), 1.0);
    auto table = make_unfolding_table(law, N, N / 3, 2 * N / 3);
    std::vector<SpectrumSample> def(reps);
    parallel_for(reps, [&](std::size_t r) {
        EnsembleSpec spec;
        spec.beta_class = BetaClass::ComplexHermitian;
        spec.N = N;
        spec.potential = v;
        spec.seed = 22;
        def[r] = eigenvalues(interpolating_matrix(spec, r));
    });
    auto rd = observable_average(def, table, obs, {1});
    double se = std::sqrt(rg.se * rg.se + rd.se * rd.se);
    CHECK(std::abs(rg.mean - rd.mean) <= 3.5 * se + 0.01);
}
