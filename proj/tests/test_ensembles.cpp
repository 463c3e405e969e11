#include <doctest.h>

#include "oracles.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/spectral.hpp"

#include <cmath>

using namespace rmtlab;

TEST_CASE("wigner samples have the normalized moments") {
    SUBCASE("real symmetric: diagonal variance 2/N, off-diagonal 1/N") {
        int N = 40, reps = 400;
        double diag_ss = 0.0, off_ss = 0.0;
        long diag_n = 0, off_n = 0;
        for (int r = 0; r < reps; ++r) {
            auto W = sample_wigner(BetaClass::RealSymmetric, N, {}, 1000 + r);
            for (int j = 0; j < N; ++j)
                for (int i = 0; i <= j; ++i) {
                    if (i == j) {
                        diag_ss += W.real(i, i) * W.real(i, i);
                        ++diag_n;
                    } else {
                        off_ss += W.real(i, j) * W.real(i, j);
                        ++off_n;
                    }
                }
        }
        double vd = diag_ss / diag_n * N;  // should be 2
        double vo = off_ss / off_n * N;    // should be 1
        CHECK(vd == doctest::Approx(2.0).epsilon(0.05));
        CHECK(vo == doctest::Approx(1.0).epsilon(0.02));
    }

    SUBCASE("complex hermitian: E|w|^2 = 1/N, E w^2 = 0") {
        int N = 40, reps = 400;
        double abs_ss = 0.0;
        Complex sq_sum{0.0, 0.0};
        long off_n = 0;
        for (int r = 0; r < reps; ++r) {
            auto W = sample_wigner(BetaClass::ComplexHermitian, N, {}, 2000 + r);
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < j; ++i) {
                    abs_ss += std::norm(W.cplx(i, j));
                    sq_sum += W.cplx(i, j) * W.cplx(i, j);
                    ++off_n;
                }
        }
        CHECK(abs_ss / off_n * N == doctest::Approx(1.0).epsilon(0.02));
        CHECK(std::abs(sq_sum) / off_n * N < 0.05);
    }

    SUBCASE("N = 1 complex case is a single real entry") {
        auto W = sample_wigner(BetaClass::ComplexHermitian, 1, {}, 5);
        CHECK(W.cplx(0, 0).imag() == 0.0);
    }

    SUBCASE("rademacher entries are exactly +/- 1/sqrt(N)") {
        int N = 16;
        auto W = sample_wigner(BetaClass::RealSymmetric, N,
                               EntryLaw{EntryLaw::Kind::Rademacher, {}}, 3);
        double target = 1.0 / std::sqrt(double(N));
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < j; ++i)
                CHECK(std::abs(std::abs(W.real(i, j)) - target) < 1e-15);
    }

    SUBCASE("hermiticity is exact") {
        auto W = sample_wigner(BetaClass::ComplexHermitian, 25, {}, 7);
        for (int j = 0; j < 25; ++j)
            for (int i = 0; i < 25; ++i)
                CHECK(W.cplx(i, j) == std::conj(W.cplx(j, i)));
    }
}

TEST_CASE("trace of W^2 concentrates at N") {
    // E Tr W^2 = sum of variances = N*2/N + N(N-1)/N = N + 1 for beta = 1
    int N = 60, reps = 200;
    std::vector<double> vals(reps);
    for (int r = 0; r < reps; ++r) {
        auto W = sample_wigner(BetaClass::RealSymmetric, N, {}, 4000 + r);
        vals[r] = (W.real * W.real).trace() / N;
    }
    auto ms = oracles::mean_se(vals);
    double expected = (N + 1.0) / N;
    CHECK(std::abs(ms.mean - expected) < 3.0 * ms.se);
}

TEST_CASE("deformed assembly") {
    std::vector<double> v{-0.5, -0.5, 0.5, 0.5};
    auto W = sample_wigner(BetaClass::RealSymmetric, 4, {}, 11);
    auto W0 = W;
    SUBCASE("theta = 0 leaves W untouched") {
        assemble_deformed(0.0, v, W);
        CHECK((W.real - W0.real).norm() == 0.0);
    }
    SUBCASE("zero W gives the sorted potential as spectrum") {
        MatrixSample Z;
        Z.beta = BetaClass::RealSymmetric;
        Z.real.setZero(4, 4);
        assemble_deformed(1.0, {0.5, -0.5, 0.25, -0.25}, Z);
        auto s = eigenvalues(Z);
        CHECK(s.lambda(0) == doctest::Approx(-0.5));
        CHECK(s.lambda(3) == doctest::Approx(0.5));
    }
    SUBCASE("centered potential preserves the trace") {
        assemble_deformed(1.0, v, W);
        CHECK(W.real.trace() == doctest::Approx(W0.real.trace()).epsilon(1e-12));
    }
}

TEST_CASE("interpolating matrix weights") {
    EnsembleSpec spec;
    spec.N = 30;
    spec.t0 = 0.3;
    spec.seed = 99;
    spec.potential = deterministic_quantile_potential(SpectralMeasure::two_point(0.5), 30);

    SUBCASE("t = 0 is exactly e^{t0/2} V + W") {
        spec.t = 0.0;
        auto H = interpolating_matrix(spec);
        auto W = sample_wigner(spec.beta_class, spec.N, spec.entry_law,
                               derive_seed(spec.seed, "wigner", 0));
        auto v = spec.realize_potential();
        double w = std::exp(spec.t0 / 2.0);
        for (int i = 0; i < spec.N; ++i)
            CHECK(H.real(i, i) == doctest::Approx(W.real(i, i) + w * v[i]));
        CHECK(H.real(0, 1) == W.real(0, 1));
    }

    SUBCASE("combined wigner part keeps off-diagonal variance 1/N") {
        spec.t = 0.5;
        spec.t0 = 0.0;
        spec.potential = std::vector<double>{};
        int reps = 300;
        double ss = 0.0;
        long n = 0;
        for (int r = 0; r < reps; ++r) {
            auto H = interpolating_matrix(spec, r);
            for (int j = 0; j < spec.N; ++j)
                for (int i = 0; i < j; ++i) {
                    ss += H.real(i, j) * H.real(i, j);
                    ++n;
                }
        }
        double v = ss / n * spec.N;
        CHECK(v == doctest::Approx(1.0).epsilon(0.03));
    }
}

TEST_CASE("moment-matched entry laws") {
    SUBCASE("gaussian targets reproduce gaussian moments") {
        auto law = matched_entry_law(0.0, 3.0, 0.2);
        CHECK(std::abs(law.moment(1)) < 1e-12);
        CHECK(law.moment(2) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(law.moment(3)) < 1e-12);
        CHECK(law.moment(4) == doctest::Approx(3.0).epsilon(1e-12));
    }

    SUBCASE("rademacher target is rejected") {
        CHECK_THROWS_AS(matched_entry_law(0.0, 1.0, 0.1), PreconditionViolated);
    }

    SUBCASE("m4 = 4 with gamma = 0.1") {
        auto law = matched_entry_law(0.0, 4.0, 0.1);
        CHECK(std::abs(law.moment(1)) < 1e-12);
        CHECK(law.moment(2) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(law.moment(3)) < 1e-12);
        CHECK(std::abs(law.moment(4) - 4.0) <= 0.5);
    }

    SUBCASE("asymmetric third moment is exact") {
        auto law = matched_entry_law(0.2, 3.5, 0.1);
        CHECK(std::abs(law.moment(1)) < 1e-12);
        CHECK(law.moment(2) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(law.moment(3) == doctest::Approx(0.2).epsilon(1e-10));
        CHECK(std::abs(law.moment(4) - 3.5) <= 0.5);
        // numerical verification of the mixture moments by direct sampling
        auto rng = make_rng(31);
        int n = 2000000;
        double m3 = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = law.sample(rng);
            m3 += x * x * x;
        }
        m3 /= n;
        CHECK(std::abs(m3 - 0.2) < 0.02);
    }

    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(matched_entry_law(0.0, 30.0, 0.1), PreconditionViolated);
        CHECK_THROWS_AS(matched_entry_law(0.0, 3.0, 0.0), PreconditionViolated);
    }
}

TEST_CASE("entry law variance normalization across the catalog") {
    auto rng = make_rng(55);
    for (auto kind : {EntryLaw::Kind::Gaussian, EntryLaw::Kind::Rademacher,
                      EntryLaw::Kind::Uniform, EntryLaw::Kind::Laplace}) {
        EntryLaw law{kind, {}};
        double ss = 0.0, s = 0.0;
        int n = 200000;
        for (int i = 0; i < n; ++i) {
            double x = law.sample_standard(rng);
            s += x;
            ss += x * x;
        }
        CHECK(std::abs(s / n) < 0.02);
        CHECK(ss / n == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("subexponential tail probe") {
    auto probs = tail_probabilities({}, 400000, 8);
    // standard gaussian: P(|x|>3) ~ 2.7e-3, P(|x|>5) ~ 5.7e-7
    CHECK(probs[0] == doctest::Approx(0.0027).epsilon(0.2));
    CHECK(probs[1] < 1e-4);
    CHECK(probs[2] == 0.0);
    auto rad = tail_probabilities({EntryLaw::Kind::Rademacher, {}}, 100000, 8);
    CHECK(rad[0] == 0.0);
}

TEST_CASE("sampling is reproducible and size-capped") {
    auto a = sample_wigner(BetaClass::RealSymmetric, 8, {}, 77);
    auto b = sample_wigner(BetaClass::RealSymmetric, 8, {}, 77);
    CHECK((a.real - b.real).norm() == 0.0);
    CHECK_THROWS_AS(sample_wigner(BetaClass::RealSymmetric, 5000, {}, 1),
                    ConfigInvalid);
}

TEST_CASE("matrix dump format") {
    auto W = sample_wigner(BetaClass::RealSymmetric, 3, {}, 1);
    auto path = std::filesystem::temp_directory_path() / "rmtlab_dump_test.bin";
    dump_matrix(W, path);
    CHECK(std::filesystem::file_size(path) == 16 + 9 * 8);
    std::filesystem::remove(path);
}
