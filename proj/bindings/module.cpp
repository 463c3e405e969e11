// Python bindings for the main operations: measures, the deformed
// semicircle law, ensemble sampling, spectra, the particle flow, the
// reference potential / sampler, and the local statistics estimators.

#include "rmtlab/acceptance.hpp"
#include "rmtlab/dbm.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/free_convolution.hpp"
#include "rmtlab/local_stats.hpp"
#include "rmtlab/measure.hpp"
#include "rmtlab/reference_beta.hpp"
#include "rmtlab/runner.hpp"
#include "rmtlab/spectral.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace rmtlab;

namespace {

EnsembleSpec make_spec(int beta, int N, const std::string& entry_law,
                       py::object potential, double t0, double t,
                       std::uint64_t seed) {
    EnsembleSpec spec;
    spec.beta_class = beta == 2 ? BetaClass::ComplexHermitian : BetaClass::RealSymmetric;
    spec.N = N;
    spec.entry_law = EntryLaw::parse(entry_law);
    spec.t0 = t0;
    spec.t = t;
    spec.seed = seed;
    if (potential.is_none()) {
        spec.potential = std::vector<double>{};
    } else if (py::isinstance<SpectralMeasure>(potential)) {
        spec.potential =
            IidPotential{potential.cast<SpectralMeasure>(), derive_seed(seed, "potential")};
    } else {
        spec.potential = potential.cast<std::vector<double>>();
    }
    return spec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "deformed Wigner matrix laboratory (C++ core)";

    py::register_exception<ConfigInvalid>(m, "ConfigInvalid");
    py::register_exception<NonConvergence>(m, "NonConvergence");
    py::register_exception<PreconditionViolated>(m, "PreconditionViolated");

    py::class_<SpectralMeasure>(m, "SpectralMeasure")
        .def_static("point_mass", &SpectralMeasure::point_mass)
        .def_static("two_point", &SpectralMeasure::two_point, py::arg("a"))
        .def_static("uniform", &SpectralMeasure::uniform, py::arg("lo"),
                    py::arg("hi"), py::arg("n") = 512)
        .def_static("jacobi", &SpectralMeasure::jacobi, py::arg("a"),
                    py::arg("b"), py::arg("n") = 512)
        .def_static("atoms",
                    [](std::vector<std::pair<double, double>> a) {
                        return SpectralMeasure::atoms(std::move(a));
                    })
        .def_static("empirical",
                    [](std::vector<double> s) {
                        return SpectralMeasure::empirical(std::move(s));
                    })
        .def_property_readonly("lo", &SpectralMeasure::lo)
        .def_property_readonly("hi", &SpectralMeasure::hi)
        .def("mean", &SpectralMeasure::mean)
        .def("cdf", &SpectralMeasure::cdf)
        .def("quantile", &SpectralMeasure::quantile)
        .def("stieltjes",
             [](const SpectralMeasure& nu, Complex z) { return nu.stieltjes(z); })
        .def("__repr__", [](const SpectralMeasure& nu) {
            return "<SpectralMeasure on [" + std::to_string(nu.lo()) + ", " +
                   std::to_string(nu.hi()) + "]>";
        });

    m.def(
        "stieltjes_of_measure",
        [](const SpectralMeasure& nu, double E, double eta) {
            return stieltjes_of_measure(nu, {E, eta});
        },
        py::arg("nu"), py::arg("E"), py::arg("eta"));

    m.def(
        "check_support_condition",
        [](const SpectralMeasure& nu, int grid) {
            auto rep = check_support_condition(nu, grid);
            return py::make_tuple(rep.min_value, rep.divergent);
        },
        py::arg("nu"), py::arg("grid_size") = 256);

    m.def("deterministic_quantile_potential", &deterministic_quantile_potential,
          py::arg("nu"), py::arg("N"));
    m.def("sample_iid_potential", &sample_iid_potential, py::arg("nu"),
          py::arg("N"), py::arg("seed"));

    m.def(
        "solve_mfc",
        [](const SpectralMeasure& nu, double theta, double E, double eta) {
            auto s = solve_mfc(nu, theta, {E, eta});
            return py::make_tuple(s.m, s.residual, s.iterations);
        },
        py::arg("nu"), py::arg("theta"), py::arg("E"), py::arg("eta"),
        "fixed point of m = int dnu/(theta v - z - m) on the Im >= 0 branch");

    py::class_<FreeConvolutionLaw>(m, "FreeConvolutionLaw")
        .def_static(
            "solve",
            [](const SpectralMeasure& nu, double theta, int grid_n) {
                return FreeConvolutionLaw::solve(nu, theta, SolverOptions{}, grid_n);
            },
            py::arg("nu"), py::arg("theta") = 1.0, py::arg("grid_n") = 0)
        .def_property_readonly("theta", &FreeConvolutionLaw::theta)
        .def_property_readonly("L_minus",
                               [](const FreeConvolutionLaw& l) {
                                   return l.endpoints().L_minus;
                               })
        .def_property_readonly("L_plus",
                               [](const FreeConvolutionLaw& l) {
                                   return l.endpoints().L_plus;
                               })
        .def_property_readonly("zeta_minus",
                               [](const FreeConvolutionLaw& l) {
                                   return l.endpoints().zeta_minus;
                               })
        .def_property_readonly("zeta_plus",
                               [](const FreeConvolutionLaw& l) {
                                   return l.endpoints().zeta_plus;
                               })
        .def("density", &FreeConvolutionLaw::density_at, py::arg("E"))
        .def("cdf", &FreeConvolutionLaw::cdf)
        .def("quantile", &FreeConvolutionLaw::quantile)
        .def("classical_locations", &FreeConvolutionLaw::classical_locations,
             py::arg("N"))
        .def("grid", &FreeConvolutionLaw::grid)
        .def("density_values", &FreeConvolutionLaw::density_values)
        .def("edge_exponent", [](const FreeConvolutionLaw& l, bool upper) {
            return edge_exponent(l, upper ? EdgeSide::Upper : EdgeSide::Lower);
        });

    m.def(
        "law_at_time",
        [](const SpectralMeasure& nu, double t0, double t, int grid_n) {
            return law_at_time(nu, t0, t, SolverOptions{}, grid_n);
        },
        py::arg("nu"), py::arg("t0"), py::arg("t"), py::arg("grid_n") = 0);
    m.def(
        "burger_residual",
        [](const SpectralMeasure& nu, double t0, double t, Complex z, double h) {
            return burger_residual(nu, t0, t, {z.real(), z.imag()}, h);
        },
        py::arg("nu"), py::arg("t0"), py::arg("t"), py::arg("z"),
        py::arg("h") = 1e-3);

    m.def(
        "sample_wigner",
        [](int beta, int N, const std::string& law, std::uint64_t seed) -> py::object {
            auto W = sample_wigner(beta == 2 ? BetaClass::ComplexHermitian
                                             : BetaClass::RealSymmetric,
                                   N, EntryLaw::parse(law), seed);
            if (W.is_real()) return py::cast(W.real);
            return py::cast(W.cplx);
        },
        py::arg("beta"), py::arg("N"), py::arg("entry_law") = "gaussian",
        py::arg("seed") = 0);

    m.def(
        "sample_spectrum",
        [](int beta, int N, const std::string& law, py::object potential,
           double t0, double t, std::uint64_t seed, std::uint64_t index) {
            auto spec = make_spec(beta, N, law, potential, t0, t, seed);
            auto s = eigenvalues(interpolating_matrix(spec, index));
            return s.lambda;
        },
        py::arg("beta"), py::arg("N"), py::arg("entry_law") = "gaussian",
        py::arg("potential") = py::none(), py::arg("t0") = 0.0,
        py::arg("t") = 0.0, py::arg("seed") = 0, py::arg("index") = 0,
        "spectrum of e^{-(t-t0)/2} V + e^{-t/2} W + (1-e^{-t})^{1/2} W'");

    m.def(
        "matched_entry_law_moments",
        [](double m3, double m4, double gamma) {
            auto law = matched_entry_law(m3, m4, gamma);
            return std::vector<double>{law.moment(1), law.moment(2),
                                       law.moment(3), law.moment(4)};
        },
        py::arg("m3"), py::arg("m4"), py::arg("gamma") = 0.1);

    m.def(
        "dbm_integrate",
        [](std::vector<double> x0, int beta, double t_end, double dt_max,
           std::uint64_t seed, bool noise) {
            ParticleConfiguration cfg;
            cfg.x = std::move(x0);
            cfg.beta = beta;
            DbmOptions opts;
            opts.dt_max = dt_max;
            opts.noise = noise;
            auto traj = dbm_integrate(cfg, t_end, opts, seed);
            return traj.back().x;
        },
        py::arg("x0"), py::arg("beta"), py::arg("t_end"),
        py::arg("dt_max") = 1e-3, py::arg("seed") = 0, py::arg("noise") = true,
        "endpoint of the interacting-particle flow");

    py::class_<PotentialModel>(m, "PotentialModel")
        .def_static(
            "build",
            [](const SpectralMeasure& nu, double t0, double t) {
                return PotentialModel::build(nu, t0, t);
            },
            py::arg("nu"), py::arg("t0") = 0.0, py::arg("t") = 0.0)
        .def("uprime", &PotentialModel::uprime)
        .def("usecond", &PotentialModel::usecond)
        .def("u", &PotentialModel::u)
        .def_property_readonly("convexity_floor", &PotentialModel::convexity_floor)
        .def_property_readonly("law", &PotentialModel::law,
                               py::return_value_policy::reference_internal);

    m.def(
        "mcmc_sample",
        [](py::object potential, double beta, int N, int n_samples,
           std::uint64_t seed) {
            const PotentialModel* U = nullptr;
            if (!potential.is_none()) U = potential.cast<const PotentialModel*>();
            auto res = mcmc_sample(U, beta, N, n_samples, seed);
            std::vector<std::vector<double>> rows;
            rows.reserve(res.samples.size());
            for (auto& s : res.samples) rows.push_back(s.x);
            return py::make_tuple(rows, res.diag.acceptance_rate, res.diag.ess);
        },
        py::arg("potential") = py::none(), py::arg("beta") = 2.0,
        py::arg("N") = 8, py::arg("n_samples") = 1000, py::arg("seed") = 0,
        "log-gas sampler; returns (samples, acceptance_rate, ess)");

    m.def(
        "eom_propagate",
        [](const SpectralMeasure& nu, double t0, std::vector<double> t_grid, int N) {
            auto traj = eom_propagate(nu, t0, t_grid, N);
            std::vector<std::vector<double>> rows;
            for (auto& c : traj) rows.push_back(c.x);
            return rows;
        },
        py::arg("nu"), py::arg("t0"), py::arg("t_grid"), py::arg("N"));

    m.def("sine_kernel_pair_correlation", &sine_kernel_pair_correlation,
          py::arg("r"));

    m.def(
        "unfolded_gaps",
        [](const Eigen::VectorXd& lambda, const FreeConvolutionLaw& law, int j_lo,
           int j_hi) {
            auto table = make_unfolding_table(law, int(lambda.size()), j_lo, j_hi);
            SpectrumSample s;
            s.lambda = lambda;
            return unfold_gaps(s, table).gaps;
        },
        py::arg("lambda"), py::arg("law"), py::arg("j_lo"), py::arg("j_hi"));

    m.def(
        "ks_distance",
        [](std::vector<double> a, std::vector<double> b) {
            GapStatistics ga, gb;
            ga.gaps = std::move(a);
            gb.gaps = std::move(b);
            auto d = gap_distribution_distance(ga, gb);
            return py::make_tuple(d.ks, d.wasserstein1);
        },
        py::arg("a"), py::arg("b"),
        "two-sample Kolmogorov-Smirnov and 1-Wasserstein distances");

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            auto cfg = ExperimentConfig::from_json(
                nlohmann::json::parse(config_json));
            auto manifest = run(cfg);
            return manifest.to_json().dump();
        },
        py::arg("config_json"), "run one experiment from a JSON config string");

    m.def(
        "run_suite",
        [](const std::string& name, int threads) {
            return suite(name, threads).dump();
        },
        py::arg("name") = "quick", py::arg("threads") = 0);

    m.def("acceptance_criteria",
          [] { return acceptance::criterion_names(); });
    m.def(
        "run_acceptance_criterion",
        [](const std::string& name) {
            auto r = acceptance::run_criterion(name);
            return py::make_tuple(r.pass, r.details, r.seconds);
        },
        py::arg("name"));

    m.attr("__version__") = RMTLAB_VERSION;
}
