#include "rmtlab/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmtlab {

void ParticleConfiguration::require_ordered() const {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw OrderViolation("configuration not strictly ordered");
    for (double v : x)
        if (!std::isfinite(v)) throw NonFinite("configuration has non-finite entry");
}

std::vector<double> dbm_drift(const std::vector<double>& x) {
    int N = int(x.size());
    std::vector<double> d(N);
    for (int i = 0; i < N; ++i) {
        double inter = 0.0;
        for (int j = 0; j < N; ++j)
            if (j != i) inter += 1.0 / (x[i] - x[j]);
        d[i] = -0.5 * x[i] + inter / N;
    }
    return d;
}

std::vector<ParticleConfiguration> dbm_integrate(
    const ParticleConfiguration& x0, double t_end, const DbmOptions& opts,
    std::uint64_t seed, const std::vector<double>& checkpoints) {
    x0.require_ordered();
    if (opts.dt_max > 1e-3 || opts.dt_max <= 0.0)
        throw PreconditionViolated("dbm_integrate: 0 < dt_max <= 1e-3");
    int N = x0.n();
    std::vector<std::mt19937_64> streams;
    streams.reserve(N);
    for (int i = 0; i < N; ++i)
        streams.push_back(make_rng(derive_seed(seed, "dbm-particle", i)));
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> marks = checkpoints;
    std::sort(marks.begin(), marks.end());
    marks.erase(std::remove_if(marks.begin(), marks.end(),
                               [&](double m) { return m <= x0.t || m >= t_end; }),
                marks.end());
    marks.push_back(t_end);

    std::vector<ParticleConfiguration> out;
    std::vector<double> x = x0.x, xn(N), noise(N);
    double tau = x0.t;
    double noise_scale = std::sqrt(2.0 / (x0.beta * double(N)));
    std::size_t mark = 0;

    while (mark < marks.size()) {
        double target = marks[mark];
        while (tau < target - 1e-15) {
            double gap = std::numeric_limits<double>::infinity();
            for (int i = 1; i < N; ++i) gap = std::min(gap, x[i] - x[i - 1]);
            double dt = std::min(opts.dt_max, target - tau);
            if (N > 1) dt = std::min(dt, opts.gap_factor * N * gap * gap);
            auto drift = dbm_drift(x);
            bool accepted = false;
            for (int attempt = 0; attempt <= opts.max_halvings; ++attempt) {
                double root_dt = std::sqrt(dt);
                bool ordered = true;
                for (int i = 0; i < N; ++i) {
                    noise[i] = opts.noise ? noise_scale * root_dt * gauss(streams[i]) : 0.0;
                    xn[i] = x[i] + dt * drift[i] + noise[i];
                    if (i > 0 && !(xn[i] > xn[i - 1])) ordered = false;
                }
                if (ordered) {
                    accepted = true;
                    break;
                }
                dt *= 0.5;
            }
            if (!accepted)
                throw StepCollapse("particle crossing persisted after halvings");
            x = xn;
            tau += dt;
        }
        ParticleConfiguration cfg;
        cfg.x = x;
        cfg.t = target;
        cfg.beta = x0.beta;
        out.push_back(std::move(cfg));
        ++mark;
    }
    return out;
}

SpectrumSample matrix_flow_sample(const EnsembleSpec& spec, double t,
                                  std::uint64_t sample_index) {
    if (t < 0.0) throw PreconditionViolated("matrix_flow_sample: t >= 0");
    EnsembleSpec at_t = spec;
    at_t.t = t;
    return eigenvalues(interpolating_matrix(at_t, sample_index));
}

double AgreementReport::max_abs_z() const {
    double worst = 0.0;
    for (const auto& s : stats)
        worst = std::max({worst, std::abs(s.z_mean), std::abs(s.z_var)});
    return worst;
}

namespace {

struct SummaryStats {
    double mean = 0, var = 0, m4 = 0;
    int n = 0;
};

SummaryStats summarize(const std::vector<double>& xs) {
    SummaryStats s;
    s.n = int(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= s.n;
    for (double x : xs) {
        double d = x - s.mean;
        s.var += d * d;
        s.m4 += d * d * d * d;
    }
    s.var /= (s.n - 1);
    s.m4 /= s.n;
    return s;
}

StatComparison compare(const std::string& name, const std::vector<double>& a,
                       const std::vector<double>& b) {
    auto sa = summarize(a), sb = summarize(b);
    StatComparison c;
    c.name = name;
    c.mean_a = sa.mean;
    c.mean_b = sb.mean;
    c.var_a = sa.var;
    c.var_b = sb.var;
    c.z_mean = (sa.mean - sb.mean) /
               std::sqrt(sa.var / sa.n + sb.var / sb.n);
    // var(s^2) ~ (m4 - var^2)/n
    double va = std::max(sa.m4 - sa.var * sa.var, 0.0) / sa.n;
    double vb = std::max(sb.m4 - sb.var * sb.var, 0.0) / sb.n;
    c.z_var = (sa.var - sb.var) / std::sqrt(va + vb);
    return c;
}

} // namespace

AgreementReport flow_agreement(const EnsembleSpec& spec, double t, int samples,
                               const DbmOptions& opts, int threads) {
    struct Row {
        double med, tr, tr2;
    };
    std::vector<Row> sde(samples), exact(samples);
    int N = spec.N;
    int mid = (N + 1) / 2 - 1;  // index of lambda_{ceil(N/2)}

    parallel_for(
        samples,
        [&](std::size_t si) {
            // SDE pipeline: diagonalize H_0, integrate the particles
            EnsembleSpec at0 = spec;
            at0.t = 0.0;
            at0.seed = derive_seed(spec.seed, "sde-arm");
            auto s0 = eigenvalues(interpolating_matrix(at0, si));
            ParticleConfiguration cfg;
            cfg.x.assign(s0.lambda.data(), s0.lambda.data() + N);
            cfg.beta = spec.beta();
            auto traj = dbm_integrate(cfg, t, opts,
                                      derive_seed(spec.seed, "sde-noise", si));
            const auto& xf = traj.back().x;
            double tr = 0, tr2 = 0;
            for (double v : xf) {
                tr += v;
                tr2 += v * v;
            }
            sde[si] = {xf[mid], tr, tr2};

            // exact pipeline, independent seeds
            EnsembleSpec bspec = spec;
            bspec.seed = derive_seed(spec.seed, "matrix-arm");
            auto sb = matrix_flow_sample(bspec, t, si);
            double btr = sb.lambda.sum();
            double btr2 = sb.lambda.squaredNorm();
            exact[si] = {sb.lambda(mid), btr, btr2};
        },
        threads);

    auto col = [](const std::vector<Row>& rows, int which) {
        std::vector<double> v(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            v[i] = which == 0 ? rows[i].med : which == 1 ? rows[i].tr : rows[i].tr2;
        return v;
    };
    AgreementReport rep;
    rep.samples = samples;
    rep.stats.push_back(compare("lambda_median", col(sde, 0), col(exact, 0)));
    rep.stats.push_back(compare("trace", col(sde, 1), col(exact, 1)));
    rep.stats.push_back(compare("trace_sq", col(sde, 2), col(exact, 2)));
    return rep;
}

std::vector<FlowRigidityPoint> flow_rigidity_scan(const EnsembleSpec& spec,
                                                  const std::vector<double>& t_list,
                                                  int samples, int threads) {
    std::vector<FlowRigidityPoint> out;
    const bool deterministic_v =
        std::holds_alternative<std::vector<double>>(spec.potential);
    for (double t : t_list) {
        std::vector<double> shared_gammas;
        if (deterministic_v) {
            auto nuhat = SpectralMeasure::empirical(spec.realize_potential());
            shared_gammas = law_at_time(nuhat, spec.t0, t).classical_locations(spec.N);
        }
        std::vector<double> quad(samples);
        parallel_for(
            samples,
            [&](std::size_t si) {
                std::vector<double> gammas = shared_gammas;
                if (!deterministic_v) {
                    auto nuhat =
                        SpectralMeasure::empirical(spec.realize_potential(si));
                    gammas = law_at_time(nuhat, spec.t0, t, SolverOptions{}, 257)
                                 .classical_locations(spec.N);
                }
                auto s = matrix_flow_sample(spec, t, si);
                double acc = 0.0;
                for (int i = 0; i < spec.N; ++i) {
                    double d = s.lambda(i) - gammas[i];
                    acc += d * d;
                }
                quad[si] = acc / spec.N;
            },
            threads);
        FlowRigidityPoint pt;
        pt.t = t;
        for (double q : quad) pt.mean_quad_dev += q;
        pt.mean_quad_dev /= samples;
        std::sort(quad.begin(), quad.end());
        pt.median_quad_dev = quad[quad.size() / 2];
        out.push_back(pt);
    }
    return out;
}

} // namespace rmtlab
