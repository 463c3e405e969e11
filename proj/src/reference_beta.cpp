#include "rmtlab/reference_beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmtlab {

namespace {

const double kPi = std::acos(-1.0);

std::vector<double> cumulative_simpson(const std::vector<double>& g, double h) {
    std::vector<double> cum(g.size(), 0.0);
    for (std::size_t k = 2; k < g.size(); k += 2)
        cum[k] = cum[k - 2] + (h / 3.0) * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
    for (std::size_t k = 1; k < g.size(); k += 2)
        cum[k] = cum[k - 1] + (h / 12.0) * (5.0 * g[k - 1] + 8.0 * g[k] - g[k + 1]);
    return cum;
}

// partial integral int_{s_k}^{s} of the local quadratic through three nodes
double cum_query(const std::vector<double>& cum, const std::vector<double>& g,
                 double h, double s) {
    int n = int(g.size());
    s = std::clamp(s, 0.0, (n - 1) * h);
    int k = std::min(int(s / h), n - 2);
    int base = std::min(k, n - 3);
    double g0 = g[base], g1 = g[base + 1], g2 = g[base + 2];
    double a = (g2 - 2 * g1 + g0) / (2 * h * h);
    double b = (g1 - g0) / h - a * (2 * base + 1) * h;
    double c = g0 - a * base * h * base * h - b * base * h;
    auto prim = [&](double x) { return ((a / 3 * x + b / 2) * x + c) * x; };
    return cum[k] + prim(s) - prim(k * h);
}

// quadratic interpolation of nodal values in the s parameter
double interp_nodes(const std::vector<double>& vals, double h, double s) {
    int n = int(vals.size());
    s = std::clamp(s, 0.0, (n - 1) * h);
    int k = std::clamp(int(std::lround(s / h)), 1, n - 2);
    double d = s - k * h;
    double c0 = vals[k];
    double c1 = (vals[k + 1] - vals[k - 1]) / (2 * h);
    double c2 = (vals[k + 1] - 2 * vals[k] + vals[k - 1]) / (h * h);
    return c0 + c1 * d + 0.5 * c2 * d * d;
}

} // namespace

// ------------------------------------------------------------ PotentialModel

PotentialModel PotentialModel::build(const SpectralMeasure& nu, double t0,
                                     double t, const BuildOptions& opts) {
    PotentialModel pm;
    pm.law_ = std::make_shared<FreeConvolutionLaw>(
        law_at_time(nu, t0, t, opts.solver, opts.grid_n));
    pm.t_ = t;
    const auto& law = *pm.law_;
    const auto& nodes = law.grid();
    const auto& mvals = law.m_values();
    int n = int(nodes.size());
    double L_lo = law.endpoints().L_minus, L_hi = law.endpoints().L_plus;
    pm.center_ = 0.5 * (L_lo + L_hi);
    double radius = 0.5 * (L_hi - L_lo);
    double hs = kPi / (n - 1);

    pm.up_.resize(n);
    pm.upp_.resize(n);
    for (int k = 0; k < n; ++k)
        pm.up_[k] = -nodes[k] - 2.0 * mvals[k].real();

    // analytic derivatives of m from the implicit equation m = S(z + m):
    // m' = S'/(1 - S'), m'' = S'' (1 + m')^2 / (1 - S'); only the real parts
    // enter U'' and U'''
    const double theta = law.theta();
    auto m_derivs = [&](double E, Complex m) {
        Complex zm = Complex{E, 0.0} + m;
        Complex s1{0, 0}, s2{0, 0};
        for (std::size_t i = 0; i < nu.points().size(); ++i) {
            Complex d = theta * nu.points()[i] - zm;
            Complex inv2 = 1.0 / (d * d);
            s1 += nu.masses()[i] * inv2;
            s2 += 2.0 * nu.masses()[i] * inv2 / d;
        }
        Complex mp = s1 / (1.0 - s1);
        Complex mpp = s2 * (1.0 + mp) * (1.0 + mp) / (1.0 - s1);
        return std::pair{mp, mpp};
    };
    for (int k = 1; k + 1 < n; ++k) {
        auto [mp, mpp] = m_derivs(nodes[k], mvals[k]);
        pm.upp_[k] = -1.0 - 2.0 * mp.real();
        (void)mpp;
    }

    // Edge Taylor data.  Value and slope come from a node just outside the
    // eta-floor noise band; the curvature is much worse conditioned near the
    // square-root point, so it is taken further inside where Re m'' has no
    // catastrophic cancellation.
    auto node_at_kappa = [&](bool upper, double kappa_target) {
        int jf = upper ? n - 1 : 0;
        int dir = upper ? -1 : 1;
        while (jf + dir > 0 && jf + dir < n - 1) {
            double kap = upper ? L_hi - nodes[jf] : nodes[jf] - L_lo;
            if (kap >= kappa_target) break;
            jf += dir;
        }
        return jf;
    };
    auto edge_fit = [&](bool upper) {
        double kappa_a = std::max(1e-3, 1e-3 * radius);
        double kappa_b = std::max(30.0 * kappa_a, 0.03 * radius);
        int ja = node_at_kappa(upper, kappa_a);
        int jb = node_at_kappa(upper, kappa_b);
        auto [mpb, mppb] = m_derivs(nodes[jb], mvals[jb]);
        double u2 = -2.0 * mppb.real();
        auto [mpa, mppa] = m_derivs(nodes[ja], mvals[ja]);
        (void)mppa;
        double Ea = nodes[ja];
        double u0 = -Ea - 2.0 * mvals[ja].real();
        double u1 = -1.0 - 2.0 * mpa.real();
        double edge = upper ? L_hi : L_lo;
        double d = edge - Ea;
        Side s;
        s.edge = edge;
        s.g0 = u0 + u1 * d + 0.5 * u2 * d * d;
        s.g1 = u1 + u2 * d;
        s.g2 = u2;
        s.width = opts.ext_width;
        return std::pair{s, ja};
    };
    auto [us, juf] = edge_fit(true);
    auto [ls, jlf] = edge_fit(false);
    pm.upper_ = us;
    pm.lower_ = ls;
    // overwrite the eta-floor-limited nodes with the Taylor values so the
    // interior interpolation meets the extension smoothly
    for (int k = juf + 1; k < n; ++k) {
        double d = nodes[k] - L_hi;  // negative
        pm.up_[k] = us.g0 + us.g1 * d + 0.5 * us.g2 * d * d;
        pm.upp_[k] = us.g1 + us.g2 * d;
    }
    for (int k = 0; k < jlf; ++k) {
        double d = nodes[k] - L_lo;  // positive
        pm.up_[k] = ls.g0 + ls.g1 * d + 0.5 * ls.g2 * d * d;
        pm.upp_[k] = ls.g1 + ls.g2 * d;
    }
    pm.upp_[0] = ls.g1;
    pm.upp_[n - 1] = us.g1;

    pm.build_extension(opts);

    // cumulative antiderivative of U' on the support, gauged at the center
    pm.gU_.resize(n);
    for (int k = 0; k < n; ++k)
        pm.gU_[k] = pm.up_[k] * radius * std::sin(k * hs);
    pm.cumU_ = cumulative_simpson(pm.gU_, hs);
    double at_center = cum_query(pm.cumU_, pm.gU_, hs, 0.5 * kPi);
    for (auto& v : pm.cumU_) v -= at_center;

    // convexity floor over the evaluation window
    double wlo = L_lo - pm.lower_.width - 2.0, whi = L_hi + pm.upper_.width + 2.0;
    double floor = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 400; ++k) {
        double x = wlo + (whi - wlo) * k / 400.0;
        floor = std::min(floor, pm.usecond(x));
    }
    pm.convexity_floor_ = floor;

    // strict majorization outside the support: |U'(x) + x| > 2 |Re m(x)|
    if (opts.check_majorization) {
        double margin = std::numeric_limits<double>::infinity();
        for (int side = 0; side < 2; ++side) {
            for (int k = 0; k < 24; ++k) {
                double kap = 1e-3 * std::pow(2.0, k * 0.55);
                if (kap > pm.upper_.width + 2.0) break;
                double x = side ? L_hi + kap : L_lo - kap;
                double lhs = std::abs(pm.uprime(x) + x);
                double rhs = 2.0 * std::abs(pm.law_->m_boundary(x).real());
                margin = std::min(margin, lhs - rhs);
            }
        }
        pm.majorization_margin_ = margin;
        if (!(margin > 0.0))
            throw Error("potential extension fails the majorization bound");
    }
    return pm;
}

void PotentialModel::build_extension(const BuildOptions&) {
    auto solve_side = [&](Side& s, bool upper) {
        double w = s.width;
        double xj = upper ? s.edge + w : s.edge - w;
        double u = upper ? w : -w;  // offset of the junction from the edge
        // cubic q(u) = g0 + g1 u + g2/2 u^2 + a u^3 meeting the linear
        // far-field ramp*x with value and slope continuity at the junction
        double denom = u * u * u - 3.0 * u * u * xj;
        double numer = s.g1 * xj + s.g2 * u * xj - s.g0 - s.g1 * u - 0.5 * s.g2 * u * u;
        s.a = std::abs(denom) > 1e-300 ? numer / denom : 0.0;
        s.ramp = s.g1 + s.g2 * u + 3.0 * s.a * u * u;
        s.junction = xj;
        if (1.0 + s.ramp < 0.05)
            throw Error("far-field slope too negative; widen the extension");
        // antiderivative of the cubic from the edge to the junction
        s.u_at_junction = s.g0 * u + 0.5 * s.g1 * u * u + s.g2 / 6.0 * u * u * u +
                          0.25 * s.a * u * u * u * u;
    };
    solve_side(upper_, true);
    solve_side(lower_, false);
}

double PotentialModel::uprime(double x) const {
    const auto& law = *law_;
    double L_lo = law.endpoints().L_minus, L_hi = law.endpoints().L_plus;
    if (x >= L_lo && x <= L_hi) {
        double radius = 0.5 * (L_hi - L_lo);
        double s = std::acos(std::clamp((center_ - x) / radius, -1.0, 1.0));
        double hs = kPi / (up_.size() - 1);
        return interp_nodes(up_, hs, s);
    }
    const Side& s = x > L_hi ? upper_ : lower_;
    double u = x - s.edge;
    if (std::abs(u) <= s.width)
        return s.g0 + s.g1 * u + 0.5 * s.g2 * u * u + s.a * u * u * u;
    return s.ramp * x;
}

double PotentialModel::usecond(double x) const {
    const auto& law = *law_;
    double L_lo = law.endpoints().L_minus, L_hi = law.endpoints().L_plus;
    if (x >= L_lo && x <= L_hi) {
        double radius = 0.5 * (L_hi - L_lo);
        double s = std::acos(std::clamp((center_ - x) / radius, -1.0, 1.0));
        double hs = kPi / (upp_.size() - 1);
        return interp_nodes(upp_, hs, s);
    }
    const Side& s = x > L_hi ? upper_ : lower_;
    double u = x - s.edge;
    if (std::abs(u) <= s.width) return s.g1 + s.g2 * u + 3.0 * s.a * u * u;
    return s.ramp;
}

double PotentialModel::u_base(double x) const {
    const auto& law = *law_;
    double L_lo = law.endpoints().L_minus, L_hi = law.endpoints().L_plus;
    double radius = 0.5 * (L_hi - L_lo);
    double hs = kPi / (up_.size() - 1);
    if (x >= L_lo && x <= L_hi) {
        double s = std::acos(std::clamp((center_ - x) / radius, -1.0, 1.0));
        return cum_query(cumU_, gU_, hs, s);
    }
    (void)radius;
    const Side& sd = x > L_hi ? upper_ : lower_;
    double edge_val = x > L_hi ? cumU_.back() : cumU_.front();
    double u = x - sd.edge;
    if (std::abs(u) <= sd.width) {
        double cubic = sd.g0 * u + 0.5 * sd.g1 * u * u + sd.g2 / 6.0 * u * u * u +
                       0.25 * sd.a * u * u * u * u;
        return edge_val + cubic;
    }
    double xj = sd.junction;
    return edge_val + sd.u_at_junction + 0.5 * sd.ramp * (x * x - xj * xj);
}

PotentialModel PotentialModel::shifted(double c) const {
    PotentialModel copy = *this;
    copy.offset_ += c;
    return copy;
}

// -------------------------------------------------------------- eom_propagate

std::vector<ParticleConfiguration> eom_propagate(const SpectralMeasure& nu,
                                                 double t0,
                                                 const std::vector<double>& t_grid,
                                                 int N, double dt_internal) {
    if (t_grid.empty()) throw PreconditionViolated("eom: empty time grid");
    SolverOptions sopts;
    auto law0 = law_at_time(nu, t0, t_grid.front(), sopts);
    std::vector<double> gamma = law0.classical_locations(N);

    // d gamma_i/dt = (1/2) U'(t, gamma_i) = -gamma_i/2 - Re m(t, gamma_i + i0)
    auto velocity = [&](double tt, const std::vector<double>& g) {
        double theta = std::exp(-(tt - t0) / 2.0);
        MfcSolver solver(nu, theta, sopts);
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            v[i] = -0.5 * g[i] - solver.boundary(g[i]).real();
        return v;
    };

    std::vector<ParticleConfiguration> out;
    auto push = [&](double tt) {
        ParticleConfiguration cfg;
        cfg.x = gamma;
        cfg.t = tt;
        cfg.beta = 2;
        for (std::size_t i = 1; i < cfg.x.size(); ++i)
            if (!(cfg.x[i] > cfg.x[i - 1]))
                throw OrderViolation("eom trajectories crossed");
        out.push_back(std::move(cfg));
    };

    double t = t_grid.front();
    push(t);
    std::vector<double> k1, k2, k3, k4, tmp(N);
    for (std::size_t m = 1; m < t_grid.size(); ++m) {
        double target = t_grid[m];
        while (t < target - 1e-14) {
            double dt = std::min(dt_internal, target - t);
            k1 = velocity(t, gamma);
            for (int i = 0; i < N; ++i) tmp[i] = gamma[i] + 0.5 * dt * k1[i];
            k2 = velocity(t + 0.5 * dt, tmp);
            for (int i = 0; i < N; ++i) tmp[i] = gamma[i] + 0.5 * dt * k2[i];
            k3 = velocity(t + 0.5 * dt, tmp);
            for (int i = 0; i < N; ++i) tmp[i] = gamma[i] + dt * k3[i];
            k4 = velocity(t + dt, tmp);
            for (int i = 0; i < N; ++i)
                gamma[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            t += dt;
            for (int i = 1; i < N; ++i)
                if (!(gamma[i] > gamma[i - 1]))
                    throw OrderViolation("eom step too large: locations crossed");
        }
        push(target);
    }
    return out;
}

// ---------------------------------------------------------- beta log density

double beta_log_density(const ParticleConfiguration& x, const PotentialModel* U,
                        double beta, int N) {
    x.require_ordered();
    double acc = 0.0;
    for (double xi : x.x) {
        double pot = U ? U->u(xi) : 0.0;
        acc += pot / 2.0 + xi * xi / 4.0;
    }
    double logdens = -beta * N * acc;
    for (int i = 0; i < x.n(); ++i)
        for (int j = i + 1; j < x.n(); ++j)
            logdens += beta * std::log(x.x[j] - x.x[i]);
    if (!std::isfinite(logdens)) throw NonFiniteDensity("log density not finite");
    return logdens;
}

// ------------------------------------------------------------------- sampler

McmcResult mcmc_sample(const PotentialModel* U, double beta, int N,
                       int n_samples, std::uint64_t seed,
                       const McmcOptions& opts) {
    if (N < 1 || N > 64)
        throw PreconditionViolated("mcmc_sample: N capped at 64");
    if (beta <= 0.0) throw PreconditionViolated("mcmc_sample: beta > 0");
    auto rng = make_rng(derive_seed(seed, "mcmc"));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> x(N);
    if (U) {
        x = U->law().classical_locations(N);
    } else {
        for (int i = 0; i < N; ++i)
            x[i] = N == 1 ? 0.0 : -1.8 + 3.6 * i / (N - 1.0);
    }
    auto pot_term = [&](double xi) {
        double p = U ? U->u_base(xi) : 0.0;  // offsets cancel in ratios exactly
        if (!std::isfinite(p)) throw NonFiniteDensity("potential not finite");
        return 0.5 * p + 0.25 * xi * xi;
    };

    double step = opts.initial_step > 0 ? opts.initial_step : 0.8 / std::sqrt(double(N));
    long accepted = 0, proposed = 0;
    auto sweep = [&](bool tune_phase) {
        for (int k = 0; k < N; ++k) {
            double xk = x[k];
            double xp = xk + step * gauss(rng);
            double dlog = -beta * N * (pot_term(xp) - pot_term(xk));
            bool coincident = false;
            for (int j = 0; j < N; ++j) {
                if (j == k) continue;
                double dn = std::abs(xp - x[j]), dd = std::abs(xk - x[j]);
                if (dn == 0.0) {
                    coincident = true;
                    break;
                }
                dlog += beta * (std::log(dn) - std::log(dd));
            }
            ++proposed;
            if (!coincident && std::log(unif(rng) + 1e-300) < dlog) {
                x[k] = xp;
                ++accepted;
            }
        }
        (void)tune_phase;
    };

    // burn-in with step tuning towards the target acceptance band
    int tune_block = 50;
    for (int s = 0; s < opts.burn_in_sweeps; ++s) {
        sweep(true);
        if ((s + 1) % tune_block == 0) {
            double rate = double(accepted) / double(proposed);
            step *= std::exp(0.6 * (rate - opts.target_accept));
            accepted = proposed = 0;
        }
    }

    McmcResult out;
    out.samples.reserve(n_samples);
    accepted = proposed = 0;
    std::vector<double> com_trace;
    com_trace.reserve(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        for (int rep = 0; rep < opts.thin_sweeps; ++rep) sweep(false);
        ParticleConfiguration cfg;
        cfg.x = x;
        std::sort(cfg.x.begin(), cfg.x.end());
        cfg.beta = int(beta);
        out.samples.push_back(cfg);
        double com = 0.0;
        for (double v : cfg.x) com += v;
        com_trace.push_back(com / N);
    }
    out.diag.acceptance_rate = double(accepted) / double(proposed);
    out.diag.step = step;
    // integrated autocorrelation of the center-of-mass trace
    int n = int(com_trace.size());
    double mean = 0.0;
    for (double v : com_trace) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : com_trace) var += (v - mean) * (v - mean);
    var /= n;
    double tau = 1.0;
    for (int lag = 1; lag < n / 4; ++lag) {
        double c = 0.0;
        for (int i = 0; i + lag < n; ++i)
            c += (com_trace[i] - mean) * (com_trace[i + lag] - mean);
        c /= (n - lag) * var;
        if (c < 0.05) break;
        tau += 2.0 * c;
    }
    out.diag.ess = var > 0 ? n / tau : double(n);
    return out;
}

// ------------------------------------------------------------- loop equation

double loop_equation_residual(const PotentialModel& U,
                              const FreeConvolutionLaw& law, ComplexPoint z) {
    if (z.eta < 0.3) throw PreconditionViolated("loop equation: eta >= 0.3");
    Complex zz = z.z();
    Complex m = law.stieltjes_quadrature(zz);
    const auto& nodes = law.grid();
    const auto& rho = law.density_values();
    const auto& qw = law.quad_weights();
    Complex rhs{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k)
        rhs += qw[k] * rho[k] * (nodes[k] + U.uprime(nodes[k])) / (zz - nodes[k]);
    return std::abs(m * m - rhs);
}

// ------------------------------------------------------ conditioned measures

// No containment validation here: the regularity harness must be able to
// evaluate pathological boundary tuples (its negative controls place an
// exterior point inside the interval on purpose).
ConditionedPotential::ConditionedPotential(std::vector<double> exterior, double a,
                                           double b, const PotentialModel* U,
                                           int N)
    : y_(std::move(exterior)), a_(a), b_(b), U_(U), N_(N) {
    if (!(a_ < b_)) throw ConfigInvalid("conditioned potential: empty interval");
    for (double y : y_)
        if (!std::isfinite(y)) throw NonFinite("exterior point not finite");
}

void ConditionedPotential::check(double x) const {
    if (!(x > a_ && x < b_))
        throw OutOfInterval("x outside the open configuration interval");
}

double ConditionedPotential::value(double x) const {
    check(x);
    double acc = (U_ ? U_->u(x) : 0.0) + 0.5 * x * x;
    for (double y : y_) acc -= (2.0 / N_) * std::log(std::abs(x - y));
    return acc;
}

double ConditionedPotential::deriv(double x) const {
    check(x);
    double acc = (U_ ? U_->uprime(x) : 0.0) + x;
    for (double y : y_) acc -= (2.0 / N_) / (x - y);
    return acc;
}

double ConditionedPotential::second(double x) const {
    check(x);
    double acc = (U_ ? U_->usecond(x) : 0.0) + 1.0;
    for (double y : y_) acc += (2.0 / N_) / ((x - y) * (x - y));
    return acc;
}

ConditionedPotential conditioned_external_potential(
    const std::vector<double>& full_config, int L, int K,
    const PotentialModel* U) {
    int N = int(full_config.size());
    if (L - K - 1 < 0 || L + K + 1 >= N)
        throw ConfigInvalid("index window must leave exterior points on both sides");
    for (int i = 1; i < N; ++i)
        if (!(full_config[i] >= full_config[i - 1]))
            throw OrderViolation("configuration not ordered");
    std::vector<double> exterior;
    exterior.reserve(N - (2 * K + 1));
    for (int i = 0; i < N; ++i)
        if (i < L - K || i > L + K) exterior.push_back(full_config[i]);
    double a = full_config[L - K - 1], b = full_config[L + K + 1];
    return ConditionedPotential(std::move(exterior), a, b, U, N);
}

RegularityReport regularity_check(const ConditionedPotential& Vy, int K,
                                  double chi, double rho_bar, int N,
                                  double inf_usecond,
                                  const RegularityThresholds& thr) {
    if (K < 2 || chi <= 0.0 || rho_bar <= 0.0)
        throw PreconditionViolated("regularity check: bad parameters");
    RegularityReport rep;
    double calK = 2.0 * K + 1.0;
    double kchi = std::pow(double(K), chi);
    double len = Vy.interval_length();
    rep.interval_slack = std::abs(len - calK / (N * rho_bar)) * N / kchi;
    rep.interval_ok = rep.interval_slack <= thr.interval;

    double a = Vy.a(), b = Vy.b();
    double shift = rho_bar * kchi / N;
    double worst_vp = 0.0;
    double worst_curv = std::numeric_limits<double>::infinity();
    const int npts = 201;
    for (int k = 0; k < npts; ++k) {
        double x = a + (b - a) * (0.005 + 0.99 * k / (npts - 1.0));
        double d = std::min(x - a, b - x);
        // signed profile: rho log((dist to left + shift)/(dist to right + shift)),
        // which matches rho log(d_+/d_-) in magnitude on either half
        double pred = rho_bar * std::log((x - a + shift) / (b - x + shift));
        double slack = std::abs(Vy.deriv(x) - pred) * N * d / kchi;
        worst_vp = std::max(worst_vp, slack);
        worst_curv = std::min(worst_curv,
                              (Vy.second(x) - 1.0 - inf_usecond) * d);
    }
    rep.vprime_slack = worst_vp;
    rep.vprime_ok = worst_vp <= thr.vprime;
    rep.curvature_margin = worst_curv;
    rep.curvature_ok = worst_curv > 0.0;
    return rep;
}

} // namespace rmtlab
