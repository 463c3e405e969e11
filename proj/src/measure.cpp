#include "rmtlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

namespace rmtlab {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kMeanTol = 1e-10;

double total(const std::vector<double>& w) {
    return std::accumulate(w.begin(), w.end(), 0.0);
}

} // namespace

void SpectralMeasure::validate() const {
    if (points_.empty()) throw ConfigInvalid("measure: no support points");
    if (points_.size() != masses_.size())
        throw ConfigInvalid("measure: points/masses size mismatch");
    double mass = total(masses_);
    if (std::abs(mass - 1.0) > kMassTol)
        throw ConfigInvalid("measure: mass " + std::to_string(mass) + " != 1");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || !std::isfinite(masses_[i]) || masses_[i] < 0)
            throw ConfigInvalid("measure: non-finite or negative entry");
        if (points_[i] < lo_ - 1e-14 || points_[i] > hi_ + 1e-14)
            throw ConfigInvalid("measure: point outside support interval");
    }
    // Limiting measures are centered; empirical counterparts of iid draws
    // carry the O(N^{-1/2}) fluctuation of the sample mean, so only a loose
    // sanity bound applies to them.
    double mu = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) mu += points_[i] * masses_[i];
    double tol = kind_ == MeasureKind::Empirical ? 1.0 : kMeanTol;
    if (std::abs(mu) > tol)
        throw ConfigInvalid("measure: not centered, mean = " + std::to_string(mu));
}

void SpectralMeasure::build_cdf() {
    cum_.resize(masses_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        acc += masses_[i];
        cum_[i] = acc;
    }
}

SpectralMeasure SpectralMeasure::atoms(std::vector<std::pair<double, double>> atom_list) {
    std::sort(atom_list.begin(), atom_list.end());
    SpectralMeasure m;
    m.kind_ = MeasureKind::Atoms;
    for (auto& [x, w] : atom_list) {
        m.points_.push_back(x);
        m.masses_.push_back(w);
    }
    m.lo_ = m.points_.front();
    m.hi_ = m.points_.back();
    m.meta_ = {{"kind", "atoms"}};
    m.validate();
    m.build_cdf();
    return m;
}

SpectralMeasure SpectralMeasure::density(std::vector<double> nodes,
                                         std::vector<double> values,
                                         std::vector<double> quad_weights,
                                         double lo, double hi) {
    if (nodes.size() != values.size() || nodes.size() != quad_weights.size())
        throw ConfigInvalid("measure: density arrays size mismatch");
    SpectralMeasure m;
    m.kind_ = MeasureKind::Density;
    m.points_ = std::move(nodes);
    m.values_ = std::move(values);
    m.masses_.resize(m.points_.size());
    for (std::size_t i = 0; i < m.points_.size(); ++i)
        m.masses_[i] = m.values_[i] * quad_weights[i];
    m.lo_ = lo;
    m.hi_ = hi;
    m.meta_ = {{"kind", "density"}};
    m.validate();
    m.build_cdf();
    return m;
}

SpectralMeasure SpectralMeasure::empirical(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    SpectralMeasure m;
    m.kind_ = MeasureKind::Empirical;
    m.points_ = std::move(sample);
    m.masses_.assign(m.points_.size(), 1.0 / static_cast<double>(m.points_.size()));
    m.lo_ = m.points_.front();
    m.hi_ = m.points_.back();
    m.meta_ = {{"kind", "empirical"}};
    m.validate();
    m.build_cdf();
    return m;
}

SpectralMeasure SpectralMeasure::point_mass() {
    auto m = atoms({{0.0, 1.0}});
    m.meta_ = {{"kind", "point_mass"}};
    return m;
}

SpectralMeasure SpectralMeasure::two_point(double a) {
    if (a < 0) throw ConfigInvalid("two_point: a must be >= 0");
    if (a == 0) return point_mass();
    auto m = atoms({{-a, 0.5}, {a, 0.5}});
    m.meta_ = {{"kind", "two_point"}, {"a", a}};
    return m;
}

SpectralMeasure SpectralMeasure::uniform(double lo, double hi, int n) {
    if (!(lo < hi) || n < 2) throw ConfigInvalid("uniform: bad parameters");
    double h = (hi - lo) / n;
    std::vector<double> nodes(n), vals(n, 1.0 / (hi - lo)), w(n, h);
    for (int i = 0; i < n; ++i) nodes[i] = lo + (i + 0.5) * h;
    // pin the discrete mass to exactly 1
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += vals[i] * w[i];
    for (int i = 0; i < n; ++i) vals[i] /= s;
    auto m = density(std::move(nodes), std::move(vals), std::move(w), lo, hi);
    m.meta_ = {{"kind", "uniform"}, {"lo", lo}, {"hi", hi}, {"n", n}};
    return m;
}

SpectralMeasure SpectralMeasure::jacobi(double a, double b, int n) {
    if (a < -0.5 || b < -0.5 || a >= 1.0 || b >= 1.0 || n < 16)
        throw ConfigInvalid("jacobi: need a,b in [-1/2, 1) and n >= 16");
    // substitute v = -cos(phi); the weight (1+v)^a (1-v)^b sin(phi) is bounded
    // and vanishes at both ends for a,b > -1/2, so a midpoint rule in phi
    // converges fast.  Mass is normalized to 1 exactly by the discrete sum.
    const double pi = std::acos(-1.0);
    double h = pi / n;
    std::vector<double> nodes(n), raw(n);
    for (int i = 0; i < n; ++i) {
        double phi = (i + 0.5) * h;
        double v = -std::cos(phi);
        nodes[i] = v;
        raw[i] = std::pow(1.0 + v, a) * std::pow(1.0 - v, b) * std::sin(phi);
    }
    double z = total(raw);
    std::vector<double> vals(n), w(n, h);
    for (int i = 0; i < n; ++i) vals[i] = raw[i] / (z * h);
    // center exactly by shifting nodes by the discrete mean
    double mu = 0.0;
    for (int i = 0; i < n; ++i) mu += nodes[i] * vals[i] * w[i];
    for (int i = 0; i < n; ++i) nodes[i] -= mu;
    auto m = density(std::move(nodes), std::move(vals), std::move(w), -1.0 - mu, 1.0 - mu);
    m.meta_ = {{"kind", "jacobi"}, {"a", a}, {"b", b}, {"n", n}};
    return m;
}

double SpectralMeasure::mean() const {
    double mu = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) mu += points_[i] * masses_[i];
    return mu;
}

Complex SpectralMeasure::stieltjes(Complex z) const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < points_.size(); ++i)
        acc += masses_[i] / (points_[i] - z);
    return acc;
}

double SpectralMeasure::second_inverse_moment(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double d = points_[i] - x;
        if (d == 0.0) return std::numeric_limits<double>::infinity();
        acc += masses_[i] / (d * d);
    }
    return acc;
}

double SpectralMeasure::cdf(double x) const {
    // mass of (-inf, x];  density kind treats each node as a cell
    // [node - w/2, node + w/2) with constant density.
    if (kind_ != MeasureKind::Density) {
        auto it = std::upper_bound(points_.begin(), points_.end(), x);
        if (it == points_.begin()) return 0.0;
        return cum_[static_cast<std::size_t>(it - points_.begin()) - 1];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double w = masses_[i] / std::max(values_[i], 1e-300);
        double a = points_[i] - 0.5 * w, b = points_[i] + 0.5 * w;
        if (x >= b)
            acc += masses_[i];
        else if (x > a)
            acc += masses_[i] * (x - a) / (b - a);
        else
            break;
    }
    return acc;
}

double SpectralMeasure::quantile(double p) const {
    if (p < 0.0 || p > 1.0) throw ConfigInvalid("quantile: p outside [0,1]");
    auto it = std::lower_bound(cum_.begin(), cum_.end(), p - 1e-15);
    std::size_t k = std::min<std::size_t>(it - cum_.begin(), points_.size() - 1);
    if (kind_ != MeasureKind::Density) return points_[k];
    double prev = k == 0 ? 0.0 : cum_[k - 1];
    double w = masses_[k] / std::max(values_[k], 1e-300);
    double frac = masses_[k] > 0 ? (p - prev) / masses_[k] : 0.0;
    frac = std::clamp(frac, 0.0, 1.0);
    return points_[k] - 0.5 * w + frac * w;
}

std::uint64_t SpectralMeasure::digest() const {
    std::uint64_t h = fnv1a("spectral-measure");
    auto mix = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = splitmix64(h ^ bits);
    };
    mix(static_cast<double>(static_cast<int>(kind_)));
    mix(lo_);
    mix(hi_);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        mix(points_[i]);
        mix(masses_[i]);
    }
    return h;
}

nlohmann::json SpectralMeasure::to_json() const {
    nlohmann::json j = meta_;
    j["support"] = {lo_, hi_};
    if (meta_.value("kind", "") == "atoms" || kind_ == MeasureKind::Atoms) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < points_.size(); ++i)
            arr.push_back({points_[i], masses_[i]});
        j["atoms"] = arr;
    } else if (kind_ == MeasureKind::Empirical) {
        j["sample"] = points_;
    }
    return j;
}

SpectralMeasure SpectralMeasure::from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "point_mass") return point_mass();
    if (kind == "two_point") return two_point(j.at("a").get<double>());
    if (kind == "uniform")
        return uniform(j.at("lo").get<double>(), j.at("hi").get<double>(),
                       j.value("n", 512));
    if (kind == "jacobi")
        return jacobi(j.at("a").get<double>(), j.at("b").get<double>(),
                      j.value("n", 512));
    if (kind == "atoms") {
        std::vector<std::pair<double, double>> atom_list;
        for (const auto& a : j.at("atoms"))
            atom_list.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return atoms(std::move(atom_list));
    }
    if (kind == "empirical") {
        if (j.contains("sample_path")) {
            std::ifstream in(j["sample_path"].get<std::string>());
            if (!in)
                throw ConfigInvalid("measure: cannot open sample_path " +
                                    j["sample_path"].get<std::string>());
            std::vector<double> sample;
            double v;
            while (in >> v) sample.push_back(v);
            return empirical(std::move(sample));
        }
        return empirical(j.at("sample").get<std::vector<double>>());
    }
    throw ConfigInvalid("measure: unknown kind '" + kind + "'");
}

Complex stieltjes_of_measure(const SpectralMeasure& nu, ComplexPoint z) {
    if (!(z.eta > 0.0)) throw PreconditionViolated("stieltjes: need eta > 0");
    return nu.stieltjes(z.z());
}

SupportConditionReport check_support_condition(const SpectralMeasure& nu,
                                               int grid_size) {
    if (grid_size < 64) throw PreconditionViolated("support check: grid_size >= 64");
    SupportConditionReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    rep.divergent = true;
    double lo = nu.lo(), hi = nu.hi();
    if (hi - lo <= 0) {
        rep.argmin = lo;
        return rep;  // single-point hull: divergent at the atom
    }
    double cell = (hi - lo) / grid_size;
    const auto& pts = nu.points();
    const auto& vals = nu.density_values();
    auto divergent_at = [&](double x) {
        if (nu.kind() == MeasureKind::Density) {
            // inside a region of strictly positive density the integral blows up
            auto it = std::lower_bound(pts.begin(), pts.end(), x);
            std::size_t k = std::min<std::size_t>(it - pts.begin(), pts.size() - 1);
            std::size_t k2 = k > 0 ? k - 1 : k;
            return vals[k] > 1e-12 || vals[k2] > 1e-12;
        }
        auto it = std::lower_bound(pts.begin(), pts.end(), x);
        double d = std::numeric_limits<double>::infinity();
        if (it != pts.end()) d = std::min(d, std::abs(*it - x));
        if (it != pts.begin()) d = std::min(d, std::abs(*(it - 1) - x));
        return d <= cell;
    };
    double best = std::numeric_limits<double>::infinity(), bestx = lo;
    for (int g = 0; g <= grid_size; ++g) {
        double x = lo + g * cell;
        if (divergent_at(x)) continue;
        double v = nu.second_inverse_moment(x);
        if (v < best) {
            best = v;
            bestx = x;
        }
    }
    if (!std::isfinite(best)) return rep;  // every grid point divergent
    // one parabolic refinement around the grid minimum
    double xa = bestx - cell, xb = bestx + cell;
    if (!divergent_at(xa) && !divergent_at(xb) && xa >= lo && xb <= hi) {
        double fa = nu.second_inverse_moment(xa);
        double fb = nu.second_inverse_moment(xb);
        double denom = fa - 2 * best + fb;
        if (denom > 0) {
            double xs = bestx + 0.5 * cell * (fa - fb) / denom;
            if (xs > xa && xs < xb && !divergent_at(xs)) {
                double fs = nu.second_inverse_moment(xs);
                if (fs < best) {
                    best = fs;
                    bestx = xs;
                }
            }
        }
    }
    rep.min_value = best;
    rep.divergent = false;
    rep.argmin = bestx;
    return rep;
}

std::vector<double> deterministic_quantile_potential(const SpectralMeasure& nu, int N) {
    if (N < 1) throw PreconditionViolated("quantile potential: N >= 1");
    std::vector<double> v(N);
    for (int i = 1; i <= N; ++i)
        v[i - 1] = nu.quantile((i - 0.5) / N);
    return v;
}

std::vector<double> sample_iid_potential(const SpectralMeasure& nu, int N,
                                         std::uint64_t seed) {
    if (N < 1) throw PreconditionViolated("iid potential: N >= 1");
    auto rng = make_rng(derive_seed(seed, "iid-potential"));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = nu.quantile(u(rng));
    std::sort(v.begin(), v.end());
    return v;
}

double stieltjes_distance(const SpectralMeasure& a, const SpectralMeasure& b) {
    double lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
    double best = 0.0;
    auto probe = [&](Complex z) {
        best = std::max(best, std::abs(a.stieltjes(z) - b.stieltjes(z)));
    };
    for (int k = 0; k <= 64; ++k) {
        double E = (lo - 1.0) + (hi - lo + 2.0) * k / 64.0;
        probe({E, 1.0});
    }
    for (int k = 0; k <= 16; ++k) {
        probe({lo - 2.0 + k / 16.0, 0.0});
        probe({hi + 1.0 + k / 16.0, 0.0});
    }
    return best;
}

} // namespace rmtlab
