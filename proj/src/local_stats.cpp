#include "rmtlab/local_stats.hpp"

#include <algorithm>
#include <cmath>

namespace rmtlab {

namespace {
const double kPi = std::acos(-1.0);
}

UnfoldingTable make_unfolding_table(const FreeConvolutionLaw& law, int N,
                                    int j_lo, int j_hi, double alpha) {
    if (j_lo > j_hi) throw ConfigInvalid("unfolding: empty window");
    int bulk_lo = int(std::ceil(alpha * N));
    int bulk_hi = int(std::floor((1.0 - alpha) * N)) - 1;
    if (j_lo < bulk_lo || j_hi > bulk_hi)
        throw IndexOutOfBulk("window outside [alpha N, (1-alpha) N)");
    UnfoldingTable t;
    t.lo = j_lo;
    t.hi = j_hi;
    t.gamma = law.classical_locations(N);
    std::vector<double> window(t.gamma.begin() + j_lo, t.gamma.begin() + j_hi + 1);
    auto rho = law.density_profile(window);
    t.rho.assign(N, 0.0);
    for (int j = j_lo; j <= j_hi; ++j) t.rho[j] = rho[j - j_lo];
    return t;
}

GapStatistics unfold_gaps(const SpectrumSample& s, const UnfoldingTable& table,
                          const std::vector<int>& m_offsets) {
    GapStatistics g;
    g.j_lo = table.lo;
    g.j_hi = table.hi;
    g.m_offsets = m_offsets;
    int N = s.n();
    if (int(table.gamma.size()) != N)
        throw ConfigInvalid("unfolding table size mismatch");
    for (int m : m_offsets) {
        if (m < 1) throw ConfigInvalid("offsets must be >= 1");
        for (int j = table.lo; j + m <= table.hi; ++j)
            g.gaps.push_back(N * table.rho[j] * (s.lambda(j + m) - s.lambda(j)));
    }
    return g;
}

void append_gaps(GapStatistics& acc, const SpectrumSample& s,
                 const UnfoldingTable& table) {
    auto g = unfold_gaps(s, table, acc.m_offsets.empty()
                                       ? std::vector<int>{1}
                                       : acc.m_offsets);
    acc.j_lo = g.j_lo;
    acc.j_hi = g.j_hi;
    if (acc.m_offsets.empty()) acc.m_offsets = g.m_offsets;
    acc.gaps.insert(acc.gaps.end(), g.gaps.begin(), g.gaps.end());
}

double sine_kernel_pair_correlation(double r) {
    if (r == 0.0) return 0.0;
    double s = std::sin(kPi * r) / (kPi * r);
    return 1.0 - s * s;
}

namespace {

CorrelationEstimate histogram_pairs(
    const std::function<const std::vector<double>&(int)>& points, int n_sets,
    double lo, double hi, double unit, const std::vector<double>& r_edges) {
    // `unit` converts separations to unfolded scale; reference points are
    // those inside [lo, hi].  Normalization: independent points of unfolded
    // density one give 1 in every bin.
    int nbins = int(r_edges.size()) - 1;
    if (nbins < 1) throw ConfigInvalid("pair correlation: need bins");
    double rmax = r_edges.back();
    CorrelationEstimate est;
    est.r_centers.resize(nbins);
    for (int b = 0; b < nbins; ++b)
        est.r_centers[b] = 0.5 * (r_edges[b] + r_edges[b + 1]);
    std::vector<double> sum(nbins, 0.0), sumsq(nbins, 0.0);
    double one_sum = 0.0, one_sq = 0.0;
    for (int si = 0; si < n_sets; ++si) {
        const auto& x = points(si);
        std::vector<double> counts(nbins, 0.0);
        int nref = 0;
        auto first_ref = std::lower_bound(x.begin(), x.end(), lo);
        for (auto it = first_ref; it != x.end() && *it <= hi; ++it) {
            ++nref;
            // scan neighbors on both sides within rmax in unfolded units
            for (auto jt = it + 1; jt != x.end(); ++jt) {
                double r = unit * (*jt - *it);
                if (r > rmax) break;
                auto bin = std::upper_bound(r_edges.begin(), r_edges.end(), r);
                if (bin != r_edges.begin() && bin != r_edges.end())
                    counts[int(bin - r_edges.begin()) - 1] += 1.0;
            }
            for (auto jt = it; jt != x.begin();) {
                --jt;
                double r = unit * (*it - *jt);
                if (r > rmax) break;
                auto bin = std::upper_bound(r_edges.begin(), r_edges.end(), r);
                if (bin != r_edges.begin() && bin != r_edges.end())
                    counts[int(bin - r_edges.begin()) - 1] += 1.0;
            }
        }
        double expected_refs = (hi - lo) * unit;  // unfolded window length
        double one = nref / expected_refs;
        one_sum += one;
        one_sq += one * one;
        for (int b = 0; b < nbins; ++b) {
            double width = r_edges[b + 1] - r_edges[b];
            double v = nref > 0 ? counts[b] / (2.0 * nref * width) : 0.0;
            sum[b] += v;
            sumsq[b] += v * v;
        }
    }
    est.samples = n_sets;
    est.values.resize(nbins);
    est.stderr_values.resize(nbins);
    for (int b = 0; b < nbins; ++b) {
        double mean = sum[b] / n_sets;
        double var = std::max(sumsq[b] / n_sets - mean * mean, 0.0);
        est.values[b] = mean;
        est.stderr_values[b] = std::sqrt(var / std::max(n_sets - 1, 1));
    }
    est.one_point = one_sum / n_sets;
    double ovar = std::max(one_sq / n_sets - est.one_point * est.one_point, 0.0);
    est.one_point_se = std::sqrt(ovar / std::max(n_sets - 1, 1));
    return est;
}

} // namespace

CorrelationEstimate pair_correlation_estimate(
    const std::vector<SpectrumSample>& samples, const FreeConvolutionLaw& law,
    double E, double b, const std::vector<double>& r_edges) {
    if (int(samples.size()) < 100)
        throw TooFewSamples("pair correlation: >= 100 samples");
    double abar = std::min(E - law.endpoints().L_minus,
                           law.endpoints().L_plus - E);
    if (!(abar > 0.0) || b > abar / 2.0)
        throw ConfigInvalid("pair correlation: window exceeds half the bulk margin");
    double rho = law.density_at(E);
    int N = samples.front().n();
    std::vector<std::vector<double>> pts(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        pts[i].assign(samples[i].lambda.data(),
                      samples[i].lambda.data() + samples[i].n());
    auto est = histogram_pairs(
        [&](int i) -> const std::vector<double>& { return pts[i]; },
        int(samples.size()), E - b, E + b, N * rho, r_edges);
    est.E = E;
    est.b = b;
    return est;
}

CorrelationEstimate pair_correlation_points(
    const std::vector<std::vector<double>>& point_sets, double window_lo,
    double window_hi, const std::vector<double>& r_edges) {
    for (const auto& p : point_sets)
        if (!std::is_sorted(p.begin(), p.end()))
            throw ConfigInvalid("point sets must be sorted");
    auto est = histogram_pairs(
        [&](int i) -> const std::vector<double>& { return point_sets[i]; },
        int(point_sets.size()), window_lo, window_hi, 1.0, r_edges);
    est.E = 0.5 * (window_lo + window_hi);
    est.b = 0.5 * (window_hi - window_lo);
    return est;
}

DistributionDistance gap_distribution_distance(const GapStatistics& a,
                                               const GapStatistics& b) {
    if (a.gaps.size() < 1000 || b.gaps.size() < 1000)
        throw TooFewSamples("distribution distance: >= 1000 gaps each");
    std::vector<double> xa = a.gaps, xb = b.gaps;
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    DistributionDistance d;
    d.n_a = xa.size();
    d.n_b = xb.size();
    // KS over the merged sample; W1 = integral |F_a - F_b|
    std::size_t i = 0, j = 0;
    double ks = 0.0, w1 = 0.0, prev = std::min(xa[0], xb[0]);
    while (i < xa.size() || j < xb.size()) {
        double x = (i < xa.size() && (j >= xb.size() || xa[i] <= xb[j]))
                       ? xa[i]
                       : xb[j];
        double fa = double(i) / xa.size(), fb = double(j) / xb.size();
        w1 += std::abs(fa - fb) * (x - prev);
        while (i < xa.size() && xa[i] == x) ++i;
        while (j < xb.size() && xb[j] == x) ++j;
        fa = double(i) / xa.size();
        fb = double(j) / xb.size();
        ks = std::max(ks, std::abs(fa - fb));
        prev = x;
    }
    d.ks = ks;
    d.wasserstein1 = w1;
    return d;
}

ObservableAverage observable_average(const std::vector<SpectrumSample>& samples,
                                     const UnfoldingTable& table,
                                     const NParticleObservable& obs,
                                     const std::vector<int>& m_offsets) {
    if (samples.empty()) throw TooFewSamples("observable average: no samples");
    for (int m : m_offsets)
        if (m < 1) throw ConfigInvalid("offsets must be >= 1");
    int m_max = *std::max_element(m_offsets.begin(), m_offsets.end());
    std::vector<double> per_sample(samples.size(), 0.0);
    std::vector<double> args(m_offsets.size());
    for (std::size_t si = 0; si < samples.size(); ++si) {
        const auto& s = samples[si];
        int N = s.n();
        double acc = 0.0;
        int cnt = 0;
        for (int j = table.lo; j + m_max <= table.hi; ++j) {
            for (std::size_t k = 0; k < m_offsets.size(); ++k)
                args[k] =
                    N * table.rho[j] * (s.lambda(j + m_offsets[k]) - s.lambda(j));
            acc += obs(std::span<const double>(args.data(), args.size()));
            ++cnt;
        }
        per_sample[si] = cnt > 0 ? acc / cnt : 0.0;
    }
    ObservableAverage out;
    out.samples = int(samples.size());
    for (double v : per_sample) out.mean += v;
    out.mean /= per_sample.size();
    double var = 0.0;
    for (double v : per_sample) var += (v - out.mean) * (v - out.mean);
    out.se = per_sample.size() > 1
                 ? std::sqrt(var / (per_sample.size() * (per_sample.size() - 1.0)))
                 : 0.0;
    return out;
}

} // namespace rmtlab
