#include "tda/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "tda/common.hpp"
#include "tda/estimators.hpp"
#include "tda/rng.hpp"

namespace tda {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Continued-fraction convergents; accepts p/q when q <= max_den and the
// convergent reproduces x to 1e-12 relative accuracy.
bool to_rational(double x, std::uint64_t max_den, std::uint64_t& num, std::uint64_t& den) {
    if (!std::isfinite(x) || x < 0.0) return false;
    std::uint64_t h_prev = 1, h_prev2 = 0;  // numerator convergents
    std::uint64_t k_prev = 0, k_prev2 = 1;  // denominator convergents
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        double af = std::floor(frac);
        if (af > 1e15) return false;
        const std::uint64_t a = static_cast<std::uint64_t>(af);
        if (a != 0 && (h_prev > (std::numeric_limits<std::uint64_t>::max() - h_prev2) / std::max<std::uint64_t>(a, 1) ||
                       k_prev > (std::numeric_limits<std::uint64_t>::max() - k_prev2) / std::max<std::uint64_t>(a, 1)))
            return false;
        const std::uint64_t h = a * h_prev + h_prev2;
        const std::uint64_t k = a * k_prev + k_prev2;
        if (k > max_den) return false;
        if (k > 0 && std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <=
                         1e-12 * std::max(1.0, std::abs(x))) {
            num = h;
            den = k;
            return true;
        }
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        const double rem = frac - af;
        if (rem < 1e-15) return false;
        frac = 1.0 / rem;
    }
    return false;
}

// lcm(a, b) or 0 when it would exceed cap.
std::uint64_t lcm_capped(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
    const std::uint64_t g = std::gcd(a, b);
    const std::uint64_t q = a / g;
    if (b != 0 && q > cap / b) return 0;
    return q * b;
}

// Largest-remainder rounding of w (normalized by its mass) to integers
// summing exactly to scale.  Deterministic: ties break on lower index.
void fixed_point_round(const std::vector<double>& w, std::uint64_t scale, std::vector<std::uint64_t>& out) {
    const double mass = std::accumulate(w.begin(), w.end(), 0.0);
    out.assign(w.size(), 0);
    std::vector<std::pair<double, std::size_t>> rema;
    rema.reserve(w.size());
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double raw = w[i] / mass * static_cast<double>(scale);
        const std::uint64_t fl = static_cast<std::uint64_t>(std::floor(raw));
        out[i] = fl;
        sum += fl;
        rema.emplace_back(raw - static_cast<double>(fl), i);
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::uint64_t deficit = scale - sum;
    for (std::size_t k = 0; k < rema.size() && deficit > 0; ++k, --deficit) ++out[rema[k].second];
}

double ground_cost(const PointCloud& a, std::size_t i, const PointCloud& b, std::size_t j, double p) {
    const double* pa = a.soa();
    const double* pb = b.soa();
    const std::size_t na = a.size(), nb = b.size(), dim = a.dim();
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double diff = pa[d * na + i] - pb[d * nb + j];
        sq += diff * diff;
    }
    if (p == 2.0) return sq;
    const double rho = std::sqrt(sq);
    if (p == 1.0) return rho;
    return std::pow(rho, p);
}

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, const TransportParams& params) {
    validate_measure(mu);
    validate_measure(nu);
    require(p >= 1.0, "validation", "wasserstein order p must be >= 1");
    require(mu.support.metric() == PointCloud::Metric::euclidean &&
                nu.support.metric() == PointCloud::Metric::euclidean,
            "validation", "transport requires euclidean supports");
    require(mu.support.dim() == nu.support.dim(), "validation", "transport supports have different dimensions");
    const std::size_t combined = mu.support.size() + nu.support.size();
    require(combined <= params.support_cap, "transport-too-large",
            "combined support size " + std::to_string(combined) + " exceeds cap " +
                std::to_string(params.support_cap));
}

struct FlowEdge {
    int to;
    int rev;
    std::int64_t cap;
    double cost;
};

}  // namespace

void validate_measure(const DiscreteMeasure& mu) {
    require(mu.support.size() > 0, "empty-set", "measure has empty support");
    require(mu.weights.size() == mu.support.size(), "validation",
            "measure has " + std::to_string(mu.weights.size()) + " weights for " +
                std::to_string(mu.support.size()) + " support points");
    double sum = 0.0;
    for (double w : mu.weights) {
        require(std::isfinite(w) && w >= 0.0, "validation", "measure weights must be finite and nonnegative");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "validation",
            "measure weights sum to " + format_double(sum) + ", expected 1");
}

DiscreteMeasure uniform_measure(PointCloud cloud) {
    require(cloud.size() > 0, "empty-set", "measure has empty support");
    const double w = 1.0 / static_cast<double>(cloud.size());
    DiscreteMeasure mu;
    mu.weights.assign(cloud.size(), w);
    mu.support = std::move(cloud);
    return mu;
}

void scale_weights(const std::vector<double>& wa, const std::vector<double>& wb, std::uint64_t fallback_scale,
                   std::vector<std::uint64_t>& out_a, std::vector<std::uint64_t>& out_b, std::uint64_t& total) {
    require(fallback_scale >= 2, "validation", "fallback scale must be >= 2");
    // Rational path: exact when every weight is a ratio with denominator
    // <= 1e6 and the common denominator stays <= 1e9 (covers uniform 1/N).
    const std::uint64_t kMaxDen = 1000000;
    const std::uint64_t kLcmCap = 1000000000ULL;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ra(wa.size()), rb(wb.size());
    std::uint64_t lcd = 1;
    bool rational = true;
    for (std::size_t i = 0; rational && i < wa.size(); ++i) {
        rational = to_rational(wa[i], kMaxDen, ra[i].first, ra[i].second);
        if (rational) rational = (lcd = lcm_capped(lcd, ra[i].second, kLcmCap)) != 0;
    }
    for (std::size_t i = 0; rational && i < wb.size(); ++i) {
        rational = to_rational(wb[i], kMaxDen, rb[i].first, rb[i].second);
        if (rational) rational = (lcd = lcm_capped(lcd, rb[i].second, kLcmCap)) != 0;
    }
    if (rational) {
        out_a.resize(wa.size());
        out_b.resize(wb.size());
        std::uint64_t sum_a = 0, sum_b = 0;
        for (std::size_t i = 0; i < wa.size(); ++i) sum_a += out_a[i] = ra[i].first * (lcd / ra[i].second);
        for (std::size_t i = 0; i < wb.size(); ++i) sum_b += out_b[i] = rb[i].first * (lcd / rb[i].second);
        if (sum_a == sum_b && sum_a > 0) {
            total = sum_a;
            return;
        }
        // Rationals disagreed on total mass; fall through to fixed point.
    }
    fixed_point_round(wa, fallback_scale, out_a);
    fixed_point_round(wb, fallback_scale, out_b);
    total = fallback_scale;
}

double assignment_cost_hungarian(const std::vector<double>& cost, std::size_t n) {
    require(n > 0 && cost.size() == n * n, "validation", "assignment needs a square cost matrix");
    // Potentials-based O(n^3) assignment; 1-indexed with column 0 as the
    // virtual start of each augmenting path.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            std::size_t j1 = 0;
            double delta = kInf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) sum += cost[(match[j] - 1) * n + (j - 1)];
    return sum;
}

double wasserstein_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                        const TransportParams& params) {
    check_pair(mu, nu, p, params);
    const std::size_t na = mu.support.size(), nb = nu.support.size();

    std::vector<std::uint64_t> ma, mb;
    std::uint64_t total_u = 0;
    scale_weights(mu.weights, nu.weights, params.fallback_scale, ma, mb, total_u);
    const auto total = static_cast<std::int64_t>(total_u);

    // Network: 0 = source, 1..na = mu atoms, na+1..na+nb = nu atoms, sink last.
    const int src = 0;
    const int sink = static_cast<int>(na + nb) + 1;
    std::vector<std::vector<FlowEdge>> g(static_cast<std::size_t>(sink) + 1);
    auto add_edge = [&](int a, int b, std::int64_t cap, double cost) {
        g[a].push_back({b, static_cast<int>(g[b].size()), cap, cost});
        g[b].push_back({a, static_cast<int>(g[a].size()) - 1, 0, -cost});
    };
    for (std::size_t i = 0; i < na; ++i)
        add_edge(src, static_cast<int>(i) + 1, static_cast<std::int64_t>(ma[i]), 0.0);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            add_edge(static_cast<int>(i) + 1, static_cast<int>(na + j) + 1, total,
                     ground_cost(mu.support, i, nu.support, j, p));
    for (std::size_t j = 0; j < nb; ++j)
        add_edge(static_cast<int>(na + j) + 1, sink, static_cast<std::int64_t>(mb[j]), 0.0);

    // Successive shortest paths with Dijkstra over reduced costs; original
    // costs are nonnegative, so zero initial potentials are valid.  Reduced
    // costs can dip epsilon-negative from float rounding; clamp them.
    const std::size_t nodes = g.size();
    std::vector<double> pot(nodes, 0.0), dist(nodes);
    std::vector<int> prev_node(nodes), prev_edge(nodes);
    std::int64_t remaining = total;
    while (remaining > 0) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(prev_node.begin(), prev_node.end(), -1);
        dist[src] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            const auto [d, uidx] = heap.top();
            heap.pop();
            if (d > dist[uidx]) continue;
            for (std::size_t ei = 0; ei < g[uidx].size(); ++ei) {
                const FlowEdge& e = g[uidx][ei];
                if (e.cap <= 0) continue;
                double rc = e.cost + pot[uidx] - pot[e.to];
                if (rc < 0.0) rc = 0.0;
                const double nd = d + rc;
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    prev_node[e.to] = uidx;
                    prev_edge[e.to] = static_cast<int>(ei);
                    heap.emplace(nd, e.to);
                }
            }
        }
        require(dist[sink] < kInf, "validation", "transport network is infeasible");
        for (std::size_t v = 0; v < nodes; ++v)
            if (dist[v] < kInf) pot[v] += dist[v];
        std::int64_t push_amt = remaining;
        for (int v = sink; v != src; v = prev_node[v])
            push_amt = std::min(push_amt, g[prev_node[v]][prev_edge[v]].cap);
        for (int v = sink; v != src; v = prev_node[v]) {
            FlowEdge& e = g[prev_node[v]][prev_edge[v]];
            e.cap -= push_amt;
            g[v][e.rev].cap += push_amt;
        }
        remaining -= push_amt;
    }

    // Net flow on each mu->nu edge sits on its reverse edge's capacity.
    double cost_sum = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (const FlowEdge& e : g[i + 1]) {
            if (e.to <= static_cast<int>(na) || e.to == sink || e.cost < 0.0) continue;
            cost_sum += static_cast<double>(g[e.to][e.rev].cap) * e.cost;
        }
    const double mean_cost = cost_sum / static_cast<double>(total);
    if (p == 1.0) return mean_cost;
    if (p == 2.0) return std::sqrt(mean_cost);
    return std::pow(mean_cost, 1.0 / p);
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, const TransportParams& params) {
    check_pair(mu, nu, p, params);
    const std::size_t na = mu.support.size(), nb = nu.support.size();
    const bool equal_uniform = na == nb &&
        std::all_of(mu.weights.begin(), mu.weights.end(), [&](double w) { return w == mu.weights[0]; }) &&
        std::all_of(nu.weights.begin(), nu.weights.end(), [&](double w) { return w == mu.weights[0]; });
    if (equal_uniform) {
        std::vector<double> cost(na * na);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < na; ++j) cost[i * na + j] = ground_cost(mu.support, i, nu.support, j, p);
        const double mean_cost = assignment_cost_hungarian(cost, na) / static_cast<double>(na);
        if (p == 1.0) return mean_cost;
        if (p == 2.0) return std::sqrt(mean_cost);
        return std::pow(mean_cost, 1.0 / p);
    }
    return wasserstein_flow(mu, nu, p, params);
}

StabilityReport verify_stability_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t m,
                                             double p, std::size_t trials, std::uint64_t seed,
                                             const PipelineParams& pipeline, const TransportParams& transport) {
    require(m >= 1, "validation", "sample size m must be >= 1");
    require(trials >= 2, "validation", "need at least 2 trials for a standard error");
    const double w = wasserstein(mu, nu, p, transport);

    // One shared grid for every landscape in the experiment.
    double t_max = pipeline.t_max;
    if (t_max <= 0.0) {
        const std::size_t na = mu.support.size(), nb = nu.support.size(), dim = mu.support.dim();
        std::vector<double> rows((na + nb) * dim);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t d = 0; d < dim; ++d) rows[i * dim + d] = mu.support.soa()[d * na + i];
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t d = 0; d < dim; ++d) rows[(na + j) * dim + d] = nu.support.soa()[d * nb + j];
        t_max = 2.0 * PointCloud::from_points(rows, na + nb, dim).diameter();
    }
    require(t_max > 0.0, "validation", "resolved grid endpoint is not positive");

    auto make_cdf = [](const std::vector<double>& weights) {
        std::vector<double> cdf(weights.size());
        std::partial_sum(weights.begin(), weights.end(), cdf.begin());
        return cdf;
    };
    const std::vector<double> cdf_mu = make_cdf(mu.weights);
    const std::vector<double> cdf_nu = make_cdf(nu.weights);
    auto draw = [m](const std::vector<double>& cdf, Rng& rng) {
        std::vector<std::uint32_t> idx(m);
        const double mass = cdf.back();
        for (std::size_t k = 0; k < m; ++k) {
            const double u = rng.next_double() * mass;
            std::size_t j = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            if (j >= cdf.size()) j = cdf.size() - 1;
            idx[k] = static_cast<std::uint32_t>(j);
        }
        return idx;
    };

    // Trial i draws from streams (seed, 2i) and (seed, 2i+1): results are
    // independent of thread count and evaluation order.
    std::vector<std::vector<double>> vals_mu(trials), vals_nu(trials);
    parallel_for(trials, pipeline.threads, [&](std::size_t i) {
        Rng ra = Rng::stream(seed, 2 * static_cast<std::uint64_t>(i));
        Rng rb = Rng::stream(seed, 2 * static_cast<std::uint64_t>(i) + 1);
        const auto ia = draw(cdf_mu, ra);
        const auto ib = draw(cdf_nu, rb);
        vals_mu[i] = subsample_landscape(mu.support, ia, pipeline, t_max).values;
        vals_nu[i] = subsample_landscape(nu.support, ib, pipeline, t_max).values;
    });

    const std::size_t cells = vals_mu[0].size();
    std::vector<double> sum_a(cells, 0.0), ss_a(cells, 0.0), sum_b(cells, 0.0), ss_b(cells, 0.0);
    for (std::size_t i = 0; i < trials; ++i) {
        for (std::size_t c = 0; c < cells; ++c) {
            const double va = vals_mu[i][c], vb = vals_nu[i][c];
            sum_a[c] += va;
            ss_a[c] += va * va;
            sum_b[c] += vb;
            ss_b[c] += vb * vb;
        }
    }
    const auto n = static_cast<double>(trials);
    double lhs = -1.0;
    std::size_t argmax = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double diff = std::abs(sum_a[c] - sum_b[c]) / n;
        if (diff > lhs) {
            lhs = diff;
            argmax = c;
        }
    }
    auto var_at = [n](const std::vector<double>& sum, const std::vector<double>& ss, std::size_t c) {
        const double v = (ss[c] - sum[c] * sum[c] / n) / (n - 1.0);
        return v > 0.0 ? v : 0.0;
    };
    StabilityReport report;
    report.lhs = lhs;
    report.mc_stderr = std::sqrt(var_at(sum_a, ss_a, argmax) / n + var_at(sum_b, ss_b, argmax) / n);
    report.w_distance = w;
    report.rhs = std::pow(static_cast<double>(m), 1.0 / p) * w;
    report.grid_error = t_max / static_cast<double>(pipeline.grid - 1);
    report.margin = report.rhs + 3.0 * report.mc_stderr + report.grid_error - report.lhs;
    report.violated = report.lhs > report.rhs + 3.0 * report.mc_stderr + report.grid_error;
    report.trials = trials;
    report.m = m;
    report.p = p;
    return report;
}

}  // namespace tda
