#include "membrane/multiwalk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "membrane/errors.hpp"
#include "membrane/torus.hpp"
#include "membrane/walk1d.hpp"

namespace membrane::multiwalk {

namespace {

template <Field T>
T zero() {
    return from_int<T>(0);
}

template <Field T>
T one() {
    return from_int<T>(1);
}

void check_length(std::size_t walkers, std::span<const Site> v) {
    if (v.size() != walkers) throw DomainError("site vector length must equal the number of walkers");
}

template <Field T>
void require_line(const WalkModel<T>& m, const char* what) {
    if (m.on_torus()) throw DomainError(std::string(what) + " is defined on the line; use dp or mc on the torus");
}

template <Field T>
T single_transition(const WalkModel<T>& m, Site x, Site y, std::int64_t i) {
    if (m.on_torus()) return torus::torus_transition_prob(m.params, m.period(), m.reduce(x), m.reduce(y), i);
    return walk1d::transition_prob(m.params, x, y, i);
}

// P_x{S(i) not in R} for one walker.
template <Field T>
T single_off_receptors(const WalkModel<T>& m, Site x, std::int64_t i) {
    T on = zero<T>();
    for (Site a : m.receptors) on += single_transition(m, x, a, i);
    return one<T>() - on;
}

// Rational Pochhammer ratio and eviction bookkeeping for the hypergeometric route.
struct HyperParams {
    std::vector<Rational> upper;
    std::vector<Rational> lower;
};

HyperParams hyper_params(std::span<const std::int64_t> xi, std::int64_t alpha, std::size_t j0) {
    HyperParams h;
    const auto ell = xi.size();
    for (std::size_t j = 0; j < ell; ++j) h.upper.emplace_back(alpha + 1, 2);
    for (std::size_t j = 0; j < ell; ++j) h.upper.emplace_back(alpha + 2, 2);
    bool evicted = false;
    for (std::size_t j = 0; j < ell; ++j) {
        const std::int64_t beta = (alpha + xi[j]) / 2;
        for (std::int64_t param : {beta + 1, alpha - beta + 1}) {
            if (!evicted && j == j0 && param == 1) {
                evicted = true;
                continue;
            }
            h.lower.emplace_back(param);
        }
    }
    return h;
}

bool same_parity(std::span<const std::int64_t> xi) {
    for (auto v : xi)
        if (((v - xi[0]) % 2) != 0) return false;
    return true;
}

std::int64_t max_abs(std::span<const std::int64_t> xi) {
    std::int64_t a = 0;
    for (auto v : xi) a = std::max(a, v < 0 ? -v : v);
    return a;
}

// Odometer over a rectangular box of per-coordinate candidate values.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::vector<Site>>& axes) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (++idx[k] < axes[k].size()) return true;
        idx[k] = 0;
    }
    return false;
}

template <Field T>
std::vector<std::vector<Site>> reachable_axes(const WalkModel<T>& m, std::span<const Site> x, std::int64_t i) {
    std::vector<std::vector<Site>> axes(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (m.on_torus()) {
            for (Site s = 0; s < m.period(); ++s) axes[k].push_back(s);
        } else {
            for (Site s = x[k] - i; s <= x[k] + i; s += 2) axes[k].push_back(s);
        }
    }
    return axes;
}

}  // namespace

template <Field T>
T multi_transition_prob(const WalkModel<T>& m, std::span<const Site> x, std::span<const Site> y, std::int64_t i) {
    check_length(m.walkers(), x);
    check_length(m.walkers(), y);
    T prod = one<T>();
    for (std::size_t k = 0; k < x.size(); ++k) {
        prod *= single_transition(m, x[k], y[k], i);
        if (is_zero(prod)) break;
    }
    return prod;
}

template <Field T>
AFunction<T> a_function(std::span<const std::int64_t> xi, std::size_t order) {
    if (xi.empty()) throw DomainError("A-function needs at least one coordinate");
    AFunction<T> f;
    f.shift = max_abs(xi);
    f.reduced = TruncatedSeries<T>(order);
    if (!same_parity(xi)) return f;
    for (std::size_t mm = 0; mm <= order; ++mm) {
        const auto m = static_cast<std::int64_t>(mm);
        BigInt prod(1);
        for (auto v : xi) prod *= binomial(2 * m + f.shift, m + (f.shift + v) / 2);
        if constexpr (std::is_same_v<T, double>) {
            f.reduced[mm] = prod.convert_to<double>();
        } else {
            f.reduced[mm] = Rational(prod);
        }
    }
    return f;
}

template <Field T>
AFunction<T> a_function_hypergeometric(std::span<const std::int64_t> xi, std::size_t order) {
    if (xi.empty()) throw DomainError("A-function needs at least one coordinate");
    AFunction<T> f;
    f.shift = max_abs(xi);
    f.reduced = TruncatedSeries<T>(order);
    if (!same_parity(xi)) return f;

    const std::int64_t alpha = f.shift;
    std::size_t j0 = 0;
    while ((xi[j0] < 0 ? -xi[j0] : xi[j0]) != alpha) ++j0;
    const auto params = hyper_params(xi, alpha, j0);

    Rational lead(1);
    for (auto v : xi) lead *= Rational(binomial(alpha, (alpha + v) / 2));
    const Rational scale = Rational(BigInt(1) << static_cast<unsigned>(2 * xi.size()));  // 4^l

    // term_{m+1} / term_m = prod(a + m) / prod(b + m) * 4^l / (m + 1)
    Rational term = lead;
    for (std::size_t mm = 0; mm <= order; ++mm) {
        if constexpr (std::is_same_v<T, double>) {
            f.reduced[mm] = term.convert_to<double>();
        } else {
            f.reduced[mm] = term;
        }
        const Rational m(static_cast<std::int64_t>(mm));
        Rational ratio = scale / (m + 1);
        for (const auto& a : params.upper) ratio *= a + m;
        for (const auto& b : params.lower) ratio /= b + m;
        term *= ratio;
    }
    return f;
}

template <Field T>
TruncatedSeries<T> multi_green_series(const WalkModel<T>& m, std::span<const Site> x, std::span<const Site> y,
                                      std::size_t order) {
    require_line(m, "multi_green_series");
    check_length(m.walkers(), x);
    check_length(m.walkers(), y);
    const auto ell = static_cast<std::int64_t>(m.walkers());
    std::vector<std::int64_t> xi(x.size());
    std::int64_t drift = 0;  // sum (y_j - x_j)
    for (std::size_t k = 0; k < x.size(); ++k) {
        xi[k] = x[k] - y[k];
        drift += y[k] - x[k];
    }
    const auto a = a_function<T>(xi, order);
    TruncatedSeries<T> g(order);
    if (a.reduced.is_zero()) return g;
    for (std::size_t mm = 0; a.shift + 2 * static_cast<std::int64_t>(mm) <= static_cast<std::int64_t>(order); ++mm) {
        const std::int64_t i = a.shift + 2 * static_cast<std::int64_t>(mm);
        // (p/q)^{drift/2} (pq)^{l i / 2}
        const std::int64_t ep = (ell * i + drift) / 2;
        const std::int64_t eq = (ell * i - drift) / 2;
        g[static_cast<std::size_t>(i)] = a.reduced[mm] * power(m.params.p, ep) * power(m.params.q, eq);
    }
    return g;
}

template <Field T>
T single_stopped_prob(const WalkModel<T>& m, Site x, Site y, std::int64_t j) {
    require_line(m, "single_stopped_prob");
    if (j < 0) throw DomainError("step count must be nonnegative");
    if (j == 0) return x == y ? one<T>() : zero<T>();
    const auto& r = m.receptors;

    if (m.is_receptor(x)) {
        // Decompose over the first step; landing on a receptor ends the walk there.
        auto after = [&](Site s) -> T {
            if (m.is_receptor(s)) return (j == 1 && y == s) ? one<T>() : zero<T>();
            return single_stopped_prob(m, s, y, j - 1);
        };
        return m.params.p * after(x + 1) + m.params.q * after(x - 1);
    }
    if (x < r.front()) {
        if (y > r.front()) return zero<T>();
        return walk1d::stopped_prob(m.params, x, y, walk1d::OneSided{r.front()}, j);
    }
    if (x > r.back()) {
        if (y < r.back()) return zero<T>();
        return walk1d::stopped_prob(m.params, x, y, walk1d::OneSided{r.back()}, j);
    }
    const auto hi = std::upper_bound(r.begin(), r.end(), x);
    const Site a = *(hi - 1);
    const Site b = *hi;
    if (y < a || y > b) return zero<T>();
    return walk1d::stopped_prob(m.params, x, y, walk1d::TwoSided{a, b}, j);
}

template <Field T>
T first_hit_joint_pmf(const WalkModel<T>& m, std::span<const Site> x, std::span<const Site> y, std::int64_t j) {
    require_line(m, "first_hit_joint_pmf");
    check_length(m.walkers(), x);
    check_length(m.walkers(), y);
    if (!m.in_e(y)) throw YNotInE();
    if (j < 1) throw DomainError("first hitting time is at least 1");
    T prod = one<T>();
    for (std::size_t k = 0; k < x.size(); ++k) {
        prod *= single_stopped_prob(m, x[k], y[k], j);
        if (is_zero(prod)) break;
    }
    return prod;
}

template <Field T>
T survival_tau_e(const WalkModel<T>& m, std::span<const Site> x, std::int64_t j) {
    require_line(m, "survival_tau_e");
    check_length(m.walkers(), x);
    if (j < 1) throw DomainError("survival needs j >= 1");
    if (j == 1) return one<T>();
    const auto order = static_cast<std::size_t>(j - 1);
    T prod = one<T>();
    for (Site xk : x) {
        const auto row = walk1d::receptor_hit_row(m.params, std::span<const Site>(m.receptors), xk, order);
        T hit = zero<T>();
        for (const auto& s : row)
            for (std::size_t i = 1; i <= order; ++i) hit += s[i];
        prod *= one<T>() - hit;
    }
    return prod;
}

template <Field T>
T prob_in_e(const WalkModel<T>& m, std::span<const Site> x, std::int64_t i) {
    check_length(m.walkers(), x);
    T off = one<T>();
    for (Site xk : x) off *= single_off_receptors(m, xk, i);
    return one<T>() - off;
}

template <Field T>
Moments<T> sojourn_moments(const WalkModel<T>& m, std::size_t n) {
    if (n < 1) throw DomainError("moments need n >= 1");
    const std::span<const Site> x(m.starts);
    const auto nn = static_cast<std::int64_t>(n);

    T mean = zero<T>();
    for (std::int64_t i = 1; i <= nn; ++i) mean += prob_in_e(m, x, i);

    T cross = zero<T>();
    std::vector<Site> y(x.size());
    for (std::int64_t i = 1; i < nn; ++i) {
        const auto axes = reachable_axes(m, x, i);
        std::vector<std::size_t> idx(x.size(), 0);
        do {
            for (std::size_t k = 0; k < y.size(); ++k) y[k] = axes[k][idx[k]];
            if (!m.in_e(y)) continue;
            const T at = multi_transition_prob(m, x, std::span<const Site>(y), i);
            if (is_zero(at)) continue;
            T tail_mean = zero<T>();
            for (std::int64_t s = 1; s <= nn - i; ++s) tail_mean += prob_in_e(m, std::span<const Site>(y), s);
            cross += at * tail_mean;
        } while (advance(idx, axes));
    }
    Moments<T> out;
    out.mean = mean;
    out.second = mean + from_int<T>(2) * cross;
    out.variance = out.second - mean * mean;
    return out;
}

template <Field T>
Moments<T> moments_from_pmf(std::span<const T> pmf) {
    Moments<T> out{zero<T>(), zero<T>(), zero<T>()};
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        const T kk = from_int<T>(static_cast<std::int64_t>(k));
        out.mean += kk * pmf[k];
        out.second += kk * kk * pmf[k];
    }
    out.variance = out.second - out.mean * out.mean;
    return out;
}

template <Field T>
SojournDistribution<T> sojourn_dist_dp(const WalkModel<T>& m, std::size_t n, double budget) {
    const std::size_t ell = m.walkers();
    const auto nn = static_cast<std::int64_t>(n);
    const std::int64_t width = m.on_torus() ? m.period() : 2 * nn + 1;
    const double cost = static_cast<double>(std::max<std::size_t>(n, 1)) *
                        std::pow(static_cast<double>(width), static_cast<double>(ell));
    if (cost > budget)
        throw BudgetExceeded("dp state budget exceeded: n * width^l = " + std::to_string(cost));

    std::size_t states = 1;
    for (std::size_t k = 0; k < ell; ++k) states *= static_cast<std::size_t>(width);

    // Coordinate k of a state is its offset in the box: x_k - n + c on the line, the site on the torus.
    auto site_of = [&](std::size_t k, std::int64_t c) { return m.on_torus() ? c : m.starts[k] - nn + c; };
    std::vector<std::int64_t> coord(ell);
    std::vector<Site> sites(ell);
    std::vector<char> in_e(states);
    for (std::size_t s = 0; s < states; ++s) {
        std::size_t rest = s;
        for (std::size_t k = 0; k < ell; ++k) {
            sites[k] = site_of(k, static_cast<std::int64_t>(rest % static_cast<std::size_t>(width)));
            rest /= static_cast<std::size_t>(width);
        }
        in_e[s] = m.in_e(sites) ? 1 : 0;
    }

    // Move masks: bit k set means walker k steps up.
    const std::size_t moves = std::size_t{1} << ell;
    std::vector<T> weight(moves);
    for (std::size_t mask = 0; mask < moves; ++mask) {
        T w = one<T>();
        for (std::size_t k = 0; k < ell; ++k) w *= ((mask >> k) & 1U) ? m.params.p : m.params.q;
        weight[mask] = w;
    }
    std::vector<std::size_t> stride(ell);
    for (std::size_t k = 0, st = 1; k < ell; ++k, st *= static_cast<std::size_t>(width)) stride[k] = st;

    std::size_t start = 0;
    for (std::size_t k = 0; k < ell; ++k) {
        const std::int64_t c = m.on_torus() ? m.reduce(m.starts[k]) : nn;
        start += static_cast<std::size_t>(c) * stride[k];
    }

    const std::size_t kdim = n + 1;
    std::vector<T> cur(states * kdim, zero<T>()), next(states * kdim, zero<T>());
    std::vector<char> active(states, 0), next_active(states, 0);
    cur[start * kdim] = one<T>();
    active[start] = 1;

    for (std::size_t step = 0; step < n; ++step) {
        std::fill(next_active.begin(), next_active.end(), 0);
        for (auto& v : next) v = zero<T>();
        for (std::size_t s = 0; s < states; ++s) {
            if (!active[s]) continue;
            std::size_t rest = s;
            for (std::size_t k = 0; k < ell; ++k) {
                coord[k] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(width));
                rest /= static_cast<std::size_t>(width);
            }
            for (std::size_t mask = 0; mask < moves; ++mask) {
                std::size_t t = 0;
                for (std::size_t k = 0; k < ell; ++k) {
                    std::int64_t c = coord[k] + (((mask >> k) & 1U) ? 1 : -1);
                    if (m.on_torus()) c = (c + width) % width;
                    t += static_cast<std::size_t>(c) * stride[k];
                }
                const std::size_t bump = in_e[t] ? 1 : 0;
                for (std::size_t k = 0; k <= step; ++k) {
                    const T& mass = cur[s * kdim + k];
                    if (is_zero(mass)) continue;
                    next[t * kdim + k + bump] += weight[mask] * mass;
                }
                next_active[t] = 1;
            }
        }
        std::swap(cur, next);
        std::swap(active, next_active);
    }

    SojournDistribution<T> d;
    d.n = n;
    d.method = Method::dp;
    d.pmf.assign(kdim, zero<T>());
    for (std::size_t s = 0; s < states; ++s) {
        if (!active[s]) continue;
        for (std::size_t k = 0; k < kdim; ++k) d.pmf[k] += cur[s * kdim + k];
    }
    d.meta["field"] = to_string(field_tag_of<T>());
    d.meta["states"] = std::to_string(states);
    return d;
}

#define MEMBRANE_MULTIWALK_INSTANTIATE(T)                                                                             \
    template T multi_transition_prob<T>(const WalkModel<T>&, std::span<const Site>, std::span<const Site>,           \
                                        std::int64_t);                                                                \
    template AFunction<T> a_function<T>(std::span<const std::int64_t>, std::size_t);                                 \
    template AFunction<T> a_function_hypergeometric<T>(std::span<const std::int64_t>, std::size_t);                  \
    template TruncatedSeries<T> multi_green_series<T>(const WalkModel<T>&, std::span<const Site>,                    \
                                                      std::span<const Site>, std::size_t);                           \
    template T single_stopped_prob<T>(const WalkModel<T>&, Site, Site, std::int64_t);                                \
    template T first_hit_joint_pmf<T>(const WalkModel<T>&, std::span<const Site>, std::span<const Site>,             \
                                      std::int64_t);                                                                  \
    template T survival_tau_e<T>(const WalkModel<T>&, std::span<const Site>, std::int64_t);                          \
    template T prob_in_e<T>(const WalkModel<T>&, std::span<const Site>, std::int64_t);                               \
    template Moments<T> sojourn_moments<T>(const WalkModel<T>&, std::size_t);                                        \
    template Moments<T> moments_from_pmf<T>(std::span<const T>);                                                     \
    template SojournDistribution<T> sojourn_dist_dp<T>(const WalkModel<T>&, std::size_t, double);

MEMBRANE_MULTIWALK_INSTANTIATE(double)
MEMBRANE_MULTIWALK_INSTANTIATE(Rational)

}  // namespace membrane::multiwalk
