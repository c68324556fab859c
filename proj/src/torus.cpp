#include "membrane/torus.hpp"

#include <string>

#include "membrane/errors.hpp"
#include "membrane/sojourn_gf.hpp"
#include "membrane/walk1d.hpp"

namespace membrane::torus {

namespace {

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
    std::int64_t q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

void check_period(std::int64_t period) {
    if (period < 2) throw DomainError("torus period must be at least 2");
}

void check_site(std::int64_t period, Site x) {
    if (x < 0 || x >= period) throw DomainError("torus sites must lie in 0..N-1");
}

}  // namespace

template <Field T>
T torus_transition_prob(const WalkParams<T>& w, std::int64_t period, Site x, Site y, std::int64_t i) {
    check_period(period);
    check_site(period, x);
    check_site(period, y);
    T acc = from_int<T>(0);
    if (i < 0) return acc;
    // (x - y - i)/N <= k <= (x - y + i)/N, with y + kN the lifted target.
    const std::int64_t lo = -floor_div(-(x - y - i), period);
    const std::int64_t hi = floor_div(x - y + i, period);
    for (std::int64_t k = lo; k <= hi; ++k) acc += walk1d::transition_prob(w, x, y + k * period, i);
    return acc;
}

template <Field T>
SeriesMatrix<T> torus_green_matrix(const WalkParams<T>& w, std::int64_t period, std::span<const Site> receptors,
                                   std::size_t order) {
    const std::size_t r = receptors.size();
    SeriesMatrix<T> g(r, order);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
            for (std::size_t i = 0; i <= order; ++i)
                g(a, b)[i] = torus_transition_prob(w, period, receptors[a], receptors[b], static_cast<std::int64_t>(i));
    return g;
}

template <Field T>
SeriesMatrix<T> torus_h_matrix(const WalkParams<T>& w, std::int64_t period, std::span<const Site> receptors,
                               std::size_t order) {
    const auto g = torus_green_matrix(w, period, receptors, order);
    return SeriesMatrix<T>::identity(receptors.size(), order) - series::inverse(g);
}

template <Field T>
TruncatedSeries<T> torus_h_closed(const WalkParams<T>& w, std::int64_t period, std::size_t order) {
    check_period(period);
    const auto big_a = walk1d::a_series(w, order);
    const auto c_plus = TruncatedSeries<T>::one(order) + big_a;
    const auto c_minus = TruncatedSeries<T>::one(order) - big_a;
    const auto n = static_cast<std::size_t>(period);
    const T two_p = from_int<T>(2) * w.p;
    const auto two_pv = TruncatedSeries<T>::monomial(order, 1, two_p);

    // Numerator and denominator times (2pv)^N.
    const T first_coeff = (power(w.q / w.p, period) + from_int<T>(1)) * w.p;
    const auto first = ((c_plus - c_minus) * series::pow(two_pv, n - 1)).shift_up(1) * first_coeff;
    const auto second =
        ((series::pow(c_plus, n - 1) - series::pow(c_minus, n - 1)) * two_pv).shift_up(1) * (from_int<T>(2) * w.q);
    const auto denom = series::pow(c_plus, n) - series::pow(c_minus, n);
    return (first + second) * series::recip(denom);
}

template <Field T>
std::vector<TruncatedSeries<T>> torus_hit_row(const WalkParams<T>& w, std::int64_t period,
                                              std::span<const Site> receptors, Site x, std::size_t order) {
    const std::size_t r = receptors.size();
    const auto g_inv = series::inverse(torus_green_matrix(w, period, receptors, order));
    std::vector<TruncatedSeries<T>> gx;
    for (std::size_t b = 0; b < r; ++b) {
        TruncatedSeries<T> s(order);
        for (std::size_t i = 0; i <= order; ++i)
            s[i] = torus_transition_prob(w, period, x, receptors[b], static_cast<std::int64_t>(i));
        gx.push_back(s);
    }
    std::vector<TruncatedSeries<T>> row(r, TruncatedSeries<T>(order));
    for (std::size_t b = 0; b < r; ++b)
        for (std::size_t k = 0; k < r; ++k) row[b] += gx[k] * g_inv(k, b);
    return row;
}

template <Field T>
SojournDistribution<T> torus_sojourn_dist(const WalkModel<T>& m, std::size_t n, std::size_t order) {
    if (!m.on_torus()) throw DomainError("torus_sojourn_dist needs the torus topology");
    if (m.walkers() != 1) throw DomainError("torus generating functions cover one walker; use dp or mc");
    if (order == 0) order = std::max<std::size_t>(n, 1);
    if (order < n) throw OrderTooLow("series order is below n");
    const std::span<const Site> rec(m.receptors);
    const auto h = torus_h_matrix(m.params, m.period(), rec, order);
    const std::int64_t idx = m.receptor_index(m.starts[0]);
    std::vector<TruncatedSeries<T>> row;
    if (idx >= 0) {
        for (std::size_t b = 0; b < rec.size(); ++b) row.push_back(h(static_cast<std::size_t>(idx), b));
    } else {
        row = torus_hit_row(m.params, m.period(), rec, m.starts[0], order);
    }
    auto d = sojourn_gf::dist_from_row(h, std::span<const TruncatedSeries<T>>(row), n);
    d.meta["order"] = std::to_string(order);
    d.meta["period"] = std::to_string(m.period());
    return d;
}

#define MEMBRANE_TORUS_INSTANTIATE(T)                                                                                \
    template T torus_transition_prob<T>(const WalkParams<T>&, std::int64_t, Site, Site, std::int64_t);             \
    template SeriesMatrix<T> torus_green_matrix<T>(const WalkParams<T>&, std::int64_t, std::span<const Site>,      \
                                                   std::size_t);                                                    \
    template SeriesMatrix<T> torus_h_matrix<T>(const WalkParams<T>&, std::int64_t, std::span<const Site>,          \
                                               std::size_t);                                                        \
    template TruncatedSeries<T> torus_h_closed<T>(const WalkParams<T>&, std::int64_t, std::size_t);                \
    template std::vector<TruncatedSeries<T>> torus_hit_row<T>(const WalkParams<T>&, std::int64_t,                  \
                                                              std::span<const Site>, Site, std::size_t);            \
    template SojournDistribution<T> torus_sojourn_dist<T>(const WalkModel<T>&, std::size_t, std::size_t);

MEMBRANE_TORUS_INSTANTIATE(double)
MEMBRANE_TORUS_INSTANTIATE(Rational)

}  // namespace membrane::torus
