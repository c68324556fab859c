#include "membrane/walk1d.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "membrane/errors.hpp"

namespace membrane::walk1d {

namespace {

using series::TruncatedSeries;

template <Field T>
T one() {
    return from_int<T>(1);
}

template <Field T>
T zero() {
    return from_int<T>(0);
}

// 1 - 4pq u^2, exactly.
template <Field T>
TruncatedSeries<T> a_squared(const WalkParams<T>& w, std::size_t order) {
    TruncatedSeries<T> s = TruncatedSeries<T>::one(order);
    if (order >= 2) s[2] = -from_int<T>(4) * w.p * w.q;
    return s;
}

// c * u^k * s
template <Field T>
TruncatedSeries<T> scaled_shift(const TruncatedSeries<T>& s, const T& c, std::size_t k) {
    return s.shift_up(k) * c;
}

// minus/plus laws from x in [a, b]; a start on a or b counts as already absorbed there.
template <Field T>
std::pair<TruncatedSeries<T>, TruncatedSeries<T>> two_sided_closed(const WalkParams<T>& w, Site x, Site a, Site b,
                                                                   std::size_t order) {
    if (x == a) return {TruncatedSeries<T>::one(order), TruncatedSeries<T>(order)};
    if (x == b) return {TruncatedSeries<T>(order), TruncatedSeries<T>::one(order)};
    auto gf = hitting_two_sided(w, x, a, b, order);
    return {gf.minus, gf.plus};
}

template <Field T>
T first_return_prob(const WalkParams<T>& w, std::int64_t j) {
    if (j <= 0 || j % 2 != 0) return zero<T>();
    const std::int64_t m = j / 2;
    return binomial_as<T>(2 * m, m) * power(w.p * w.q, m) / from_int<T>(2 * m - 1);
}

template <Field T>
T one_sided_prob(const WalkParams<T>& w, Site x, Site a, std::int64_t j) {
    if (j <= 0) return zero<T>();
    if (x == a) return first_return_prob(w, j);
    const std::int64_t d = x > a ? x - a : a - x;
    return from_int<T>(d) * transition_prob(w, x, a, j) / from_int<T>(j);
}

// Reflection at a, for x and y strictly on the same side of a.
template <Field T>
T one_sided_reflection(const WalkParams<T>& w, Site x, Site y, Site a, std::int64_t j) {
    return transition_prob(w, x, y, j) - power(w.p / w.q, y - a) * transition_prob(w, x, 2 * a - y, j);
}

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
    std::int64_t q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return -floor_div(-num, den); }

// Finite reflection sum for x, y strictly inside (a, b).
template <Field T>
T two_sided_reflection(const WalkParams<T>& w, Site x, Site y, Site a, Site b, std::int64_t j) {
    if (j < 0 || ((j + x - y) % 2 != 0)) return zero<T>();
    const std::int64_t len = b - a;
    const std::int64_t half = (j + x - y) / 2;
    BigInt acc(0);
    // First family: (y-x-j)/(2L) <= l <= (y-x+j)/(2L).
    for (std::int64_t l = ceil_div(y - x - j, 2 * len); l <= floor_div(y - x + j, 2 * len); ++l)
        acc += binomial(j, half + l * len);
    // Second family: (2a-x-y-j)/(2L) <= l <= (2a-x-y+j)/(2L).
    const std::int64_t shifted = (j + x + y) / 2 - a;
    for (std::int64_t l = ceil_div(2 * a - x - y - j, 2 * len); l <= floor_div(2 * a - x - y + j, 2 * len); ++l)
        acc -= binomial(j, shifted + l * len);
    const std::int64_t ups = (j + y - x) / 2;
    const std::int64_t downs = (j + x - y) / 2;
    T weight = power(w.p, ups) * power(w.q, downs);
    if constexpr (std::is_same_v<T, double>) {
        return acc.template convert_to<double>() * weight;
    } else {
        return Rational(acc) * weight;
    }
}

bool strictly_same_side(Site x, Site y, Site a) { return (x < a && y < a) || (x > a && y > a); }

template <Field T>
T stopped_one_sided(const WalkParams<T>& w, Site x, Site y, Site a, std::int64_t j) {
    const bool admissible = (x <= a && y <= a) || (x >= a && y >= a);
    if (!admissible) throw DomainError("one-sided stopped walk needs x and y on the same side of the barrier");
    if (j == 0) return x == y ? one<T>() : zero<T>();
    if (y == a) return one_sided_prob(w, x, a, j);
    if (x == a) {
        T total = zero<T>();
        if (strictly_same_side(a + 1, y, a)) total += w.p * one_sided_reflection(w, a + 1, y, a, j - 1);
        if (strictly_same_side(a - 1, y, a)) total += w.q * one_sided_reflection(w, a - 1, y, a, j - 1);
        return total;
    }
    return one_sided_reflection(w, x, y, a, j);
}

// Walk restarted at s after one step from the boundary: s on a barrier means the
// original walk was absorbed at step 1.
template <Field T>
T two_sided_after_step(const WalkParams<T>& w, Site s, Site y, Site a, Site b, std::int64_t steps) {
    if (s == a || s == b) return (steps == 0 && y == s) ? one<T>() : zero<T>();
    if (steps == 0) return s == y ? one<T>() : zero<T>();
    return two_sided_reflection(w, s, y, a, b, steps);
}

template <Field T>
T stopped_two_sided(const WalkParams<T>& w, Site x, Site y, Site a, Site b, std::int64_t j) {
    if (!(a < b)) throw DomainError("two-sided barrier needs a < b");
    if (x < a || x > b || y < a || y > b) throw DomainError("two-sided stopped walk needs x, y in [a, b]");
    if (j == 0) return x == y ? one<T>() : zero<T>();
    const auto uj = static_cast<std::size_t>(j);
    if (y == a || y == b) {
        if (x == a || x == b) {
            auto gfs = boundary_hitting_gfs(w, a, b, std::nullopt, uj);
            if (x == a) return y == a ? gfs.a_return[uj] : gfs.a_to_b[uj];
            return y == a ? gfs.b_to_a[uj] : gfs.b_return[uj];
        }
        auto gf = hitting_two_sided(w, x, a, b, uj);
        return y == a ? gf.minus[uj] : gf.plus[uj];
    }
    if (x == a) return w.p * two_sided_after_step(w, a + 1, y, a, b, j - 1);
    if (x == b) return w.q * two_sided_after_step(w, b - 1, y, a, b, j - 1);
    return two_sided_reflection(w, x, y, a, b, j);
}

template <Field T>
T stopped_three_sided(const WalkParams<T>& w, Site x, Site y, Site a, Site b, Site c, std::int64_t j) {
    if (!(a < b && b < c)) throw DomainError("three-sided barrier needs a < b < c");
    if (x != b || y != b) throw DomainError("three-sided stopped walk is defined for x = y = b only");
    if (j == 0) return one<T>();
    // Up to b+1, then back to b before c; or down to b-1, then back to b before a.
    T total = zero<T>();
    if (b + 1 < c) total += w.p * stopped_two_sided(w, b + 1, b, b, c, j - 1);
    if (b - 1 > a) total += w.q * stopped_two_sided(w, b - 1, b, a, b, j - 1);
    return total;
}

}  // namespace

template <Field T>
WalkParams<T> WalkParams<T>::make(const T& p) {
    if (!(p > 0 && p < 1)) throw DomainError("walk parameter p must lie in (0, 1)");
    return WalkParams<T>{p, one<T>() - p};
}

template <Field T>
T HittingLaw<T>::total() const {
    T s = zero<T>();
    for (const auto& v : pmf) s += v;
    return s;
}

template <Field T>
T transition_prob(const WalkParams<T>& w, Site x, Site y, std::int64_t i) {
    if (i < 0) return zero<T>();
    const std::int64_t d = y - x;
    if (d > i || -d > i || ((i + d) % 2 != 0)) return zero<T>();
    const std::int64_t ups = (i + d) / 2;
    const std::int64_t downs = (i - d) / 2;
    return binomial_as<T>(i, ups) * power(w.p, ups) * power(w.q, downs);
}

template <Field T>
TruncatedSeries<T> a_series(const WalkParams<T>& w, std::size_t order) {
    return series::sqrt_unit(a_squared(w, order));
}

template <Field T>
TruncatedSeries<T> b_minus_series(const WalkParams<T>& w, std::size_t order) {
    auto one_minus_a = TruncatedSeries<T>::one(order + 1) - a_series(w, order + 1);
    return one_minus_a.drop_low(1) * (one<T>() / (from_int<T>(2) * w.p));
}

template <Field T>
TruncatedSeries<T> b_plus_recip_series(const WalkParams<T>& w, std::size_t order) {
    auto one_minus_a = TruncatedSeries<T>::one(order + 1) - a_series(w, order + 1);
    return one_minus_a.drop_low(1) * (one<T>() / (from_int<T>(2) * w.q));
}

template <Field T>
TruncatedSeries<T> green_series(const WalkParams<T>& w, Site x, Site y, std::size_t order) {
    const auto inv_a = series::recip(a_series(w, order));
    if (x > y) return series::pow(b_minus_series(w, order), static_cast<std::size_t>(x - y)) * inv_a;
    if (x < y) return series::pow(b_plus_recip_series(w, order), static_cast<std::size_t>(y - x)) * inv_a;
    return inv_a;
}

template <Field T>
TruncatedSeries<T> green_series_direct(const WalkParams<T>& w, Site x, Site y, std::size_t order) {
    TruncatedSeries<T> out(order);
    const std::int64_t d = x > y ? x - y : y - x;
    // (pq / varpi)^{|x-y|}: q per net down-step, p per net up-step.
    const T lead = power(x > y ? w.q : w.p, d);
    const T pq = w.p * w.q;
    for (std::int64_t i = 0; d + 2 * i <= static_cast<std::int64_t>(order); ++i)
        out[static_cast<std::size_t>(d + 2 * i)] = lead * binomial_as<T>(2 * i + d, i) * power(pq, i);
    return out;
}

template <Field T>
TruncatedSeries<T> hitting_gf_one_sided(const WalkParams<T>& w, Site x, Site a, std::size_t order) {
    if (x > a) return series::pow(b_minus_series(w, order), static_cast<std::size_t>(x - a));
    if (x < a) return series::pow(b_plus_recip_series(w, order), static_cast<std::size_t>(a - x));
    return TruncatedSeries<T>::one(order) - a_series(w, order);
}

template <Field T>
HittingLaw<T> hitting_pmf_one_sided(const WalkParams<T>& w, Site x, Site a, std::size_t max_j) {
    if (max_j < 1) throw DomainError("hitting law horizon must be at least 1");
    HittingLaw<T> law;
    law.horizon = max_j;
    law.pmf.assign(max_j + 1, zero<T>());
    for (std::size_t j = 1; j <= max_j; ++j) law.pmf[j] = one_sided_prob(w, x, a, static_cast<std::int64_t>(j));
    law.defect = one<T>() - law.total();
    return law;
}

template <Field T>
std::vector<T> odd_binomial_polynomial(std::int64_t m) {
    if (m < 1) throw DomainError("odd binomial polynomial needs m >= 1");
    std::vector<T> poly;
    for (std::int64_t k = 0; 2 * k + 1 <= m; ++k) poly.push_back(binomial_as<T>(m, 2 * k + 1));
    return poly;
}

template <Field T>
TwoSidedGf<T> hitting_two_sided(const WalkParams<T>& w, Site x, Site a, Site b, std::size_t order) {
    if (!(a < x && x < b)) throw DomainError("two-sided hitting needs a < x < b");
    const std::int64_t len = b - a;
    const std::int64_t m = x - a;
    const auto a2 = a_squared(w, order);

    const auto nl = odd_binomial_polynomial<T>(len);
    const auto inv_den = series::recip(series::compose_polynomial<T>(nl, a2));
    const auto n_up = odd_binomial_polynomial<T>(m);
    const auto n_down = odd_binomial_polynomial<T>(b - x);

    TwoSidedGf<T> gf;
    gf.plus = scaled_shift(series::compose_polynomial<T>(n_up, a2), power(from_int<T>(2) * w.p, b - x),
                           static_cast<std::size_t>(b - x)) *
              inv_den;
    gf.minus = scaled_shift(series::compose_polynomial<T>(n_down, a2), power(from_int<T>(2) * w.q, m),
                            static_cast<std::size_t>(m)) *
               inv_den;

    // Total law: multiply numerator and denominator by (2pu)^{L+m} and write B^{+-} = C^{+-} / (2pu).
    const std::size_t ext = order + static_cast<std::size_t>(m);
    const auto big_a = a_series(w, ext);
    const auto c_plus = TruncatedSeries<T>::one(ext) + big_a;
    const auto c_minus = TruncatedSeries<T>::one(ext) - big_a;
    const auto two_pu_l = TruncatedSeries<T>::monomial(ext, static_cast<std::size_t>(len), power(from_int<T>(2) * w.p, len));
    const auto cp_l = series::pow(c_plus, static_cast<std::size_t>(len));
    const auto cm_l = series::pow(c_minus, static_cast<std::size_t>(len));
    const auto numer = (two_pu_l - cm_l) * series::pow(c_plus, static_cast<std::size_t>(m)) -
                       (two_pu_l - cp_l) * series::pow(c_minus, static_cast<std::size_t>(m));
    const auto denom = (cp_l - cm_l).with_order(order) * power(from_int<T>(2) * w.p, m);
    gf.total = numer.drop_low(static_cast<std::size_t>(m)) * series::recip(denom);
    return gf;
}

std::pair<HittingLaw<double>, HittingLaw<double>> hitting_pmf_two_sided_spectral(const WalkParams<double>& w, Site x,
                                                                                 Site a, Site b, std::size_t max_j) {
    if (!(a < x && x < b)) throw DomainError("two-sided hitting needs a < x < b");
    if (max_j < 1) throw DomainError("hitting law horizon must be at least 1");
    const std::int64_t len = b - a;

    // Coefficients of (2 c u)^{shift} f_{m,L}(A(u)).
    auto expand = [&](std::int64_t m, std::int64_t shift, double c) {
        std::vector<double> pmf(max_j + 1, 0.0);
        const auto num = odd_binomial_polynomial<double>(m);
        const auto den = odd_binomial_polynomial<double>(len);
        const double constant_part = num.size() == den.size() ? num.back() / den.back() : 0.0;

        std::vector<double> weight, ratio;
        for (std::int64_t l = 1; 2 * l < len; ++l) {
            const double theta = static_cast<double>(l) * std::numbers::pi / static_cast<double>(len);
            const std::complex<double> z(0.0, std::tan(theta));
            const std::complex<double> one_c(1.0, 0.0);
            const std::complex<double> alpha = (2.0 * z / static_cast<double>(len)) *
                                               (std::pow(one_c + z, static_cast<int>(m)) -
                                                std::pow(one_c - z, static_cast<int>(m))) /
                                               (std::pow(one_c + z, static_cast<int>(len - 1)) +
                                                std::pow(one_c - z, static_cast<int>(len - 1)));
            const double cos2 = std::cos(theta) * std::cos(theta);
            // alpha / (A^2 - z_l^2) = alpha cos^2 / (1 - 4pq cos^2 u^2)
            weight.push_back(alpha.real() * cos2);
            ratio.push_back(4.0 * w.p * w.q * cos2);
        }
        const double lead = std::pow(2.0 * c, static_cast<double>(shift));
        for (std::size_t j = 1; j <= max_j; ++j) {
            const auto sj = static_cast<std::int64_t>(j);
            if (sj < shift || ((sj - shift) % 2 != 0)) continue;
            const std::int64_t k = (sj - shift) / 2;
            double acc = k == 0 ? constant_part : 0.0;
            for (std::size_t l = 0; l < weight.size(); ++l) acc += weight[l] * std::pow(ratio[l], static_cast<double>(k));
            pmf[j] = lead * acc;
        }
        return pmf;
    };

    HittingLaw<double> minus, plus;
    minus.horizon = plus.horizon = max_j;
    minus.pmf = expand(b - x, x - a, w.q);
    plus.pmf = expand(x - a, b - x, w.p);
    minus.defect = 1.0 - minus.total();
    plus.defect = 1.0 - plus.total();
    return {minus, plus};
}

double two_sided_tail_bound(const WalkParams<double>& w, Site x, Site a, Site b, std::size_t horizon) {
    if (!(a < x && x < b)) throw DomainError("two-sided tail bound needs a < x < b");
    const double len = static_cast<double>(b - a);
    double worst_tilt = 0.0;
    for (Site y = a + 1; y < b; ++y)
        worst_tilt = std::max(worst_tilt, std::pow(w.p / w.q, static_cast<double>(y - x) / 2.0));
    const double rho = 2.0 * std::sqrt(w.p * w.q) * std::cos(std::numbers::pi / len);
    return 2.0 * (len - 1.0) * worst_tilt * std::pow(std::fabs(rho), static_cast<double>(horizon));
}

template <Field T>
BoundaryGfs<T> boundary_hitting_gfs(const WalkParams<T>& w, Site a, Site b, std::optional<Site> c, std::size_t order) {
    if (!(a < b)) throw DomainError("boundary hitting needs a < b");
    if (c && !(b < *c)) throw DomainError("boundary hitting needs b < c");
    BoundaryGfs<T> g;
    const auto [up_minus, up_plus] = two_sided_closed(w, a + 1, a, b, order);
    const auto [down_minus, down_plus] = two_sided_closed(w, b - 1, a, b, order);
    g.a_return = scaled_shift(up_minus, w.p, 1) + scaled_shift(hitting_gf_one_sided(w, a - 1, a, order), w.q, 1);
    g.a_to_b = scaled_shift(up_plus, w.p, 1);
    g.b_to_a = scaled_shift(down_minus, w.q, 1);
    g.b_return = scaled_shift(down_plus, w.q, 1) + scaled_shift(hitting_gf_one_sided(w, b + 1, b, order), w.p, 1);
    if (c) {
        const auto [right_minus, right_plus] = two_sided_closed(w, b + 1, b, *c, order);
        g.b_return_between = scaled_shift(right_minus, w.p, 1) + scaled_shift(down_plus, w.q, 1);
    }
    return g;
}

template <Field T>
std::vector<TruncatedSeries<T>> receptor_hit_row(const WalkParams<T>& w, std::span<const Site> receptors, Site x,
                                                 std::size_t order) {
    const std::size_t r = receptors.size();
    if (r == 0) throw DomainError("receptor set must be nonempty");
    for (std::size_t i = 1; i < r; ++i)
        if (!(receptors[i - 1] < receptors[i])) throw DomainError("receptors must be strictly increasing");

    std::vector<TruncatedSeries<T>> row(r, TruncatedSeries<T>(order));
    if (x < receptors.front()) {
        row.front() = hitting_gf_one_sided(w, x, receptors.front(), order);
        return row;
    }
    if (x > receptors.back()) {
        row.back() = hitting_gf_one_sided(w, x, receptors.back(), order);
        return row;
    }
    for (std::size_t i = 0; i < r; ++i) {
        if (x == receptors[i]) {
            if (r == 1) {
                row[0] = hitting_gf_one_sided(w, x, x, order);
            } else if (i == 0) {
                auto g = boundary_hitting_gfs(w, receptors[0], receptors[1], std::nullopt, order);
                row[0] = g.a_return;
                row[1] = g.a_to_b;
            } else if (i == r - 1) {
                auto g = boundary_hitting_gfs(w, receptors[r - 2], receptors[r - 1], std::nullopt, order);
                row[r - 2] = g.b_to_a;
                row[r - 1] = g.b_return;
            } else {
                auto g = boundary_hitting_gfs(w, receptors[i - 1], receptors[i], receptors[i + 1], order);
                auto right = boundary_hitting_gfs(w, receptors[i], receptors[i + 1], std::nullopt, order);
                row[i - 1] = g.b_to_a;
                row[i] = *g.b_return_between;
                row[i + 1] = right.a_to_b;
            }
            return row;
        }
        if (i + 1 < r && receptors[i] < x && x < receptors[i + 1]) {
            auto gf = hitting_two_sided(w, x, receptors[i], receptors[i + 1], order);
            row[i] = gf.minus;
            row[i + 1] = gf.plus;
            return row;
        }
    }
    return row;
}

template <Field T>
T stopped_prob(const WalkParams<T>& w, Site x, Site y, const Barrier& barrier, std::int64_t j) {
    if (j < 0) throw DomainError("step count must be nonnegative");
    return std::visit(
        [&](const auto& bar) -> T {
            using B = std::decay_t<decltype(bar)>;
            if constexpr (std::is_same_v<B, OneSided>) {
                return stopped_one_sided(w, x, y, bar.a, j);
            } else if constexpr (std::is_same_v<B, TwoSided>) {
                return stopped_two_sided(w, x, y, bar.a, bar.b, j);
            } else {
                return stopped_three_sided(w, x, y, bar.a, bar.b, bar.c, j);
            }
        },
        barrier);
}

#define MEMBRANE_WALK1D_INSTANTIATE(T)                                                                              \
    template struct WalkParams<T>;                                                                                  \
    template struct HittingLaw<T>;                                                                                  \
    template T transition_prob<T>(const WalkParams<T>&, Site, Site, std::int64_t);                                  \
    template TruncatedSeries<T> a_series<T>(const WalkParams<T>&, std::size_t);                                     \
    template TruncatedSeries<T> b_minus_series<T>(const WalkParams<T>&, std::size_t);                               \
    template TruncatedSeries<T> b_plus_recip_series<T>(const WalkParams<T>&, std::size_t);                          \
    template TruncatedSeries<T> green_series<T>(const WalkParams<T>&, Site, Site, std::size_t);                     \
    template TruncatedSeries<T> green_series_direct<T>(const WalkParams<T>&, Site, Site, std::size_t);              \
    template TruncatedSeries<T> hitting_gf_one_sided<T>(const WalkParams<T>&, Site, Site, std::size_t);             \
    template HittingLaw<T> hitting_pmf_one_sided<T>(const WalkParams<T>&, Site, Site, std::size_t);                 \
    template std::vector<T> odd_binomial_polynomial<T>(std::int64_t);                                               \
    template TwoSidedGf<T> hitting_two_sided<T>(const WalkParams<T>&, Site, Site, Site, std::size_t);               \
    template BoundaryGfs<T> boundary_hitting_gfs<T>(const WalkParams<T>&, Site, Site, std::optional<Site>,          \
                                                    std::size_t);                                                   \
    template std::vector<TruncatedSeries<T>> receptor_hit_row<T>(const WalkParams<T>&, std::span<const Site>, Site, \
                                                                 std::size_t);                                      \
    template T stopped_prob<T>(const WalkParams<T>&, Site, Site, const Barrier&, std::int64_t);

MEMBRANE_WALK1D_INSTANTIATE(double)
MEMBRANE_WALK1D_INSTANTIATE(Rational)

}  // namespace membrane::walk1d
