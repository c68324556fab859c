#include "membrane/sojourn_gf.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "membrane/errors.hpp"
#include "membrane/walk1d.hpp"

namespace membrane::sojourn_gf {

namespace {

template <Field T>
T zero() {
    return from_int<T>(0);
}

template <Field T>
T one() {
    return from_int<T>(1);
}

template <Field T>
void require_single_line(const WalkModel<T>& m, const char* what) {
    if (m.on_torus()) throw DomainError(std::string(what) + " needs the line topology");
    if (m.walkers() != 1) throw DomainError(std::string(what) + " needs exactly one walker");
}

std::size_t effective_order(std::size_t n, std::size_t order) {
    if (order == 0) return n;
    if (order < n) throw OrderTooLow("series order " + std::to_string(order) + " is below n = " + std::to_string(n));
    return order;
}

template <Field T>
std::vector<TruncatedSeries<T>> matrix_row(const SeriesMatrix<T>& h, std::size_t i) {
    std::vector<TruncatedSeries<T>> row;
    for (std::size_t j = 0; j < h.dim(); ++j) row.push_back(h(i, j));
    return row;
}

BigInt factorial(std::int64_t n) {
    BigInt f(1);
    for (std::int64_t i = 2; i <= n; ++i) f *= i;
    return f;
}

template <Field T>
T from_rational(const Rational& r) {
    if constexpr (std::is_same_v<T, double>) {
        return r.convert_to<double>();
    } else {
        return r;
    }
}

template <Field T>
struct CompositionSums {
    const std::vector<std::vector<T>>& q;  // q[i] is r x r row-major, i = 1..n
    const std::vector<char>& nonzero;
    std::size_t r;
    std::size_t n;
    std::vector<T> sums;  // sums[m] = sum over m-part compositions with total <= n

    void visit(std::size_t depth, std::size_t total, const std::vector<T>& vec) {
        T s = zero<T>();
        bool any = false;
        for (const auto& x : vec) {
            s += x;
            any = any || !is_zero(x);
        }
        if (!any) return;
        sums[depth] += s;
        std::vector<T> next(r);
        for (std::size_t i = 1; total + i <= n; ++i) {
            if (!nonzero[i]) continue;
            for (std::size_t c = 0; c < r; ++c) {
                T acc = zero<T>();
                for (std::size_t k = 0; k < r; ++k) acc += vec[k] * q[i][k * r + c];
                next[c] = acc;
            }
            visit(depth + 1, total + i, next);
        }
    }
};

// Numeric closed forms at a real point v.
struct NumericWalk {
    double p, q, v, a;

    double one_sided(Site x, Site target) const {
        if (v == 0.0) return 0.0;
        if (x > target) return std::pow((1.0 - a) / (2.0 * p * v), static_cast<double>(x - target));
        if (x < target) return std::pow((1.0 - a) / (2.0 * q * v), static_cast<double>(target - x));
        return 1.0 - a;
    }

    static double odd_binomial(std::int64_t m, double w) {
        double acc = 0.0;
        for (std::int64_t k = (m - 1) / 2; k >= 0; --k) acc = acc * w + binomial(m, 2 * k + 1).convert_to<double>();
        return acc;
    }

    // (minus, plus) from x in [lo, hi]; a start on a level counts as absorbed there.
    std::pair<double, double> two_sided(Site x, Site lo, Site hi) const {
        if (x == lo) return {1.0, 0.0};
        if (x == hi) return {0.0, 1.0};
        const double a2 = a * a;
        const double den = odd_binomial(hi - lo, a2);
        return {std::pow(2.0 * q * v, static_cast<double>(x - lo)) * odd_binomial(hi - x, a2) / den,
                std::pow(2.0 * p * v, static_cast<double>(hi - x)) * odd_binomial(x - lo, a2) / den};
    }
};

}  // namespace

template <Field T>
SeriesMatrix<T> green_matrix(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order) {
    const std::size_t r = receptors.size();
    SeriesMatrix<T> g(r, order);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) g.set(i, j, walk1d::green_series(w, receptors[i], receptors[j], order));
    return g;
}

template <Field T>
SeriesMatrix<T> h_matrix_closed(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order) {
    const std::size_t r = receptors.size();
    SeriesMatrix<T> h(r, order);
    for (std::size_t i = 0; i < r; ++i) {
        const auto row = walk1d::receptor_hit_row(w, receptors, receptors[i], order);
        for (std::size_t j = 0; j < r; ++j) h.set(i, j, row[j]);
    }
    return h;
}

template <Field T>
SeriesMatrix<T> h_matrix_from_green(const SeriesMatrix<T>& g) {
    return SeriesMatrix<T>::identity(g.dim(), g.order()) - series::inverse(g);
}

template <Field T>
std::pair<SeriesMatrix<T>, SeriesMatrix<T>> l_matrices(const WalkParams<T>& w, std::span<const Site> receptors,
                                                       std::size_t order) {
    const std::size_t r = receptors.size();
    SeriesMatrix<T> l(r, order), lt(r, order);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            const auto s = walk1d::hitting_gf_one_sided(w, receptors[i], receptors[j], order);
            l.set(i, j, s);
            lt.set(i, j, i == j ? TruncatedSeries<T>::one(order) : s);
        }
    return {l, lt};
}

template <Field T>
SeriesMatrix<T> h_matrix_from_l(const SeriesMatrix<T>& l, const SeriesMatrix<T>& ltilde) {
    return l * series::inverse(ltilde);
}

template <Field T>
ReceptorMatrices<T> build_matrices(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order) {
    if (receptors.empty()) throw DomainError("receptor set must be nonempty");
    if (order < 1) throw DomainError("build_matrices needs order >= 1");
    for (std::size_t i = 1; i < receptors.size(); ++i)
        if (!(receptors[i - 1] < receptors[i])) throw DomainError("receptors must be strictly increasing");
    auto [l, lt] = l_matrices(w, receptors, order);
    ReceptorMatrices<T> out{green_matrix(w, receptors, order), h_matrix_closed(w, receptors, order), l, lt, {}};
    for (std::size_t i = 0; i <= order; ++i) out.q_list.push_back(out.h.coefficient_matrix(i));
    return out;
}

template <Field T>
BivariateTruncation<T> sojourn_table(const SeriesMatrix<T>& h_in, std::span<const TruncatedSeries<T>> row_in,
                                     std::size_t n) {
    const std::size_t r = h_in.dim();
    if (row_in.size() != r) throw DomainError("hitting row length must equal the receptor count");
    if (h_in.order() < n) throw OrderTooLow("H order is below n");
    const SeriesMatrix<T> h = h_in.with_order(n);
    std::vector<TruncatedSeries<T>> row;
    for (const auto& s : row_in) {
        if (s.order() < n) throw OrderTooLow("hitting row order is below n");
        row.push_back(s.with_order(n));
    }

    BivariateTruncation<T> table(n);
    TruncatedSeries<T> escape = TruncatedSeries<T>::one(n);
    for (const auto& s : row) escape -= s;
    table.set_column(0, series::prefix_sums(escape));

    // vec_k = H^k (I - H) 1
    std::vector<TruncatedSeries<T>> vec = h.row_sums();
    for (auto& s : vec) s = TruncatedSeries<T>::one(n) - s;
    for (std::size_t k = 1; k <= n; ++k) {
        TruncatedSeries<T> col(n);
        for (std::size_t j = 0; j < r; ++j) col += row[j] * vec[j];
        table.set_column(k, series::prefix_sums(col));
        if (k < n) vec = h.apply(vec);
    }
    return table;
}

template <Field T>
SojournDistribution<T> dist_from_row(const SeriesMatrix<T>& h, std::span<const TruncatedSeries<T>> row,
                                     std::size_t n) {
    const auto table = sojourn_table(h, row, n);
    SojournDistribution<T> d;
    d.n = n;
    d.method = Method::gf;
    d.pmf = table.row(n);
    d.meta["field"] = to_string(field_tag_of<T>());
    return d;
}

template <Field T>
SojournDistribution<T> dist_qconv_from_row(const SeriesMatrix<T>& h, std::span<const TruncatedSeries<T>> row,
                                           std::size_t n) {
    if (n > kQconvMaxN)
        throw BudgetExceeded("composition route is limited to n <= " + std::to_string(kQconvMaxN));
    const std::size_t r = h.dim();
    if (row.size() != r) throw DomainError("hitting row length must equal the receptor count");
    std::vector<std::vector<T>> q(n + 1);
    std::vector<char> nonzero(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        q[i] = h.coefficient_matrix(i);
        for (const auto& x : q[i]) nonzero[i] = nonzero[i] || !is_zero(x);
    }

    CompositionSums<T> walk{q, nonzero, r, n, std::vector<T>(n + 2, zero<T>())};
    walk.sums[0] = one<T>();
    std::vector<T> first(r);
    for (std::size_t i1 = 1; i1 <= n; ++i1) {
        for (std::size_t j = 0; j < r; ++j) first[j] = row[j].at(i1);
        walk.visit(1, i1, first);
    }

    SojournDistribution<T> d;
    d.n = n;
    d.method = Method::qconv;
    d.pmf.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) d.pmf[k] = walk.sums[k] - walk.sums[k + 1];
    d.meta["field"] = to_string(field_tag_of<T>());
    return d;
}

template <Field T>
SojournDistribution<T> sojourn_dist_gf(const WalkModel<T>& m, std::size_t n, std::size_t order) {
    require_single_line(m, "sojourn_dist_gf");
    const std::int64_t i = m.receptor_index(m.starts[0]);
    if (i < 0) throw DomainError("sojourn_dist_gf needs a start on a receptor; use the off-start route");
    const std::size_t ord = effective_order(n, order);
    const auto h = h_matrix_closed(m.params, std::span<const Site>(m.receptors), ord);
    auto d = dist_from_row(h, std::span<const TruncatedSeries<T>>(matrix_row(h, static_cast<std::size_t>(i))), n);
    d.meta["order"] = std::to_string(ord);
    return d;
}

template <Field T>
SojournDistribution<T> sojourn_dist_offstart(const WalkModel<T>& m, std::size_t n, std::size_t order) {
    require_single_line(m, "sojourn_dist_offstart");
    if (m.is_receptor(m.starts[0])) throw StartOnReceptor();
    const std::size_t ord = effective_order(n, order);
    const std::span<const Site> rec(m.receptors);
    const auto h = h_matrix_closed(m.params, rec, ord);
    const auto row = walk1d::receptor_hit_row(m.params, rec, m.starts[0], ord);
    auto d = dist_from_row(h, std::span<const TruncatedSeries<T>>(row), n);
    d.meta["order"] = std::to_string(ord);
    return d;
}

template <Field T>
SojournDistribution<T> sojourn_dist_qconv(const WalkModel<T>& m, std::size_t n) {
    require_single_line(m, "sojourn_dist_qconv");
    const std::span<const Site> rec(m.receptors);
    const std::size_t ord = std::max<std::size_t>(n, 1);
    const auto h = h_matrix_closed(m.params, rec, ord);
    const std::int64_t i = m.receptor_index(m.starts[0]);
    const auto row = i >= 0 ? matrix_row(h, static_cast<std::size_t>(i))
                            : walk1d::receptor_hit_row(m.params, rec, m.starts[0], ord);
    return dist_qconv_from_row(h, std::span<const TruncatedSeries<T>>(row), n);
}

template <Field T>
MomentSeries<T> sojourn_moment_series(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order) {
    if (order < 1) throw DomainError("moment series need order >= 1");
    const std::size_t r = receptors.size();
    const auto h = h_matrix_closed(w, receptors, order);
    const auto id = SeriesMatrix<T>::identity(r, order);
    const auto resolvent = series::inverse(id - h);  // [I - H]^{-1}
    const auto mean_m = resolvent - id;
    const auto fact_m = from_int<T>(2) * (mean_m * mean_m);
    MomentSeries<T> out;
    for (const auto& s : mean_m.row_sums()) out.mean.push_back(series::prefix_sums(s));
    for (const auto& s : fact_m.row_sums()) out.second_factorial.push_back(series::prefix_sums(s));
    return out;
}

std::vector<double> h_matrix_numeric(const WalkParams<double>& w, std::span<const Site> rec, double v) {
    if (!(std::fabs(v) < 1.0)) throw NumericDomain("K evaluation needs |v| < 1");
    const double disc = 1.0 - 4.0 * w.p * w.q * v * v;
    if (!(disc > 0.0)) throw NumericDomain("1 - 4pq v^2 must be positive");
    const NumericWalk nw{w.p, w.q, v, std::sqrt(disc)};
    const std::size_t r = rec.size();
    std::vector<double> h(r * r, 0.0);
    if (r == 1) {
        h[0] = 1.0 - nw.a;
        return h;
    }
    const double pv = w.p * v, qv = w.q * v;
    for (std::size_t i = 0; i < r; ++i) {
        if (i > 0) {
            // down to a_{i-1} before returning to a_i
            h[i * r + i - 1] = qv * nw.two_sided(rec[i] - 1, rec[i - 1], rec[i]).first;
        }
        if (i + 1 < r) h[i * r + i + 1] = pv * nw.two_sided(rec[i] + 1, rec[i], rec[i + 1]).second;
        const double up = i + 1 < r ? nw.two_sided(rec[i] + 1, rec[i], rec[i + 1]).first
                                    : nw.one_sided(rec[i] + 1, rec[i]);
        const double down = i > 0 ? nw.two_sided(rec[i] - 1, rec[i - 1], rec[i]).second
                                  : nw.one_sided(rec[i] - 1, rec[i]);
        h[i * r + i] = pv * up + qv * down;
    }
    return h;
}

std::vector<double> g_matrix_numeric(const WalkParams<double>& w, std::span<const Site> rec, double v) {
    if (!(std::fabs(v) < 1.0)) throw NumericDomain("K evaluation needs |v| < 1");
    const double disc = 1.0 - 4.0 * w.p * w.q * v * v;
    if (!(disc > 0.0)) throw NumericDomain("1 - 4pq v^2 must be positive");
    const NumericWalk nw{w.p, w.q, v, std::sqrt(disc)};
    const std::size_t r = rec.size();
    std::vector<double> g(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) g[i * r + j] = (i == j ? 1.0 : nw.one_sided(rec[i], rec[j])) / nw.a;
    return g;
}

KEval k_eval_numeric(const WalkModel<double>& m, double u, double v) {
    require_single_line(m, "k_eval_numeric");
    if (!(std::fabs(u) < 1.0 || u == 1.0)) throw NumericDomain("K evaluation needs |u| < 1 or u = 1");
    const std::int64_t idx = m.receptor_index(m.starts[0]);
    if (idx < 0) throw DomainError("K evaluation needs a start on a receptor");
    const auto i = static_cast<std::size_t>(idx);
    const std::span<const Site> rec(m.receptors);
    const std::size_t r = rec.size();
    const auto hv = h_matrix_numeric(m.params, rec, v);
    const auto gv = g_matrix_numeric(m.params, rec, v);
    const auto dim = static_cast<Eigen::Index>(r);
    Eigen::MatrixXd h(dim, dim), g(dim, dim);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = hv[a * r + b];
            g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = gv[a * r + b];
        }
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);

    KEval out;
    const Eigen::VectorXd k = (id - u * h).partialPivLu().solve((id - h) * ones) / (1.0 - v);
    out.value = k(static_cast<Eigen::Index>(i));
    const Eigen::VectorXd kg = ((1.0 - u) * g + u * id).partialPivLu().solve(ones) / (1.0 - v);
    out.green_route = kg(static_cast<Eigen::Index>(i));

    if (r == 1) {
        const double a = std::sqrt(1.0 - 4.0 * m.params.p * m.params.q * v * v);
        out.closed_r1 = a / ((1.0 - v) * (1.0 - u * (1.0 - a)));
    }
    if (r == 2 && u != 0.0) {
        const double h11 = hv[0], h12 = hv[1], h21 = hv[2], h22 = hv[3];
        const double delta = 1.0 - u * (h11 + h22) + u * u * (h11 * h22 - h12 * h21);
        // [I - uH]^{-1} 1 = (1/Delta) (1 + u(H12 - H22), 1 + u(H21 - H11))
        const double col = i == 0 ? 1.0 + u * (h12 - h22) : 1.0 + u * (h21 - h11);
        const double ktilde = (u - 1.0) / (u * (1.0 - v) * delta) * col;
        out.delta_route = ktilde + 1.0 / (u * (1.0 - v));
    }
    return out;
}

template <Field T>
SojournDistribution<T> closed_form_l1r1(const WalkParams<T>& w, std::size_t n) {
    SojournDistribution<T> d;
    d.n = n;
    d.method = Method::closed;
    d.pmf.assign(n + 1, zero<T>());
    d.meta["field"] = to_string(field_tag_of<T>());
    const auto even = static_cast<std::int64_t>(n - n % 2);
    const T pq = w.p * w.q;
    for (std::int64_t k = 0; 2 * k <= even; ++k) {
        Rational bracket(1);
        T series_part = zero<T>();
        for (std::int64_t m = 1; m <= even / 2 - k; ++m) {
            // (2m+k-2)! / (m! (m+k)!) (k^2 - k - 2m)
            const Rational c = Rational(factorial(2 * m + k - 2)) / Rational(factorial(m) * factorial(m + k)) *
                               Rational(k * k - k - 2 * m);
            series_part += from_rational<T>(c) * power(pq, m);
        }
        d.pmf[static_cast<std::size_t>(k)] =
            power(from_int<T>(2) * pq, k) * (from_rational<T>(bracket) + series_part);
    }
    return d;
}

SojournDistribution<Rational> closed_form_symmetric(std::size_t n) {
    SojournDistribution<Rational> d;
    d.n = n;
    d.method = Method::closed;
    d.pmf.assign(n + 1, Rational(0));
    d.meta["field"] = "exact";
    const auto even = static_cast<std::int64_t>(n - n % 2);
    for (std::int64_t k = 0; k <= even; ++k)
        d.pmf[static_cast<std::size_t>(k)] =
            Rational(binomial(even - k, even / 2)) / Rational(BigInt(1) << static_cast<unsigned>(even - k));
    return d;
}

template <Field T>
T no_return_prob(const WalkParams<T>& w, std::size_t n) {
    T acc = one<T>();
    const T pq = w.p * w.q;
    for (std::int64_t m = 1; 2 * m <= static_cast<std::int64_t>(n); ++m)
        acc -= binomial_as<T>(2 * m, m) / from_int<T>(2 * m - 1) * power(pq, m);
    return acc;
}

#define MEMBRANE_SOJOURN_GF_INSTANTIATE(T)                                                                            \
    template SeriesMatrix<T> green_matrix<T>(const WalkParams<T>&, std::span<const Site>, std::size_t);             \
    template SeriesMatrix<T> h_matrix_closed<T>(const WalkParams<T>&, std::span<const Site>, std::size_t);          \
    template SeriesMatrix<T> h_matrix_from_green<T>(const SeriesMatrix<T>&);                                         \
    template std::pair<SeriesMatrix<T>, SeriesMatrix<T>> l_matrices<T>(const WalkParams<T>&, std::span<const Site>, \
                                                                       std::size_t);                                 \
    template SeriesMatrix<T> h_matrix_from_l<T>(const SeriesMatrix<T>&, const SeriesMatrix<T>&);                     \
    template ReceptorMatrices<T> build_matrices<T>(const WalkParams<T>&, std::span<const Site>, std::size_t);       \
    template BivariateTruncation<T> sojourn_table<T>(const SeriesMatrix<T>&, std::span<const TruncatedSeries<T>>,   \
                                                     std::size_t);                                                   \
    template SojournDistribution<T> dist_from_row<T>(const SeriesMatrix<T>&, std::span<const TruncatedSeries<T>>,   \
                                                     std::size_t);                                                   \
    template SojournDistribution<T> dist_qconv_from_row<T>(const SeriesMatrix<T>&,                                  \
                                                           std::span<const TruncatedSeries<T>>, std::size_t);        \
    template SojournDistribution<T> sojourn_dist_gf<T>(const WalkModel<T>&, std::size_t, std::size_t);              \
    template SojournDistribution<T> sojourn_dist_offstart<T>(const WalkModel<T>&, std::size_t, std::size_t);        \
    template SojournDistribution<T> sojourn_dist_qconv<T>(const WalkModel<T>&, std::size_t);                        \
    template MomentSeries<T> sojourn_moment_series<T>(const WalkParams<T>&, std::span<const Site>, std::size_t);    \
    template SojournDistribution<T> closed_form_l1r1<T>(const WalkParams<T>&, std::size_t);                         \
    template T no_return_prob<T>(const WalkParams<T>&, std::size_t);

MEMBRANE_SOJOURN_GF_INSTANTIATE(double)
MEMBRANE_SOJOURN_GF_INSTANTIATE(Rational)

}  // namespace membrane::sojourn_gf
