#ifndef MEMBRANE_SOJOURN_GF_HPP
#define MEMBRANE_SOJOURN_GF_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "membrane/model.hpp"
#include "membrane/series.hpp"

// Exact single-walker machinery over a finite receptor set: the r x r generating
// matrices, per-k extraction of P{T_n = k}, the Q-matrix composition sums, moment
// series, pointwise evaluation of K(u, v), and the one-receptor closed form.

namespace membrane::sojourn_gf {

using series::BivariateTruncation;
using series::SeriesMatrix;
using series::TruncatedSeries;

template <Field T>
struct ReceptorMatrices {
    SeriesMatrix<T> g;       ///< G_{i,j}(u), constant term I
    SeriesMatrix<T> h;       ///< H_{i,j}(u), tridiagonal
    SeriesMatrix<T> l;       ///< L_{i,j}(u) = E_{a_i}(u^{tau_{a_j}})
    SeriesMatrix<T> ltilde;  ///< L with unit diagonal
    /// q_list[i] is the coefficient matrix Q^{(i)} of u^i in H, for i = 0..order (Q^{(0)} = 0).
    std::vector<std::vector<T>> q_list;
};

/// G over the receptors, from the closed forms.
template <Field T>
SeriesMatrix<T> green_matrix(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order);

/// H from the boundary first-step forms (canonical route).
template <Field T>
SeriesMatrix<T> h_matrix_closed(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order);

/// H = I - G^{-1}.
template <Field T>
SeriesMatrix<T> h_matrix_from_green(const SeriesMatrix<T>& g);

/// L and its unit-diagonal companion.
template <Field T>
std::pair<SeriesMatrix<T>, SeriesMatrix<T>> l_matrices(const WalkParams<T>& w, std::span<const Site> receptors,
                                                       std::size_t order);

/// H = L Ltilde^{-1}.
template <Field T>
SeriesMatrix<T> h_matrix_from_l(const SeriesMatrix<T>& l, const SeriesMatrix<T>& ltilde);

template <Field T>
ReceptorMatrices<T> build_matrices(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order);

/// Coefficients c_{k,m} = P{T_m = k} for m <= n, for the walk whose first visit to the
/// receptors is governed by `row` (row i of H for a start on receptor i).
///
/// Column k in v is (1/(1-v)) times row . H^{k-1} (I - H) 1 for k >= 1 and
/// (1/(1-v)) (1 - row . 1) for k = 0.
template <Field T>
BivariateTruncation<T> sojourn_table(const SeriesMatrix<T>& h, std::span<const TruncatedSeries<T>> row,
                                     std::size_t n);

/// P{T_n = k}, k = 0..n, read off the table above.
template <Field T>
SojournDistribution<T> dist_from_row(const SeriesMatrix<T>& h, std::span<const TruncatedSeries<T>> row,
                                     std::size_t n);

/// Composition sums over Q^{(i_1)} ... Q^{(i_k)} 1 with the first factor taken from `row`.
/// Every composition with nonvanishing prefix is visited, so the cost grows like 2^n.
template <Field T>
SojournDistribution<T> dist_qconv_from_row(const SeriesMatrix<T>& h, std::span<const TruncatedSeries<T>> row,
                                           std::size_t n);

/// Largest n accepted by the composition route.
inline constexpr std::size_t kQconvMaxN = 24;

/// One walker on the line starting on a receptor. order defaults to n.
template <Field T>
SojournDistribution<T> sojourn_dist_gf(const WalkModel<T>& m, std::size_t n, std::size_t order = 0);

/// One walker on the line starting off the receptors.
template <Field T>
SojournDistribution<T> sojourn_dist_offstart(const WalkModel<T>& m, std::size_t n, std::size_t order = 0);

/// Composition route for either kind of start.
template <Field T>
SojournDistribution<T> sojourn_dist_qconv(const WalkModel<T>& m, std::size_t n);

/// Per receptor, the v-series of E(T_n) and of E(T_n (T_n - 1)).
template <Field T>
struct MomentSeries {
    std::vector<TruncatedSeries<T>> mean;
    std::vector<TruncatedSeries<T>> second_factorial;
};

/// mean = (1/(1-v)) ([I - H]^{-1} - I) 1 and second_factorial = (2/(1-v)) ([I - H]^{-1} - I)^2 1.
template <Field T>
MomentSeries<T> sojourn_moment_series(const WalkParams<T>& w, std::span<const Site> receptors, std::size_t order);

/// K_i(u, v) at a numeric point, for one walker on the line starting on receptor i.
struct KEval {
    double value = 0;                   ///< r x r solve of [I - uH(v)] K = (1/(1-v)) [I - H(v)] 1
    double green_route = 0;             ///< (1/(1-v)) [(1-u) G(v) + u I]^{-1} 1
    std::optional<double> delta_route;  ///< explicit 2 x 2 inversion through Delta(u, v), r = 2
    std::optional<double> closed_r1;    ///< A(v) / ((1-v)(1 - u(1 - A(v)))), r = 1
};

KEval k_eval_numeric(const WalkModel<double>& m, double u, double v);

/// H(v) and G(v) evaluated from the closed forms at a real point |v| < 1.
std::vector<double> h_matrix_numeric(const WalkParams<double>& w, std::span<const Site> receptors, double v);
std::vector<double> g_matrix_numeric(const WalkParams<double>& w, std::span<const Site> receptors, double v);

/// One walker, one receptor, start on it: the explicit law of the local time.
/// For odd n the law equals that of n - 1; for k > n/2 the probability is 0.
template <Field T>
SojournDistribution<T> closed_form_l1r1(const WalkParams<T>& w, std::size_t n);

/// binom(n-k, n/2) / 2^{n-k} for even n (and the n-1 law for odd n), at p = 1/2.
SojournDistribution<Rational> closed_form_symmetric(std::size_t n);

/// r^{0,n} = P{T_n = 0} = 1 - sum_{m <= n/2} binom(2m,m)/(2m-1) (pq)^m.
template <Field T>
T no_return_prob(const WalkParams<T>& w, std::size_t n);

}  // namespace membrane::sojourn_gf

#endif  // MEMBRANE_SOJOURN_GF_HPP
