#ifndef MEMBRANE_TORUS_HPP
#define MEMBRANE_TORUS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "membrane/model.hpp"
#include "membrane/series.hpp"

// The walk on Z/NZ. Exact computations work intrinsically on the cycle; the lift to
// the line appears only through the finite wrap sum of transition probabilities.

namespace membrane::torus {

using series::SeriesMatrix;
using series::TruncatedSeries;

/// P'_x{S'(i) = y} = sum_k P_x{S(i) = y + kN} over (x-y-i)/N <= k <= (x-y+i)/N.
template <Field T>
T torus_transition_prob(const WalkParams<T>& w, std::int64_t period, Site x, Site y, std::int64_t i);

/// G'(v) over the receptor sites.
template <Field T>
SeriesMatrix<T> torus_green_matrix(const WalkParams<T>& w, std::int64_t period, std::span<const Site> receptors,
                                   std::size_t order);

/// H'(v) = I - G'(v)^{-1}.
template <Field T>
SeriesMatrix<T> torus_h_matrix(const WalkParams<T>& w, std::int64_t period, std::span<const Site> receptors,
                               std::size_t order);

/// Single-receptor H'(v) from the closed form
///   [((q/p)^N + 1) pv (B^+ - B^-) + 2qv (B^+^{N-1} - B^-^{N-1})] / (B^+^N - B^-^N),
/// expanded after multiplying through by (2pv)^N so that only C^{+-} = 1 +- A(v) appear.
template <Field T>
TruncatedSeries<T> torus_h_closed(const WalkParams<T>& w, std::int64_t period, std::size_t order);

/// Hitting row from an off-receptor start: G'_{x,R}(v) G'(v)^{-1}.
template <Field T>
std::vector<TruncatedSeries<T>> torus_hit_row(const WalkParams<T>& w, std::int64_t period,
                                              std::span<const Site> receptors, Site x, std::size_t order);

/// pmf of T'_n for one walker on the torus, from a receptor or an off-receptor start.
template <Field T>
SojournDistribution<T> torus_sojourn_dist(const WalkModel<T>& m, std::size_t n, std::size_t order = 0);

}  // namespace membrane::torus

#endif  // MEMBRANE_TORUS_HPP
