#ifndef MEMBRANE_MULTIWALK_HPP
#define MEMBRANE_MULTIWALK_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "membrane/model.hpp"
#include "membrane/series.hpp"

// Product-form laws of ell independent walkers and the exact DP oracle for T_n.

namespace membrane::multiwalk {

using series::TruncatedSeries;

/// P_x{S(i) = y} for the ell-dimensional walk (wrapped on the torus).
template <Field T>
T multi_transition_prob(const WalkModel<T>& m, std::span<const Site> x, std::span<const Site> y, std::int64_t i);

/// A(xi; z) = sum over i >= max|xi_j| with the parity of the xi_j of prod_j binom(i, (i+xi_j)/2) z^{i/2}.
///
/// The sum runs over half-integer powers of z when max|xi_j| is odd, so the result is
/// stored as z^{shift/2} * reduced(z) with shift = max|xi_j|; reduced has integer powers.
template <Field T>
struct AFunction {
    std::int64_t shift = 0;
    TruncatedSeries<T> reduced;
};

/// Direct binomial-product route; the zero series when the xi_j have mixed parity.
template <Field T>
AFunction<T> a_function(std::span<const std::int64_t> xi, std::size_t order);

/// Route through prod_j binom(alpha, beta_j) times the 2l F 2l-1 series at 4^l z,
/// with the unit lower parameter of the maximal coordinate evicted.
template <Field T>
AFunction<T> a_function_hypergeometric(std::span<const std::int64_t> xi, std::size_t order);

/// Multi-walker Green series in u on the line, from the A-function at z = (pq)^l u^2.
/// The prefactor (p/q)^{sum(y-x)/2} is merged with z^{i/2} so that every power of p
/// and q stays integral.
template <Field T>
TruncatedSeries<T> multi_green_series(const WalkModel<T>& m, std::span<const Site> x, std::span<const Site> y,
                                      std::size_t order);

/// P_x{S_k(j) = y_k, j <= tau_R} for a single walker, routed by the position of x
/// among the receptors: outer rays are one-sided, gaps are two-sided, and a start on a
/// receptor is decomposed over its first step. Combinations that cannot occur give 0.
template <Field T>
T single_stopped_prob(const WalkModel<T>& m, Site x, Site y, std::int64_t j);

/// P_x{tau_E = j, S(tau_E) = y}. Throws YNotInE when y has no coordinate on a receptor.
template <Field T>
T first_hit_joint_pmf(const WalkModel<T>& m, std::span<const Site> x, std::span<const Site> y, std::int64_t j);

/// P_x{tau_E >= j} = prod_k P_{x_k}{tau_R >= j}.
template <Field T>
T survival_tau_e(const WalkModel<T>& m, std::span<const Site> x, std::int64_t j);

/// P_x{S(i) in E} = 1 - prod_k P_{x_k}{S(i) not in R}.
template <Field T>
T prob_in_e(const WalkModel<T>& m, std::span<const Site> x, std::int64_t i);

template <Field T>
struct Moments {
    T mean;
    T second;
    T variance;
};

/// E(T_n) = sum_{i<=n} P{S(i) in E}, and
/// E(T_n^2) = E(T_n) + 2 sum_{i<n} sum_{y in E} P{S(i) = y} E_y(T_{n-i}) over the reachable box.
template <Field T>
Moments<T> sojourn_moments(const WalkModel<T>& m, std::size_t n);

/// Moments read off a pmf.
template <Field T>
Moments<T> moments_from_pmf(std::span<const T> pmf);

/// Default cap on n * (box width)^l for the DP oracle.
inline constexpr double kDpBudget = 1e8;

/// Exact pmf of T_n by dynamic programming over joint positions and the running count.
template <Field T>
SojournDistribution<T> sojourn_dist_dp(const WalkModel<T>& m, std::size_t n, double budget = kDpBudget);

}  // namespace membrane::multiwalk

#endif  // MEMBRANE_MULTIWALK_HPP
