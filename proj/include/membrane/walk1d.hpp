#ifndef MEMBRANE_WALK1D_HPP
#define MEMBRANE_WALK1D_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/series.hpp"

// Closed-form laws of the one-dimensional +-1 Bernoulli walk.
//
// Notation used in comments: A(u) = sqrt(1 - 4pq u^2), B^{+-}(u) = (1 +- A(u)) / (2pu),
// with B^+ B^- = q/p. B^+ has a pole at u = 0, so every closed form below is
// rearranged into pole-free series before expansion.

namespace membrane::walk1d {

using Site = std::int64_t;
using series::TruncatedSeries;

template <Field T>
struct WalkParams {
    T p;
    T q;

    /// Validates 0 < p < 1 and sets q = 1 - p.
    static WalkParams make(const T& p);
};

/// Law of a hitting time on 1..J. pmf[0] is always 0 (hitting times are >= 1);
/// pmf[j] = P{tau = j}. `defect` is P{tau > J}, including any mass at infinity.
template <Field T>
struct HittingLaw {
    std::size_t horizon = 0;
    std::vector<T> pmf;
    T defect;

    T total() const;
};

/// P_x{S(i) = y}.
template <Field T>
T transition_prob(const WalkParams<T>& w, Site x, Site y, std::int64_t i);

/// A(u) = sqrt(1 - 4pq u^2).
template <Field T>
TruncatedSeries<T> a_series(const WalkParams<T>& w, std::size_t order);

/// B^-(u) = (1 - A(u)) / (2pu) = qu + ...; also equals (q/p) / B^+(u).
template <Field T>
TruncatedSeries<T> b_minus_series(const WalkParams<T>& w, std::size_t order);

/// 1 / B^+(u) = (1 - A(u)) / (2qu) = pu + ...
template <Field T>
TruncatedSeries<T> b_plus_recip_series(const WalkParams<T>& w, std::size_t order);

/// Green series G_{x,y}(u) from the closed form [B^{-+}]^{x-y} / A.
template <Field T>
TruncatedSeries<T> green_series(const WalkParams<T>& w, Site x, Site y, std::size_t order);

/// Green series by direct binomial summation after the index shift i -> 2i + |x-y|.
template <Field T>
TruncatedSeries<T> green_series_direct(const WalkParams<T>& w, Site x, Site y, std::size_t order);

/// E_x(u^{tau_a}): [B^-]^{x-a} above, 1 - A at a, [B^+]^{x-a} below.
template <Field T>
TruncatedSeries<T> hitting_gf_one_sided(const WalkParams<T>& w, Site x, Site a, std::size_t order);

/// P_x{tau_a = j} for j = 1..J.
///
/// For x != a this is (|x-a|/j) p_{x,a}^{(j)}. For the first return (x = a) the law
/// is read off 1 - A(u): q^{(2m)} = C(2m,m) (pq)^m / (2m-1), odd indices vanish.
/// The shortcut (1/j) C(j,(j+1)/2) (pq)^{(j+1)/2} sometimes quoted for this case is
/// zero at every even j and is not used.
template <Field T>
HittingLaw<T> hitting_pmf_one_sided(const WalkParams<T>& w, Site x, Site a, std::size_t max_j);

template <Field T>
struct TwoSidedGf {
    TruncatedSeries<T> minus;  ///< E_x(u^{tau_a}, tau_a < tau_b)
    TruncatedSeries<T> plus;   ///< E_x(u^{tau_b}, tau_b < tau_a)
    TruncatedSeries<T> total;  ///< E_x(u^{tau_ab})
};

/// Two-sided hitting generating functions for a < x < b.
///
/// minus/plus come from the rational form in A^2 = 1 - 4pq u^2:
///   H^+ = (2pu)^{b-x} N_{x-a}(A^2) / N_{b-a}(A^2),  H^- = (2qu)^{x-a} N_{b-x}(A^2) / N_{b-a}(A^2),
/// where (1+z)^m - (1-z)^m = 2z N_m(z^2). total is expanded separately from
/// [(1 - B^-^L) B^+^m - (1 - B^+^L) B^-^m] / (B^+^L - B^-^L), L = b-a, m = x-a.
template <Field T>
TwoSidedGf<T> hitting_two_sided(const WalkParams<T>& w, Site x, Site a, Site b, std::size_t order);

/// N_m(w) with (1+z)^m - (1-z)^m = 2z N_m(z^2); coefficients binom(m, 2k+1).
template <Field T>
std::vector<T> odd_binomial_polynomial(std::int64_t m);

/// Two-sided laws by partial fractions over the poles z_l = i tan(l pi / (b-a)).
///
/// Residues come from the limit alpha_l = (2 z_l / y) [(1+z_l)^x - (1-z_l)^x] /
/// [(1+z_l)^{y-1} + (1-z_l)^{y-1}] evaluated in complex arithmetic, plus the constant
/// part of the fraction when numerator and denominator have equal degree in z^2
/// (x = y-1 with y even, e.g. b - a = 2).
std::pair<HittingLaw<double>, HittingLaw<double>> hitting_pmf_two_sided_spectral(const WalkParams<double>& w, Site x,
                                                                                 Site a, Site b, std::size_t max_j);

/// Upper bound on P_x{tau_ab > J}: 2(L-1) max_y (p/q)^{(y-x)/2} (2 sqrt(pq) cos(pi/L))^J.
double two_sided_tail_bound(const WalkParams<double>& w, Site x, Site a, Site b, std::size_t horizon);

/// First-step decompositions at the boundary of [a, b] (and of [a, c] around b).
template <Field T>
struct BoundaryGfs {
    TruncatedSeries<T> a_return;  ///< E_a(u^{tau_a}, tau_a < tau_b)
    TruncatedSeries<T> a_to_b;    ///< E_a(u^{tau_b}, tau_b < tau_a)
    TruncatedSeries<T> b_to_a;    ///< E_b(u^{tau_a}, tau_a < tau_b)
    TruncatedSeries<T> b_return;  ///< E_b(u^{tau_b}, tau_b < tau_a)
    std::optional<TruncatedSeries<T>> b_return_between;  ///< E_b(u^{tau_b}, tau_b < tau_{a,c}), with c
};

template <Field T>
BoundaryGfs<T> boundary_hitting_gfs(const WalkParams<T>& w, Site a, Site b, std::optional<Site> c,
                                    std::size_t order);

/// E_x(u^{tau_R}, S(tau_R) = a_k) for every receptor a_k, selecting the nearest
/// receptors of x. Receptors must be strictly increasing.
template <Field T>
std::vector<TruncatedSeries<T>> receptor_hit_row(const WalkParams<T>& w, std::span<const Site> receptors, Site x,
                                                 std::size_t order);

struct OneSided {
    Site a;
};
struct TwoSided {
    Site a;
    Site b;
};
struct ThreeSided {
    Site a;
    Site b;
    Site c;
};
using Barrier = std::variant<OneSided, TwoSided, ThreeSided>;

/// P_x{S(j) = y, j <= tau}: the walk has not met the barrier at steps 1..j-1.
///
/// Admissible regions: one-sided, x and y on the same closed side of a; two-sided,
/// x, y in [a, b]; three-sided, x = y = b. Anything else throws DomainError.
template <Field T>
T stopped_prob(const WalkParams<T>& w, Site x, Site y, const Barrier& barrier, std::int64_t j);

}  // namespace membrane::walk1d

#endif  // MEMBRANE_WALK1D_HPP
