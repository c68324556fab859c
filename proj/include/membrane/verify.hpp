#ifndef MEMBRANE_VERIFY_HPP
#define MEMBRANE_VERIFY_HPP

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/walk1d.hpp"

// Cross-method acceptance suite. Each criterion compares independent routes
// (closed forms, series algebra, DP, enumeration, simulation) at pinned tolerances.

namespace membrane::verify {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct VerifyOptions {
    std::string preset = "desk";  ///< "desk" (full) or "quick" (fewer Monte Carlo samples)
    std::uint64_t mc_samples = 1000000;
    std::uint64_t seed = 20240611;
};

/// Options for a named preset; throws DomainError on an unknown name.
VerifyOptions preset_options(const std::string& name);

CriterionResult criterion_symmetric_closed_form();
CriterionResult criterion_method_equivalence();
CriterionResult criterion_matrix_identity();
CriterionResult criterion_hitting_laws();
CriterionResult criterion_moments();
CriterionResult criterion_torus();
CriterionResult criterion_monte_carlo(const VerifyOptions& opt);
CriterionResult criterion_errata();

/// Runs every criterion; writes one line per criterion to `out` when given.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt, std::ostream* out = nullptr);

std::string format_line(const CriterionResult& r);

/// First-hit laws by exhaustive path enumeration: result[t][j] = P_x{first absorbing
/// site met is t, at step j}, j = 0..max_j.
template <Field T>
std::map<walk1d::Site, std::vector<T>> enumerate_first_hits(const walk1d::WalkParams<T>& w, walk1d::Site x,
                                                            std::span<const walk1d::Site> absorbing, int max_j);

/// The first-return law as printed in the source, (1/j) binom(j, (j+1)/2) (pq)^{(j+1)/2};
/// the binomial vanishes for even j.
Rational printed_first_return(const walk1d::WalkParams<Rational>& w, std::int64_t j);

/// The two-sided upper law as printed in the source:
/// 2 (p/q)^{(x-b)/2} sum_l cos^{b-x-1} sin(l pi/L) sin(l(b-x)pi/L) (2 sqrt(pq) cos)^j.
double printed_spectral_plus(const walk1d::WalkParams<double>& w, walk1d::Site x, walk1d::Site a, walk1d::Site b,
                             std::int64_t j);

}  // namespace membrane::verify

#endif  // MEMBRANE_VERIFY_HPP
