#include <doctest.h>

#include "membrane/verify.hpp"
#include "membrane/walk1d.hpp"
#include "oracles.hpp"

using namespace membrane;
using namespace membrane::walk1d;

TEST_CASE("printed first-return law fails and the series law holds") {
    for (const Rational& p : {Rational(1, 2), Rational(1, 3)}) {
        const auto w = WalkParams<Rational>::make(p);
        const auto k = oracle::killed_walk(p, Site{0}, {0}, 12);
        const auto law = hitting_pmf_one_sided(w, 0, 0, 12);
        bool printed_matches = true;
        for (std::int64_t j = 1; j <= 12; ++j) {
            const Rational truth = oracle::lookup(k.hits[static_cast<std::size_t>(j)], Site{0});
            CHECK(law.pmf[static_cast<std::size_t>(j)] == truth);
            printed_matches = printed_matches && verify::printed_first_return(w, j) == truth;
        }
        CHECK_FALSE(printed_matches);
        // Even return times carry the mass; binom(2m, m) (pq)^m / (2m - 1).
        CHECK(law.pmf[2] == 2 * w.p * w.q);
        CHECK(verify::printed_first_return(w, 2) == Rational(0));
    }
}

TEST_CASE("printed spectral law fails and the corrected law holds") {
    const auto half = WalkParams<double>::make(0.5);
    CHECK(verify::printed_spectral_plus(half, 2, 0, 4, 2) == doctest::Approx(0.5));
    CHECK(hitting_pmf_two_sided_spectral(half, 2, 0, 4, 2).second.pmf[2] == doctest::Approx(0.25));

    const auto w = WalkParams<double>::make(0.3);
    const auto k = oracle::killed_walk(0.3, Site{1}, {0, 3}, 12);
    const auto law = hitting_pmf_two_sided_spectral(w, 1, 0, 3, 12).second;
    bool printed_matches = true;
    for (std::size_t j = 1; j <= 12; ++j) {
        const double truth = oracle::lookup(k.hits[j], Site{3});
        CHECK(law.pmf[j] == doctest::Approx(truth).epsilon(1e-12));
        printed_matches = printed_matches && std::fabs(verify::printed_spectral_plus(w, 1, 0, 3, static_cast<std::int64_t>(j)) - truth) < 1e-9;
    }
    CHECK_FALSE(printed_matches);
}

TEST_CASE("enumeration oracle agrees with the killed walk") {
    const auto w = WalkParams<Rational>::make(Rational(2, 5));
    const std::vector<Site> absorbing{-2, 3};
    const auto e = verify::enumerate_first_hits(w, 0, std::span<const Site>(absorbing), 10);
    const auto k = oracle::killed_walk(w.p, Site{0}, absorbing, 10);
    for (Site a : absorbing)
        for (std::size_t j = 0; j <= 10; ++j) CHECK(e.at(a)[j] == oracle::lookup(k.hits[j], a));
}
