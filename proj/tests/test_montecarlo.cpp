#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "membrane/montecarlo.hpp"
#include "membrane/multiwalk.hpp"

using namespace membrane;
using namespace membrane::montecarlo;

TEST_CASE("mixing function reference values") {
    // First outputs of the reference splitmix64 generator seeded with 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("simulation examples") {
    const auto m = WalkModel<double>::make(0.5, {0}, {0});
    const auto est = simulate_sojourn(m, 2, 1000000, 42);
    CHECK(std::fabs(est.pmf_hat[1] - 0.5) <= 3 * est.stderr_hat[1]);

    const auto t = WalkModel<Rational>::make(Rational(3, 10), {0}, {0}, Torus{2});
    const auto et = simulate_sojourn(t, 4, 5000, 1);
    CHECK(et.pmf_hat == std::vector<double>{0, 0, 1, 0, 0});
    CHECK(et.p == 0.3);

    const auto one = simulate_sojourn(m, 6, 1, 9);
    CHECK(std::accumulate(one.counts.begin(), one.counts.end(), std::uint64_t{0}) == 1);
    CHECK(std::count(one.pmf_hat.begin(), one.pmf_hat.end(), 1.0) == 1);

    CHECK_THROWS_AS(simulate_sojourn(m, 2, 0, 1), DomainError);
}

TEST_CASE("estimates normalize exactly") {
    const auto m = WalkModel<double>::make(0.3, {0, 2}, {1, -1});
    const auto est = simulate_sojourn(m, 9, 12345, 5);
    CHECK(std::accumulate(est.counts.begin(), est.counts.end(), std::uint64_t{0}) == 12345);
    double total = 0;
    for (double v : est.pmf_hat) total += v;
    CHECK(std::fabs(total - 1.0) <= 1e-12);
}

TEST_CASE("seeded runs are reproducible and shard invariant") {
    const auto m = WalkModel<double>::make(0.7, {0, 3}, {1}, Torus{7});
    const auto base = simulate_sojourn(m, 11, 50001, 123, 1);
    CHECK(simulate_sojourn(m, 11, 50001, 123, 1).counts == base.counts);
    for (unsigned w : {2U, 3U, 7U, 16U}) CHECK(simulate_sojourn(m, 11, 50001, 123, w).counts == base.counts);
    CHECK(simulate_sojourn(m, 11, 50001, 124, 1).counts != base.counts);
}

TEST_CASE("worker count honours the environment") {
    setenv("MEMBRANE_SOJOURN_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("MEMBRANE_SOJOURN_THREADS", "0", 1);
    CHECK(worker_count() >= 1);
    unsetenv("MEMBRANE_SOJOURN_THREADS");
}

TEST_CASE("estimates agree with the exact law") {
    const auto m = WalkModel<double>::make(0.3, {0}, {3, -2});
    const auto exact = multiwalk::sojourn_dist_dp(m, 12);
    const auto est = simulate_sojourn(m, 12, 400000, 2024);
    for (std::size_t k = 0; k <= 12; ++k) {
        const double se = std::sqrt(exact.pmf[k] * (1 - exact.pmf[k]) / 400000.0);
        CHECK(std::fabs(est.pmf_hat[k] - exact.pmf[k]) <= 4 * se + 1e-12);
    }
}
