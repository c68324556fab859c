#include <doctest.h>

#include <functional>

#include "membrane/errors.hpp"
#include "membrane/multiwalk.hpp"
#include "oracles.hpp"

using namespace membrane;
using namespace membrane::multiwalk;

namespace {

std::span<const Site> sp(const std::vector<Site>& v) { return std::span<const Site>(v); }

}  // namespace

TEST_CASE("models are validated and normalized") {
    CHECK_THROWS_AS(WalkModel<double>::make(0.5, {}, {0}), DomainError);
    CHECK_THROWS_AS(WalkModel<double>::make(0.5, {2, 1}, {0}), DomainError);
    CHECK_THROWS_AS(WalkModel<double>::make(0.5, {0}, {}), DomainError);
    CHECK_THROWS_AS(WalkModel<double>::make(0.5, {0, 1}, {0}, Torus{2}), DomainError);
    CHECK_THROWS_AS(WalkModel<double>::make(0.5, {0, 5}, {0}, Torus{5}), DomainError);
    const auto m = WalkModel<double>::make(0.5, {6, -1}, {-3}, Torus{5});
    CHECK(m.receptors == std::vector<Site>{1, 4});
    CHECK(m.starts == std::vector<Site>{2});
    CHECK(m.is_receptor(9));
}

TEST_CASE("joint transition probability examples") {
    const auto m = WalkModel<Rational>::make(Rational(1, 2), {0}, {0, 0});
    const std::vector<Site> o{0, 0}, y{1, 0};
    CHECK(multi_transition_prob(m, sp(o), sp(o), 2) == Rational(1, 4));
    CHECK(multi_transition_prob(m, sp(o), sp(y), 2) == Rational(0));
    const auto m1 = WalkModel<Rational>::make(Rational(1, 3), {0}, {0});
    const std::vector<Site> a{2}, b{-1};
    CHECK(multi_transition_prob(m1, sp(a), sp(b), 5) == walk1d::transition_prob(m1.params, 2, -1, 5));
    CHECK_THROWS_AS(multi_transition_prob(m, sp(a), sp(o), 2), DomainError);
}

TEST_CASE("A-function examples") {
    const std::vector<std::int64_t> zero{0};
    const auto a = a_function<Rational>(std::span<const std::int64_t>(zero), 6);
    CHECK(a.shift == 0);
    CHECK(a.reduced.coeffs() == std::vector<Rational>{1, 2, 6, 20, 70, 252, 924});
    const std::vector<std::int64_t> mixed{1, 0};
    CHECK(a_function<Rational>(std::span<const std::int64_t>(mixed), 6).reduced.is_zero());
    const std::vector<std::int64_t> two{0, 0};
    CHECK(a_function<Rational>(std::span<const std::int64_t>(two), 3).reduced[1] == Rational(4));
}

TEST_CASE("A-function direct and hypergeometric routes agree") {
    std::vector<std::vector<std::int64_t>> cases;
    for (std::int64_t a = -4; a <= 4; ++a) {
        cases.push_back({a});
        for (std::int64_t b = -4; b <= 4; ++b) {
            cases.push_back({a, b});
            for (std::int64_t c = -4; c <= 4; c += 2) cases.push_back({a, b, c});
        }
    }
    for (const auto& xi : cases) {
        const std::span<const std::int64_t> s(xi);
        const auto d = a_function<Rational>(s, 16);
        const auto h = a_function_hypergeometric<Rational>(s, 16);
        CHECK(d.shift == h.shift);
        CHECK(series::max_abs_diff(d.reduced, h.reduced).is_zero());
    }
}

TEST_CASE("multi-walker green series factorizes") {
    const auto m2 = WalkModel<Rational>::make(Rational(1, 2), {0}, {0, 0});
    const std::vector<Site> o{0, 0};
    CHECK(multi_green_series(m2, sp(o), sp(o), 4)[2] == Rational(1, 4));

    const auto m = WalkModel<Rational>::make(Rational(2, 5), {0}, {0, 0, 0});
    for (Site a = -3; a <= 3; ++a)
        for (Site b = -2; b <= 4; b += 3)
            for (Site c = -4; c <= 4; c += 4) {
                const std::vector<Site> x{0, 1, -1}, y{a, 1 + b, -1 + c};
                const auto g = multi_green_series(m, sp(x), sp(y), 16);
                for (std::size_t i = 0; i <= 16; ++i) {
                    Rational prod(1);
                    for (std::size_t k = 0; k < 3; ++k)
                        prod *= walk1d::transition_prob(m.params, x[k], y[k], static_cast<std::int64_t>(i));
                    CHECK(g[i] == prod);
                }
            }
    const auto one = WalkModel<Rational>::make(Rational(2, 5), {0}, {0});
    const std::vector<Site> x{3}, y{-2};
    CHECK(series::max_abs_diff(multi_green_series(one, sp(x), sp(y), 20),
                               walk1d::green_series(one.params, 3, -2, 20))
              .is_zero());
}

TEST_CASE("single-walker stopped probability matches the killed walk") {
    const std::vector<Site> rec{-2, 1, 5};
    const auto m = WalkModel<Rational>::make(Rational(1, 3), rec, {0});
    for (Site x = -5; x <= 8; ++x)
        for (Site y = -5; y <= 8; ++y)
            for (int j = 1; j <= 9; ++j)
                CHECK(single_stopped_prob(m, x, y, j) == oracle::stopped(m.params.p, x, y, rec, j));
}

TEST_CASE("joint first-hit examples") {
    const auto m1 = WalkModel<Rational>::make(Rational(3, 10), {0}, {1});
    const std::vector<Site> x1{1}, y1{0};
    CHECK(first_hit_joint_pmf(m1, sp(x1), sp(y1), 1) == m1.params.q);

    const auto m2 = WalkModel<Rational>::make(Rational(3, 10), {0}, {1, 1});
    const std::vector<Site> x2{1, 1}, y2{0, 2};
    CHECK(first_hit_joint_pmf(m2, sp(x2), sp(y2), 1) == m2.params.q * m2.params.p);

    const auto m3 = WalkModel<Rational>::make(Rational(3, 10), {0, 3}, {5});
    const std::vector<Site> x3{5}, y3{0};
    for (int j = 1; j <= 9; ++j) CHECK(first_hit_joint_pmf(m3, sp(x3), sp(y3), j) == Rational(0));

    const std::vector<Site> off{2, 2};
    CHECK_THROWS_AS(first_hit_joint_pmf(m2, sp(x2), sp(off), 1), YNotInE);
}

TEST_CASE("survival examples") {
    const auto m = WalkModel<Rational>::make(Rational(3, 10), {0}, {1, 1});
    const std::vector<Site> x{1, 1};
    CHECK(survival_tau_e(m, sp(x), 1) == Rational(1));
    CHECK(survival_tau_e(m, sp(x), 2) == m.params.p * m.params.p);

    const auto m1 = WalkModel<Rational>::make(Rational(3, 10), {0}, {2});
    const std::vector<Site> x1{2};
    const auto law = walk1d::hitting_pmf_one_sided(m1.params, 2, 0, 10);
    Rational cum(0);
    for (int j = 1; j <= 10; ++j) {
        CHECK(survival_tau_e(m1, sp(x1), j) == Rational(1) - cum);
        cum += law.pmf[static_cast<std::size_t>(j)];
    }
}

TEST_CASE("first-hit slices sum to the survival decrement") {
    struct Case {
        std::vector<Site> rec;
        std::vector<Site> x;
    };
    const std::vector<Case> cases{{{0}, {2}}, {{0, 3}, {1}}, {{-1, 2}, {4}}, {{0}, {1, -2}}, {{0, 3}, {1, 5}},
                                  {{0, 2}, {0, 1}}};
    for (const auto& c : cases) {
        const auto m = WalkModel<Rational>::make(Rational(2, 5), c.rec, c.x);
        for (int j = 1; j <= 8; ++j) {
            Rational total(0);
            std::vector<Site> y(c.x.size());
            const Site span = j;
            std::function<void(std::size_t)> rec_fn = [&](std::size_t d) {
                if (d == y.size()) {
                    if (m.in_e(std::span<const Site>(y))) total += first_hit_joint_pmf(m, sp(c.x), sp(y), j);
                    return;
                }
                for (Site v = c.x[d] - span; v <= c.x[d] + span; ++v) {
                    y[d] = v;
                    rec_fn(d + 1);
                }
            };
            rec_fn(0);
            CHECK(total == survival_tau_e(m, sp(c.x), j) - survival_tau_e(m, sp(c.x), j + 1));
        }
    }
}

TEST_CASE("probability of E examples") {
    const auto m = WalkModel<Rational>::make(Rational(1, 2), {0}, {0, 0});
    const std::vector<Site> x{0, 0};
    CHECK(prob_in_e(m, sp(x), 2) == Rational(3, 4));
    CHECK(prob_in_e(m, sp(x), 1) == Rational(0));
}

TEST_CASE("moment examples") {
    const auto m2 = WalkModel<Rational>::make(Rational(1, 2), {0}, {0, 0});
    const auto mo = sojourn_moments(m2, 2);
    CHECK(mo.mean == Rational(3, 4));
    CHECK(mo.second == Rational(3, 4));
    CHECK(mo.variance == Rational(3, 16));

    const auto m1 = WalkModel<Rational>::make(Rational(1, 2), {0}, {0});
    CHECK(sojourn_moments(m1, 1).mean == Rational(0));
    const auto m3 = WalkModel<double>::make(0.3, {0}, {0});
    CHECK(sojourn_moments(m3, 2).mean == doctest::Approx(0.42));
}

TEST_CASE("moments agree with the pmf exactly") {
    struct Case {
        std::vector<Site> rec;
        std::vector<Site> x;
        Topology topo;
    };
    const std::vector<Case> cases{{{0}, {0}, Line{}},        {{0, 3}, {1}, Line{}},  {{0}, {3, -2}, Line{}},
                                  {{0, 2}, {1, -1}, Line{}}, {{0}, {0}, Torus{3}}, {{0, 2}, {1, 3}, Torus{5}}};
    for (const auto& c : cases) {
        const auto m = WalkModel<Rational>::make(Rational(3, 10), c.rec, c.x, c.topo);
        for (std::size_t n : {1, 4, 7}) {
            const auto a = sojourn_moments(m, n);
            const auto pmf = sojourn_dist_dp(m, n).pmf;
            const auto b = moments_from_pmf(std::span<const Rational>(pmf));
            CHECK(a.mean == b.mean);
            CHECK(a.second == b.second);
            CHECK(a.variance == b.variance);
        }
    }
}

TEST_CASE("DP examples") {
    const auto m1 = WalkModel<Rational>::make(Rational(1, 2), {0}, {0});
    CHECK(sojourn_dist_dp(m1, 2).pmf == std::vector<Rational>{Rational(1, 2), Rational(1, 2), 0});
    const auto m2 = WalkModel<Rational>::make(Rational(1, 2), {0}, {0, 0});
    CHECK(sojourn_dist_dp(m2, 2).pmf == std::vector<Rational>{Rational(1, 4), Rational(3, 4), 0});
    const auto m3 = WalkModel<Rational>::make(Rational(1, 2), {0}, {3, -5});
    CHECK(sojourn_dist_dp(m3, 1).pmf == std::vector<Rational>{1, 0});
}

TEST_CASE("DP matches path enumeration on the line and the torus") {
    struct Case {
        std::vector<Site> rec;
        std::vector<Site> x;
        Site period;
    };
    const std::vector<Case> cases{{{0}, {0}, 0},          {{0, 2}, {1}, 0},    {{-1, 3}, {0, 2}, 0},
                                  {{0}, {1, -1, 2}, 0},   {{0}, {0}, 3},       {{0, 2}, {1, 4}, 5},
                                  {{1}, {0, 0}, 2}};
    for (const auto& c : cases) {
        const Topology topo = c.period ? Topology{Torus{c.period}} : Topology{Line{}};
        const auto m = WalkModel<Rational>::make(Rational(2, 7), c.rec, c.x, topo);
        const int n = c.x.size() == 3 ? 5 : 7;
        const auto dp = sojourn_dist_dp(m, static_cast<std::size_t>(n));
        CHECK(dp.pmf == oracle::sojourn_by_paths(Rational(2, 7), m.receptors, m.starts, n, c.period));
        CHECK(dp.total() == Rational(1));
    }
}

TEST_CASE("DP budget is enforced") {
    const auto m = WalkModel<double>::make(0.5, {0}, {0, 0, 0, 0});
    CHECK_THROWS_AS(sojourn_dist_dp(m, 200), BudgetExceeded);
    CHECK_THROWS_AS(sojourn_dist_dp(m, 20, 1000.0), BudgetExceeded);
}
