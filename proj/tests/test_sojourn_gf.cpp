#include <doctest.h>

#include <cmath>

#include "membrane/errors.hpp"
#include "membrane/multiwalk.hpp"
#include "membrane/sojourn_gf.hpp"
#include "oracles.hpp"

using namespace membrane;
using namespace membrane::sojourn_gf;

namespace {

using RS = series::TruncatedSeries<Rational>;

std::span<const Site> sp(const std::vector<Site>& v) { return std::span<const Site>(v); }

const std::vector<std::vector<Site>> kLayouts{{0}, {0, 2}, {-1, 3}, {0, 1, 5}, {-3, 0, 2, 6}, {0, 1, 2, 3}};

}  // namespace

TEST_CASE("receptor matrix examples") {
    const auto w = WalkParams<Rational>::make(Rational(1, 2));
    const std::vector<Site> one{0};
    const auto h1 = h_matrix_closed(w, sp(one), 10);
    CHECK(series::max_abs_diff(h1(0, 0), RS::one(10) - series::sqrt_unit(RS(10, {Rational(1), 0, Rational(-1)})))
              .is_zero());

    const std::vector<Site> two{0, 2};
    CHECK(h_matrix_closed(w, sp(two), 6)(0, 1)[2] == Rational(1, 4));

    const std::vector<Site> three{0, 1, 4};
    const auto h3 = h_matrix_closed(w, sp(three), 12);
    CHECK(h3(0, 2).is_zero());
    CHECK(h3(2, 0).is_zero());
}

TEST_CASE("three routes to H agree and G has unit constant term") {
    for (const Rational& p : {Rational(1, 2), Rational(2, 7)}) {
        const auto w = WalkParams<Rational>::make(p);
        for (const auto& rec : kLayouts) {
            const auto mats = build_matrices(w, sp(rec), 32);
            const std::size_t r = rec.size();
            CHECK(mats.g.constant_term() == series::SeriesMatrix<Rational>::identity(r, 0).constant_term());
            CHECK(series::max_abs_diff(mats.h, h_matrix_from_green(mats.g)).is_zero());
            CHECK(series::max_abs_diff(mats.h, h_matrix_from_l(mats.l, mats.ltilde)).is_zero());
            for (std::size_t i = 0; i < r; ++i) {
                CHECK(is_zero(mats.h(i, i)[0]));
                for (std::size_t j = 0; j < r; ++j)
                    if (i + 2 <= j || j + 2 <= i) CHECK(mats.h(i, j).is_zero());
            }
            // Ltilde - L is diagonal with entries 1 / G_ii.
            const auto diff = mats.ltilde - mats.l;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) {
                    if (i == j) CHECK(series::max_abs_diff(diff(i, i), series::recip(mats.g(i, i))).is_zero());
                    else CHECK(diff(i, j).is_zero());
                }
            CHECK(mats.q_list.size() == 33);
            for (std::size_t k = 0; k <= 32; ++k) CHECK(mats.q_list[k] == mats.h.coefficient_matrix(k));
        }
    }
}

TEST_CASE("matrix identity holds to order 64 in the exact field") {
    const auto w = WalkParams<Rational>::make(Rational(3, 10));
    for (const auto& rec : kLayouts) {
        const auto g = green_matrix(w, sp(rec), 64);
        const auto h = h_matrix_closed(w, sp(rec), 64);
        const auto id = series::SeriesMatrix<Rational>::identity(rec.size(), 64);
        CHECK(series::max_abs_diff((id - h) * g, id).is_zero());
    }
}

TEST_CASE("gf distribution examples") {
    const auto m = WalkModel<Rational>::make(Rational(1, 2), {0}, {0});
    CHECK(sojourn_dist_gf(m, 2).pmf == std::vector<Rational>{Rational(1, 2), Rational(1, 2), 0});
    CHECK(sojourn_dist_gf(m, 4).pmf[2] == Rational(1, 4));
    const auto m2 = WalkModel<Rational>::make(Rational(1, 2), {0, 2}, {0});
    CHECK(sojourn_dist_gf(m2, 2).pmf == multiwalk::sojourn_dist_dp(m2, 2).pmf);
    CHECK_THROWS_AS(sojourn_dist_gf(m, 6, 4), OrderTooLow);
    const auto off = WalkModel<Rational>::make(Rational(1, 2), {0}, {1});
    CHECK_THROWS_AS(sojourn_dist_gf(off, 2), DomainError);
}

TEST_CASE("gf, off-start and qconv routes match path enumeration exactly") {
    const Rational p(2, 7);
    for (const auto& rec : kLayouts)
        for (Site x = rec.front() - 2; x <= rec.back() + 2; ++x) {
            const auto m = WalkModel<Rational>::make(p, rec, {x});
            for (int n : {1, 4, 9}) {
                const auto truth = oracle::sojourn_by_paths(p, rec, {x}, n);
                const auto gf = m.is_receptor(x) ? sojourn_dist_gf(m, static_cast<std::size_t>(n))
                                                 : sojourn_dist_offstart(m, static_cast<std::size_t>(n));
                CHECK(gf.pmf == truth);
                CHECK(sojourn_dist_qconv(m, static_cast<std::size_t>(n)).pmf == truth);
            }
        }
}

TEST_CASE("qconv examples and limits") {
    const auto m = WalkModel<Rational>::make(Rational(1, 2), {0}, {0});
    const auto d = sojourn_dist_qconv(m, 2);
    CHECK(d.pmf[0] == Rational(1, 2));
    CHECK(d.pmf[1] == Rational(1, 2));
    const auto w = WalkModel<Rational>::make(Rational(1, 3), {0}, {0});
    CHECK(sojourn_dist_qconv(w, 2).pmf[1] == 2 * w.params.p * w.params.q);
    CHECK(sojourn_dist_qconv(m, 5).pmf.size() == 6);
    CHECK_THROWS_AS(sojourn_dist_qconv(m, kQconvMaxN + 1), BudgetExceeded);
}

TEST_CASE("off-start examples") {
    const auto m = WalkModel<Rational>::make(Rational(1, 2), {0}, {2});
    CHECK(sojourn_dist_offstart(m, 2).pmf == std::vector<Rational>{Rational(3, 4), Rational(1, 4), 0});
    const auto far = WalkModel<Rational>::make(Rational(1, 2), {0}, {5});
    CHECK(sojourn_dist_offstart(far, 4).pmf == std::vector<Rational>{1, 0, 0, 0, 0});
    const auto m2 = WalkModel<Rational>::make(Rational(1, 2), {0, 4}, {2});
    CHECK(sojourn_dist_offstart(m2, 2).pmf == multiwalk::sojourn_dist_dp(m2, 2).pmf);
    const auto on = WalkModel<Rational>::make(Rational(1, 2), {0}, {0});
    CHECK_THROWS_AS(sojourn_dist_offstart(on, 2), StartOnReceptor);
}

TEST_CASE("float routes agree with DP") {
    for (double p : {0.3, 0.5, 0.7})
        for (const auto& rec : kLayouts) {
            const auto m = WalkModel<double>::make(p, rec, {rec[0]});
            const auto gf = sojourn_dist_gf(m, 16);
            const auto dp = multiwalk::sojourn_dist_dp(m, 16);
            CHECK(max_abs_diff(gf, dp) <= 1e-10);
            CHECK(gf.total() == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("moment series examples and consistency") {
    const auto w = WalkParams<Rational>::make(Rational(1, 2));
    const std::vector<Site> one{0};
    const auto ms = sojourn_moment_series(w, sp(one), 16);
    CHECK(ms.mean[0][1] == Rational(0));
    CHECK(ms.mean[0][2] == Rational(1, 2));
    CHECK(ms.second_factorial[0][2] == Rational(0));

    const auto w3 = WalkParams<Rational>::make(Rational(3, 10));
    const std::vector<Site> rec{0, 2, 5};
    const auto ms3 = sojourn_moment_series(w3, sp(rec), 16);
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const auto m = WalkModel<Rational>::make(Rational(3, 10), rec, {rec[i]});
        for (std::size_t n = 1; n <= 16; ++n) {
            const auto pmf = sojourn_dist_gf(m, n).pmf;
            Rational mean(0), fact(0);
            for (std::size_t k = 0; k <= n; ++k) {
                mean += Rational(static_cast<long>(k)) * pmf[k];
                fact += Rational(static_cast<long>(k * (k - (k > 0 ? 1 : 0)))) * pmf[k];
            }
            CHECK(ms3.mean[i][n] == mean);
            CHECK(ms3.second_factorial[i][n] == fact);
        }
    }
}

TEST_CASE("numeric K evaluation examples") {
    const auto m = WalkModel<double>::make(0.5, {0}, {0});
    const auto k = k_eval_numeric(m, 0.0, 0.3);
    CHECK(k.value == doctest::Approx(std::sqrt(1.0 - 0.09) / 0.7).epsilon(1e-12));
    CHECK(k.closed_r1.has_value());
    CHECK(*k.closed_r1 == doctest::Approx(k.value).epsilon(1e-12));
    CHECK(k_eval_numeric(m, 1.0, 0.4).value == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
    CHECK(k_eval_numeric(m, 0.7, 0.0).value == doctest::Approx(1.0));
}

TEST_CASE("numeric K routes agree and match the truncated double series") {
    for (double p : {0.3, 0.5})
        for (const std::vector<Site>& rec : {std::vector<Site>{0, 3}, std::vector<Site>{0, 1}, std::vector<Site>{0, 2, 5}})
            for (std::size_t i = 0; i < rec.size(); ++i) {
                const auto m = WalkModel<double>::make(p, rec, {rec[i]});
                const double u = 0.3, v = 0.3;
                const auto k = k_eval_numeric(m, u, v);
                CHECK(k.green_route == doctest::Approx(k.value).epsilon(1e-12));
                if (rec.size() == 2) {
                    REQUIRE(k.delta_route.has_value());
                    CHECK(*k.delta_route == doctest::Approx(k.value).epsilon(1e-12));
                }
                double acc = 0, vn = 1;
                const std::size_t nmax = 40;
                for (std::size_t n = 0; n <= nmax; ++n) {
                    const auto pmf = multiwalk::sojourn_dist_dp(m, n).pmf;
                    double un = 1, inner = 0;
                    for (double pk : pmf) {
                        inner += pk * un;
                        un *= u;
                    }
                    acc += vn * inner;
                    vn *= v;
                }
                // Each inner sum is at most 1, so the tail is below v^{N+1}/(1-v).
                CHECK(std::fabs(k.value - acc) <= std::pow(v, nmax + 1) / (1 - v) + 1e-12);
            }
}

TEST_CASE("closed-form examples") {
    const auto half = WalkParams<Rational>::make(Rational(1, 2));
    CHECK(closed_form_l1r1(half, 4).pmf ==
          std::vector<Rational>{Rational(3, 8), Rational(3, 8), Rational(1, 4), 0, 0});
    const auto w = WalkParams<Rational>::make(Rational(2, 9));
    const Rational pq2 = 2 * w.p * w.q;
    CHECK(closed_form_l1r1(w, 2).pmf == std::vector<Rational>{1 - pq2, pq2, 0});
    auto n3 = closed_form_l1r1(w, 3).pmf;
    CHECK(std::vector<Rational>(n3.begin(), n3.begin() + 3) == closed_form_l1r1(w, 2).pmf);
    CHECK(n3[3] == Rational(0));
}

TEST_CASE("closed form equals the gf route and the symmetric law") {
    for (const Rational& p : {Rational(1, 2), Rational(1, 5), Rational(5, 8)}) {
        const auto w = WalkParams<Rational>::make(p);
        const auto m = WalkModel<Rational>::make(p, {0}, {0});
        for (std::size_t n = 1; n <= 20; ++n) CHECK(closed_form_l1r1(w, n).pmf == sojourn_dist_gf(m, n).pmf);
    }
    const auto half = WalkParams<Rational>::make(Rational(1, 2));
    for (std::size_t n = 1; n <= 20; ++n) CHECK(closed_form_symmetric(n).pmf == closed_form_l1r1(half, n).pmf);
}

TEST_CASE("no-return probability is the k = 0 mass") {
    for (const Rational& p : {Rational(1, 2), Rational(1, 3)}) {
        const auto w = WalkParams<Rational>::make(p);
        for (std::size_t n = 1; n <= 14; ++n) CHECK(no_return_prob(w, n) == closed_form_l1r1(w, n).pmf[0]);
    }
}
