#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sobolow/distribution.hpp"

using namespace sobolow;

namespace {

std::vector<Distribution1D> zoo() {
    return {
        Distribution1D::uniform(-0.5, 0.5),
        Distribution1D::normal(1.0, 2.0),
        Distribution1D::normal(0.0, 1.0).truncate(-3.0, 3.0),
        Distribution1D::triangular(49.0, 50.0, 51.0),
        Distribution1D::gumbel(1013.0, 558.0),
        Distribution1D::laplace(-1.0, 0.7),
        Distribution1D::cauchy(2.0, 1.5),
        Distribution1D::beta(2.5, 3.5),
        Distribution1D::gamma(3.0, 2.0),
        Distribution1D::gamma(2.5, 1.0).truncate(0.5, 6.0),
    };
}

} // namespace

TEST_CASE("densities integrate to one and match the cdf") {
    for (const auto& d : zoo()) {
        INFO(d.describe());
        CHECK(d.expectation([](double) { return 1.0; }, 1e-11) == Catch::Approx(1.0).epsilon(1e-8));
        double q1 = d.quantile(0.2), q2 = d.quantile(0.9);
        CHECK(d.cdf(q1) == Catch::Approx(0.2).epsilon(1e-9));
        CHECK(d.cdf(q2) == Catch::Approx(0.9).epsilon(1e-9));
        CHECK(q1 < q2);
        // cdf mass between quantiles equals integral of the density
        if (d.bounded() || true) {
            double m = d.expectation([&](double x) { return (x >= q1 && x <= q2) ? 1.0 : 0.0; }, 1e-8);
            CHECK(m == Catch::Approx(0.7).margin(2e-5));
        }
    }
}

TEST_CASE("truncating a uniform law yields a plain uniform law") {
    auto d = Distribution1D::uniform(0.0, 1.0).truncate(0.0, 0.5);
    CHECK(d.family() == Family::Uniform);
    CHECK_FALSE(d.truncated());
    CHECK(d.support_lo() == 0.0);
    CHECK(d.support_hi() == 0.5);
    CHECK(d.pdf(0.25) == Catch::Approx(2.0));
    CHECK(d.pdf(0.75) == 0.0);
}

TEST_CASE("empty truncation throws") {
    CHECK_THROWS_AS(Distribution1D::uniform(0.0, 1.0).truncate(2.0, 3.0), EmptyMass);
    CHECK_THROWS_AS(Distribution1D::normal(0.0, 1.0).truncate(5.0, 5.0), EmptyMass);
}

TEST_CASE("potential derivative matches -(log pdf)' by finite differences") {
    for (const auto& d : zoo()) {
        INFO(d.describe());
        double a = d.quantile(0.05), b = d.quantile(0.95);
        for (int i = 0; i < 9; ++i) {
            double x = a + (b - a) * (i + 0.5) / 9.0;
            bool near_kink = false;
            for (double k : d.kink_points()) near_kink |= std::fabs(x - k) < 1e-3 * (b - a);
            if (near_kink) continue;
            double h = 1e-6 * std::max(1.0, std::fabs(x));
            double fd = -(std::log(d.pdf(x + h)) - std::log(d.pdf(x - h))) / (2.0 * h);
            CHECK(d.potential_deriv(x) == Catch::Approx(fd).epsilon(1e-5).margin(1e-7));
        }
    }
    CHECK_THROWS_AS(Distribution1D::uniform(0.0, 1.0).potential_deriv(2.0), OutsideSupport);
}

TEST_CASE("score closed forms for location-scale families") {
    auto n = Distribution1D::normal(1.0, 2.0);
    CHECK(n.score(2.0) == Catch::Approx(-(2.0 - 1.0) / 4.0));
    auto l = Distribution1D::laplace(0.0, 0.5);
    CHECK(l.score(1.3) == Catch::Approx(-2.0));
    CHECK(l.score(-1.3) == Catch::Approx(2.0));
    auto c = Distribution1D::cauchy(0.0, 1.0);
    CHECK(c.score(3.0) == Catch::Approx(-2.0 * 3.0 / (9.0 + 1.0)));
    // half-normal: boundary density enters the constant
    auto hn = Distribution1D::normal(0.0, 1.0).truncate(0.0, 40.0);
    double p0 = 2.0 * std_normal_pdf(0.0) / (1.0 - 2.0 * (1.0 - std_normal_cdf(40.0)));
    CHECK(hn.score(1.0) == Catch::Approx(-1.0 + p0).epsilon(1e-9));
}

TEST_CASE("score is centered for every supported law") {
    for (const auto& d : zoo()) {
        if (!d.score_supported()) continue;
        INFO(d.describe());
        double ez = d.expectation([&](double x) { return d.score(x); }, 1e-11);
        CHECK(std::fabs(ez) < 1e-8);
    }
}

TEST_CASE("score support rules") {
    CHECK_FALSE(Distribution1D::uniform(0.0, 1.0).score_supported());
    CHECK_FALSE(Distribution1D::triangular(0.0, 0.5, 1.0).score_supported());
    CHECK(Distribution1D::triangular(0.0, 0.5, 1.0).truncate(0.1, 0.9).score_supported());
    CHECK_FALSE(Distribution1D::beta(2.0, 3.0).score_supported());  // needs alpha > 2
    CHECK(Distribution1D::beta(2.5, 3.5).score_supported());
    CHECK(Distribution1D::beta(1.5, 1.5).truncate(-0.8, 0.8).score_supported());
    CHECK_FALSE(Distribution1D::gamma(1.5, 1.0).score_supported());
    CHECK(Distribution1D::gamma(3.0, 1.0).score_supported());
    CHECK(Distribution1D::gamma(1.5, 1.0).truncate(0.5, 10.0).score_supported());
    CHECK_THROWS_AS(Distribution1D::uniform(0.0, 1.0).score(0.5), UnsupportedForBounds);
    CHECK_THROWS_AS(Distribution1D::uniform(0.0, 1.0).fisher_information(), UnsupportedForBounds);
}

TEST_CASE("Fisher information closed forms agree with the quadrature route") {
    auto var_score = [](const Distribution1D& d) {
        double m1 = d.expectation([&](double x) { return d.score(x); }, 1e-12);
        double m2 = d.expectation([&](double x) { double z = d.score(x); return z * z; }, 1e-11);
        return m2 - m1 * m1;
    };
    auto n = Distribution1D::normal(0.5, 2.0);
    CHECK(n.fisher_information() == Catch::Approx(0.25).epsilon(1e-12));
    CHECK(var_score(n) == Catch::Approx(0.25).epsilon(1e-8));
    auto l = Distribution1D::laplace(0.0, 2.0);
    CHECK(l.fisher_information() == Catch::Approx(0.25).epsilon(1e-12));
    CHECK(var_score(l) == Catch::Approx(0.25).epsilon(1e-6));
    auto c = Distribution1D::cauchy(1.0, 2.0);
    CHECK(c.fisher_information() == Catch::Approx(0.125).epsilon(1e-12));
    CHECK(var_score(c) == Catch::Approx(0.125).epsilon(1e-8));
    auto g = Distribution1D::gumbel(0.0, 3.0);
    CHECK(g.fisher_information() == Catch::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(var_score(g) == Catch::Approx(1.0 / 9.0).epsilon(1e-8));
}

TEST_CASE("moments of the shape families") {
    auto b = Distribution1D::beta(2.5, 3.5);
    double al = 2.5, be = 3.5;
    CHECK(b.mean() == Catch::Approx((be - al) / (al + be)).epsilon(1e-9));
    CHECK(b.variance() == Catch::Approx(4.0 * al * be / ((al + be) * (al + be) * (al + be + 1.0))).epsilon(1e-9));
    auto g = Distribution1D::gamma(3.0, 2.0);
    CHECK(g.mean() == Catch::Approx(1.5).epsilon(1e-9));
    CHECK(g.variance() == Catch::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("inverse-transform sampling is deterministic and lands in the support") {
    for (const auto& d : zoo()) {
        INFO(d.describe());
        auto s1 = d.sample(2000, 42);
        auto s2 = d.sample(2000, 42);
        auto s3 = d.sample(2000, 43);
        CHECK(s1 == s2);
        CHECK(s1 != s3);
        for (double x : s1) {
            REQUIRE(x >= d.support_lo());
            REQUIRE(x <= d.support_hi());
        }
    }
    // empirical cdf sanity on a bounded case
    auto d = Distribution1D::normal(0.0, 1.0).truncate(-2.0, 2.0);
    auto s = d.sample(40000, 7);
    double below = 0.0;
    for (double x : s) below += (x <= 0.0);
    CHECK(below / s.size() == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("boundary density report") {
    CHECK(Distribution1D::normal(0.0, 1.0).pdf_vanishes_at_boundaries());
    CHECK(Distribution1D::triangular(0.0, 0.5, 1.0).pdf_vanishes_at_boundaries());
    CHECK_FALSE(Distribution1D::uniform(0.0, 1.0).pdf_vanishes_at_boundaries());
    CHECK_FALSE(Distribution1D::normal(0.0, 1.0).truncate(-1.0, 1.0).pdf_vanishes_at_boundaries());
    CHECK(Distribution1D::beta(3.0, 3.0).pdf_vanishes_at_boundaries());
}
