#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "sobolow/model.hpp"
#include "sobolow/sample.hpp"
#include "testsupport.hpp"

using namespace sobolow;

namespace {

ModelFunction sum_model(int d) {
    return ModelFunction("sum", d,
                         [](std::span<const double> x) {
                             double s = 0;
                             for (double v : x) s += v;
                             return s;
                         })
        .with_gradient([d](std::span<const double>) { return std::vector<double>(static_cast<std::size_t>(d), 1.0); });
}

} // namespace

TEST_CASE("monte carlo design is reproducible and stream-separated") {
    auto f = sum_model(2);
    std::vector<Distribution1D> dists{Distribution1D::uniform(0, 1), Distribution1D::normal(0, 1)};
    auto s1 = monte_carlo_design(f, dists, 500, 42, true);
    auto s2 = monte_carlo_design(f, dists, 500, 42, true);
    REQUIRE(s1.size() == 500);
    REQUIRE(s1.dim() == 2);
    REQUIRE(!s1.weighted());
    REQUIRE(s1.has_gradients());
    for (std::size_t r = 0; r < 500; ++r) {
        REQUIRE(s1.design(r, 0) == s2.design(r, 0));
        REQUIRE(s1.design(r, 1) == s2.design(r, 1));
        REQUIRE(s1.outputs[r] == s2.outputs[r]);
        REQUIRE(s1.outputs[r] == Catch::Approx(s1.design(r, 0) + s1.design(r, 1)).margin(1e-15));
        REQUIRE((*s1.gradients)(r, 1) == 1.0);
    }

    // Column j is drawn from its own derived stream, so it matches a direct
    // draw with that stream and is unaffected by the other columns.
    auto direct = dists[0].sample(500, derive_seed(42, 0));
    for (std::size_t r = 0; r < 500; ++r) REQUIRE(s1.design(r, 0) == direct[r]);

    auto s3 = monte_carlo_design(f, dists, 500, 43);
    std::size_t differing = 0;
    for (std::size_t r = 0; r < 500; ++r) differing += s1.design(r, 0) != s3.design(r, 0);
    REQUIRE(differing > 450);
}

TEST_CASE("quadrature design integrates exactly under the input law") {
    auto f = sum_model(1);
    std::vector<Distribution1D> dists{Distribution1D::uniform(0, 1)};
    auto s = quadrature_design(f, dists, 8);
    REQUIRE(s.weighted());
    REQUIRE(pairwise_sum(s.weights) == Catch::Approx(1.0).margin(1e-15));
    for (int k = 1; k <= 10; ++k) {
        double m = 0;
        for (std::size_t r = 0; r < s.size(); ++r) m += s.weights[r] * std::pow(s.design(r, 0), k);
        REQUIRE(m == Catch::Approx(1.0 / (k + 1)).margin(1e-13));
    }
}

TEST_CASE("quadrature design splits segments at model kinks") {
    ModelFunction f("vee", 1, [](std::span<const double> x) { return std::abs(4 * x[0] - 2) - 1; });
    f = f.with_kinks({{0.5}});
    std::vector<Distribution1D> dists{Distribution1D::uniform(0, 1)};
    auto s = quadrature_design(f, dists, 6);
    REQUIRE(s.size() == 12); // two smooth segments
    double m = 0, m2 = 0;
    for (std::size_t r = 0; r < s.size(); ++r) {
        m += s.weights[r] * s.outputs[r];
        m2 += s.weights[r] * s.outputs[r] * s.outputs[r];
    }
    // E(|4x-2|-1) = 0 and var = 1/3, exact once the kink is a segment boundary.
    REQUIRE(m == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(m2 == Catch::Approx(1.0 / 3.0).margin(1e-14));
}

TEST_CASE("quadrature design uses a Hermite rule for untruncated normals") {
    auto f = sum_model(1);
    std::vector<Distribution1D> dists{Distribution1D::normal(1, 2)};
    auto s = quadrature_design(f, dists, 24);
    REQUIRE(s.size() == 24);
    double m = 0, m2 = 0;
    for (std::size_t r = 0; r < s.size(); ++r) {
        m += s.weights[r] * s.design(r, 0);
        m2 += s.weights[r] * s.design(r, 0) * s.design(r, 0);
    }
    REQUIRE(m == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(m2 == Catch::Approx(5.0).margin(1e-11));
}

TEST_CASE("tensor weights factor across dimensions") {
    auto f = sum_model(2);
    std::vector<Distribution1D> dists{Distribution1D::uniform(-1, 1), Distribution1D::normal(0, 1)};
    auto s = quadrature_design(f, dists, 10);
    REQUIRE(s.size() == 100);
    double e1 = 0, e2 = 0, e12 = 0, total = 0;
    for (std::size_t r = 0; r < s.size(); ++r) {
        total += s.weights[r];
        e1 += s.weights[r] * s.design(r, 0);
        e2 += s.weights[r] * s.design(r, 1);
        e12 += s.weights[r] * s.design(r, 0) * s.design(r, 1);
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(e12 == Catch::Approx(e1 * e2).margin(1e-14));
}

TEST_CASE("centering removes the weighted mean once") {
    auto f = sum_model(1);
    std::vector<Distribution1D> dists{Distribution1D::uniform(0, 1)};
    auto s = quadrature_design(f, dists, 8);
    auto c = center(s);
    REQUIRE(c.centered);
    REQUIRE(weighted_mean(c.outputs, c.weights) == Catch::Approx(0.0).margin(1e-15));
    auto c2 = center(c);
    for (std::size_t r = 0; r < c.size(); ++r) REQUIRE(c2.outputs[r] == c.outputs[r]);
}

TEST_CASE("sample CSV round trip preserves values and layout") {
    auto f = sum_model(3);
    std::vector<Distribution1D> dists{Distribution1D::uniform(0, 1), Distribution1D::normal(0, 1),
                                      Distribution1D::gumbel(1, 0.5)};
    auto s = monte_carlo_design(f, dists, 40, 7, true);
    std::string path = testsupport::temp_path("sample_roundtrip.csv");
    write_sample_csv(path, s);
    {
        std::ifstream in(path);
        std::string head;
        std::getline(in, head);
        REQUIRE(head == "x1,x2,x3,y,dy1,dy2,dy3");
    }
    auto back = read_sample_csv(path);
    REQUIRE(back.size() == s.size());
    REQUIRE(back.dim() == 3);
    REQUIRE(back.has_gradients());
    for (std::size_t r = 0; r < s.size(); ++r) {
        for (int j = 0; j < 3; ++j) {
            REQUIRE(back.design(r, j) == s.design(r, j));
            REQUIRE((*back.gradients)(r, j) == (*s.gradients)(r, j));
        }
        REQUIRE(back.outputs[r] == s.outputs[r]);
    }
    std::remove(path.c_str());

    // Without gradients the header shrinks accordingly.
    auto plain = monte_carlo_design(f, dists, 5, 7);
    write_sample_csv(path, plain);
    {
        std::ifstream in(path);
        std::string head;
        std::getline(in, head);
        REQUIRE(head == "x1,x2,x3,y");
    }
    REQUIRE(!read_sample_csv(path).has_gradients());
    std::remove(path.c_str());
}

TEST_CASE("sample validation catches shape mismatches") {
    EvaluationSample s;
    s.design = Matrix(3, 2);
    s.outputs = {1.0, 2.0};
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
    s.outputs.push_back(3.0);
    REQUIRE_NOTHROW(s.validate());
    s.weights = {0.5, 0.5};
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
}
