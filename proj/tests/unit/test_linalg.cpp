#include "etesc/linalg.hpp"

#include "test_helpers.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace etesc;
using etesc::test::mat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("induced norm is the largest singular value", "[linalg]") {
    CHECK_THAT(linalg::induced_norm(mat({{3, 0}, {0, -4}})), WithinRel(4.0, 1e-14));
    // [[1,1],[0,1]]: sigma_max^2 = (3 + sqrt 5)/2
    CHECK_THAT(linalg::induced_norm(mat({{1, 1}, {0, 1}})), WithinRel(std::sqrt((3.0 + std::sqrt(5.0)) / 2.0), 1e-13));
}

TEST_CASE("symmetric eigenvalues ascend", "[linalg]") {
    const Vector ev = linalg::symmetric_eigenvalues(mat({{2, 1}, {1, 2}}));
    REQUIRE(ev.size() == 2);
    CHECK_THAT(ev(0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(ev(1), WithinAbs(3.0, 1e-14));
}

TEST_CASE("general eigenvalues of a rotation generator are imaginary", "[linalg]") {
    const auto ev = linalg::eigenvalues(mat({{0, -2}, {2, 0}}));
    REQUIRE(ev.size() == 2);
    for (const auto& l : ev) {
        CHECK_THAT(l.real(), WithinAbs(0.0, 1e-14));
        CHECK_THAT(std::abs(l.imag()), WithinAbs(2.0, 1e-14));
    }
}

TEST_CASE("asymmetry and symmetrization", "[linalg]") {
    const Matrix a = mat({{1, 2}, {2.5, 1}});
    CHECK_THAT(linalg::asymmetry(a), WithinAbs(0.5, 1e-15));
    const Matrix s = linalg::symmetrized(a);
    CHECK_THAT(s(0, 1), WithinAbs(2.25, 1e-15));
    CHECK(linalg::asymmetry(s) == 0.0);
}
