#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "liouville/hypothesis.hpp"
#include "test_helpers.hpp"

using namespace liouville;

namespace {
const double pi24 = std::numbers::pi * std::numbers::pi / 4.0;
}

TEST_CASE("point derivatives of the reference pair", "[hypothesis]") {
    const std::size_t N = 1024;
    auto r = point_derivatives(test_helpers::h_test(N), test_helpers::k_test(N));
    REQUIRE(r.h_at_1 == Catch::Approx(2.5).margin(1e-13));
    REQUIRE(std::abs(r.hp_at_1) < 1e-13);
    REQUIRE(r.hpp_at_1 == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(r.flap_h_at_1) < 1e-13);
    REQUIRE(std::abs(r.flap_hp_at_1) < 1e-12);
    REQUIRE(std::abs(r.k_at_1) < 1e-13);
    REQUIRE(std::abs(r.kp_at_1) < 1e-13);
    REQUIRE(r.flap_k_at_1 == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(r.h1_satisfied);
}

TEST_CASE("constant h has only h(1) nonzero", "[hypothesis]") {
    const std::size_t N = 256;
    auto r = point_derivatives(CircleFunction::constant(N, 1.0), CircleFunction::constant(N, 0.0));
    REQUIRE(r.h_at_1 == 1.0);
    REQUIRE(r.hp_at_1 == 0.0);
    REQUIRE(r.hpp_at_1 == 0.0);
    REQUIRE(r.flap_h_at_1 == 0.0);
    REQUIRE(r.flap_hp_at_1 == 0.0);
}

TEST_CASE("stationarity violation throws", "[hypothesis]") {
    const std::size_t N = 256;
    auto bad = make_trig_poly(N, {2.0}, {0.0, 1.0}); // h'(1) = 1
    REQUIRE_THROWS_AS(point_derivatives(bad, test_helpers::k_test(N)), error);
    auto r = point_derivatives(bad, test_helpers::k_test(N), 1e-8, /*strict=*/false);
    REQUIRE_FALSE(r.h1_satisfied);

    auto bad2 = make_trig_poly(N, {2.0, 1.0}); // (-D)^{1/2} h(1) = 1
    REQUIRE_THROWS_AS(point_derivatives(bad2, test_helpers::k_test(N)), error);
}

TEST_CASE("hat_h removable value and divergence guard", "[hypothesis]") {
    const std::size_t N = 512;
    auto hat = hat_h(test_helpers::h_test(N));
    // hat h = cos(theta)/2 exactly for the reference h
    REQUIRE(hat.values()[0] == Catch::Approx(0.5).margin(1e-8));
    auto expect = make_trig_poly(N, {0.0, 0.5});
    REQUIRE(sup_norm(hat - expect) < 1e-10);

    auto bad = make_trig_poly(N, {2.0}, {0.0, 1.0});
    REQUIRE_THROWS_AS(hat_h(bad), error);
}

TEST_CASE("Q of the reference h equals pi^2/4 both ways", "[hypothesis]") {
    const std::size_t N = 2048;
    auto h = test_helpers::h_test(N);
    const double qs = q_form_spectral(h);
    REQUIRE(qs == Catch::Approx(pi24).margin(1e-10));
    const double qq = q_form_quadrature(h);
    REQUIRE(std::abs(qq - qs) / qs < 1e-4);
}

TEST_CASE("Q vanishes only for constants and scales quadratically", "[hypothesis]") {
    const std::size_t N = 1024;
    REQUIRE(q_form_spectral(CircleFunction::constant(N, 2.0)) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(q_form_quadrature(CircleFunction::constant(N, 2.0)) == Catch::Approx(0.0).margin(1e-10));

    auto h = test_helpers::h_test(N);
    const double q = q_form_spectral(h);
    // affine family preserving (h1): alpha h + c
    auto h2 = 2.0 * h + 0.7;
    REQUIRE(q_form_spectral(h2) == Catch::Approx(4.0 * q).epsilon(1e-12));
    REQUIRE(q_form_quadrature(h2) == Catch::Approx(4.0 * q_form_quadrature(h)).epsilon(1e-12));
}

TEST_CASE("Q positive for random admissible curvatures", "[hypothesis]") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        auto h = test_helpers::random_admissible_h(1024, 8, rng);
        auto r = point_derivatives(h, CircleFunction::constant(1024, 0.0));
        REQUIRE(r.h1_satisfied);
        const double qs = q_form_spectral(h);
        REQUIRE(qs > 0.0);
        REQUIRE(std::abs(q_form_quadrature(h) - qs) / qs < 1e-4);
    }
}

TEST_CASE("nondegeneracy and transversality scalars", "[hypothesis]") {
    const std::size_t N = 1024;
    auto r = hypothesis_report(test_helpers::h_test(N), test_helpers::k_test(N));
    REQUIRE(r.q_of_h == Catch::Approx(pi24).margin(1e-10));
    REQUIRE(r.nondeg_value == Catch::Approx(0.8).margin(1e-10));
    REQUIRE(r.nondeg_satisfied);
    REQUIRE(r.cond_value == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(r.cond_satisfied);

    auto rc = hypothesis_report(CircleFunction::constant(N, 1.0), test_helpers::k_test(N));
    REQUIRE(rc.nondeg_value == 0.0);
    REQUIRE_FALSE(rc.nondeg_satisfied);
}

TEST_CASE("nondeg restoration shift", "[hypothesis]") {
    const std::size_t N = 1024;
    // h = cos - cos(2.)/2 has h(1) = 1/2 and nondeg exactly zero
    auto h = make_trig_poly(N, {0.0, 1.0, -0.5});
    auto r = hypothesis_report(h, test_helpers::k_test(N), 1e-8, false);
    REQUIRE(r.nondeg_value == Catch::Approx(0.0).margin(1e-10));

    auto shift = suggest_nondeg_shift(r, 1e-3);
    REQUIRE(shift.has_value());
    auto shifted = hypothesis_report(h + *shift, test_helpers::k_test(N));
    REQUIRE(std::abs(shifted.nondeg_value) >= 1e-3 * 0.99);

    // nondeg independent of the shift when h'' = 0: no shift can help
    auto r0 = hypothesis_report(CircleFunction::constant(N, 1.0), test_helpers::k_test(N));
    REQUIRE_FALSE(suggest_nondeg_shift(r0, 1e-3).has_value());
}
