#include "doctest.h"

#include <cmath>

#include "spdc/constants.hpp"
#include "spdc/dispersion.hpp"
#include "spdc/errors.hpp"

using namespace spdc;

namespace {
const double ws0 = omega_from_wavelength(1550e-9);
const double wp = omega_from_wavelength(775e-9);
}

TEST_CASE("refractive index regression values at 297 K")
{
    DispersionModel m(297.0);
    const double n1550 = m.refractive_index(ws0);
    const double n775 = m.refractive_index(wp);
    CHECK(n1550 == doctest::Approx(2.1378370647888922).epsilon(1e-13));
    CHECK(n775 == doctest::Approx(2.178673156930816).epsilon(1e-13));
    CHECK(n1550 > 2.13);
    CHECK(n1550 < 2.14);
    CHECK(n775 > n1550);
}

TEST_CASE("out of band frequency is a domain error naming the band")
{
    DispersionModel m;
    CHECK_THROWS_AS(m.refractive_index(omega_from_wavelength(200e-9)), DomainError);
    try {
        m.refractive_index(omega_from_wavelength(200e-9));
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("400-4000 nm") != std::string::npos);
    }
    CHECK_THROWS_AS(m.refractive_index(omega_from_wavelength(5e-6)), DomainError);
}

TEST_CASE("collinear mismatch and QPM period")
{
    DispersionModel m(297.0);
    const double dk0 = collinear_mismatch(m, ws0, wp - ws0);
    CHECK(dk0 == doctest::Approx(331071.9150306694).epsilon(1e-12));
    const double l0 = qpm_period(m, ws0, wp - ws0);
    CHECK(l0 == doctest::Approx(9.489154805833549e-06).epsilon(1e-12));
    CHECK(std::abs(l0 / 9.51535e-6 - 1.0) < 0.02);

    const double W = 0.01 * ws0;
    CHECK(collinear_mismatch(m, ws0 + W, wp - ws0 - W) - dk0 ==
          doctest::Approx(-14.823082756251097).epsilon(1e-7));

    const double a = 1.13 * ws0, b = 0.91 * ws0;
    CHECK(collinear_mismatch(m, a, b) == collinear_mismatch(m, b, a));
}

TEST_CASE("qpm period from a given mismatch")
{
    CHECK(qpm_period_from_mismatch(constants::pi * 1e5) == doctest::Approx(1e-5).epsilon(1e-15));
    CHECK_THROWS_AS(qpm_period_from_mismatch(0.0), DomainError);
    CHECK_THROWS_AS(qpm_period_from_mismatch(-1.0), DomainError);
}

TEST_CASE("vector mismatch")
{
    DispersionModel m(297.0);
    const double wi = wp - ws0;
    auto v0 = vector_mismatch(m, ws0, wi, 0.0, 0.3, 0.0, 1.1);
    CHECK(v0.x == 0.0);
    CHECK(v0.y == 0.0);
    CHECK(v0.z == collinear_mismatch(m, ws0, wi));

    auto vb = vector_mismatch(m, ws0, ws0, 0.02, 0.7, 0.02, 0.7 + constants::pi);
    CHECK(std::abs(vb.x) < 1e-9);
    CHECK(std::abs(vb.y) < 1e-9);

    auto v1 = vector_mismatch(m, ws0, wi, 1e-3, 0.0, 0.0, 0.0);
    CHECK(v1.x == 0.0);
    CHECK(v1.y == doctest::Approx(m.wavenumber(ws0) * std::sin(1e-3)).epsilon(1e-15));
    CHECK(v1.y == doctest::Approx(8666.080126379273).epsilon(1e-12));
    CHECK(v1.z == doctest::Approx(331076.2480710931).epsilon(1e-12));
}

TEST_CASE("wavenumber increases across the band")
{
    DispersionModel m(297.0);
    const double w_lo = omega_from_wavelength(4.0e-6);
    const double w_hi = omega_from_wavelength(0.4e-6);
    double prev = m.wavenumber(w_lo);
    for (int i = 1; i < 1000; ++i) {
        const double w = w_lo + (w_hi - w_lo) * i / 999.0;
        const double k = m.wavenumber(w);
        REQUIRE(k > prev);
        REQUIRE(m.refractive_index(w) > 1.0);
        prev = k;
    }
}

TEST_CASE("temperature sensitivity is weak")
{
    DispersionModel m(297.0);
    const double d284 = collinear_mismatch(m.at_temperature(284.0), ws0, wp - ws0);
    const double d300 = collinear_mismatch(m.at_temperature(300.0), ws0, wp - ws0);
    CHECK(d284 == doctest::Approx(330375.1864462644).epsilon(1e-11));
    CHECK(d300 == doctest::Approx(331237.06747918576).epsilon(1e-11));
    CHECK(std::abs(d300 - d284) / d300 < 1e-2);
}

TEST_CASE("coefficient override and material names")
{
    auto c = jundt_congruent_e();
    c[0] += 0.01;
    DispersionModel m(297.0, Material::lithium_niobate_congruent_e, c);
    CHECK(m.refractive_index(ws0) > DispersionModel(297.0).refractive_index(ws0));
    CHECK(material_from_name(material_name(Material::lithium_niobate_congruent_e)) ==
          Material::lithium_niobate_congruent_e);
    CHECK_THROWS(material_from_name("quartz"));
}
