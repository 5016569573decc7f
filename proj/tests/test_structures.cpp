#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/structures.hpp"

using namespace spdc;

namespace {
const double l0 = 9.489154805833549e-06;
const double dk0 = 331071.9150306694;
}

TEST_CASE("ideal structures")
{
    auto s = gen_ideal(700, 9.51535e-6);
    CHECK(s.length() == doctest::Approx(6.660745e-3).epsilon(1e-12));
    CHECK(s.boundaries.front() == doctest::Approx(-6.660745e-3).epsilon(1e-14));
    CHECK(s.boundaries.back() == 0.0);
    auto one = gen_ideal(1, 2e-6);
    REQUIRE(one.boundaries.size() == 2);
    CHECK(one.length() == doctest::Approx(2e-6));
    auto two = gen_ideal(2, 1e-6);
    REQUIRE(two.boundaries.size() == 3);
    CHECK(two.boundaries[0] == doctest::Approx(-2e-6));
    CHECK(two.boundaries[1] == doctest::Approx(-1e-6));
    CHECK(two.boundaries[2] == 0.0);
    CHECK_THROWS_AS(gen_ideal(0, 1e-6), ParameterError);
    CHECK_THROWS_AS(gen_ideal(3, 0.0), ParameterError);
}

TEST_CASE("zero spread reproduces the ideal structure")
{
    Rng r({1, 1});
    CHECK(gen_rps(50, l0, 0.0, r).boundaries == gen_ideal(50, l0).boundaries);
    CHECK(gen_weakly_random(50, l0, 0.0, r).boundaries == gen_ideal(50, l0).boundaries);
}

TEST_CASE("random-walk boundary statistics")
{
    const std::size_t N = 40;
    const double sigma = 2e-6;
    const int R = 10000;
    std::vector<double> s1(N + 1, 0.0), s2(N + 1, 0.0);
    for (int r = 0; r < R; ++r) {
        Rng rng(substream({2024, 0}, r));
        auto s = gen_rps(N, l0, sigma, rng);
        for (std::size_t n = 0; n <= N; ++n) {
            const double d = s.boundaries[n] - (-static_cast<double>(N) * l0 + n * l0);
            s1[n] += d;
            s2[n] += d * d;
        }
    }
    for (std::size_t n : {1, 5, 20, 40}) {
        const double mean = s1[n] / R;
        const double var = s2[n] / R - mean * mean;
        const double expected = n * sigma * sigma / 2.0;
        CHECK(std::abs(mean) < 4.0 * std::sqrt(expected / R));
        CHECK(std::abs(var - expected) < 4.0 * expected * std::sqrt(2.0 / R));
    }
}

TEST_CASE("weakly-random boundary statistics")
{
    const std::size_t N = 40;
    const double sigma = 2e-6;
    const int R = 10000;
    std::vector<double> s2(N + 1, 0.0);
    double len2 = 0.0;
    for (int r = 0; r < R; ++r) {
        Rng rng(substream({77, 0}, r));
        auto s = gen_weakly_random(N, l0, sigma, rng);
        for (std::size_t n = 0; n <= N; ++n) {
            const double d = s.boundaries[n] - (-static_cast<double>(N) * l0 + n * l0);
            s2[n] += d * d;
        }
        const double l = s.boundaries[11] - s.boundaries[10] - l0;
        len2 += l * l;
    }
    CHECK(s2[0] == 0.0);
    const double expected = sigma * sigma / 2.0;
    for (std::size_t n : {1, 10, 40})
        CHECK(std::abs(s2[n] / R - expected) < 4.0 * expected * std::sqrt(2.0 / R));
    CHECK(std::abs(len2 / R - sigma * sigma) < 4.0 * sigma * sigma * std::sqrt(2.0 / R));
}

TEST_CASE("empirical characteristic function of the domain-length spread")
{
    const double sigma = 2.1e-6;
    Rng rng({31337, 0});
    std::vector<double> dl;
    while (dl.size() < 100000) {
        auto s = gen_rps(1000, l0, sigma, rng);
        for (double l : s.domain_lengths())
            dl.push_back(l - l0);
    }
    dl.resize(100000);
    for (int j = 1; j <= 10; ++j) {
        const double q = j * 1.5e5;
        double c = 0, c2 = 0, sn = 0, sn2 = 0;
        for (double x : dl) {
            c += std::cos(q * x);
            c2 += std::cos(q * x) * std::cos(q * x);
            sn += std::sin(q * x);
            sn2 += std::sin(q * x) * std::sin(q * x);
        }
        const double n = static_cast<double>(dl.size());
        const double mc = c / n, ms = sn / n;
        const double se_c = std::sqrt((c2 / n - mc * mc) / n);
        const double se_s = std::sqrt((sn2 / n - ms * ms) / n);
        CHECK(std::abs(mc - gaussian_cf(q, sigma)) < 4.0 * se_c + 1e-12);
        CHECK(std::abs(ms) < 4.0 * se_s + 1e-12);
    }
}

TEST_CASE("generators are deterministic")
{
    Rng a({9, 1}), b({9, 1});
    CHECK(gen_rps(300, l0, 2e-6, a).boundaries == gen_rps(300, l0, 2e-6, b).boundaries);
    CHECK(gen_weakly_random(300, l0, 2e-6, a).boundaries ==
          gen_weakly_random(300, l0, 2e-6, b).boundaries);
}

TEST_CASE("property: generator outputs satisfy the structure invariants")
{
    Rng meta({555, 0});
    for (int t = 0; t < 1000; ++t) {
        const std::size_t N = 1 + meta.below(400);
        const double l = (1.0 + 19.0 * meta.uniform()) * 1e-6;
        const double sigma = meta.uniform() * l / 4.0;
        Rng r(substream({555, 1}, t));
        PolingStructure s;
        switch (t % 4) {
        case 0: s = gen_ideal(N, l); break;
        case 1: s = gen_rps(N, l, sigma, r); break;
        case 2: s = gen_weakly_random(N, l, sigma, r); break;
        default: {
            const double d0 = 3.14159 / l;
            // keep the chirp well inside the monotone range
            const double zmax = d0 / (2.0 * l * static_cast<double>(N));
            s = gen_chirped(N, l, 0.5 * meta.uniform() * zmax, d0);
        }
        }
        REQUIRE(s.domain_count() == N);
        REQUIRE_NOTHROW(s.validate());
        CHECK(s.boundaries.front() == doctest::Approx(-static_cast<double>(N) * l).epsilon(1e-12));
    }
}

TEST_CASE("chirped structure")
{
    auto s = gen_chirped(700, l0, 2.5e6, dk0);
    REQUIRE_NOTHROW(s.validate());
    CHECK(s.kind == StructureKind::chirped);
    CHECK(s.boundaries.front() == doctest::Approx(-700 * l0).epsilon(1e-14));
    CHECK(s.boundaries.back() == 0.0);
    CHECK(s.length() == doctest::Approx(6.642408364083484e-3).epsilon(1e-12));
    const auto len = s.domain_lengths();
    const auto [mn, mx] = std::minmax_element(len.begin(), len.end());
    CHECK(*mn == doctest::Approx(9.013874403495346e-06).epsilon(1e-9));
    CHECK(*mx == doctest::Approx(9.964435208171531e-06).epsilon(1e-9));
    // longer domains towards the exit face, shorter at the entrance
    CHECK(len.front() == *mn);
    CHECK(len.back() == *mx);

    // vertex of the parabola: boundary N/2 sits where the ideal one would after the shift
    const double zp = 2.5e6 / dk0;
    const double shift = zp * 350.0 * 350.0 * l0 * l0;
    CHECK(s.boundaries[350] == doctest::Approx(-700 * l0 + 350 * l0 - shift).epsilon(1e-12));

    auto flat = gen_chirped(700, l0, 0.0, dk0);
    const auto ideal = gen_ideal(700, l0);
    for (std::size_t n = 0; n <= 700; ++n)
        CHECK(flat.boundaries[n] == doctest::Approx(ideal.boundaries[n]).epsilon(1e-12));
}

TEST_CASE("non-monotone chirp reports the first violating index")
{
    try {
        gen_chirped(700, l0, -2e8, dk0);
        FAIL("expected a parameter error");
    } catch (const ParameterError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("first violating boundary index") != std::string::npos);
        CHECK(msg.find("n=1") == std::string::npos);
    }
}

TEST_CASE("fabrication error")
{
    const auto base = gen_chirped(700, l0, 2.5e6, dk0);
    Rng same({1, 2});
    CHECK(apply_fabrication_error(base, 0.0, same).boundaries == base.boundaries);

    const double se = 5e-7;
    double sum_b = 0, sum_b2 = 0, sum_l = 0, sum_l2 = 0;
    std::size_t nb = 0, nl = 0;
    for (int r = 0; r < 50; ++r) {
        Rng a(substream({3, 0}, r)), b(substream({3, 1}, r));
        auto pb = apply_fabrication_error(base, se, a, FabricationModel::boundary);
        CHECK(pb.boundaries.front() == base.boundaries.front());
        CHECK(pb.boundaries.back() == base.boundaries.back());
        REQUIRE_NOTHROW(pb.validate());
        for (std::size_t n = 1; n < 700; ++n) {
            const double d = pb.boundaries[n] - base.boundaries[n];
            sum_b += d;
            sum_b2 += d * d;
            ++nb;
        }
        auto pl = apply_fabrication_error(base, se, b, FabricationModel::domain_length);
        CHECK(pl.boundaries.front() == base.boundaries.front());
        CHECK(pl.kind == StructureKind::perturbed);
        REQUIRE_NOTHROW(pl.validate());
        const auto l1 = base.domain_lengths(), l2 = pl.domain_lengths();
        for (std::size_t n = 0; n < 700; ++n) {
            const double d = l2[n] - l1[n];
            sum_l += d;
            sum_l2 += d * d;
            ++nl;
        }
    }
    const double vb = sum_b2 / nb - (sum_b / nb) * (sum_b / nb);
    const double vl = sum_l2 / nl - (sum_l / nl) * (sum_l / nl);
    CHECK(std::abs(vb / (se * se) - 1.0) < 4.0 * std::sqrt(2.0 / nb));
    CHECK(std::abs(vl / (se * se) - 1.0) < 4.0 * std::sqrt(2.0 / nl));
    CHECK(fabrication_model_from_name("boundary") == FabricationModel::boundary);
    CHECK_THROWS(fabrication_model_from_name("duty"));
}

TEST_CASE("segment shuffling")
{
    const auto base = gen_chirped(700, l0, 2.5e6, dk0);
    auto sorted_lengths = [](const PolingStructure& s) {
        auto l = s.domain_lengths();
        std::sort(l.begin(), l.end());
        return l;
    };
    for (std::size_t d : {1, 2, 5, 10, 35, 70, 350, 700, 3, 333}) {
        Rng r({8, d});
        auto s = shuffle_segments(base, d, r);
        REQUIRE_NOTHROW(s.validate());
        CHECK(s.domain_count() == 700);
        CHECK(s.boundaries.front() == base.boundaries.front());
        CHECK(std::abs(s.length() - base.length()) < 1e-12 * base.length());
        const auto a = sorted_lengths(s), b = sorted_lengths(base);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
        CHECK(worst < 1e-15);
    }
    Rng r({8, 0});
    CHECK(shuffle_segments(base, 700, r).boundaries == base.boundaries);
    CHECK_THROWS_AS(shuffle_segments(base, 0, r), ParameterError);
    CHECK_THROWS_AS(shuffle_segments(base, 701, r), ParameterError);

    Rng r1({8, 1});
    auto s1 = shuffle_segments(base, 1, r1);
    CHECK(s1.boundaries != base.boundaries);
}

TEST_CASE("domain length histograms")
{
    auto ideal = gen_ideal(700, l0);
    auto h = domain_length_histogram(ideal, 0.05e-6);
    CHECK(h.total() == 700);
    std::size_t occupied = 0;
    for (auto c : h.counts)
        occupied += c > 0;
    CHECK(occupied == 1);

    Rng r({4, 4});
    auto rps = gen_rps(700, l0, 2.1e-6, r);
    auto ch = gen_chirped(700, l0, 2.5e6, dk0);
    CHECK(domain_length_histogram(rps, 0.1e-6).total() == 700);
    CHECK(domain_length_histogram(ch, 0.1e-6).total() == 700);
    CHECK(domain_length_moments(rps).stddev > domain_length_moments(ch).stddev);
    CHECK_THROWS_AS(domain_length_histogram(ideal, 0.0), ParameterError);
}
