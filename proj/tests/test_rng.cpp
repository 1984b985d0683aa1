#include <catch2/catch_amalgamated.hpp>

#include "vfmc/rng.hpp"

using namespace vfmc;

TEST_CASE("streams are reproducible and key-separated") {
    RngStream a(42, StreamKind::brownian, 0, 7);
    RngStream b(42, StreamKind::brownian, 0, 7);
    for (int i = 0; i < 32; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RngStream c(42, StreamKind::brownian, 0, 8);
    RngStream d(42, StreamKind::brownian, 1, 7);
    RngStream e(43, StreamKind::brownian, 0, 7);
    RngStream f(42, StreamKind::occupation, 0, 7);
    RngStream base(42, StreamKind::brownian, 0, 7);
    const std::uint64_t first = base.next_u64();
    REQUIRE(c.next_u64() != first);
    REQUIRE(d.next_u64() != first);
    REQUIRE(e.next_u64() != first);
    REQUIRE(f.next_u64() != first);
}

TEST_CASE("uniform and normal draws have the right first moments") {
    RngStream rng(123, StreamKind::generic, 0, 0);
    const int n = 200000;
    double su = 0, suu = 0, sn = 0, snn = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        suu += u * u;
        const double g = rng.normal();
        sn += g;
        snn += g * g;
        sn4 += g * g * g * g;
    }
    REQUIRE(su / n == Catch::Approx(0.5).margin(0.005));
    REQUIRE(suu / n == Catch::Approx(1.0 / 3.0).margin(0.005));
    REQUIRE(sn / n == Catch::Approx(0.0).margin(0.01));
    REQUIRE(snn / n == Catch::Approx(1.0).margin(0.02));
    REQUIRE(sn4 / n == Catch::Approx(3.0).margin(0.1));
}

TEST_CASE("uniform ball sampling fills the ball uniformly") {
    RngStream rng(7, StreamKind::generic, 0, 0);
    const int n = 100000;
    const double radius = 2.0;
    double sr = 0;
    Vec3 sum{};
    for (int i = 0; i < n; ++i) {
        const Vec3 p = rng.uniform_ball(radius);
        const double r = norm(p);
        REQUIRE(r <= radius);
        sr += r;
        sum += p;
    }
    // E|X| = (3/4) R for a uniform ball
    REQUIRE(sr / n == Catch::Approx(0.75 * radius).margin(0.01));
    REQUIRE(norm(sum / n) < 0.02);
}
