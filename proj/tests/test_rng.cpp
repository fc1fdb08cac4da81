#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ftsim/rng.hpp"

using namespace ftsim;

TEST_CASE("splitmix64 matches the published reference stream") {
    SplitMix64 rng(1234567);
    CHECK(rng.next_u64() == 6457827717110365317ULL);
    CHECK(rng.next_u64() == 3203168211198807973ULL);
    CHECK(rng.next_u64() == 9817491932198370423ULL);

    SplitMix64 zero(0);
    CHECK(zero.next_u64() == 16294208416658607535ULL);
    CHECK(zero.next_u64() == 7960286522194355700ULL);
    CHECK(zero.next_u64() == 487617019471545679ULL);
}

TEST_CASE("mix64 frozen values") {
    CHECK(mix64(0) == 16294208416658607535ULL);
    CHECK(mix64(1) == 10451216379200822465ULL);
    CHECK(mix64(42) == 13679457532755275413ULL);
}

TEST_CASE("same seed gives the same stream, different seeds differ") {
    SplitMix64 a(9001), b(9001), c(9002);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 256; ++i) {
        std::uint64_t va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("state round-trip resumes the stream mid-way") {
    SplitMix64 a(77);
    for (int i = 0; i < 10; ++i) a.next_u64();
    SplitMix64 b;
    b.set_state(a.state());
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("next_u01 stays in [0,1) with sane mean") {
    SplitMix64 rng(7);
    CHECK(rng.next_u01() == doctest::Approx(0.3898297483912715).epsilon(1e-15));
    CHECK(rng.next_u01() == doctest::Approx(0.01678829452815611).epsilon(1e-15));
    CHECK(rng.next_u01() == doctest::Approx(0.9007606806068834).epsilon(1e-15));

    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double u = rng.next_u01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("next_below is in range, unbiased and frozen") {
    SplitMix64 rng(99);
    const std::uint64_t expect[] = {2, 0, 8, 1, 1, 2, 6, 7};
    for (std::uint64_t e : expect) CHECK(rng.next_below(10) == e);

    CHECK(SplitMix64(5).next_below(1) == 0);

    std::uint64_t counts[10] = {};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        std::uint64_t v = rng.next_below(10);
        REQUIRE(v < 10);
        ++counts[v];
    }
    for (auto c : counts)
        CHECK(static_cast<double>(c) / n ==
              doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("next_normal has standard moments") {
    SplitMix64 rng(7);
    CHECK(rng.next_normal() ==
          doctest::Approx(1.3649922974572284).epsilon(1e-12));
    CHECK(rng.next_normal() ==
          doctest::Approx(-0.396523975253818).epsilon(1e-12));

    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double z = rng.next_normal();
        sum += z;
        sq += z * z;
    }
    const double m = sum / n;
    CHECK(m == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
    CHECK(std::sqrt(sq / n - m * m) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("lognormal_delay is a positive whole-step delay") {
    SplitMix64 rng(7);
    const Timestep expect[] = {4, 2, 2, 2, 1};
    for (Timestep e : expect)
        CHECK(lognormal_delay(rng, 0.8, 0.5) == e);

    double sum = 0.0;
    const int n = 100000;
    Timestep min_seen = ~Timestep{0};
    for (int i = 0; i < n; ++i) {
        Timestep d = lognormal_delay(rng, 0.8, 0.5);
        REQUIRE(d >= 1);
        min_seen = std::min(min_seen, d);
        sum += static_cast<double>(d);
    }
    CHECK(min_seen == 1);
    // E[lognormal(0.8, 0.5)] = exp(0.925) ~ 2.52; integer rounding and the
    // >=1 clamp shift the mean a little.
    CHECK(sum / n == doctest::Approx(2.52).epsilon(0.05));

    // sigma = 0 pins the delay to round(exp(mu))
    SplitMix64 fixed(1);
    CHECK(lognormal_delay(fixed, 0.0, 0.0) == 1);
    CHECK(lognormal_delay(fixed, 2.0, 0.0) == 7);
}
