#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "deepif/rng.hpp"

using deepif::RngStream;

TEST_CASE("identical (seed, stream-id) pairs reproduce the same sequence") {
    RngStream a(123, 456);
    RngStream b(123, 456);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("frozen reference sequence pins the generator across builds") {
    // Golden values; any change here breaks every serialized artifact.
    RngStream s(7, 3);
    CHECK(s.next_u64() == 7457631004994166835ULL);
    CHECK(s.next_u64() == 17297067889401994280ULL);
    CHECK(s.next_u64() == 16171374171219607577ULL);
    CHECK(s.next_u64() == 13458639650355154408ULL);

    RngStream d = RngStream(42, 0).derive("tree", 5);
    CHECK(d.stream_id() == 8361434281970862080ULL);
    CHECK(d.next_u64() == 15360469635216958005ULL);
    CHECK(d.next_u64() == 14167519721587081982ULL);
}

TEST_CASE("distinct stream ids decorrelate") {
    RngStream a(99, 0);
    RngStream b(99, 1);
    int equal = 0;
    for (int i = 0; i < 256; ++i) equal += a.next_u64() == b.next_u64();
    CHECK(equal == 0);
}

TEST_CASE("derive depends on tag and index, not on consumed state") {
    RngStream parent(5, 17);
    RngStream before = parent.derive("child", 2);
    parent.next_u64();
    parent.next_u64();
    RngStream after = parent.derive("child", 2);
    CHECK(before.stream_id() == after.stream_id());
    CHECK(parent.derive("child", 3).stream_id() != before.stream_id());
    CHECK(parent.derive("other", 2).stream_id() != before.stream_id());
}

TEST_CASE("next_unit stays in [0, 1)") {
    RngStream s(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("below is in range and roughly uniform") {
    RngStream s(2024, 0);
    std::vector<int> buckets(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const std::uint64_t v = s.below(7);
        REQUIRE(v < 7);
        ++buckets[v];
    }
    for (int count : buckets) CHECK(std::abs(count - 10000) < 500);
}

TEST_CASE("normal draws have the right first moments") {
    RngStream s(7, 0);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = s.normal();
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.01);
}
