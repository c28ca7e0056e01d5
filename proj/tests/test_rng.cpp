#include <catch2/catch_amalgamated.hpp>

#include "offload/rng.hpp"

using namespace offload;

TEST_CASE("identical seeds give identical sequences") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0,1) and in custom ranges") {
    RandomStream rs(7);
    for (int i = 0; i < 10000; ++i) {
        double u = rs.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        double v = rs.uniform(3.0, 5.0);
        REQUIRE(v >= 3.0);
        REQUIRE(v < 5.0);
    }
}

TEST_CASE("degenerate uniform range returns the bound exactly") {
    RandomStream rs(9);
    for (int i = 0; i < 100; ++i) REQUIRE(rs.uniform(2.5, 2.5) == 2.5);
}

TEST_CASE("uniform_int covers [0,n)") {
    RandomStream rs(11);
    int counts[5] = {0};
    for (int i = 0; i < 50000; ++i) {
        int k = rs.uniform_int(5);
        REQUIRE(k >= 0);
        REQUIRE(k < 5);
        ++counts[k];
    }
    for (int c : counts) REQUIRE(c > 8000);  // all buckets hit roughly evenly
}

TEST_CASE("substreams with different labels are unrelated") {
    RandomStream a = derive_stream(1, "alpha");
    RandomStream b = derive_stream(1, "beta");
    REQUIRE(a.next_u64() != b.next_u64());

    RandomStream c = derive_stream(1, "alpha");
    REQUIRE(derive_stream(1, "alpha").next_u64() == c.next_u64());
}

TEST_CASE("state round trip restores the stream") {
    RandomStream rs(1234);
    rs.next_u64();
    std::uint64_t s = rs.state();
    std::uint64_t next = rs.next_u64();
    RandomStream copy(0);
    copy.set_state(s);
    REQUIRE(copy.next_u64() == next);
}
