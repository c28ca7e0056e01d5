#include <catch2/catch_amalgamated.hpp>

#include "offload/replay_memory.hpp"

using namespace offload;

namespace {
Transition make(double id) {
    Transition t;
    t.state = {id};
    t.next_state = {id};
    t.reward = id;
    return t;
}
}  // namespace

TEST_CASE("push grows until capacity then evicts the oldest") {
    ReplayMemory mem(3);
    REQUIRE(mem.empty());
    mem.push(make(0));
    REQUIRE(mem.size() == 1);
    mem.push(make(1));
    mem.push(make(2));
    REQUIRE(mem.size() == 3);
    mem.push(make(3));
    REQUIRE(mem.size() == 3);
    // oldest (0) gone, FIFO order preserved
    REQUIRE(mem.at(0).reward == 1.0);
    REQUIRE(mem.at(1).reward == 2.0);
    REQUIRE(mem.at(2).reward == 3.0);

    mem.push(make(4));
    mem.push(make(5));
    REQUIRE(mem.at(0).reward == 3.0);
    REQUIRE(mem.at(2).reward == 5.0);
}

TEST_CASE("stored transitions come back verbatim") {
    ReplayMemory mem(4);
    Transition t;
    t.state = {0.25, -1.0, 3.5};
    t.action = 2;
    t.reward = -7.125;
    t.next_state = {0.0, 0.0, 1.0};
    t.terminal = true;
    mem.push(t);
    const Transition& got = mem.at(0);
    REQUIRE(got.state == t.state);
    REQUIRE(got.next_state == t.next_state);
    REQUIRE(got.action == 2);
    REQUIRE(got.reward == -7.125);
    REQUIRE(got.terminal);
}

TEST_CASE("sampling a single-item pool repeats that item") {
    ReplayMemory mem(8);
    mem.push(make(42));
    RandomStream rs(1);
    auto batch = mem.sample(4, rs);
    REQUIRE(batch.size() == 4);
    for (const Transition* t : batch) REQUIRE(t->reward == 42.0);
}

TEST_CASE("same seed gives the same sample") {
    ReplayMemory mem(16);
    for (int i = 0; i < 10; ++i) mem.push(make(i));
    RandomStream a(5), b(5);
    auto ba = mem.sample(6, a);
    auto bb = mem.sample(6, b);
    for (std::size_t i = 0; i < ba.size(); ++i) REQUIRE(ba[i]->reward == bb[i]->reward);
}

TEST_CASE("sampling is uniform over the pool") {
    ReplayMemory mem(16);
    for (int i = 0; i < 10; ++i) mem.push(make(i));
    RandomStream rs(7);
    const int draws = 100000;
    int counts[10] = {0};
    auto batch = mem.sample(draws, rs);
    for (const Transition* t : batch) ++counts[static_cast<int>(t->reward)];
    double expected = draws / 10.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    REQUIRE(chi2 < 21.666);  // chi-square, 9 dof, p = 0.01
}

TEST_CASE("sampling an empty pool fails") {
    ReplayMemory mem(4);
    RandomStream rs(1);
    REQUIRE_THROWS_AS(mem.sample(1, rs), std::runtime_error);
}

TEST_CASE("capacity must be positive") {
    REQUIRE_THROWS_AS(ReplayMemory(0), std::invalid_argument);
}
