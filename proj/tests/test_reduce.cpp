#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include <dockette/engine.hpp>

using namespace dockette;

namespace {

// Independent oracle: explicit nested loop over 64-element chunks.
double chunked_oracle(const std::vector<double>& v) {
    double total = 0.0;
    for (std::size_t begin = 0; begin < v.size(); begin += 64) {
        double partial = 0.0;
        for (std::size_t i = begin; i < v.size() && i < begin + 64; ++i) partial += v[i];
        total += partial;
    }
    return total;
}

std::vector<double> random_reals(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    Draws d(RngKey{seed, 0, 0, 0, 0});
    // Mixed magnitudes so that summation order visibly matters.
    for (auto& x : v) x = (d.uniform() - 0.5) * std::pow(10.0, 8.0 * d.uniform());
    return v;
}

BackendConfig backend(Strategy s, std::size_t team, std::size_t threads) {
    BackendConfig b;
    b.strategy = s;
    b.team_size = team;
    b.max_threads = threads;
    return b;
}

} // namespace

TEST(Reduce, SingleElement) {
    const std::vector<double> one{1.0};
    EXPECT_EQ(fixed_order_sum<double>(one), 1.0);
    EXPECT_EQ(team_reduce_sum<double>(one, backend(Strategy::ExplicitTeam, 32, 2)), 1.0);
}

TEST(Reduce, SerialMatchesChunkedOracleAndDiffersFromNaive) {
    const auto v = random_reals(10000, 3);
    EXPECT_EQ(fixed_order_sum<double>(v), chunked_oracle(v));
    double naive = 0.0;
    for (double x : v) naive += x;
    // Not required, but confirms the test data distinguishes the two orders.
    EXPECT_NE(naive, chunked_oracle(v));
}

TEST(Reduce, TeamSumIsBitExactForAllTeamSizes) {
    const auto v = random_reals(10000, 11);
    const double expected = chunked_oracle(v);
    for (Strategy s : {Strategy::WorkShare, Strategy::ExplicitTeam})
        for (std::size_t team : {1, 2, 32, 64, 128, 256})
            for (std::size_t threads : {1, 3, 4}) EXPECT_EQ(team_reduce_sum<double>(v, backend(s, team, threads)), expected) << team;
}

TEST(Reduce, ArgMinLowestIndexOnTies) {
    const std::vector<double> flat(300, 2.5);
    const ArgMin serial = fixed_order_argmin(flat);
    EXPECT_EQ(serial.index, 0u);
    std::vector<double> v(500, 1.0);
    v[70] = -3.0;
    v[400] = -3.0;
    v[130] = -3.0;
    for (Strategy s : {Strategy::WorkShare, Strategy::ExplicitTeam})
        for (std::size_t team : {1, 4, 64, 256}) {
            const ArgMin m = team_reduce_min(v, backend(s, team, 4));
            EXPECT_EQ(m.index, 70u);
            EXPECT_EQ(m.value, -3.0);
            EXPECT_EQ(team_reduce_min(flat, backend(s, team, 4)).index, 0u);
        }
}

TEST(Reduce, IntegerSums) {
    std::vector<std::uint64_t> counters(150);
    for (std::size_t i = 0; i < counters.size(); ++i) counters[i] = i + 1;
    EXPECT_EQ(fixed_order_sum<std::uint64_t>(counters), 11325u); // 150 * 151 / 2
    EXPECT_EQ(team_reduce_sum<std::uint64_t>(counters, backend(Strategy::ExplicitTeam, 32, 4)), 11325u);
}

TEST(Reduce, EmptyListIsAnError) {
    const std::vector<double> empty;
    EXPECT_THROW(team_reduce_sum<double>(empty, backend(Strategy::WorkShare, 4, 1)), std::invalid_argument);
    EXPECT_THROW(team_reduce_min(empty, backend(Strategy::ExplicitTeam, 4, 1)), std::invalid_argument);
    EXPECT_THROW(fixed_order_argmin(empty), std::invalid_argument);
}
