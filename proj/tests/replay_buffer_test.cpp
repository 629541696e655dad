#include "qretail/replay.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "test_support.hpp"

using namespace qretail;

namespace {

Experience tagged(double reward) {
  return Experience{{0.0}, 0, reward, {0.0}, false};
}

}  // namespace

TEST(ReplayBuffer, EvictsOldestFirst) {
  ReplayBuffer buffer(2);
  buffer.push(tagged(1.0));
  buffer.push(tagged(2.0));
  buffer.push(tagged(3.0));
  ASSERT_EQ(buffer.size(), 2u);
  EXPECT_EQ(buffer.at(0).reward, 2.0);
  EXPECT_EQ(buffer.at(1).reward, 3.0);
}

TEST(ReplayBuffer, PushToEmpty) {
  ReplayBuffer buffer(10);
  buffer.push(tagged(0.5));
  EXPECT_EQ(buffer.size(), 1u);
}

TEST(ReplayBuffer, CapsAtCapacity) {
  ReplayBuffer buffer(1000);
  for (int i = 0; i < 10000; ++i) buffer.push(tagged(i));
  EXPECT_EQ(buffer.size(), 1000u);
  EXPECT_EQ(buffer.at(0).reward, 9000.0);
  EXPECT_EQ(buffer.insert_count(), 10000u);
}

TEST(ReplayBuffer, KeepsInsertionOrderBelowCapacity) {
  ReplayBuffer buffer(64);
  for (int i = 0; i < 20; ++i) buffer.push(tagged(i));
  for (int i = 0; i < 20; ++i) EXPECT_EQ(buffer.at(i).reward, double(i));
}

TEST(ReplayBuffer, ExactSizeSampleIsPermutation) {
  ReplayBuffer buffer(10);
  for (int i = 0; i < 8; ++i) buffer.push(tagged(i));
  std::mt19937 rng(1);
  const auto batch = buffer.sample(8, rng);
  std::multiset<double> rewards;
  for (const Experience& e : batch) rewards.insert(e.reward);
  EXPECT_EQ(rewards, (std::multiset<double>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(ReplayBuffer, BatchIndicesAreDistinct) {
  ReplayBuffer buffer(100);
  for (int i = 0; i < 100; ++i) buffer.push(tagged(i));
  std::mt19937 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto batch = buffer.sample(32, rng);
    std::set<double> rewards;
    for (const Experience& e : batch) rewards.insert(e.reward);
    EXPECT_EQ(rewards.size(), 32u);
  }
}

TEST(ReplayBuffer, SampleDoesNotMutate) {
  ReplayBuffer buffer(16);
  for (int i = 0; i < 16; ++i) buffer.push(tagged(i));
  std::mt19937 rng(5);
  (void)buffer.sample(4, rng);
  ASSERT_EQ(buffer.size(), 16u);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(buffer.at(i).reward, double(i));
}

TEST(ReplayBuffer, DeterministicGivenSeed) {
  ReplayBuffer buffer(50);
  for (int i = 0; i < 50; ++i) buffer.push(tagged(i));
  std::mt19937 rng_a(42);
  std::mt19937 rng_b(42);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = buffer.sample(8, rng_a);
    const auto b = buffer.sample(8, rng_b);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].reward, b[k].reward);
    }
  }
}

TEST(ReplayBuffer, SampleRequiresEnoughEntries) {
  ReplayBuffer buffer(8);
  buffer.push(tagged(0));
  std::mt19937 rng(0);
  EXPECT_THROW(buffer.sample(2, rng), contract_error);
}

TEST(ReplayBuffer, RejectsMalformedExperience) {
  ReplayBuffer buffer(8);
  EXPECT_THROW(buffer.push(Experience{{1.0, 2.0}, 0, 0.0, {1.0}, false}),
               contract_error);
  EXPECT_THROW(buffer.push(Experience{{1.0}, -1, 0.0, {1.0}, false}),
               contract_error);
  EXPECT_THROW(
      buffer.push(Experience{{1.0}, 0, std::nan(""), {1.0}, false}),
      contract_error);
}

TEST(ReplayBuffer, UniformSamplingChiSquare) {
  ReplayBuffer buffer(1000);
  for (int i = 0; i < 1000; ++i) buffer.push(tagged(i));
  std::mt19937 rng(123);
  std::vector<std::size_t> counts(1000, 0);
  for (int rep = 0; rep < 10000; ++rep) {
    for (const Experience& e : buffer.sample(32, rng)) {
      counts[static_cast<std::size_t>(e.reward)] += 1;
    }
  }
  EXPECT_LT(testutil::chi_square_uniform(counts), testutil::kChi2Crit999dof);
}
