#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "catsurf/blocks.hpp"

using namespace catsurf;

namespace {

// Independent relabelling used by the brute-force oracle.
std::string relabel(const std::vector<int>& raw) {
  std::map<int, int> labels;
  std::string out;
  for (int s : raw) {
    if (s <= 1) {
      out.push_back(static_cast<char>('0' + s));
      continue;
    }
    auto [it, fresh] = labels.emplace(s, 2 + static_cast<int>(labels.size()));
    out.push_back(static_cast<char>('0' + it->second));
  }
  return out;
}

std::set<std::string> brute_force(int length, int n) {
  std::set<std::string> out;
  std::vector<int> raw(length, 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i + 1 < length; ++i)
      if (raw[i] && raw[i + 1] && raw[i] != raw[i + 1]) ok = false;
    if (ok) out.insert(relabel(raw));
    int i = 0;
    while (i < length && ++raw[i] > n) raw[i++] = 0;
    if (i == length) break;
  }
  return out;
}

std::set<std::string> strings(const std::vector<CanonicalBlock>& blocks) {
  std::set<std::string> out;
  for (const auto& b : blocks) out.insert(b.str());
  return out;
}

const std::set<std::string> kTable1Blocks = {
    "222", "220", "202", "203", "022", "200", "201", "020", "002",
    "000", "001", "010", "102", "100", "011", "101", "110", "111"};

}  // namespace

TEST(Canonicalize, Examples) {
  EXPECT_EQ(CanonicalBlock::parse("030").str(), "020");
  EXPECT_EQ(CanonicalBlock::parse("304").str(), "203");
  EXPECT_EQ(CanonicalBlock::parse("000").str(), "000");
  EXPECT_EQ(CanonicalBlock::parse("40030").str(), "20030");
  EXPECT_THROW(CanonicalBlock::parse("230"), std::invalid_argument);
}

TEST(Canonicalize, Idempotent) {
  for (const auto& s : brute_force(4, 4)) {
    auto once = CanonicalBlock::parse(s);
    EXPECT_EQ(CanonicalBlock::parse(once.str()), once);
    EXPECT_EQ(once.str(), s);
  }
}

TEST(EnumerateBlocks, LengthThreeFourGasesIsTheEighteenPublishedBlocks) {
  auto blocks = enumerate_blocks(3, GasCount::finite(4));
  EXPECT_EQ(blocks.size(), 18u);
  EXPECT_EQ(strings(blocks), kTable1Blocks);
  EXPECT_TRUE(std::is_sorted(blocks.begin(), blocks.end()));
}

TEST(EnumerateBlocks, TwoGasesMatchesBruteForce) {
  auto blocks = enumerate_blocks(3, GasCount::finite(2));
  EXPECT_EQ(blocks.size(), 17u);
  EXPECT_EQ(strings(blocks), brute_force(3, 2));
  EXPECT_EQ(strings(blocks).count("203"), 0u);
}

TEST(EnumerateBlocks, LengthOne) {
  for (int n : {2, 3, 7})
    EXPECT_EQ(strings(enumerate_blocks(1, GasCount::finite(n))),
              (std::set<std::string>{"0", "1", "2"}));
}

TEST(EnumerateBlocks, MatchesBruteForceAcrossSizes) {
  for (int length = 1; length <= 6; ++length)
    for (int n = 2; n <= 5; ++n) {
      auto blocks = enumerate_blocks(length, GasCount::finite(n));
      EXPECT_EQ(strings(blocks), brute_force(length, n)) << "L=" << length << " n=" << n;
      for (const auto& b : blocks) {
        EXPECT_EQ(CanonicalBlock::parse(b.str()), b);
        EXPECT_LE(b.labels(), std::min(n - 1, (length + 1) / 2));
      }
    }
}

TEST(EnumerateBlocks, InfiniteVariantNeverPlacesOtherMoleculesSideBySide) {
  auto blocks = enumerate_blocks(2, GasCount::infinite());
  EXPECT_EQ(strings(blocks), (std::set<std::string>{"00", "01", "02", "10", "11", "20"}));
  for (const auto& b : enumerate_blocks(4, GasCount::infinite()))
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      if (b[i] >= 2) {
        EXPECT_EQ(b[i + 1], 0) << b.str();
      }
}

TEST(ReferenceBlock, AllTwosWhenAdmissible) {
  EXPECT_EQ(reference_block(3, GasCount::finite(4)).str(), "222");
  EXPECT_EQ(reference_block(5, GasCount::finite(3)).str(), "22222");
  EXPECT_EQ(reference_block(2, GasCount::infinite()).str(), "20");
}

TEST(ScoreTable, PublishedScores) {
  const std::map<std::string, double> published = {
      {"222", 0.000}, {"220", 0.163}, {"202", 0.295}, {"203", 0.339}, {"022", 0.354},
      {"200", 0.404}, {"201", 0.493}, {"020", 0.498}, {"002", 0.570}, {"000", 0.664},
      {"001", 0.827}, {"010", 0.920}, {"102", 1.008}, {"100", 1.157}, {"011", 1.173},
      {"101", 1.456}, {"110", 1.555}, {"111", 1.997}};
  auto t = ScoreTable::table1();
  EXPECT_EQ(t.entries().size(), 18u);
  for (const auto& [block, score] : published)
    EXPECT_DOUBLE_EQ(t.at(CanonicalBlock::parse(block)), score) << block;
  EXPECT_EQ(t.reference().str(), "222");
  EXPECT_GE(t.min_score(), 0.0);
}

TEST(ScoreTable, MissingBlockThrows) {
  auto t = ScoreTable::table1();
  EXPECT_THROW(t.at(CanonicalBlock::parse("2222")), std::out_of_range);
  auto z = ScoreTable::zeros(2, GasCount::finite(3));
  EXPECT_EQ(z.entries().size(), brute_force(2, 3).size());
}
