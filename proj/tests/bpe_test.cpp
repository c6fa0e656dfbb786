#include <gtest/gtest.h>

#include <random>

#include "prev/baselines.hpp"
#include "prev/error.hpp"

namespace prev {
namespace {

TokenSequence seq(std::vector<TokenId> ids, std::uint64_t hash = 7) {
  return {std::move(ids), hash, 0, kDefaultStepsPerBeat};
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::IoError;
}

std::vector<TokenSequence> random_corpus(std::mt19937_64& rng, int count, TokenId alphabet) {
  std::uniform_int_distribution<int> len(0, 60);
  std::uniform_int_distribution<TokenId> tok(0, alphabet - 1);
  std::vector<TokenSequence> out;
  for (int i = 0; i < count; ++i) {
    std::vector<TokenId> ids(static_cast<std::size_t>(len(rng)));
    for (auto& id : ids) id = tok(rng);
    out.push_back(seq(std::move(ids)));
  }
  return out;
}

TEST(BpeTrain, OverlappingPairsCount) {
  // A A A B: (A,A) occurs twice counting overlaps
  const std::vector<TokenSequence> corpus{seq({0, 0, 0, 1})};
  const BpeModel model = bpe_train(corpus, 1, 2);
  ASSERT_EQ(model.merges.size(), 1u);
  EXPECT_EQ(model.merges[0], (BpeMerge{0, 0, 2}));
  EXPECT_EQ(bpe_apply(model, corpus[0]).ids, (std::vector<TokenId>{2, 0, 1}));
}

TEST(BpeTrain, TiesGoToTheSmallerPair) {
  const std::vector<TokenSequence> corpus{seq({5, 6, 9, 3, 4, 9, 5, 6, 9, 3, 4})};
  const BpeModel model = bpe_train(corpus, 1, 10);
  ASSERT_EQ(model.merges.size(), 1u);
  EXPECT_EQ(model.merges[0], (BpeMerge{3, 4, 10}));
}

TEST(BpeTrain, StopsWhenNoPairRepeats) {
  const std::vector<TokenSequence> corpus{seq({1, 2, 3, 4})};
  const BpeModel model = bpe_train(corpus, 5);
  EXPECT_TRUE(model.merges.empty());
  EXPECT_EQ(model.base_size, 5u);
}

TEST(BpeTrain, ZeroMergesIsIdentity) {
  std::mt19937_64 rng(1);
  const auto corpus = random_corpus(rng, 20, 6);
  const BpeModel model = bpe_train(corpus, 0, 6);
  EXPECT_EQ(model.vocab_size(), 6u);
  for (const auto& s : corpus) EXPECT_EQ(bpe_apply(model, s), s);
}

TEST(BpeTrain, MergedIdsAreContiguous) {
  std::mt19937_64 rng(2);
  const auto corpus = random_corpus(rng, 50, 4);
  const BpeModel model = bpe_train(corpus, 30, 4);
  ASSERT_EQ(model.merges.size(), 30u);
  for (std::size_t i = 0; i < model.merges.size(); ++i) {
    EXPECT_EQ(model.merges[i].merged, 4 + i);
    EXPECT_LT(model.merges[i].left, model.merges[i].merged);
    EXPECT_LT(model.merges[i].right, model.merges[i].merged);
  }
  EXPECT_EQ(model.vocab_size(), 34u);
}

TEST(BpeTrain, Errors) {
  EXPECT_EQ(error_of([] { bpe_train({}, 3); }), ErrorCode::EmptyCorpus);
  const std::vector<TokenSequence> mixed{seq({1, 2}, 1), seq({1, 2}, 2)};
  EXPECT_EQ(error_of([&] { bpe_train(mixed, 3); }), ErrorCode::MixedVocabularies);
  const std::vector<TokenSequence> wide{seq({1, 9})};
  EXPECT_EQ(error_of([&] { bpe_train(wide, 3, 5); }), ErrorCode::UnknownToken);
}

TEST(BpeApply, DecodeInvertsApply) {
  std::mt19937_64 rng(3);
  const auto corpus = random_corpus(rng, 100, 5);
  const BpeModel model = bpe_train(corpus, 40, 5);
  const auto probe = random_corpus(rng, 300, 5);
  for (const auto& s : probe) {
    const TokenSequence merged = bpe_apply(model, s);
    EXPECT_LE(merged.ids.size(), s.ids.size());
    EXPECT_EQ(bpe_decode(model, merged), s);
  }
}

TEST(BpeApply, ShortensWhenAPairOccurs) {
  const std::vector<TokenSequence> corpus{seq({0, 1, 0, 1, 2, 3, 2, 3})};
  const BpeModel model = bpe_train(corpus, 2, 4);
  EXPECT_LT(bpe_apply(model, seq({3, 2, 3})).ids.size(), 3u);
  EXPECT_EQ(bpe_apply(model, seq({3, 3, 1, 1})).ids.size(), 4u);
}

TEST(BpeApply, Errors) {
  const std::vector<TokenSequence> corpus{seq({0, 1, 0, 1})};
  const BpeModel model = bpe_train(corpus, 1, 2);
  EXPECT_EQ(error_of([&] { bpe_apply(model, seq({0, 1}, 99)); }), ErrorCode::ConfigHashMismatch);
  EXPECT_EQ(error_of([&] { bpe_apply(model, seq({0, 2})); }), ErrorCode::UnknownToken);
  EXPECT_EQ(error_of([&] { bpe_decode(model, seq({3})); }), ErrorCode::UnknownToken);
  EXPECT_EQ(error_of([&] { bpe_decode(model, seq({2}, 99)); }), ErrorCode::ConfigHashMismatch);
}

TEST(BpeModelFile, RoundTrip) {
  std::mt19937_64 rng(4);
  const BpeModel model = bpe_train(random_corpus(rng, 40, 6), 12, 6);
  const std::string text = write_bpe_model(model);
  EXPECT_EQ(text.rfind("#bpe v1 base=0000000000000007 merges=12\n", 0), 0u);
  const BpeModel back = read_bpe_model(text);
  EXPECT_EQ(back, model);
  EXPECT_EQ(write_bpe_model(back), text);
}

TEST(BpeModelFile, Rejections) {
  EXPECT_THROW(read_bpe_model("hello"), Error);
  EXPECT_THROW(read_bpe_model("#bpe v1 base=07 merges=2\n0 0 2\n"), Error);
  EXPECT_THROW(read_bpe_model("#bpe v1 base=07 merges=2\n0 0 2\n2 0 4\n"), Error);
}

}  // namespace
}  // namespace prev
