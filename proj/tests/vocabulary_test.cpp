#include <gtest/gtest.h>

#include <json.hpp>

#include "prev/codec.hpp"
#include "prev/error.hpp"

namespace prev {
namespace {

EncodingConfig with_mode(Mode mode) {
  EncodingConfig c;
  c.mode = mode;
  return c;
}

TEST(Vocabulary, DefaultFullSize) {
  const Vocabulary v{EncodingConfig{}};
  EXPECT_EQ(v.reported_size(), 45u + 42u + 255u + 1u + 4u);
  EXPECT_EQ(v.reported_size(), 347u);
  EXPECT_EQ(v.size(), 350u);
}

TEST(Vocabulary, AblationSizes) {
  EXPECT_EQ(Vocabulary(with_mode(Mode::P)).reported_size(), 261u);
  EXPECT_EQ(Vocabulary(with_mode(Mode::PF_PLUS)).reported_size(), 45u + 256u + 5u);
  EXPECT_EQ(Vocabulary(with_mode(Mode::PF)).reported_size(), 306u);
}

TEST(Vocabulary, NoStructureNoSignatures) {
  EncodingConfig c;
  c.timesig_set.clear();
  c.emit_structure = false;
  EXPECT_EQ(Vocabulary(c).reported_size(), 342u);
}

TEST(Vocabulary, IdOrder) {
  const Vocabulary v{EncodingConfig{}};
  EXPECT_EQ(v.id(FrameEvt{0}), 3u);
  EXPECT_EQ(v.id(FrameEvt{44}), 47u);
  EXPECT_EQ(v.id(GapEvt{1}), 48u);
  EXPECT_EQ(v.id(GapEvt{42}), 89u);
  EXPECT_EQ(v.id(PatternEvt{1}), 90u);
  EXPECT_EQ(v.id(PatternEvt{255}), 344u);
  EXPECT_EQ(v.id(BarEvt{}), 345u);
  EXPECT_EQ(v.id(TimeSigEvt{{4, 4}}), 346u);
  EXPECT_EQ(v.id(TimeSigEvt{{6, 8}}), 349u);
}

TEST(Vocabulary, Bijective) {
  for (Mode mode : {Mode::P, Mode::PF_PLUS, Mode::PF, Mode::FULL}) {
    const Vocabulary v{with_mode(mode)};
    for (TokenId id = kSpecialCount; id < v.size(); ++id) {
      ASSERT_EQ(v.id(v.event(id)), id);
    }
  }
}

TEST(Vocabulary, UnknownEvents) {
  const Vocabulary full{EncodingConfig{}};
  EXPECT_THROW(full.id(PatternEvt{0}), Error);
  EXPECT_THROW(full.id(GapEvt{43}), Error);
  EXPECT_THROW(full.id(GapEvt{0}), Error);
  EXPECT_THROW(full.id(FrameEvt{45}), Error);
  EXPECT_THROW(full.id(TimeSigEvt{{5, 4}}), Error);
  EXPECT_THROW(full.event(kBos), Error);
  EXPECT_THROW(full.event(350), Error);
  const Vocabulary p{with_mode(Mode::P)};
  EXPECT_THROW(p.id(FrameEvt{0}), Error);
  EXPECT_NO_THROW(p.id(PatternEvt{0}));
  EncodingConfig bare;
  bare.emit_structure = false;
  EXPECT_THROW(Vocabulary(bare).id(BarEvt{}), Error);
}

TEST(Vocabulary, JsonExport) {
  const Vocabulary v{EncodingConfig{}};
  const auto j = nlohmann::json::parse(v.to_json());
  EXPECT_EQ(j.size(), 350u);
  EXPECT_EQ(j["PAD"], 0);
  EXPECT_EQ(j["Frame_5"], 8);
  EXPECT_EQ(j["Gap_42"], 89);
  EXPECT_EQ(j["Pat_255"], 344);
  EXPECT_EQ(j["Bar"], 345);
  EXPECT_EQ(j["TS_4/4"], 346);
  EXPECT_EQ(v.to_json(), Vocabulary(EncodingConfig{}).to_json());
}

TEST(Config, HashDependsOnEveryField) {
  const EncodingConfig base;
  EXPECT_EQ(config_hash(base), config_hash(EncodingConfig{}));
  std::vector<EncodingConfig> variants(6, base);
  variants[0].frame_len = 8;
  variants[1].block_height = 1;
  variants[2].mode = Mode::PF;
  variants[3].timesig_set = {{4, 4}};
  variants[4].emit_structure = false;
  variants[5].pitches = 87;
  for (const auto& v : variants) EXPECT_NE(config_hash(v), config_hash(base));
}

TEST(Config, Invariants) {
  auto invalid = [](EncodingConfig c) {
    try {
      validate(c);
      return false;
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigInvariantViolation;
    }
  };
  EncodingConfig c;
  c.block_height = 44;  // K = 2
  EXPECT_TRUE(invalid(c));
  c = {};
  c.frame_len = 9;  // 18 bits
  EXPECT_TRUE(invalid(c));
  c = {};
  c.frame_len = 0;
  EXPECT_TRUE(invalid(c));
  c = {};
  c.timesig_set = {{4, 4}, {4, 4}};
  EXPECT_TRUE(invalid(c));
  c = {};
  c.timesig_set = {{4, 5}};
  EXPECT_TRUE(invalid(c));
  c = {};
  c.block_height = 4;
  c.frame_len = 4;
  EXPECT_FALSE(invalid(c));
}

TEST(Mode, Parsing) {
  EXPECT_EQ(parse_mode("full"), Mode::FULL);
  EXPECT_EQ(parse_mode("PF+"), Mode::PF_PLUS);
  EXPECT_EQ(parse_mode("pf_plus"), Mode::PF_PLUS);
  EXPECT_EQ(parse_mode("pf"), Mode::PF);
  EXPECT_EQ(parse_mode("P"), Mode::P);
  EXPECT_FALSE(parse_mode("pff"));
}

}  // namespace
}  // namespace prev
