#include "prev/prl.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "prev/error.hpp"
#include "test_support.hpp"

namespace prev {
namespace {

ErrorCode read_error(const std::vector<std::uint8_t>& bytes) {
  try {
    read_prl(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "read succeeded";
  return ErrorCode::IoError;
}

TEST(Prl, SingleStepLayout) {
  Pianoroll roll(1, 16, {{0, {4, 4}}});
  roll.set(0, 0, true);
  const auto bytes = write_prl(roll);
  // fixed header, one time-signature record, one column of ceil(88/8) bytes
  ASSERT_EQ(bytes.size(), kPrlFixedHeader + kPrlTimeSigRecord + 11);
  const std::vector<std::uint8_t> header{'P', 'R', 'L', '1', 88, 0, 1, 0, 0, 0, 16, 0, 1, 0,
                                         0,   0,   0,   0,   4,  4};
  EXPECT_TRUE(std::equal(header.begin(), header.end(), bytes.begin()));
  EXPECT_EQ(bytes[20], 0x01);
  for (std::size_t i = 21; i < bytes.size(); ++i) EXPECT_EQ(bytes[i], 0) << i;
}

TEST(Prl, BitOrderWithinColumn) {
  Pianoroll roll(2, 16, {{0, {4, 4}}});
  roll.set(9, 0, true);   // byte 1, bit 1
  roll.set(87, 1, true);  // byte 10, bit 7
  const auto bytes = write_prl(roll);
  const std::size_t payload = kPrlFixedHeader + kPrlTimeSigRecord;
  EXPECT_EQ(bytes[payload + 1], 0x02);
  EXPECT_EQ(bytes[payload + 11 + 10], 0x80);
}

TEST(Prl, RoundTripRandomRolls) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Pianoroll roll = testing::random_roll(rng, {.max_bars = 12});
    const auto bytes = write_prl(roll);
    const Pianoroll back = read_prl(bytes);
    ASSERT_EQ(back, roll);
    ASSERT_EQ(write_prl(back), bytes);
  }
}

TEST(Prl, WrongMagic) {
  auto bytes = write_prl(testing::empty_roll(1));
  bytes[3] = '2';
  EXPECT_EQ(read_error(bytes), ErrorCode::BadMagic);
  EXPECT_EQ(read_error({}), ErrorCode::BadMagic);
}

TEST(Prl, Truncation) {
  const auto bytes = write_prl(testing::empty_roll(1));
  EXPECT_EQ(read_error({bytes.begin(), bytes.begin() + 10}), ErrorCode::TruncatedFile);
  EXPECT_EQ(read_error({bytes.begin(), bytes.end() - 1}), ErrorCode::TruncatedFile);
}

TEST(Prl, HeaderInconsistentWithPayload) {
  auto bytes = write_prl(testing::empty_roll(1));
  bytes.push_back(0);
  EXPECT_EQ(read_error(bytes), ErrorCode::InvariantViolation);
}

TEST(Prl, PaddingBitsMustBeZero) {
  Pianoroll roll(1, 16, {{0, {4, 4}}}, 5);
  auto bytes = write_prl(roll);
  bytes.back() = 0x20;  // row 5 of a 5-row roll
  EXPECT_EQ(read_error(bytes), ErrorCode::InvariantViolation);
}

TEST(Prl, InvalidSignatureInHeader) {
  auto bytes = write_prl(testing::empty_roll(1));
  bytes[kPrlFixedHeader + 5] = 3;  // denominator 3
  EXPECT_EQ(read_error(bytes), ErrorCode::InvariantViolation);
}

TEST(Prl, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "prev_prl_io_test.prl";
  std::mt19937_64 rng(5);
  const Pianoroll roll = testing::random_roll(rng);
  save_prl(path, roll);
  EXPECT_EQ(load_prl(path), roll);
  std::filesystem::remove(path);
  EXPECT_THROW(load_prl(path), Error);
}

}  // namespace
}  // namespace prev
