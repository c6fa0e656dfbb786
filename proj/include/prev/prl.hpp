#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "prev/pianoroll.hpp"

namespace prev {

// PRL layout, little-endian:
//   "PRL1" | u16 H | u32 T | u16 steps_per_beat | u16 n_timesigs
//   | n_timesigs x (u32 start_measure, u8 numerator, u8 denominator)
//   | T columns x ceil(H/8) bytes, bit k of byte j = row 8j+k
inline constexpr std::size_t kPrlFixedHeader = 14;
inline constexpr std::size_t kPrlTimeSigRecord = 6;

std::vector<std::uint8_t> write_prl(const Pianoroll& roll);

/// Throws BadMagic, TruncatedFile, InvariantViolation.
Pianoroll read_prl(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline Pianoroll load_prl(const std::filesystem::path& path) { return read_prl(read_file(path)); }
inline void save_prl(const std::filesystem::path& path, const Pianoroll& roll) {
  write_file(path, write_prl(roll));
}

}  // namespace prev
