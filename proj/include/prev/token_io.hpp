#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prev/codec.hpp"

namespace prev {

// Text form:
//   #prev-tokens v1 config=<16 hex digits> T=<steps> spb=<steps per beat>
//   <one decimal id per line>
// T= and spb= are optional on read; when absent the sequence carries T = 0
// and cannot be decoded back to a roll.
std::string write_tokens_text(const TokenSequence& tokens);
TokenSequence read_tokens_text(std::string_view text);

// Binary form: "PRVT" | u64 config hash | u32 count | count x u32 id,
// followed by an optional trailer u32 T | u16 spb. All little-endian.
std::vector<std::uint8_t> write_tokens_binary(const TokenSequence& tokens);
TokenSequence read_tokens_binary(std::span<const std::uint8_t> bytes);

/// Sniffs the magic and dispatches to the text or binary reader.
TokenSequence read_tokens(std::span<const std::uint8_t> bytes);

}  // namespace prev
