#include "prev/token_io.hpp"

#include <charconv>
#include <cstring>
#include <sstream>

#include "prev/error.hpp"
#include "prev/hash.hpp"

namespace prev {
namespace {

constexpr std::string_view kTextMagic = "#prev-tokens";
constexpr char kBinaryMagic[4] = {'P', 'R', 'V', 'T'};

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> b, std::size_t pos) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[pos + i]) << (8 * i);
  return v;
}

}  // namespace

std::string write_tokens_text(const TokenSequence& tokens) {
  std::string out;
  out.reserve(tokens.ids.size() * 4 + 80);
  out += kTextMagic;
  out += " v1 config=" + to_hex(tokens.config_hash) + " T=" + std::to_string(tokens.true_steps) +
         " spb=" + std::to_string(tokens.steps_per_beat) + "\n";
  for (TokenId id : tokens.ids) {
    out += std::to_string(id);
    out += '\n';
  }
  return out;
}

TokenSequence read_tokens_text(std::string_view text) {
  auto bad = [](const std::string& msg) -> Error { return Error(ErrorCode::BadMagic, msg); };
  const std::size_t eol = text.find('\n');
  const std::string_view header = text.substr(0, eol);
  std::istringstream fields{std::string(header)};
  std::string magic, version;
  fields >> magic >> version;
  if (magic != kTextMagic || version != "v1") throw bad("not a prev-tokens v1 file");

  TokenSequence seq;
  seq.true_steps = 0;
  bool have_config = false;
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string_view key = std::string_view(field).substr(0, eq);
    const std::string_view value = std::string_view(field).substr(eq + 1);
    bool ok = true;
    if (key == "config") {
      ok = parse_number(value, seq.config_hash, 16);
      have_config = ok;
    } else if (key == "T") {
      ok = parse_number(value, seq.true_steps);
    } else if (key == "spb") {
      ok = parse_number(value, seq.steps_per_beat);
    }
    if (!ok) throw Error(ErrorCode::InvariantViolation, "bad header field " + field);
  }
  if (!have_config) throw Error(ErrorCode::InvariantViolation, "token header lacks config=");

  std::size_t pos = eol == std::string_view::npos ? text.size() : eol + 1;
  std::size_t line_no = 2;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      TokenId id = 0;
      if (!parse_number(line, id)) {
        throw Error(ErrorCode::InvariantViolation, "line " + std::to_string(line_no) +
                                                       " is not a token id");
      }
      seq.ids.push_back(id);
    }
    pos = end + 1;
    ++line_no;
  }
  return seq;
}

std::vector<std::uint8_t> write_tokens_binary(const TokenSequence& tokens) {
  std::vector<std::uint8_t> out(std::begin(kBinaryMagic), std::end(kBinaryMagic));
  out.reserve(22 + tokens.ids.size() * 4);
  put_le<std::uint64_t>(out, tokens.config_hash);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tokens.ids.size()));
  for (TokenId id : tokens.ids) put_le<std::uint32_t>(out, id);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tokens.true_steps));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(tokens.steps_per_beat));
  return out;
}

TokenSequence read_tokens_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kBinaryMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a PRVT stream");
  }
  if (bytes.size() < 16) throw Error(ErrorCode::TruncatedFile, "short PRVT header");
  TokenSequence seq;
  seq.config_hash = get_le<std::uint64_t>(bytes, 4);
  const std::size_t count = get_le<std::uint32_t>(bytes, 12);
  const std::size_t body_end = 16 + count * 4;
  if (bytes.size() < body_end) throw Error(ErrorCode::TruncatedFile, "PRVT ids truncated");
  seq.ids.resize(count);
  for (std::size_t i = 0; i < count; ++i) seq.ids[i] = get_le<std::uint32_t>(bytes, 16 + 4 * i);
  seq.true_steps = 0;
  if (bytes.size() == body_end + 6) {
    seq.true_steps = static_cast<int>(get_le<std::uint32_t>(bytes, body_end));
    seq.steps_per_beat = get_le<std::uint16_t>(bytes, body_end + 4);
  } else if (bytes.size() != body_end) {
    throw Error(ErrorCode::InvariantViolation, "PRVT stream has an unrecognised trailer");
  }
  return seq;
}

TokenSequence read_tokens(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kBinaryMagic, 4) == 0) {
    return read_tokens_binary(bytes);
  }
  return read_tokens_text(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace prev
