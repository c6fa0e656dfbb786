#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "prev/error.hpp"
#include "prev/prl.hpp"

namespace prev {
namespace {

constexpr char kMagic[4] = {'P', 'R', 'L', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t pos) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[pos + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> write_prl(const Pianoroll& roll) {
  validate(roll);
  const int H = roll.pitches();
  const int T = roll.steps();
  if (H > 0xFFFF || roll.steps_per_beat() > 0xFFFF || roll.timesigs().size() > 0xFFFF) {
    throw Error(ErrorCode::InvariantViolation, "roll does not fit the PRL header fields");
  }
  const std::size_t col_bytes = (static_cast<std::size_t>(H) + 7) / 8;
  std::vector<std::uint8_t> out;
  out.reserve(kPrlFixedHeader + kPrlTimeSigRecord * roll.timesigs().size() + col_bytes * T);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(H));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(T));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(roll.steps_per_beat()));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(roll.timesigs().size()));
  for (const auto& ts : roll.timesigs()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ts.start_measure));
    out.push_back(static_cast<std::uint8_t>(ts.signature.numerator));
    out.push_back(static_cast<std::uint8_t>(ts.signature.denominator));
  }
  for (int t = 0; t < T; ++t) {
    const auto col = roll.column(t);
    for (std::size_t j = 0; j < col_bytes; ++j) {
      std::uint8_t byte = 0;
      for (int k = 0; k < 8; ++k) {
        const std::size_t row = j * 8 + k;
        if (row < col.size() && col[row]) byte |= static_cast<std::uint8_t>(1u << k);
      }
      out.push_back(byte);
    }
  }
  return out;
}

Pianoroll read_prl(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a PRL1 stream");
  }
  if (bytes.size() < kPrlFixedHeader) throw Error(ErrorCode::TruncatedFile, "short PRL header");
  const int H = get_le<std::uint16_t>(bytes, 4);
  const std::uint32_t T = get_le<std::uint32_t>(bytes, 6);
  const int spb = get_le<std::uint16_t>(bytes, 10);
  const std::size_t n_ts = get_le<std::uint16_t>(bytes, 12);
  if (H == 0 || T == 0 || T > 0x7FFFFFFF) {
    throw Error(ErrorCode::InvariantViolation, "PRL header has an empty or oversized dimension");
  }
  const std::size_t header = kPrlFixedHeader + kPrlTimeSigRecord * n_ts;
  const std::size_t col_bytes = (static_cast<std::size_t>(H) + 7) / 8;
  const std::size_t expected = header + col_bytes * T;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedFile, "PRL payload needs " + std::to_string(expected) +
                                              " bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::InvariantViolation, "PRL stream has " +
                                                   std::to_string(bytes.size() - expected) +
                                                   " bytes beyond the declared payload");
  }
  std::vector<TimeSignatureEvent> sigs;
  for (std::size_t i = 0; i < n_ts; ++i) {
    const std::size_t p = kPrlFixedHeader + kPrlTimeSigRecord * i;
    const std::uint32_t measure = get_le<std::uint32_t>(bytes, p);
    if (measure > 0x7FFFFFFF) throw Error(ErrorCode::InvariantViolation, "bad measure index");
    sigs.push_back({static_cast<int>(measure), {bytes[p + 4], bytes[p + 5]}});
  }
  Pianoroll roll(static_cast<int>(T), spb, std::move(sigs), H);
  auto cells = roll.mutable_cells();
  for (std::size_t t = 0; t < T; ++t) {
    const std::uint8_t* col = bytes.data() + header + t * col_bytes;
    for (std::size_t j = 0; j < col_bytes; ++j) {
      for (int k = 0; k < 8; ++k) {
        const std::size_t row = j * 8 + k;
        const bool bit = (col[j] >> k) & 1u;
        if (row >= static_cast<std::size_t>(H)) {
          if (bit) throw Error(ErrorCode::InvariantViolation, "padding bit set past row H");
          continue;
        }
        cells[t * H + row] = bit ? 1 : 0;
      }
    }
  }
  validate(roll);
  return roll;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace prev
