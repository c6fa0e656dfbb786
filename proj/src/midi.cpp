#include "prev/midi.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <utility>

#include "prev/error.hpp"

namespace prev {
namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::MalformedMidi, msg); }

class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8() {
    if (done()) malformed("unexpected end of data");
    return bytes_[pos_++];
  }
  std::uint8_t peek() const {
    if (done()) malformed("unexpected end of data");
    return bytes_[pos_];
  }
  std::uint16_t u16be() {
    const std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32be() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t varlen() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    malformed("variable-length quantity longer than 4 bytes");
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > remaining()) malformed("chunk extends past end of data");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) { take(n); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void parse_track(std::span<const std::uint8_t> data, SmfScore& score) {
  ByteCursor cur(data);
  std::uint64_t tick = 0;
  std::uint8_t running = 0;
  // (channel, pitch) -> open onsets, closed first-in first-out
  std::map<std::pair<int, int>, std::deque<std::uint64_t>> open;

  auto note_off = [&](int ch, int pitch) {
    auto it = open.find({ch, pitch});
    if (it == open.end() || it->second.empty()) return;
    score.notes.push_back({ch, pitch, it->second.front(), tick});
    it->second.pop_front();
  };

  while (!cur.done()) {
    tick += cur.varlen();
    std::uint8_t status = cur.peek();
    if (status & 0x80) {
      cur.u8();
    } else {
      if (running == 0) malformed("running status without a preceding channel message");
      status = running;
    }

    if (status == 0xFF) {
      const std::uint8_t type = cur.u8();
      const auto body = cur.take(cur.varlen());
      if (type == 0x58) {
        if (body.size() < 2) malformed("short time signature meta event");
        MidiTimeSig ts;
        ts.tick = tick;
        ts.numerator = body[0];
        ts.denominator = body[1] <= 30 ? (1 << body[1]) : -1;
        score.timesigs.push_back(ts);
      } else if (type == 0x2F) {
        break;
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      cur.skip(cur.varlen());
      continue;
    }
    if (status >= 0xF0) malformed("unexpected system message in track data");

    running = status;
    const int kind = status & 0xF0;
    const int ch = status & 0x0F;
    switch (kind) {
      case 0x80: {
        const int pitch = cur.u8() & 0x7F;
        cur.u8();
        note_off(ch, pitch);
        break;
      }
      case 0x90: {
        const int pitch = cur.u8() & 0x7F;
        const int velocity = cur.u8() & 0x7F;
        if (velocity == 0) {
          note_off(ch, pitch);
        } else {
          open[{ch, pitch}].push_back(tick);
        }
        break;
      }
      case 0xA0:
      case 0xB0:
      case 0xE0:
        cur.skip(2);
        break;
      case 0xC0:
      case 0xD0:
        cur.skip(1);
        break;
      default:
        malformed("bad status byte");
    }
  }
  // Notes still sounding at the end of the track end there.
  for (auto& [key, onsets] : open) {
    for (std::uint64_t onset : onsets) score.notes.push_back({key.first, key.second, onset, tick});
  }
}

// Converts tick-positioned signature changes to measure indices. A change
// that falls inside a measure takes effect at the next bar line.
std::vector<TimeSignatureEvent> signatures_by_measure(const SmfScore& score, int steps_per_beat) {
  std::vector<TimeSignatureEvent> out{{0, TimeSignature{4, 4}}};
  const std::uint64_t ppq = static_cast<std::uint64_t>(score.ticks_per_quarter);
  TimeSignature current{4, 4};
  std::uint64_t seg_start16 = 0;  // ticks * 16, exact for denominators <= 16
  int seg_measure = 0;
  for (const MidiTimeSig& raw : score.timesigs) {
    const TimeSignature sig{raw.numerator, raw.denominator};
    if (raw.numerator <= 0 || !is_supported_denominator(raw.denominator) ||
        bar_steps(sig, steps_per_beat) <= 0) {
      throw Error(ErrorCode::UnsupportedTimeSig,
                  "time signature " + std::to_string(raw.numerator) + "/" +
                      std::to_string(raw.denominator) + " at tick " + std::to_string(raw.tick));
    }
    const std::uint64_t bar16 =
        static_cast<std::uint64_t>(current.numerator) * ppq * (64 / current.denominator);
    const std::uint64_t tick16 = raw.tick * 16;
    std::uint64_t elapsed = 0;
    if (tick16 > seg_start16) elapsed = (tick16 - seg_start16 + bar16 - 1) / bar16;
    seg_start16 += elapsed * bar16;
    seg_measure += static_cast<int>(elapsed);
    current = sig;
    if (out.back().start_measure == seg_measure) {
      out.back().signature = sig;
    } else {
      out.push_back({seg_measure, sig});
    }
  }
  // Drop no-op changes.
  std::vector<TimeSignatureEvent> normalized;
  for (const auto& e : out) {
    if (!normalized.empty() && normalized.back().signature == e.signature) continue;
    normalized.push_back(e);
  }
  return normalized;
}

}  // namespace

SmfScore parse_smf(std::span<const std::uint8_t> bytes) {
  ByteCursor cur(bytes);
  if (bytes.size() < 14) malformed("file too short for a header chunk");
  const auto magic = cur.take(4);
  if (!std::equal(magic.begin(), magic.end(), "MThd")) malformed("missing MThd header");
  const std::uint32_t header_len = cur.u32be();
  if (header_len < 6) malformed("header chunk shorter than 6 bytes");
  const auto header = cur.take(header_len);
  SmfScore score;
  score.format = (header[0] << 8) | header[1];
  const int ntracks = (header[2] << 8) | header[3];
  const int division = (header[4] << 8) | header[5];
  if (score.format > 1) malformed("unsupported SMF format " + std::to_string(score.format));
  if (division & 0x8000) malformed("SMPTE time division is not supported");
  if (division == 0) malformed("zero ticks per quarter note");
  score.ticks_per_quarter = division;

  int tracks_read = 0;
  while (tracks_read < ntracks) {
    if (cur.remaining() < 8) malformed("expected " + std::to_string(ntracks) + " tracks");
    const auto id = cur.take(4);
    const std::uint32_t len = cur.u32be();
    const auto body = cur.take(len);
    if (!std::equal(id.begin(), id.end(), "MTrk")) continue;  // alien chunk
    parse_track(body, score);
    ++tracks_read;
  }

  std::stable_sort(score.notes.begin(), score.notes.end(),
                   [](const MidiNote& a, const MidiNote& b) {
                     return std::pair(a.onset, a.pitch) < std::pair(b.onset, b.pitch);
                   });
  std::stable_sort(score.timesigs.begin(), score.timesigs.end(),
                   [](const MidiTimeSig& a, const MidiTimeSig& b) { return a.tick < b.tick; });
  return score;
}

MidiImport import_midi(std::span<const std::uint8_t> bytes, int steps_per_beat) {
  if (steps_per_beat <= 0) {
    throw Error(ErrorCode::InvariantViolation, "steps_per_beat must be positive");
  }
  const SmfScore score = parse_smf(bytes);
  if (score.notes.empty()) throw Error(ErrorCode::EmptyScore, "no note events");

  const std::uint64_t ppq = static_cast<std::uint64_t>(score.ticks_per_quarter);
  const std::uint64_t spb = static_cast<std::uint64_t>(steps_per_beat);
  struct Span {
    int row;
    std::uint64_t begin, end;
  };
  std::vector<Span> spans;
  MidiImport result;
  std::uint64_t content_steps = 0;
  for (const MidiNote& n : score.notes) {
    if (n.pitch < kLowestPitch || n.pitch > kHighestPitch) {
      ++result.dropped_notes;
      continue;
    }
    const std::uint64_t begin = n.onset * spb / ppq;
    std::uint64_t end = (n.offset * spb + ppq - 1) / ppq;
    end = std::max(end, begin + 1);
    spans.push_back({n.pitch - kLowestPitch, begin, end});
    content_steps = std::max(content_steps, end);
  }
  if (spans.empty()) throw Error(ErrorCode::EmptyScore, "no notes inside the piano range");
  if (content_steps > 0x7FFFFFFF) throw Error(ErrorCode::MalformedMidi, "score too long");

  auto sigs = signatures_by_measure(score, steps_per_beat);
  const auto layout = measure_layout(sigs, steps_per_beat, static_cast<int>(content_steps));
  const int T = layout.back().end();
  std::erase_if(sigs, [&](const TimeSignatureEvent& e) {
    return e.start_measure >= static_cast<int>(layout.size());
  });

  result.roll = Pianoroll(T, steps_per_beat, std::move(sigs));
  for (const Span& s : spans) {
    for (std::uint64_t t = s.begin; t < s.end; ++t) result.roll.set(s.row, static_cast<int>(t));
  }
  return result;
}

}  // namespace prev
