#include "prev/pianoroll.hpp"

#include <algorithm>
#include <string>

#include "prev/error.hpp"

namespace prev {

bool is_supported_denominator(int denominator) {
  return denominator == 1 || denominator == 2 || denominator == 4 || denominator == 8 ||
         denominator == 16;
}

int bar_steps(TimeSignature sig, int steps_per_beat) {
  if (sig.numerator <= 0 || steps_per_beat <= 0 || !is_supported_denominator(sig.denominator)) {
    return 0;
  }
  const long long scaled = 4LL * sig.numerator * steps_per_beat;
  if (scaled % sig.denominator != 0) return 0;
  return static_cast<int>(scaled / sig.denominator);
}

std::vector<Measure> measure_layout(std::span<const TimeSignatureEvent> timesigs,
                                    int steps_per_beat, int total_steps) {
  std::vector<Measure> out;
  if (timesigs.empty() || total_steps <= 0) return out;
  std::size_t next_sig = 0;
  TimeSignature current = timesigs.front().signature;
  int start = 0;
  for (int measure = 0; start < total_steps; ++measure) {
    while (next_sig < timesigs.size() && timesigs[next_sig].start_measure <= measure) {
      current = timesigs[next_sig].signature;
      ++next_sig;
    }
    const int len = bar_steps(current, steps_per_beat);
    if (len <= 0) {
      throw Error(ErrorCode::InvariantViolation,
                  "bar length of " + std::to_string(current.numerator) + "/" +
                      std::to_string(current.denominator) + " is not a whole number of steps");
    }
    out.push_back({start, len, current});
    start += len;
  }
  return out;
}

Pianoroll::Pianoroll(int steps, int steps_per_beat, std::vector<TimeSignatureEvent> timesigs,
                     int pitches)
    : pitches_(pitches),
      steps_(steps),
      steps_per_beat_(steps_per_beat),
      timesigs_(std::move(timesigs)) {
  if (pitches <= 0 || steps <= 0) {
    throw Error(ErrorCode::InvariantViolation, "pianoroll dimensions must be positive");
  }
  cells_.assign(static_cast<std::size_t>(pitches) * steps, 0);
}

std::size_t Pianoroll::active_cells() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

void validate(const Pianoroll& roll) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvariantViolation, msg); };
  if (roll.pitches() <= 0 || roll.steps() <= 0) fail("dimensions must be positive");
  if (roll.steps_per_beat() <= 0) fail("steps_per_beat must be positive");
  if (roll.cells().size() != static_cast<std::size_t>(roll.pitches()) * roll.steps()) {
    fail("cell buffer does not match H x T");
  }
  std::uint8_t bits = 0;
  for (std::uint8_t c : roll.cells()) bits |= c;
  if (bits > 1) fail("cells must be 0 or 1");
  const auto& sigs = roll.timesigs();
  if (sigs.empty()) fail("at least one time signature is required");
  if (sigs.front().start_measure != 0) fail("first time signature must start at measure 0");
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    const auto& s = sigs[i].signature;
    if (s.numerator <= 0 || s.numerator > 255 || !is_supported_denominator(s.denominator)) {
      fail("unsupported time signature " + std::to_string(s.numerator) + "/" +
           std::to_string(s.denominator));
    }
    if (bar_steps(s, roll.steps_per_beat()) <= 0) fail("bar length is not on the step grid");
    if (i > 0) {
      if (sigs[i].start_measure <= sigs[i - 1].start_measure) {
        fail("time signature measures must be strictly increasing");
      }
      if (sigs[i].signature == sigs[i - 1].signature) {
        fail("consecutive time signatures must differ");
      }
    }
  }
  const auto layout = roll.measures();
  const int last = sigs.back().start_measure;
  if (last >= static_cast<int>(layout.size())) {
    fail("time signature at measure " + std::to_string(last) + " starts past the last step");
  }
}

std::vector<Frame> split_frames(const Pianoroll& roll, int frame_len) {
  if (frame_len < 1) throw Error(ErrorCode::DimensionMismatch, "frame length must be >= 1");
  const int T = roll.steps();
  const int H = roll.pitches();
  const int n = (T + frame_len - 1) / frame_len;
  std::vector<Frame> frames;
  frames.reserve(n);
  const auto cells = roll.cells();
  for (int i = 0; i < n; ++i) {
    Frame f;
    f.index = i + 1;
    f.pitches = H;
    f.width = frame_len;
    f.cells.assign(static_cast<std::size_t>(frame_len) * H, 0);
    const int begin = i * frame_len;
    const int end = std::min(begin + frame_len, T);
    std::copy(cells.begin() + static_cast<std::ptrdiff_t>(begin) * H,
              cells.begin() + static_cast<std::ptrdiff_t>(end) * H, f.cells.begin());
    frames.push_back(std::move(f));
  }
  return frames;
}

Pianoroll join_frames(std::span<const Frame> frames, int steps, int steps_per_beat,
                      std::vector<TimeSignatureEvent> timesigs) {
  if (frames.empty()) throw Error(ErrorCode::DimensionMismatch, "no frames to join");
  const int H = frames.front().pitches;
  Pianoroll roll(steps, steps_per_beat, std::move(timesigs), H);
  auto out = roll.mutable_cells();
  std::size_t written = 0;
  for (const Frame& f : frames) {
    if (f.pitches != H) throw Error(ErrorCode::DimensionMismatch, "frame pitch count differs");
    const std::size_t take = std::min(f.cells.size(), out.size() - written);
    std::copy_n(f.cells.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(written));
    written += take;
    if (written == out.size()) break;
  }
  if (written != out.size()) {
    throw Error(ErrorCode::DimensionMismatch, "frames do not cover the requested steps");
  }
  return roll;
}

}  // namespace prev
