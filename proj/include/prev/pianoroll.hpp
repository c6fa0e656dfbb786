#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace prev {

inline constexpr int kPianoKeys = 88;
inline constexpr int kLowestPitch = 21;   // A0, row 0
inline constexpr int kHighestPitch = 108; // C8, row 87
inline constexpr int kDefaultStepsPerBeat = 16;

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;

  friend bool operator==(const TimeSignature&, const TimeSignature&) = default;
  friend auto operator<=>(const TimeSignature&, const TimeSignature&) = default;
};

struct TimeSignatureEvent {
  int start_measure = 0;
  TimeSignature signature;

  friend bool operator==(const TimeSignatureEvent&, const TimeSignatureEvent&) = default;
};

bool is_supported_denominator(int denominator);

/// Bar length in grid steps, or 0 when the signature does not land on the grid.
int bar_steps(TimeSignature sig, int steps_per_beat);

/// One measure of a roll's bar layout, in steps.
struct Measure {
  int start = 0;
  int length = 0;
  TimeSignature signature;

  int end() const { return start + length; }
};

/// Lays out measures from step 0 until `total_steps` is covered. The last
/// measure may extend past `total_steps`.
std::vector<Measure> measure_layout(std::span<const TimeSignatureEvent> timesigs,
                                    int steps_per_beat, int total_steps);

/// Binary pitch x time matrix. Row 0 is MIDI pitch 21. Cells are stored
/// column-major so that a run of consecutive steps is contiguous.
class Pianoroll {
 public:
  Pianoroll() = default;
  Pianoroll(int steps, int steps_per_beat, std::vector<TimeSignatureEvent> timesigs,
            int pitches = kPianoKeys);

  int pitches() const { return pitches_; }
  int steps() const { return steps_; }
  int steps_per_beat() const { return steps_per_beat_; }
  const std::vector<TimeSignatureEvent>& timesigs() const { return timesigs_; }

  bool at(int row, int step) const {
    return cells_[static_cast<std::size_t>(step) * pitches_ + row] != 0;
  }
  void set(int row, int step, bool on = true) {
    cells_[static_cast<std::size_t>(step) * pitches_ + row] = on ? 1 : 0;
  }

  std::span<const std::uint8_t> column(int step) const {
    return {cells_.data() + static_cast<std::size_t>(step) * pitches_,
            static_cast<std::size_t>(pitches_)};
  }
  std::span<const std::uint8_t> cells() const { return cells_; }
  std::span<std::uint8_t> mutable_cells() { return cells_; }

  std::size_t active_cells() const;
  std::vector<Measure> measures() const {
    return measure_layout(timesigs_, steps_per_beat_, steps_);
  }

  friend bool operator==(const Pianoroll&, const Pianoroll&) = default;

 private:
  int pitches_ = kPianoKeys;
  int steps_ = 0;
  int steps_per_beat_ = kDefaultStepsPerBeat;
  std::vector<TimeSignatureEvent> timesigs_;
  std::vector<std::uint8_t> cells_;
};

/// Throws InvariantViolation when `roll` breaks a structural invariant:
/// positive dimensions, 0/1 cells, a non-empty strictly increasing signature
/// list starting at measure 0 whose entries all begin before the final step
/// and differ from their predecessor, and grid-aligned bar lengths.
void validate(const Pianoroll& roll);

/// Fixed-width slice of a roll. `index` is 1-based.
struct Frame {
  int index = 1;
  int pitches = kPianoKeys;
  int width = 0;
  std::vector<std::uint8_t> cells;  // column-major, width * pitches

  bool at(int row, int col) const {
    return cells[static_cast<std::size_t>(col) * pitches + row] != 0;
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Splits into ceil(T/L) frames of width L; the final frame is zero-padded.
std::vector<Frame> split_frames(const Pianoroll& roll, int frame_len);

/// Inverse of split_frames: concatenates and trims to `steps`.
Pianoroll join_frames(std::span<const Frame> frames, int steps, int steps_per_beat,
                      std::vector<TimeSignatureEvent> timesigs);

}  // namespace prev
