#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "prev/pianoroll.hpp"

namespace prev {

/// A note as read from a Standard MIDI File, in ticks.
struct MidiNote {
  int channel = 0;
  int pitch = 0;
  std::uint64_t onset = 0;
  std::uint64_t offset = 0;
};

/// Raw time-signature meta event. `denominator` is 2^dd from the file, or
/// -1 when the exponent is too large to represent.
struct MidiTimeSig {
  std::uint64_t tick = 0;
  int numerator = 0;
  int denominator = 0;
};

struct SmfScore {
  int format = 0;
  int ticks_per_quarter = 0;
  std::vector<MidiNote> notes;         // all tracks, sorted by (onset, pitch)
  std::vector<MidiTimeSig> timesigs;   // all tracks, sorted by tick (stable)
};

/// Parses SMF type 0/1. Throws MalformedMidi.
SmfScore parse_smf(std::span<const std::uint8_t> bytes);

struct MidiImport {
  Pianoroll roll;
  std::size_t dropped_notes = 0;  // pitches outside the 88-key range
};

/// Quantizes onto a grid of `steps_per_beat` steps per quarter note: onset
/// steps round down, offset steps round up, and every note keeps at least one
/// step. T is rounded up to a whole measure.
///
/// Throws MalformedMidi, EmptyScore, UnsupportedTimeSig.
MidiImport import_midi(std::span<const std::uint8_t> bytes,
                       int steps_per_beat = kDefaultStepsPerBeat);

inline Pianoroll midi_to_pianoroll(std::span<const std::uint8_t> bytes,
                                   int steps_per_beat = kDefaultStepsPerBeat) {
  return import_midi(bytes, steps_per_beat).roll;
}

}  // namespace prev
