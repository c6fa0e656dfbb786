#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prev/codec.hpp"
#include "prev/pianoroll.hpp"

namespace prev {

/// A maximal horizontal run of active cells in one row.
struct RollNote {
  int onset = 0;     // step
  int row = 0;       // pitch row, MIDI pitch = row + 21
  int duration = 0;  // steps

  int pitch() const { return row + kLowestPitch; }
  friend bool operator==(const RollNote&, const RollNote&) = default;
};

/// Notes sorted by (onset, row).
std::vector<RollNote> extract_notes(const Pianoroll& roll);

// ---------------------------------------------------------------- REMI-lite

struct RemiParams {
  int position_bins = 64;
  int max_duration = 64;
  std::vector<TimeSignature> timesig_set = default_timesig_set();
};

/// Id layout: Bar | Position(0..bins-1) | Pitch(21..108) | Duration(1..max)
/// | TimeSig(set). No special tokens.
class RemiLayout {
 public:
  explicit RemiLayout(const RemiParams& params);

  TokenId bar() const { return 0; }
  TokenId position(int p) const { return 1 + static_cast<TokenId>(p); }
  TokenId pitch(int midi_pitch) const {
    return pitch_base_ + static_cast<TokenId>(midi_pitch - kLowestPitch);
  }
  TokenId duration(int d) const { return duration_base_ + static_cast<TokenId>(d - 1); }
  TokenId timesig(TimeSignature sig) const;  // throws UnsupportedTimeSig

  std::size_t size() const { return size_; }
  std::uint64_t hash() const { return hash_; }
  const RemiParams& params() const { return params_; }

  TokenId pitch_base() const { return pitch_base_; }
  TokenId duration_base() const { return duration_base_; }
  TokenId timesig_base() const { return ts_base_; }

 private:
  RemiParams params_;
  TokenId pitch_base_, duration_base_, ts_base_;
  std::size_t size_;
  std::uint64_t hash_;
};

/// TimeSig(initial), then per measure: Bar, TimeSig(new) on a change, and
/// per onset group Position then Pitch/Duration pairs in ascending pitch.
/// Notes longer than max_duration are emitted as consecutive chunks, which
/// re-merge into the same run of cells.
///
/// Throws UnsupportedTimeSig, BarAlignmentError (bar longer than the
/// position bins).
TokenSequence remi_tokenize(const Pianoroll& roll, const RemiParams& params = {});

// ----------------------------------------------------------- MIDI-Like-lite

struct MidiLikeParams {
  int max_shift = 64;
};

/// Id layout: NoteOn(21..108) | NoteOff(21..108) | TimeShift(1..max_shift).
class MidiLikeLayout {
 public:
  explicit MidiLikeLayout(const MidiLikeParams& params);

  TokenId note_on(int midi_pitch) const { return static_cast<TokenId>(midi_pitch - kLowestPitch); }
  TokenId note_off(int midi_pitch) const {
    return kPianoKeys + static_cast<TokenId>(midi_pitch - kLowestPitch);
  }
  TokenId time_shift(int d) const { return 2 * kPianoKeys + static_cast<TokenId>(d - 1); }

  std::size_t size() const { return 2 * kPianoKeys + static_cast<std::size_t>(params_.max_shift); }
  std::uint64_t hash() const { return hash_; }
  const MidiLikeParams& params() const { return params_; }

 private:
  MidiLikeParams params_;
  std::uint64_t hash_;
};

/// NoteOn/NoteOff/TimeShift stream; at equal times note-offs come first,
/// each group in ascending pitch. Silences longer than max_shift split into
/// several shifts; no shift follows the last event.
TokenSequence midilike_tokenize(const Pianoroll& roll, const MidiLikeParams& params = {});

// ---------------------------------------------------------------- ABC-lite

inline constexpr std::size_t kAbcVocabSize = 128;

/// Minimal ABC text; its length in characters is the sequence length.
std::string abc_serialize(const Pianoroll& roll);

/// ABC spelling of a MIDI pitch ("C" = 60, "c" = 72, "^F,", "c'" ...).
/// Throws PitchOutOfAbcRange outside 21..108.
std::string abc_pitch(int midi_pitch);

// --------------------------------------------------------------------- BPE

struct BpeMerge {
  TokenId left = 0;
  TokenId right = 0;
  TokenId merged = 0;

  friend bool operator==(const BpeMerge&, const BpeMerge&) = default;
};

struct BpeModel {
  std::uint64_t base_hash = 0;
  std::size_t base_size = 0;  // 0 when unknown (identity model loaded from file)
  std::vector<BpeMerge> merges;

  std::size_t vocab_size() const { return base_size + merges.size(); }
  friend bool operator==(const BpeModel&, const BpeModel&) = default;
};

/// Greedy BPE: repeatedly merges the most frequent adjacent pair (counted at
/// every position, so overlaps count), ties going to the smaller (left, right)
/// pair, until `merges` merges are made or no pair occurs twice. New ids
/// extend `base_size` contiguously; base_size 0 means max id + 1.
///
/// Throws EmptyCorpus, MixedVocabularies.
BpeModel bpe_train(std::span<const TokenSequence> corpus, std::size_t merges,
                   std::size_t base_size = 0);

/// Applies merges in training order, one left-to-right pass each.
/// Throws UnknownToken, ConfigHashMismatch.
TokenSequence bpe_apply(const BpeModel& model, const TokenSequence& tokens);
TokenSequence bpe_decode(const BpeModel& model, const TokenSequence& tokens);

// "#bpe v1 base=<hex hash> merges=<n>" then one "left right new" per line.
std::string write_bpe_model(const BpeModel& model);
BpeModel read_bpe_model(std::string_view text);

}  // namespace prev
