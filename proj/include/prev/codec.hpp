#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prev/pianoroll.hpp"

namespace prev {

/// Ablation ladder. Each mode adds one compression rule to the previous one:
/// P emits every block as a pattern, PF_PLUS folds leading empty blocks into a
/// frame token, PF also drops trailing empty blocks, FULL also replaces
/// internal empty runs with gap tokens.
enum class Mode { P, PF_PLUS, PF, FULL };

std::string_view to_string(Mode mode);
/// Accepts "p", "pf+", "pf", "full" (case-insensitive) and the enum names.
std::optional<Mode> parse_mode(std::string_view text);

inline const std::vector<TimeSignature>& default_timesig_set() {
  static const std::vector<TimeSignature> kSet{{4, 4}, {3, 4}, {2, 4}, {6, 8}};
  return kSet;
}

struct EncodingConfig {
  int pitches = kPianoKeys;  // H
  int frame_len = 4;         // L
  int block_height = 2;      // h
  Mode mode = Mode::FULL;
  std::vector<TimeSignature> timesig_set = default_timesig_set();
  bool emit_structure = true;

  int blocks() const { return (pitches + block_height - 1) / block_height; }  // K
  int pattern_bits() const { return block_height * frame_len; }

  friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

/// Throws ConfigInvariantViolation.
void validate(const EncodingConfig& config);

/// FNV-1a 64 over a canonical text rendering of the config.
std::uint64_t config_hash(const EncodingConfig& config);

struct FrameEvt {
  int start;  // first non-empty block; K for an empty frame
  friend bool operator==(const FrameEvt&, const FrameEvt&) = default;
};
struct PatternEvt {
  std::uint32_t mask;
  friend bool operator==(const PatternEvt&, const PatternEvt&) = default;
};
struct GapEvt {
  int run;
  friend bool operator==(const GapEvt&, const GapEvt&) = default;
};
struct BarEvt {
  friend bool operator==(const BarEvt&, const BarEvt&) = default;
};
struct TimeSigEvt {
  TimeSignature signature;
  friend bool operator==(const TimeSigEvt&, const TimeSigEvt&) = default;
};

using Event = std::variant<FrameEvt, PatternEvt, GapEvt, BarEvt, TimeSigEvt>;

std::string event_name(const Event& event);

using TokenId = std::uint32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kSpecialCount = 3;

/// Deterministic event <-> id table for one config. Ids are contiguous:
/// PAD, BOS, EOS, then frame, gap, pattern, bar and time-signature tokens
/// (whichever the mode uses), in that order.
class Vocabulary {
 public:
  explicit Vocabulary(const EncodingConfig& config);

  const EncodingConfig& config() const { return config_; }
  std::uint64_t hash() const { return hash_; }

  /// Token count including PAD/BOS/EOS.
  std::size_t size() const { return size_; }
  /// Token count excluding PAD/BOS/EOS.
  std::size_t reported_size() const { return size_ - kSpecialCount; }

  bool contains(const Event& event) const;
  /// Throws UnknownToken when the event has no token in this vocabulary.
  TokenId id(const Event& event) const;
  /// Throws UnknownToken for specials and out-of-range ids.
  Event event(TokenId id) const;
  static bool is_special(TokenId id) { return id < kSpecialCount; }

  std::string name(TokenId id) const;
  /// JSON object of token name -> id, in id order.
  std::string to_json() const;

  // Id ranges, exposed for the decoder. A count of 0 means the kind is absent.
  TokenId frame_base() const { return frame_base_; }
  TokenId gap_base() const { return gap_base_; }
  TokenId pattern_base() const { return pattern_base_; }
  std::uint32_t pattern_min() const { return pattern_min_; }
  std::size_t frame_count() const { return frame_count_; }
  std::size_t gap_count() const { return gap_count_; }
  std::size_t pattern_count() const { return pattern_count_; }
  std::optional<TokenId> bar_id() const { return bar_id_; }

 private:
  EncodingConfig config_;
  std::uint64_t hash_ = 0;
  TokenId frame_base_ = 0, gap_base_ = 0, pattern_base_ = 0, ts_base_ = 0;
  std::size_t frame_count_ = 0, gap_count_ = 0, pattern_count_ = 0;
  std::uint32_t pattern_min_ = 0;
  std::optional<TokenId> bar_id_;
  std::size_t size_ = 0;
  std::vector<Event> events_;  // by id; specials hold a placeholder
};

inline Vocabulary build_vocabulary(const EncodingConfig& config) { return Vocabulary(config); }

/// Token ids with the metadata needed to invert them.
struct TokenSequence {
  std::vector<TokenId> ids;
  std::uint64_t config_hash = 0;
  int true_steps = 0;  // T before frame padding
  int steps_per_beat = kDefaultStepsPerBeat;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

/// Ids that are not PAD/BOS/EOS.
std::size_t content_length(const TokenSequence& tokens);

/// A block as an h x L grid, row-major (row 0 = lowest pitch).
struct Block {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> cells;

  bool at(int row, int col) const { return cells[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Sum of 2^(row*L + col) over active cells.
std::uint32_t pattern_id(const Block& block);
Block pattern_block(std::uint32_t mask, int height, int width);

/// Block j of `frame`: rows [j*h, j*h + h), rows past H read as zero.
Block frame_block(const Frame& frame, int block_index, int block_height);

/// Throws DimensionMismatch when the frame does not match the config.
std::vector<Event> encode_frame(const Frame& frame, const EncodingConfig& config);

/// Throws BarAlignmentError, UnsupportedTimeSig, InvariantViolation.
TokenSequence encode_pianoroll(const Pianoroll& roll, const EncodingConfig& config);
TokenSequence encode_pianoroll(const Pianoroll& roll, const Vocabulary& vocab);

/// Exact inverse of encode_pianoroll. Rejects anything that is not in
/// canonical form. With emit_structure off the time-signature list cannot be
/// recovered and comes back as a single 4/4.
///
/// Throws NonCanonicalSequence, StructureMismatch, UnknownToken,
/// ConfigHashMismatch.
Pianoroll decode_tokens(const TokenSequence& tokens, const EncodingConfig& config);
Pianoroll decode_tokens(const TokenSequence& tokens, const Vocabulary& vocab);

/// Round-trip equality under `config`: everything when structure tokens are
/// emitted, otherwise cells, dimensions and grid only.
bool roundtrip_equal(const Pianoroll& original, const Pianoroll& decoded,
                     const EncodingConfig& config);

}  // namespace prev
