#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prev/baselines.hpp"
#include "prev/codec.hpp"

namespace prev {

enum class SchemeKind { PianorollEvent, Remi, MidiLike, Abc, RemiBpe };

/// A tokenization whose length and vocabulary go into an efficiency table.
struct Scheme {
  std::string name;
  SchemeKind kind = SchemeKind::PianorollEvent;
  EncodingConfig config;  // PianorollEvent
  RemiParams remi;        // Remi, RemiBpe
  MidiLikeParams midilike;
  std::size_t bpe_merges = 100;  // RemiBpe
};

/// "full", "p", "pf", "pf+", "remi", "midilike", "abc", "remi-bpe".
std::optional<Scheme> parse_scheme(std::string_view name,
                                   const EncodingConfig& base = EncodingConfig{});
/// Comma-separated list; throws ConfigInvariantViolation on an unknown name.
std::vector<Scheme> parse_schemes(std::string_view csv,
                                  const EncodingConfig& base = EncodingConfig{});

/// Sequence length, excluding PAD/BOS/EOS. ABC counts characters.
/// Not defined for RemiBpe, which needs a trained model.
std::size_t sequence_length(const Pianoroll& roll, const Scheme& scheme);

/// Vocabulary size V; for RemiBpe this is the base REMI vocabulary.
std::size_t scheme_vocab_size(const Scheme& scheme);

}  // namespace prev
