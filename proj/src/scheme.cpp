#include "prev/scheme.hpp"

#include "prev/error.hpp"

namespace prev {

std::optional<Scheme> parse_scheme(std::string_view name, const EncodingConfig& base) {
  Scheme s;
  s.name = std::string(name);
  s.config = base;
  if (auto mode = parse_mode(name)) {
    s.kind = SchemeKind::PianorollEvent;
    s.config.mode = *mode;
    return s;
  }
  if (name == "remi") {
    s.kind = SchemeKind::Remi;
  } else if (name == "midilike") {
    s.kind = SchemeKind::MidiLike;
  } else if (name == "abc") {
    s.kind = SchemeKind::Abc;
  } else if (name == "remi-bpe") {
    s.kind = SchemeKind::RemiBpe;
  } else {
    return std::nullopt;
  }
  return s;
}

std::vector<Scheme> parse_schemes(std::string_view csv, const EncodingConfig& base) {
  std::vector<Scheme> out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    const std::string_view item = csv.substr(0, comma);
    if (!item.empty()) {
      auto scheme = parse_scheme(item, base);
      if (!scheme) {
        throw Error(ErrorCode::ConfigInvariantViolation, "unknown scheme '" + std::string(item) + "'");
      }
      out.push_back(std::move(*scheme));
    }
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  return out;
}

std::size_t sequence_length(const Pianoroll& roll, const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::PianorollEvent:
      return content_length(encode_pianoroll(roll, scheme.config));
    case SchemeKind::Remi:
      return remi_tokenize(roll, scheme.remi).ids.size();
    case SchemeKind::MidiLike:
      return midilike_tokenize(roll, scheme.midilike).ids.size();
    case SchemeKind::Abc:
      return abc_serialize(roll).size();
    case SchemeKind::RemiBpe:
      break;
  }
  throw Error(ErrorCode::DomainError, "REMI-BPE length needs a trained model");
}

std::size_t scheme_vocab_size(const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::PianorollEvent: return Vocabulary(scheme.config).reported_size();
    case SchemeKind::Remi:
    case SchemeKind::RemiBpe: return RemiLayout(scheme.remi).size();
    case SchemeKind::MidiLike: return MidiLikeLayout(scheme.midilike).size();
    case SchemeKind::Abc: return kAbcVocabSize;
  }
  return 0;
}

}  // namespace prev
