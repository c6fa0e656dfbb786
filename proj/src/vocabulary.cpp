#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "prev/codec.hpp"
#include "prev/error.hpp"
#include "prev/hash.hpp"

namespace prev {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::P: return "P";
    case Mode::PF_PLUS: return "PF_PLUS";
    case Mode::PF: return "PF";
    case Mode::FULL: return "FULL";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "p") return Mode::P;
  if (s == "pf+" || s == "pf_plus") return Mode::PF_PLUS;
  if (s == "pf") return Mode::PF;
  if (s == "full") return Mode::FULL;
  return std::nullopt;
}

void validate(const EncodingConfig& config) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::ConfigInvariantViolation, msg);
  };
  if (config.pitches < 1 || config.frame_len < 1 || config.block_height < 1) {
    fail("H, L and h must be positive");
  }
  if (config.blocks() < 3) fail("need at least 3 blocks per frame, got " +
                                std::to_string(config.blocks()));
  if (config.pattern_bits() > 16) {
    fail("block of " + std::to_string(config.block_height) + "x" +
         std::to_string(config.frame_len) + " exceeds 16 pattern bits");
  }
  for (std::size_t i = 0; i < config.timesig_set.size(); ++i) {
    const auto& ts = config.timesig_set[i];
    if (ts.numerator < 1 || ts.numerator > 255 || !is_supported_denominator(ts.denominator)) {
      fail("bad time signature " + std::to_string(ts.numerator) + "/" +
           std::to_string(ts.denominator));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (config.timesig_set[j] == ts) fail("duplicate time signature in set");
    }
  }
}

std::uint64_t config_hash(const EncodingConfig& config) {
  std::ostringstream s;
  s << "prev-config;H=" << config.pitches << ";L=" << config.frame_len
    << ";h=" << config.block_height << ";mode=" << to_string(config.mode) << ";ts=";
  for (std::size_t i = 0; i < config.timesig_set.size(); ++i) {
    if (i) s << ',';
    s << config.timesig_set[i].numerator << '/' << config.timesig_set[i].denominator;
  }
  s << ";structure=" << (config.emit_structure ? 1 : 0);
  return fnv1a64(s.str());
}

std::string event_name(const Event& event) {
  struct Namer {
    std::string operator()(const FrameEvt& e) const { return "Frame_" + std::to_string(e.start); }
    std::string operator()(const PatternEvt& e) const { return "Pat_" + std::to_string(e.mask); }
    std::string operator()(const GapEvt& e) const { return "Gap_" + std::to_string(e.run); }
    std::string operator()(const BarEvt&) const { return "Bar"; }
    std::string operator()(const TimeSigEvt& e) const {
      return "TS_" + std::to_string(e.signature.numerator) + "/" +
             std::to_string(e.signature.denominator);
    }
  };
  return std::visit(Namer{}, event);
}

Vocabulary::Vocabulary(const EncodingConfig& config) : config_(config) {
  validate(config_);
  hash_ = config_hash(config_);
  const std::size_t K = static_cast<std::size_t>(config_.blocks());
  TokenId next = kSpecialCount;
  if (config_.mode != Mode::P) {
    frame_base_ = next;
    frame_count_ = K + 1;
    next += static_cast<TokenId>(frame_count_);
  }
  if (config_.mode == Mode::FULL) {
    gap_base_ = next;
    gap_count_ = K - 2;
    next += static_cast<TokenId>(gap_count_);
  }
  pattern_min_ = config_.mode == Mode::FULL ? 1 : 0;
  pattern_base_ = next;
  pattern_count_ = (std::size_t{1} << config_.pattern_bits()) - pattern_min_;
  next += static_cast<TokenId>(pattern_count_);
  if (config_.emit_structure) {
    bar_id_ = next++;
    ts_base_ = next;
    next += static_cast<TokenId>(config_.timesig_set.size());
  }
  size_ = next;
  events_.reserve(size_);
  events_.assign(kSpecialCount, Event{BarEvt{}});
  for (TokenId id = kSpecialCount; id < size_; ++id) {
    if (frame_count_ && id >= frame_base_ && id < frame_base_ + frame_count_) {
      events_.push_back(FrameEvt{static_cast<int>(id - frame_base_)});
    } else if (gap_count_ && id >= gap_base_ && id < gap_base_ + gap_count_) {
      events_.push_back(GapEvt{static_cast<int>(id - gap_base_) + 1});
    } else if (id >= pattern_base_ && id < pattern_base_ + pattern_count_) {
      events_.push_back(PatternEvt{id - pattern_base_ + pattern_min_});
    } else if (bar_id_ && id == *bar_id_) {
      events_.push_back(BarEvt{});
    } else {
      events_.push_back(TimeSigEvt{config_.timesig_set[id - ts_base_]});
    }
  }
}

bool Vocabulary::contains(const Event& event) const {
  struct Check {
    const Vocabulary& v;
    bool operator()(const FrameEvt& e) const {
      return v.frame_count_ > 0 && e.start >= 0 && static_cast<std::size_t>(e.start) < v.frame_count_;
    }
    bool operator()(const PatternEvt& e) const {
      return e.mask >= v.pattern_min_ && e.mask - v.pattern_min_ < v.pattern_count_;
    }
    bool operator()(const GapEvt& e) const {
      return v.gap_count_ > 0 && e.run >= 1 && static_cast<std::size_t>(e.run) <= v.gap_count_;
    }
    bool operator()(const BarEvt&) const { return v.bar_id_.has_value(); }
    bool operator()(const TimeSigEvt& e) const {
      if (!v.bar_id_) return false;
      const auto& set = v.config_.timesig_set;
      return std::find(set.begin(), set.end(), e.signature) != set.end();
    }
  };
  return std::visit(Check{*this}, event);
}

TokenId Vocabulary::id(const Event& event) const {
  if (!contains(event)) {
    throw Error(ErrorCode::UnknownToken, event_name(event) + " is not in the vocabulary");
  }
  struct Lookup {
    const Vocabulary& v;
    TokenId operator()(const FrameEvt& e) const { return v.frame_base_ + static_cast<TokenId>(e.start); }
    TokenId operator()(const PatternEvt& e) const { return v.pattern_base_ + e.mask - v.pattern_min_; }
    TokenId operator()(const GapEvt& e) const { return v.gap_base_ + static_cast<TokenId>(e.run - 1); }
    TokenId operator()(const BarEvt&) const { return *v.bar_id_; }
    TokenId operator()(const TimeSigEvt& e) const {
      const auto& set = v.config_.timesig_set;
      return v.ts_base_ +
             static_cast<TokenId>(std::find(set.begin(), set.end(), e.signature) - set.begin());
    }
  };
  return std::visit(Lookup{*this}, event);
}

Event Vocabulary::event(TokenId id) const {
  if (is_special(id) || id >= size_) {
    throw Error(ErrorCode::UnknownToken, "token id " + std::to_string(id) + " has no event");
  }
  return events_[id];
}

std::string Vocabulary::name(TokenId id) const {
  switch (id) {
    case kPad: return "PAD";
    case kBos: return "BOS";
    case kEos: return "EOS";
    default: return event_name(event(id));
  }
}

std::string Vocabulary::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (TokenId id = 0; id < size_; ++id) j[name(id)] = id;
  return j.dump(2);
}

std::size_t content_length(const TokenSequence& tokens) {
  return static_cast<std::size_t>(std::count_if(tokens.ids.begin(), tokens.ids.end(),
                                                [](TokenId id) { return !Vocabulary::is_special(id); }));
}

}  // namespace prev
