#include <algorithm>
#include <array>
#include <string>

#include "prev/codec.hpp"
#include "prev/error.hpp"

namespace prev {
namespace {

// Pattern masks for the K blocks of an H x L column-major frame. Columns at
// or past `valid_cols` read as zero padding.
void frame_masks(const std::uint8_t* cols, int valid_cols, const EncodingConfig& cfg,
                 std::vector<std::uint32_t>& masks) {
  const int H = cfg.pitches, L = cfg.frame_len, h = cfg.block_height;
  // per-row block index and bit offset, rebuilt when the geometry changes
  thread_local std::array<int, 3> geometry{};
  thread_local std::vector<int> block_of, shift_of;
  if (geometry != std::array<int, 3>{H, L, h}) {
    geometry = {H, L, h};
    block_of.resize(static_cast<std::size_t>(H));
    shift_of.resize(static_cast<std::size_t>(H));
    for (int row = 0; row < H; ++row) {
      block_of[static_cast<std::size_t>(row)] = row / h;
      shift_of[static_cast<std::size_t>(row)] = (row % h) * L;
    }
  }
  masks.assign(static_cast<std::size_t>(cfg.blocks()), 0);
  for (int col = 0; col < valid_cols; ++col) {
    const std::uint8_t* c = cols + static_cast<std::size_t>(col) * H;
    for (int row = 0; row < H; ++row) {
      masks[static_cast<std::size_t>(block_of[row])] |= static_cast<std::uint32_t>(c[row])
                                                         << (shift_of[row] + col);
    }
  }
}

// Emits one frame's events from its block masks.
template <typename Sink>
void emit_frame(std::span<const std::uint32_t> masks, Mode mode, Sink&& sink) {
  const int K = static_cast<int>(masks.size());
  if (mode == Mode::P) {
    for (std::uint32_t m : masks) sink(Event{PatternEvt{m}});
    return;
  }
  int first = 0;
  while (first < K && masks[first] == 0) ++first;
  sink(Event{FrameEvt{first}});
  if (first == K) return;
  if (mode == Mode::PF_PLUS) {
    for (int j = first; j < K; ++j) sink(Event{PatternEvt{masks[j]}});
    return;
  }
  int last = K - 1;
  while (masks[last] == 0) --last;
  if (mode == Mode::PF) {
    for (int j = first; j <= last; ++j) sink(Event{PatternEvt{masks[j]}});
    return;
  }
  int run = 0;
  for (int j = first; j <= last; ++j) {
    if (masks[j] == 0) {
      ++run;
      continue;
    }
    if (run > 0) {
      sink(Event{GapEvt{run}});
      run = 0;
    }
    sink(Event{PatternEvt{masks[j]}});
  }
}

void check_structure(const Pianoroll& roll, const EncodingConfig& cfg) {
  const auto& set = cfg.timesig_set;
  for (const auto& ts : roll.timesigs()) {
    const int bar = bar_steps(ts.signature, roll.steps_per_beat());
    const std::string name =
        std::to_string(ts.signature.numerator) + "/" + std::to_string(ts.signature.denominator);
    if (bar % cfg.frame_len != 0) {
      throw Error(ErrorCode::BarAlignmentError, "bar of " + name + " is " + std::to_string(bar) +
                                                    " steps, not a multiple of L=" +
                                                    std::to_string(cfg.frame_len));
    }
    if (std::find(set.begin(), set.end(), ts.signature) == set.end()) {
      throw Error(ErrorCode::UnsupportedTimeSig, name + " is not in the configured set");
    }
  }
}

[[noreturn]] void non_canonical(const std::string& msg, std::size_t pos) {
  throw Error(ErrorCode::NonCanonicalSequence, msg + " at token " + std::to_string(pos));
}
[[noreturn]] void structure_mismatch(const std::string& msg, std::size_t pos) {
  throw Error(ErrorCode::StructureMismatch, msg + " at token " + std::to_string(pos));
}

class Reader {
 public:
  Reader(std::span<const TokenId> ids, const Vocabulary& vocab) : ids_(ids), vocab_(vocab) {}

  bool at_end() const { return pos_ >= ids_.size(); }
  std::size_t pos() const { return pos_ + 1; }  // position in the full sequence (after BOS)
  Event peek() const { return vocab_.event(ids_[pos_]); }
  Event next(const char* expected) {
    if (at_end()) non_canonical(std::string("sequence ends where ") + expected + " is required", pos());
    return vocab_.event(ids_[pos_++]);
  }

 private:
  std::span<const TokenId> ids_;
  const Vocabulary& vocab_;
  std::size_t pos_ = 0;
};

bool is_structure(const Event& e) {
  return std::holds_alternative<BarEvt>(e) || std::holds_alternative<TimeSigEvt>(e);
}

class FrameDecoder {
 public:
  FrameDecoder(const EncodingConfig& cfg) : cfg_(cfg), K_(cfg.blocks()) {
    const int spare_rows = K_ * cfg.block_height - cfg.pitches;
    // Bits of the top block that fall on rows past H.
    for (int r = cfg.block_height - spare_rows; r < cfg.block_height; ++r) {
      for (int c = 0; c < cfg.frame_len; ++c) top_block_spare_ |= 1u << (r * cfg.frame_len + c);
    }
  }

  void decode(Reader& in, std::vector<std::uint32_t>& masks) {
    masks.assign(static_cast<std::size_t>(K_), 0);
    if (cfg_.mode == Mode::P) {
      for (int j = 0; j < K_; ++j) put(masks, j, pattern(in, in.next("a pattern")));
      return;
    }
    const std::size_t frame_pos = in.pos();
    const Event head = in.next("a frame");
    if (!std::holds_alternative<FrameEvt>(head)) {
      if (is_structure(head)) structure_mismatch("structure token where a frame starts", frame_pos);
      non_canonical(event_name(head) + " where a frame token is required", frame_pos);
    }
    int cursor = std::get<FrameEvt>(head).start;
    if (cursor == K_) return;

    const std::uint32_t first = pattern(in, in.next("a pattern after the frame token"));
    if (first == 0) non_canonical("frame start points at an empty block", in.pos() - 1);
    put(masks, cursor++, first);

    switch (cfg_.mode) {
      case Mode::PF_PLUS:
        while (cursor < K_) put(masks, cursor++, pattern(in, in.next("a pattern")));
        break;
      case Mode::PF: {
        std::uint32_t last = first;
        while (cursor < K_ && !in.at_end() && std::holds_alternative<PatternEvt>(in.peek())) {
          last = pattern(in, in.next("a pattern"));
          put(masks, cursor++, last);
        }
        if (last == 0) non_canonical("trailing empty block was not dropped", in.pos() - 1);
        break;
      }
      case Mode::FULL:
        while (!in.at_end()) {
          const Event e = in.peek();
          if (const auto* gap = std::get_if<GapEvt>(&e)) {
            in.next("a gap");
            cursor += gap->run;
            if (cursor >= K_) non_canonical("gap runs past the last block", in.pos() - 1);
            const Event after = in.next("a pattern after a gap");
            if (!std::holds_alternative<PatternEvt>(after)) {
              non_canonical("gap not followed by a pattern", in.pos() - 1);
            }
            put(masks, cursor++, std::get<PatternEvt>(after).mask);
          } else if (std::holds_alternative<PatternEvt>(e)) {
            if (cursor >= K_) non_canonical("pattern past the last block", in.pos());
            put(masks, cursor++, std::get<PatternEvt>(in.next("a pattern")).mask);
          } else {
            break;
          }
        }
        break;
      case Mode::P:
        break;
    }
  }

 private:
  std::uint32_t pattern(const Reader& in, const Event& e) const {
    if (const auto* p = std::get_if<PatternEvt>(&e)) return p->mask;
    if (is_structure(e)) structure_mismatch("structure token inside a frame", in.pos() - 1);
    non_canonical(event_name(e) + " where a pattern is required", in.pos() - 1);
  }

  void put(std::vector<std::uint32_t>& masks, int block, std::uint32_t mask) const {
    if (block == K_ - 1 && (mask & top_block_spare_)) {
      throw Error(ErrorCode::NonCanonicalSequence, "pattern sets rows past the top pitch");
    }
    masks[static_cast<std::size_t>(block)] = mask;
  }

  const EncodingConfig& cfg_;
  int K_;
  std::uint32_t top_block_spare_ = 0;
};

}  // namespace

std::uint32_t pattern_id(const Block& block) {
  if (block.height * block.width > 32) {
    throw Error(ErrorCode::DimensionMismatch, "block has more than 32 cells");
  }
  std::uint32_t mask = 0;
  for (int r = 0; r < block.height; ++r) {
    for (int c = 0; c < block.width; ++c) {
      if (block.at(r, c)) mask |= 1u << (r * block.width + c);
    }
  }
  return mask;
}

Block pattern_block(std::uint32_t mask, int height, int width) {
  Block b{height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 0)};
  for (int bit = 0; bit < height * width; ++bit) b.cells[bit] = (mask >> bit) & 1u;
  return b;
}

Block frame_block(const Frame& frame, int block_index, int block_height) {
  Block b{block_height, frame.width,
          std::vector<std::uint8_t>(static_cast<std::size_t>(block_height) * frame.width, 0)};
  for (int r = 0; r < block_height; ++r) {
    const int row = block_index * block_height + r;
    if (row >= frame.pitches) break;
    for (int c = 0; c < frame.width; ++c) b.cells[static_cast<std::size_t>(r) * frame.width + c] = frame.at(row, c);
  }
  return b;
}

std::vector<Event> encode_frame(const Frame& frame, const EncodingConfig& config) {
  validate(config);
  if (frame.width != config.frame_len || frame.pitches != config.pitches ||
      frame.cells.size() != static_cast<std::size_t>(frame.width) * frame.pitches) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame is " + std::to_string(frame.pitches) + "x" + std::to_string(frame.width) +
                    ", config wants " + std::to_string(config.pitches) + "x" +
                    std::to_string(config.frame_len));
  }
  std::vector<std::uint32_t> masks;
  frame_masks(frame.cells.data(), frame.width, config, masks);
  std::vector<Event> events;
  emit_frame(masks, config.mode, [&](Event e) { events.push_back(e); });
  return events;
}

TokenSequence encode_pianoroll(const Pianoroll& roll, const EncodingConfig& config) {
  return encode_pianoroll(roll, Vocabulary(config));
}

TokenSequence encode_pianoroll(const Pianoroll& roll, const Vocabulary& vocab) {
  const EncodingConfig& cfg = vocab.config();
  validate(roll);
  if (roll.pitches() != cfg.pitches) {
    throw Error(ErrorCode::DimensionMismatch, "roll has " + std::to_string(roll.pitches()) +
                                                  " rows, config wants " +
                                                  std::to_string(cfg.pitches));
  }
  if (cfg.emit_structure) check_structure(roll, cfg);

  const int T = roll.steps();
  const int L = cfg.frame_len;
  const int frames = (T + L - 1) / L;
  TokenSequence out;
  out.config_hash = vocab.hash();
  out.true_steps = T;
  out.steps_per_beat = roll.steps_per_beat();
  out.ids.reserve(static_cast<std::size_t>(frames) * 4 + 8);
  auto sink = [&](const Event& e) { out.ids.push_back(vocab.id(e)); };

  out.ids.push_back(kBos);
  std::vector<Measure> layout;
  if (cfg.emit_structure) {
    layout = roll.measures();
    sink(TimeSigEvt{layout.front().signature});
  }
  std::vector<std::uint32_t> masks;
  std::size_t measure = 0;
  const auto cells = roll.cells();
  for (int i = 0; i < frames; ++i) {
    const int begin = i * L;
    frame_masks(cells.data() + static_cast<std::size_t>(begin) * cfg.pitches,
                std::min(L, T - begin), cfg, masks);
    emit_frame(masks, cfg.mode, sink);
    if (!cfg.emit_structure) continue;
    const int end = begin + L;
    if (end <= T && measure < layout.size() && layout[measure].end() == end) {
      sink(BarEvt{});
      ++measure;
      if (end < T && layout[measure].signature != layout[measure - 1].signature) {
        sink(TimeSigEvt{layout[measure].signature});
      }
    }
  }
  out.ids.push_back(kEos);
  return out;
}

Pianoroll decode_tokens(const TokenSequence& tokens, const EncodingConfig& config) {
  return decode_tokens(tokens, Vocabulary(config));
}

Pianoroll decode_tokens(const TokenSequence& tokens, const Vocabulary& vocab) {
  const EncodingConfig& cfg = vocab.config();
  if (tokens.config_hash != vocab.hash()) {
    throw Error(ErrorCode::ConfigHashMismatch, "tokens were produced under config " +
                                                   std::to_string(tokens.config_hash));
  }
  const auto& ids = tokens.ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= vocab.size()) {
      throw Error(ErrorCode::UnknownToken, "token id " + std::to_string(ids[i]) + " at " +
                                               std::to_string(i) + " is out of range");
    }
  }
  if (ids.size() < 2 || ids.front() != kBos || ids.back() != kEos) {
    throw Error(ErrorCode::NonCanonicalSequence, "sequence must start with BOS and end with EOS");
  }
  for (std::size_t i = 1; i + 1 < ids.size(); ++i) {
    if (Vocabulary::is_special(ids[i])) non_canonical("special token inside the sequence", i);
  }
  const int T = tokens.true_steps;
  const int spb = tokens.steps_per_beat;
  if (T <= 0 || spb <= 0) {
    throw Error(ErrorCode::NonCanonicalSequence, "sequence metadata has non-positive T or grid");
  }

  const int H = cfg.pitches, L = cfg.frame_len, h = cfg.block_height;
  const int frames = (T + L - 1) / L;
  Reader in(std::span<const TokenId>(ids).subspan(1, ids.size() - 2), vocab);
  std::vector<TimeSignatureEvent> sigs;
  TimeSignature current{4, 4};
  long long measure_end = 0;
  auto bar_of = [&](TimeSignature sig, std::size_t pos) {
    const int bar = bar_steps(sig, spb);
    if (bar <= 0 || bar % L != 0) structure_mismatch("time signature off the frame grid", pos);
    return bar;
  };
  if (cfg.emit_structure) {
    const Event first = in.next("the initial time signature");
    if (!std::holds_alternative<TimeSigEvt>(first)) {
      structure_mismatch("sequence must open with a time signature", 1);
    }
    current = std::get<TimeSigEvt>(first).signature;
    sigs.push_back({0, current});
    measure_end = bar_of(current, 1);
  }

  std::vector<std::uint8_t> cells(static_cast<std::size_t>(frames) * L * H, 0);
  std::vector<std::uint32_t> masks;
  FrameDecoder frame_decoder(cfg);
  int measure = 0;
  for (int f = 0; f < frames; ++f) {
    frame_decoder.decode(in, masks);
    std::uint8_t* base = cells.data() + static_cast<std::size_t>(f) * L * H;
    for (std::size_t j = 0; j < masks.size(); ++j) {
      for (std::uint32_t m = masks[j]; m; m &= m - 1) {
        const int bit = __builtin_ctz(m);
        base[static_cast<std::size_t>(bit % L) * H + j * h + bit / L] = 1;
      }
    }
    if (!cfg.emit_structure) continue;
    const long long frame_end = static_cast<long long>(f + 1) * L;
    if (frame_end <= T && frame_end == measure_end) {
      if (in.at_end() || !std::holds_alternative<BarEvt>(in.peek())) {
        structure_mismatch("missing bar line after measure " + std::to_string(measure), in.pos());
      }
      in.next("a bar");
      ++measure;
      if (frame_end < T && !in.at_end()) {
        const Event e = in.peek();
        if (const auto* ts = std::get_if<TimeSigEvt>(&e)) {
          if (ts->signature == current) structure_mismatch("time signature does not change", in.pos());
          in.next("a time signature");
          current = ts->signature;
          sigs.push_back({measure, current});
        }
      }
      measure_end += bar_of(current, in.pos());
    } else if (!in.at_end() && is_structure(in.peek())) {
      structure_mismatch("structure token away from a measure boundary", in.pos());
    }
  }
  if (!in.at_end()) non_canonical("tokens left after the last frame", in.pos());

  const std::size_t used = static_cast<std::size_t>(T) * H;
  if (std::any_of(cells.begin() + static_cast<std::ptrdiff_t>(used), cells.end(),
                  [](std::uint8_t c) { return c != 0; })) {
    throw Error(ErrorCode::NonCanonicalSequence, "notes in the padding past the last step");
  }
  if (!cfg.emit_structure) sigs = {{0, TimeSignature{4, 4}}};
  Pianoroll roll(T, spb, std::move(sigs), H);
  std::copy_n(cells.begin(), used, roll.mutable_cells().begin());
  return roll;
}

bool roundtrip_equal(const Pianoroll& original, const Pianoroll& decoded,
                     const EncodingConfig& config) {
  if (config.emit_structure) return original == decoded;
  return original.pitches() == decoded.pitches() && original.steps() == decoded.steps() &&
         original.steps_per_beat() == decoded.steps_per_beat() &&
         std::equal(original.cells().begin(), original.cells().end(), decoded.cells().begin(),
                    decoded.cells().end());
}

}  // namespace prev
