#include "prev/baselines.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "prev/error.hpp"
#include "prev/hash.hpp"

namespace prev {
namespace {

std::string sig_name(TimeSignature sig) {
  return std::to_string(sig.numerator) + "/" + std::to_string(sig.denominator);
}

// Measures overlapping [0, T), with the last one clipped to T.
std::vector<Measure> clipped_measures(const Pianoroll& roll) {
  auto layout = roll.measures();
  if (!layout.empty() && layout.back().end() > roll.steps()) {
    layout.back().length = roll.steps() - layout.back().start;
  }
  return layout;
}

}  // namespace

std::vector<RollNote> extract_notes(const Pianoroll& roll) {
  std::vector<RollNote> notes;
  const int T = roll.steps();
  for (int row = 0; row < roll.pitches(); ++row) {
    int t = 0;
    while (t < T) {
      if (!roll.at(row, t)) {
        ++t;
        continue;
      }
      const int onset = t;
      while (t < T && roll.at(row, t)) ++t;
      notes.push_back({onset, row, t - onset});
    }
  }
  std::sort(notes.begin(), notes.end(), [](const RollNote& a, const RollNote& b) {
    return std::pair(a.onset, a.row) < std::pair(b.onset, b.row);
  });
  return notes;
}

// ---------------------------------------------------------------- REMI-lite

RemiLayout::RemiLayout(const RemiParams& params) : params_(params) {
  if (params_.position_bins < 1 || params_.max_duration < 1) {
    throw Error(ErrorCode::ConfigInvariantViolation, "REMI bin counts must be positive");
  }
  pitch_base_ = 1 + static_cast<TokenId>(params_.position_bins);
  duration_base_ = pitch_base_ + kPianoKeys;
  ts_base_ = duration_base_ + static_cast<TokenId>(params_.max_duration);
  size_ = ts_base_ + params_.timesig_set.size();
  std::ostringstream s;
  s << "remi-lite;pos=" << params_.position_bins << ";dur=" << params_.max_duration << ";ts=";
  for (const auto& ts : params_.timesig_set) s << sig_name(ts) << ',';
  hash_ = fnv1a64(s.str());
}

TokenId RemiLayout::timesig(TimeSignature sig) const {
  const auto& set = params_.timesig_set;
  const auto it = std::find(set.begin(), set.end(), sig);
  if (it == set.end()) {
    throw Error(ErrorCode::UnsupportedTimeSig, sig_name(sig) + " has no REMI token");
  }
  return ts_base_ + static_cast<TokenId>(it - set.begin());
}

TokenSequence remi_tokenize(const Pianoroll& roll, const RemiParams& params) {
  validate(roll);
  const RemiLayout layout(params);
  std::vector<RollNote> notes;
  for (const RollNote& n : extract_notes(roll)) {
    for (int off = 0; off < n.duration; off += params.max_duration) {
      notes.push_back({n.onset + off, n.row, std::min(params.max_duration, n.duration - off)});
    }
  }
  std::sort(notes.begin(), notes.end(), [](const RollNote& a, const RollNote& b) {
    return std::pair(a.onset, a.row) < std::pair(b.onset, b.row);
  });

  TokenSequence out;
  out.config_hash = layout.hash();
  out.true_steps = roll.steps();
  out.steps_per_beat = roll.steps_per_beat();
  const auto measures = roll.measures();
  out.ids.push_back(layout.timesig(measures.front().signature));
  std::size_t next = 0;
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const Measure& bar = measures[m];
    if (bar.length > params.position_bins) {
      throw Error(ErrorCode::BarAlignmentError, "bar of " + std::to_string(bar.length) +
                                                    " steps exceeds " +
                                                    std::to_string(params.position_bins) +
                                                    " position bins");
    }
    out.ids.push_back(layout.bar());
    if (m > 0 && bar.signature != measures[m - 1].signature) {
      out.ids.push_back(layout.timesig(bar.signature));
    }
    int group_onset = -1;
    for (; next < notes.size() && notes[next].onset < bar.end(); ++next) {
      const RollNote& n = notes[next];
      if (n.onset != group_onset) {
        out.ids.push_back(layout.position(n.onset - bar.start));
        group_onset = n.onset;
      }
      out.ids.push_back(layout.pitch(n.pitch()));
      out.ids.push_back(layout.duration(n.duration));
    }
  }
  return out;
}

// ----------------------------------------------------------- MIDI-Like-lite

MidiLikeLayout::MidiLikeLayout(const MidiLikeParams& params) : params_(params) {
  if (params_.max_shift < 1) {
    throw Error(ErrorCode::ConfigInvariantViolation, "max time shift must be positive");
  }
  hash_ = fnv1a64("midilike-lite;shift=" + std::to_string(params_.max_shift));
}

TokenSequence midilike_tokenize(const Pianoroll& roll, const MidiLikeParams& params) {
  validate(roll);
  const MidiLikeLayout layout(params);
  // time -> (offs, ons); std::map keeps times ordered
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> events;
  for (const RollNote& n : extract_notes(roll)) {
    events[n.onset].second.push_back(n.pitch());
    events[n.onset + n.duration].first.push_back(n.pitch());
  }
  TokenSequence out;
  out.config_hash = layout.hash();
  out.true_steps = roll.steps();
  out.steps_per_beat = roll.steps_per_beat();
  int now = 0;
  for (auto& [time, group] : events) {
    for (int gap = time - now; gap > 0; gap -= params.max_shift) {
      out.ids.push_back(layout.time_shift(std::min(gap, params.max_shift)));
    }
    now = time;
    std::sort(group.first.begin(), group.first.end());
    std::sort(group.second.begin(), group.second.end());
    for (int p : group.first) out.ids.push_back(layout.note_off(p));
    for (int p : group.second) out.ids.push_back(layout.note_on(p));
  }
  return out;
}

// ---------------------------------------------------------------- ABC-lite

std::string abc_pitch(int midi_pitch) {
  if (midi_pitch < kLowestPitch || midi_pitch > kHighestPitch) {
    throw Error(ErrorCode::PitchOutOfAbcRange, "pitch " + std::to_string(midi_pitch));
  }
  static constexpr const char* kNames[12] = {"C", "^C", "D", "^D", "E", "F",
                                             "^F", "G", "^G", "A", "^A", "B"};
  const int octave = midi_pitch / 12 - 1;
  std::string name = kNames[midi_pitch % 12];
  if (octave >= 5) {
    name.back() = static_cast<char>(name.back() - 'A' + 'a');
    name.append(static_cast<std::size_t>(octave - 5), '\'');
  } else {
    name.append(static_cast<std::size_t>(4 - octave), ',');
  }
  return name;
}

std::string abc_serialize(const Pianoroll& roll) {
  validate(roll);
  const auto measures = clipped_measures(roll);
  const auto notes = extract_notes(roll);
  auto len = [](int n) { return n == 1 ? std::string() : std::to_string(n); };

  std::string out = "X:1\nM:" + sig_name(measures.front().signature) + "\nL:1/" +
                    std::to_string(4 * roll.steps_per_beat()) + "\nK:C\n";
  std::vector<std::string> body;
  std::size_t next = 0;
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const Measure& bar = measures[m];
    if (m > 0 && bar.signature != measures[m - 1].signature) {
      body.push_back("[M:" + sig_name(bar.signature) + "]");
    }
    int t = bar.start;
    while (next < notes.size() && notes[next].onset < bar.end()) {
      const int onset = notes[next].onset;
      std::vector<const RollNote*> group;
      while (next < notes.size() && notes[next].onset == onset) group.push_back(&notes[next++]);
      const int following = next < notes.size() ? std::min(notes[next].onset, bar.end()) : bar.end();
      int longest = 0;
      for (const RollNote* n : group) longest = std::max(longest, n->duration);
      const int chord_len = std::min(longest, following - onset);
      if (onset > t) body.push_back("z" + len(onset - t));
      std::string chord;
      for (const RollNote* n : group) chord += abc_pitch(n->pitch());
      if (group.size() > 1) chord = "[" + chord + "]";
      body.push_back(chord + len(chord_len));
      t = onset + chord_len;
    }
    if (t < bar.end()) body.push_back("z" + len(bar.end() - t));
    body.push_back("|");
  }
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ' ';
    out += body[i];
  }
  out += '\n';
  return out;
}

}  // namespace prev
