#include "prev/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <map>
#include <random>
#include <system_error>

#include <json.hpp>

#include "prev/error.hpp"
#include "prev/hash.hpp"
#include "prev/midi.hpp"
#include "prev/prl.hpp"

namespace fs = std::filesystem;

namespace prev {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<const char*> exts) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower(entry.path().extension().string());
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

// Uniform integer in [lo, hi] by rejection, so the draw sequence is fixed by
// the engine alone rather than by the standard library's distributions.
int draw_int(std::mt19937_64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

// 53 random bits against the threshold; p = 1 always fires, p = 0 never does.
bool draw_bool(std::mt19937_64& rng, double p) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u < p;
}

void fill(Pianoroll& roll, int pitch, int from, int to) {
  if (pitch < kLowestPitch || pitch > kHighestPitch) return;
  to = std::min(to, roll.steps());
  for (int t = from; t < to; ++t) roll.set(pitch - kLowestPitch, t, true);
}

Pianoroll synth_piece(std::mt19937_64& rng, const SynthParams& p) {
  const int bar = bar_steps(p.timesig, p.steps_per_beat);
  const int steps = bar * p.bars;
  Pianoroll roll(steps, p.steps_per_beat, {{0, p.timesig}});
  const int slot = p.steps_per_beat / p.subdivisions;
  const int lo = std::max(kLowestPitch, p.melody_center - p.half_range);
  const int hi = std::min(kHighestPitch, p.melody_center + p.half_range);

  for (int beat = 0; beat * p.steps_per_beat < steps; ++beat) {
    if (!draw_bool(rng, p.chord_prob)) continue;
    const int root = draw_int(rng, 36, 47);
    const int third = draw_bool(rng, 0.5) ? 4 : 3;
    const int from = beat * p.steps_per_beat;
    const int to = from + p.chord_length * slot;
    for (int pitch : {root, root + third, root + 7}) fill(roll, pitch, from, to);
  }

  int pitch = std::clamp(p.melody_center, lo, hi);
  for (int s = 0; s * slot < steps; ++s) {
    if (draw_bool(rng, p.density)) fill(roll, pitch, s * slot, (s + 1) * slot);
    pitch = std::clamp(pitch + draw_int(rng, -2, 2), lo, hi);
  }
  return roll;
}

}  // namespace

IngestResult ingest_directory(const fs::path& input, const fs::path& output, int steps_per_beat) {
  const auto files = list_files(input, {".mid", ".midi"});
  if (files.empty()) throw Error(ErrorCode::NoInputFiles, "no .mid/.midi files in " + input.string());
  std::error_code ec;
  fs::create_directories(output, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + output.string() + ": " + ec.message());

  // Two inputs with the same stem would write the same PRL; the later one fails.
  std::map<std::string, std::size_t> first_owner;
  for (std::size_t i = 0; i < files.size(); ++i) {
    first_owner.try_emplace(files[i].stem().string(), i);
  }

  const auto n = static_cast<std::ptrdiff_t>(files.size());
  std::vector<ManifestEntry> entries(files.size());
  std::vector<std::string> errors(files.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const fs::path& src = files[idx];
    try {
      const std::string stem = src.stem().string();
      if (first_owner.at(stem) != idx) {
        throw Error(ErrorCode::IoError, "output " + stem + ".prl already produced by " +
                                            files[first_owner.at(stem)].filename().string());
      }
      const MidiImport imported = import_midi(read_file(src), steps_per_beat);
      const auto bytes = write_prl(imported.roll);
      const fs::path dst = output / (stem + ".prl");
      write_file(dst, bytes);
      ManifestEntry& e = entries[idx];
      e.source = src.filename().string();
      e.prl = dst.filename().string();
      e.steps = imported.roll.steps();
      e.bars = static_cast<int>(imported.roll.measures().size());
      e.note_cells = imported.roll.active_cells();
      e.warnings = imported.dropped_notes;
      e.hash = to_hex(fnv1a64(bytes));
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }

  IngestResult result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (errors[i].empty()) {
      result.entries.push_back(std::move(entries[i]));
    } else {
      result.failures.push_back({files[i].filename().string(), std::move(errors[i])});
    }
  }
  const std::string manifest = manifest_jsonl(result);
  write_file(output / kManifestName,
             {reinterpret_cast<const std::uint8_t*>(manifest.data()), manifest.size()});
  return result;
}

std::string manifest_jsonl(const IngestResult& result) {
  std::vector<std::pair<std::string, nlohmann::ordered_json>> lines;
  for (const auto& e : result.entries) {
    lines.emplace_back(e.source, nlohmann::ordered_json{{"source", e.source},
                                                        {"prl", e.prl},
                                                        {"T", e.steps},
                                                        {"bars", e.bars},
                                                        {"note_cells", e.note_cells},
                                                        {"warnings", e.warnings},
                                                        {"hash", e.hash}});
  }
  for (const auto& f : result.failures) {
    lines.emplace_back(f.source, nlohmann::ordered_json{{"source", f.source}, {"error", f.error}});
  }
  std::sort(lines.begin(), lines.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [source, j] : lines) out += j.dump() + "\n";
  return out;
}

void validate(const SynthParams& p) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::ConfigInvariantViolation, "synthetic corpus: " + what);
  };
  if (p.pieces < 1) fail("pieces must be >= 1");
  if (p.bars < 1) fail("bars must be >= 1");
  if (p.steps_per_beat < 1) fail("steps_per_beat must be >= 1");
  if (p.subdivisions < 1 || p.steps_per_beat % p.subdivisions != 0) {
    fail("subdivisions must divide steps_per_beat");
  }
  if (p.chord_length < 1 || p.chord_length > p.subdivisions) {
    fail("chord_length must be in 1..subdivisions");
  }
  if (!(p.chord_prob >= 0 && p.chord_prob <= 1)) fail("chord_prob must be in [0, 1]");
  if (!(p.density >= 0 && p.density <= 1)) fail("density must be in [0, 1]");
  if (p.half_range < 0) fail("half_range must be >= 0");
  if (p.melody_center < kLowestPitch || p.melody_center > kHighestPitch) {
    fail("melody_center must be a piano key");
  }
  if (p.timesig.numerator < 1 || !is_supported_denominator(p.timesig.denominator) ||
      bar_steps(p.timesig, p.steps_per_beat) == 0) {
    fail("time signature does not fit the grid");
  }
}

std::vector<Pianoroll> generate_synthetic(const SynthParams& params) {
  validate(params);
  std::mt19937_64 rng(params.seed);
  std::vector<Pianoroll> corpus;
  corpus.reserve(static_cast<std::size_t>(params.pieces));
  for (int i = 0; i < params.pieces; ++i) corpus.push_back(synth_piece(rng, params));
  return corpus;
}

std::vector<std::pair<std::string, Pianoroll>> load_prl_directory(const fs::path& dir) {
  std::vector<std::pair<std::string, Pianoroll>> out;
  for (const auto& path : list_files(dir, {".prl"})) {
    try {
      out.emplace_back(path.filename().string(), load_prl(path));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace prev
