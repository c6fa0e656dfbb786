#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prev/pianoroll.hpp"

namespace prev {

struct ManifestEntry {
  std::string source;  // file name within the input directory
  std::string prl;     // file name within the output directory
  int steps = 0;
  int bars = 0;
  std::size_t note_cells = 0;
  std::size_t warnings = 0;
  std::string hash;  // FNV-1a 64 of the PRL bytes, hex

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct IngestFailure {
  std::string source;
  std::string error;
};

struct IngestResult {
  std::vector<ManifestEntry> entries;   // sorted by source
  std::vector<IngestFailure> failures;  // sorted by source

  bool partial() const { return !failures.empty(); }
};

inline constexpr const char* kManifestName = "manifest.jsonl";

/// Converts every *.mid / *.midi directly under `input` into `<stem>.prl`
/// under `output` and writes `output/manifest.jsonl`: one JSON object per
/// line sorted by source path, failures carrying an "error" field instead of
/// the roll statistics. A bad file does not stop the batch.
///
/// Throws NoInputFiles, IoError.
IngestResult ingest_directory(const std::filesystem::path& input,
                              const std::filesystem::path& output,
                              int steps_per_beat = kDefaultStepsPerBeat);

std::string manifest_jsonl(const IngestResult& result);

/// Knobs for the synthetic corpus. Pieces are a random-walk melody with one
/// note slot per beat subdivision, over triads struck on beats.
struct SynthParams {
  std::uint64_t seed = 0;
  int pieces = 200;
  int bars = 8;
  TimeSignature timesig{4, 4};
  double chord_prob = 0.5;      // per beat
  int half_range = 12;          // melody walk stays within center +- half_range
  double density = 0.9;         // chance a melody slot sounds
  int steps_per_beat = kDefaultStepsPerBeat;
  int subdivisions = 4;         // melody slots per beat
  int chord_length = 1;         // subdivisions a triad sounds, 1..subdivisions
  int melody_center = 72;
};

/// Throws ConfigInvariantViolation.
void validate(const SynthParams& params);

/// Deterministic in `params`. Randomness comes from std::mt19937_64 seeded
/// with `seed`, consumed through integer-only draws (see README), so the
/// same params give the same corpus on every platform.
std::vector<Pianoroll> generate_synthetic(const SynthParams& params);

/// Loads every *.prl directly under `dir`, sorted by file name.
std::vector<std::pair<std::string, Pianoroll>> load_prl_directory(const std::filesystem::path& dir);

}  // namespace prev
