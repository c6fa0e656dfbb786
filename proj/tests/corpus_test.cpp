#include "prev/corpus.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "prev/codec.hpp"
#include "prev/error.hpp"
#include "prev/metrics.hpp"
#include "prev/prl.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace prev {
namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("prev_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::uint8_t> quarter_note_midi() {
  return testing::SmfBuilder(480).note(60, 0, 480).build();
}

TEST(Ingest, SingleFile) {
  TempDir in("ingest_in1"), out("ingest_out1");
  write_file(in.path() / "tune.mid", quarter_note_midi());
  const IngestResult r = ingest_directory(in.path(), out.path());
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_FALSE(r.partial());
  const ManifestEntry& e = r.entries[0];
  EXPECT_EQ(e.source, "tune.mid");
  EXPECT_EQ(e.prl, "tune.prl");
  EXPECT_EQ(e.steps, 64);
  EXPECT_EQ(e.bars, 1);
  EXPECT_EQ(e.note_cells, 16u);
  EXPECT_EQ(e.hash.size(), 16u);
  const Pianoroll roll = load_prl(out.path() / "tune.prl");
  EXPECT_TRUE(roll.at(39, 0));
  const auto line = nlohmann::json::parse(read_text(out.path() / kManifestName));
  EXPECT_EQ(line["source"], "tune.mid");
  EXPECT_EQ(line["T"], 64);
}

TEST(Ingest, CorruptFileMakesPartialResult) {
  TempDir in("ingest_in2"), out("ingest_out2");
  write_file(in.path() / "a.mid", quarter_note_midi());
  write_file(in.path() / "b.MIDI", {'M', 'T', 'h', 'd', 0, 0});
  write_file(in.path() / "notes.txt", {'x'});
  const IngestResult r = ingest_directory(in.path(), out.path());
  ASSERT_EQ(r.entries.size(), 1u);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_TRUE(r.partial());
  EXPECT_EQ(r.failures[0].source, "b.MIDI");
  EXPECT_FALSE(fs::exists(out.path() / "b.prl"));

  const std::string manifest = read_text(out.path() / kManifestName);
  EXPECT_EQ(manifest, manifest_jsonl(r));
  std::istringstream lines(manifest);
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(nlohmann::json::parse(first)["source"], "a.mid");
  EXPECT_TRUE(nlohmann::json::parse(second).contains("error"));
}

TEST(Ingest, EmptyDirectory) {
  TempDir in("ingest_in3"), out("ingest_out3");
  try {
    ingest_directory(in.path(), out.path());
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoInputFiles);
  }
  EXPECT_THROW(ingest_directory(in.path() / "missing", out.path()), Error);
}

TEST(Ingest, RepeatRunsAreByteIdentical) {
  TempDir in("ingest_in4"), out1("ingest_out4a"), out2("ingest_out4b");
  write_file(in.path() / "one.mid", quarter_note_midi());
  write_file(in.path() / "two.mid",
             testing::SmfBuilder(96).timesig(0, 3, 2).note(64, 0, 300).note(67, 96, 500).build());
  ingest_directory(in.path(), out1.path());
  ingest_directory(in.path(), out2.path());
  for (const char* name : {"one.prl", "two.prl", kManifestName}) {
    EXPECT_EQ(read_text(out1.path() / name), read_text(out2.path() / name)) << name;
  }
}

TEST(Synthetic, Deterministic) {
  SynthParams p;
  p.pieces = 10;
  p.seed = 42;
  EXPECT_EQ(generate_synthetic(p), generate_synthetic(p));
  SynthParams q = p;
  q.seed = 43;
  EXPECT_NE(generate_synthetic(p), generate_synthetic(q));
}

TEST(Synthetic, FirstPiecesDoNotDependOnCount) {
  SynthParams p;
  p.pieces = 3;
  const auto few = generate_synthetic(p);
  p.pieces = 6;
  const auto more = generate_synthetic(p);
  EXPECT_TRUE(std::equal(few.begin(), few.end(), more.begin()));
}

TEST(Synthetic, ShapeFollowsParams) {
  SynthParams p;
  p.pieces = 4;
  p.bars = 3;
  p.timesig = {3, 4};
  for (const Pianoroll& roll : generate_synthetic(p)) {
    EXPECT_EQ(roll.steps(), 3 * 48);
    EXPECT_EQ(roll.timesigs(), (std::vector<TimeSignatureEvent>{{0, {3, 4}}}));
    EXPECT_NO_THROW(validate(roll));
  }
}

TEST(Synthetic, NoChordsMeansMonophonic) {
  SynthParams p;
  p.pieces = 20;
  p.chord_prob = 0;
  for (const Pianoroll& roll : generate_synthetic(p)) EXPECT_EQ(polyphony_rate(roll), 0.0);
}

TEST(Synthetic, SustainedChordsOnEveryBeatAreFullyPolyphonic) {
  SynthParams p;
  p.pieces = 20;
  p.chord_prob = 1;
  p.chord_length = p.subdivisions;
  for (const Pianoroll& roll : generate_synthetic(p)) EXPECT_EQ(polyphony_rate(roll), 1.0);
}

TEST(Synthetic, EmptyBlocksAtBothEndsAndInside) {
  SynthParams p;
  p.pieces = 50;
  const EncodingConfig cfg;
  const int k = (kPianoKeys + cfg.block_height - 1) / cfg.block_height;
  for (const Pianoroll& roll : generate_synthetic(p)) {
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    for (int t = 0; t < roll.steps(); ++t) {
      for (int r = 0; r < kPianoKeys; ++r) {
        if (roll.at(r, t)) used[static_cast<std::size_t>(r / cfg.block_height)] = true;
      }
    }
    const auto first = std::find(used.begin(), used.end(), true);
    const auto last = std::find(used.rbegin(), used.rend(), true).base();
    ASSERT_NE(first, used.end());
    EXPECT_GT(first - used.begin(), 0);
    EXPECT_LT(last - used.begin(), k);
    EXPECT_NE(std::find(first, last, false), last);
  }
}

TEST(Synthetic, ParameterValidation) {
  auto bad = [](auto edit) {
    SynthParams p;
    edit(p);
    try {
      validate(p);
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigInvariantViolation;
    }
    return false;
  };
  EXPECT_TRUE(bad([](SynthParams& p) { p.pieces = 0; }));
  EXPECT_TRUE(bad([](SynthParams& p) { p.bars = 0; }));
  EXPECT_TRUE(bad([](SynthParams& p) { p.chord_prob = 1.5; }));
  EXPECT_TRUE(bad([](SynthParams& p) { p.density = -0.1; }));
  EXPECT_TRUE(bad([](SynthParams& p) { p.subdivisions = 3; }));
  EXPECT_TRUE(bad([](SynthParams& p) { p.chord_length = 5; }));
  EXPECT_FALSE(bad([](SynthParams&) {}));
}

TEST(LoadPrlDirectory, SortedByName) {
  TempDir dir("prl_dir");
  save_prl(dir.path() / "b.prl", testing::empty_roll(2));
  save_prl(dir.path() / "a.prl", testing::empty_roll(1));
  write_file(dir.path() / "c.txt", {'x'});
  const auto loaded = load_prl_directory(dir.path());
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].first, "a.prl");
  EXPECT_EQ(loaded[1].second.steps(), 128);
}

}  // namespace
}  // namespace prev
