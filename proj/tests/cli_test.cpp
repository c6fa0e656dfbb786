#include "prev/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prev/prl.hpp"
#include "prev/token_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace prev {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prev_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string roll_file() {
    std::mt19937_64 rng(9);
    save_prl(path("roll.prl"), testing::random_roll(rng, {.max_bars = 6}));
    return path("roll.prl");
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"encode"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"encode", "x.prl", "--binary", "--text"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"encode", roll_file(), "--mode", "pff"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"decode", "x.tok"}).code, cli::kExitUsage);
}

TEST_F(CliTest, DataErrors) {
  const Result r = run_cli({"encode", path("missing.prl")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST_F(CliTest, EncodeDecodeRoundTrip) {
  const std::string roll = roll_file();
  ASSERT_EQ(run_cli({"encode", roll, "-o", path("t.tok")}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"decode", path("t.tok"), "-o", path("back.prl")}).code, cli::kExitOk);
  EXPECT_EQ(slurp(roll), slurp(path("back.prl")));

  ASSERT_EQ(run_cli({"encode", roll, "--binary", "-o", path("t.bin")}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"decode", path("t.bin"), "-o", path("back2.prl")}).code, cli::kExitOk);
  EXPECT_EQ(slurp(roll), slurp(path("back2.prl")));
}

TEST_F(CliTest, EncodeToStdout) {
  const Result r = run_cli({"encode", roll_file(), "--mode", "pf"});
  ASSERT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out.rfind("#prev-tokens v1 config=", 0), 0u);
}

TEST_F(CliTest, DecodeUnderWrongConfig) {
  const std::string roll = roll_file();
  ASSERT_EQ(run_cli({"encode", roll, "-o", path("t.tok")}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"decode", path("t.tok"), "-o", path("b.prl"), "--mode", "pf"}).code,
            cli::kExitData);
}

TEST_F(CliTest, Roundtrip) {
  const std::string roll = roll_file();
  for (const char* mode : {"p", "pf+", "pf", "full"}) {
    const Result r = run_cli({"roundtrip", roll, "--mode", mode});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(r.out, "OK bit-exact\n");
  }
}

TEST_F(CliTest, Tokenize) {
  save_prl(path("q.prl"), testing::empty_roll(1));
  const Result abc = run_cli({"tokenize", path("q.prl"), "--scheme", "abc"});
  ASSERT_EQ(abc.code, cli::kExitOk);
  EXPECT_EQ(abc.out, "X:1\nM:4/4\nL:1/64\nK:C\nz64 |\n");
  const Result remi = run_cli({"tokenize", path("q.prl"), "--scheme", "remi"});
  ASSERT_EQ(remi.code, cli::kExitOk);
  EXPECT_NE(remi.out.find("\n217\n0\n"), std::string::npos);
  EXPECT_EQ(run_cli({"tokenize", path("q.prl"), "--scheme", "xml"}).code, cli::kExitUsage);
}

TEST_F(CliTest, GenCorpusStatsAndMetrics) {
  ASSERT_EQ(run_cli({"gen-corpus", "-o", path("a"), "--pieces", "6", "--bars", "4"}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"gen-corpus", "-o", path("b"), "--pieces", "6", "--bars", "4", "--seed", "5",
                     "--chord-prob", "0.1"})
                .code,
            cli::kExitOk);
  EXPECT_TRUE(fs::exists(path("a/synth_00000.prl")));
  EXPECT_TRUE(fs::exists(path("a/synth_00005.prl")));

  const Result text = run_cli({"stats", path("a"), "--schemes", "full,remi"});
  ASSERT_EQ(text.code, cli::kExitOk) << text.err;
  EXPECT_NE(text.out.find("full"), std::string::npos);
  EXPECT_NE(text.out.find("remi"), std::string::npos);

  const Result json = run_cli({"stats", path("a"), "--schemes", "full,p,remi-bpe", "--bpe-merges", "5",
                               "--format", "json"});
  ASSERT_EQ(json.code, cli::kExitOk) << json.err;
  const auto rows = nlohmann::json::parse(json.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["vocab_size"], 347);
  EXPECT_EQ(rows[1]["vocab_size"], 261);
  EXPECT_EQ(rows[2]["vocab_size"], 221 + 5);

  const Result per_file = run_cli({"metrics", path("a")});
  ASSERT_EQ(per_file.code, cli::kExitOk) << per_file.err;
  EXPECT_EQ(per_file.out.rfind("file\tPR\tGC\tSC\n", 0), 0u);
  EXPECT_EQ(std::count(per_file.out.begin(), per_file.out.end(), '\n'), 7);

  const Result self = run_cli({"metrics", "--js", path("a"), path("a")});
  ASSERT_EQ(self.code, cli::kExitOk) << self.err;
  EXPECT_EQ(self.out, "JS similarity: 100.000000\n");
  const Result js = run_cli({"metrics", "--js", path("a"), path("b"), "--format", "json"});
  ASSERT_EQ(js.code, cli::kExitOk) << js.err;
  const double sim = nlohmann::json::parse(js.out)["js_similarity"];
  EXPECT_GT(sim, 0.0);
  EXPECT_LT(sim, 100.0);
}

TEST_F(CliTest, MetricsPartialOnUnscorableFile) {
  fs::create_directories(path("m"));
  save_prl(path("m/silent.prl"), testing::empty_roll(2));
  save_prl(path("m/good.prl"), testing::repeated_bars_roll());
  const Result r = run_cli({"metrics", path("m")});
  EXPECT_EQ(r.code, cli::kExitPartial);
  EXPECT_NE(r.out.find("good.prl\t0.000000\t1.000000\t"), std::string::npos);
  EXPECT_NE(r.err.find("silent.prl"), std::string::npos);
}

TEST_F(CliTest, BpeTrainAndApply) {
  ASSERT_EQ(run_cli({"gen-corpus", "-o", path("c"), "--pieces", "5", "--bars", "2"}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"bpe-train", path("c"), "--merges", "8", "-o", path("m.bpe")}).code, cli::kExitOk);
  EXPECT_EQ(slurp(path("m.bpe")).rfind("#bpe v1", 0), 0u);
  ASSERT_EQ(run_cli({"tokenize", path("c/synth_00000.prl"), "--scheme", "remi", "-o", path("r.tok")}).code,
            cli::kExitOk);
  ASSERT_EQ(run_cli({"bpe-apply", path("m.bpe"), path("r.tok"), "-o", path("r.bpe")}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"bpe-apply", path("m.bpe"), path("r.bpe"), "--decode", "-o", path("r2.tok")}).code,
            cli::kExitOk);
  EXPECT_EQ(slurp(path("r.tok")), slurp(path("r2.tok")));
  EXPECT_LT(slurp(path("r.bpe")).size(), slurp(path("r.tok")).size());
}

TEST_F(CliTest, Midi2Roll) {
  const auto midi = testing::SmfBuilder(480).note(60, 0, 480).build();
  fs::create_directories(path("mid"));
  {
    std::ofstream f(path("mid/a.mid"), std::ios::binary);
    f.write(reinterpret_cast<const char*>(midi.data()), static_cast<std::streamsize>(midi.size()));
  }
  ASSERT_EQ(run_cli({"midi2roll", path("mid/a.mid"), "-o", path("a.prl")}).code, cli::kExitOk);
  EXPECT_EQ(load_prl(path("a.prl")).steps(), 64);
  ASSERT_EQ(run_cli({"midi2roll", path("mid"), "-o", path("rolls")}).code, cli::kExitOk);
  EXPECT_TRUE(fs::exists(path("rolls/manifest.jsonl")));
  {
    std::ofstream f(path("mid/bad.mid"), std::ios::binary);
    f << "junk";
  }
  EXPECT_EQ(run_cli({"midi2roll", path("mid"), "-o", path("rolls2")}).code, cli::kExitPartial);
}

TEST_F(CliTest, VocabJson) {
  const Result r = run_cli({"vocab"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.size(), 350u);
  const Result p = run_cli({"vocab", "--mode", "p", "--no-structure"});
  EXPECT_EQ(nlohmann::json::parse(p.out).size(), 3u + 256u);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  {
    std::ofstream f(path("c.cfg"));
    f << "# codec settings\nmode = p\nno-structure = true\n";
  }
  const Result cfg = run_cli({"vocab", "--config", path("c.cfg")});
  ASSERT_EQ(cfg.code, cli::kExitOk) << cfg.err;
  EXPECT_EQ(nlohmann::json::parse(cfg.out).size(), 259u);
  const Result over = run_cli({"vocab", "--config", path("c.cfg"), "--mode", "full"});
  ASSERT_EQ(over.code, cli::kExitOk) << over.err;
  EXPECT_EQ(nlohmann::json::parse(over.out).size(), 3u + 45 + 42 + 255);
  EXPECT_EQ(run_cli({"vocab", "--config", path("none.cfg")}).code, cli::kExitUsage);
}

}  // namespace
}  // namespace prev
