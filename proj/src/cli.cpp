#include "prev/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prev/baselines.hpp"
#include "prev/codec.hpp"
#include "prev/corpus.hpp"
#include "prev/error.hpp"
#include "prev/metrics.hpp"
#include "prev/midi.hpp"
#include "prev/parallel.hpp"
#include "prev/prl.hpp"
#include "prev/scheme.hpp"
#include "prev/token_io.hpp"

namespace fs = std::filesystem;

namespace prev::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string as_text(const std::vector<std::uint8_t>& bytes) {
  return {bytes.begin(), bytes.end()};
}

TimeSignature parse_timesig(const std::string& text) {
  const auto slash = text.find('/');
  int num = 0, den = 0;
  try {
    if (slash == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    num = std::stoi(text.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(text);
    den = std::stoi(text.substr(slash + 1), &used);
    if (used != text.size() - slash - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw UsageError("bad time signature '" + text + "', expected n/d");
  }
  return {num, den};
}

std::vector<TimeSignature> parse_timesig_list(const std::string& csv) {
  std::vector<TimeSignature> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_timesig(item));
  return out;
}

struct CodecFlags {
  std::string mode = "full";
  int frame_len = 4;
  int block_height = 2;
  bool no_structure = false;
  std::string timesigs = "4/4,3/4,2/4,6/8";

  EncodingConfig config() const {
    EncodingConfig c;
    const auto m = parse_mode(mode);
    if (!m) throw UsageError("unknown mode '" + mode + "', expected p, pf+, pf or full");
    c.mode = *m;
    c.frame_len = frame_len;
    c.block_height = block_height;
    c.emit_structure = !no_structure;
    c.timesig_set = parse_timesig_list(timesigs);
    validate(c);
    return c;
  }
};

void add_codec_flags(CLI::App* app, CodecFlags& f) {
  app->add_option("--mode", f.mode, "p, pf+, pf or full")->capture_default_str();
  app->add_option("--frame-len", f.frame_len, "frame width L in steps")->capture_default_str();
  app->add_option("--block-height", f.block_height, "block height h in pitches")
      ->capture_default_str();
  app->add_flag("--no-structure", f.no_structure, "omit bar and time-signature tokens");
  app->add_option("--timesigs", f.timesigs, "supported time signatures, comma-separated")
      ->capture_default_str();
}

void add_jobs(CLI::App* app, int& jobs) {
  app->add_option("-j,--jobs", jobs, "worker threads (0 = all cores)")->capture_default_str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, as_bytes(text));
  }
}

std::vector<std::pair<std::string, Pianoroll>> load_rolls(const std::string& path) {
  if (fs::is_directory(path)) return load_prl_directory(path);
  return {{fs::path(path).filename().string(), load_prl(path)}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Mirrors command-line flags: one "key = value" per line, '#' comments.
// Keys are long flag names without the dashes.
std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Pulls --config out of argv and splices the file's flags in right after the
// subcommand name, ahead of the explicit flags so those take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;
  const auto extra = read_config_file(config_path);
  const auto sub = std::find_if(args.begin(), args.end(),
                                [](const std::string& a) { return !a.starts_with("-"); });
  const auto at = sub == args.end() ? args.end() : sub + 1;
  args.insert(at, extra.begin(), extra.end());
  return args;
}

std::string roll_diff(const Pianoroll& a, const Pianoroll& b) {
  std::ostringstream os;
  os << "MISMATCH:";
  if (a.steps() != b.steps()) os << " T " << a.steps() << " vs " << b.steps() << ";";
  if (a.pitches() != b.pitches()) os << " H " << a.pitches() << " vs " << b.pitches() << ";";
  if (a.steps_per_beat() != b.steps_per_beat()) os << " steps_per_beat differs;";
  if (a.timesigs() != b.timesigs()) os << " time signatures differ;";
  if (a.steps() == b.steps() && a.pitches() == b.pitches()) {
    std::size_t cells = 0;
    int first = -1;
    for (int t = 0; t < a.steps(); ++t) {
      for (int p = 0; p < a.pitches(); ++p) {
        if (a.at(p, t) != b.at(p, t)) {
          ++cells;
          if (first < 0) first = t;
        }
      }
    }
    if (cells) os << " " << cells << " cells differ, first at step " << first << ";";
  }
  os << "\n";
  return os.str();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Pianoroll-event encoding toolkit", "prev"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    // Accepted for the help text only; expand_config has already consumed it.
    std::string config_file;
    app.add_option("--config", config_file, "key = value file mirroring the flags");

    setup_midi2roll(app);
    setup_encode(app);
    setup_decode(app);
    setup_roundtrip(app);
    setup_tokenize(app);
    setup_bpe_train(app);
    setup_bpe_apply(app);
    setup_stats(app);
    setup_metrics(app);
    setup_gen_corpus(app);
    setup_vocab(app);

    try {
      args = expand_config(std::move(args));
      std::reverse(args.begin(), args.end());
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out_, err_);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
      app.exit(e, err_, err_);
      err_ << app.help();
      return kExitUsage;
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << "\n" << app.help();
      return kExitUsage;
    }

    try {
      return action_();
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitData;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitData;
    }
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::function<int()> action_;

  // Option storage lives on the runner so the callbacks can read it.
  std::string input_, input2_, output_, scheme_ = "remi", format_ = "text",
                                         schemes_ = "full,p,pf,pf+,remi,midilike,abc";
  CodecFlags codec_;
  int spb_ = kDefaultStepsPerBeat;
  int jobs_ = 0;
  bool binary_ = false, text_ = false, decode_ = false, js_ = false;
  std::size_t merges_ = 100;
  SynthParams synth_;
  std::string synth_timesig_ = "4/4";

  template <typename Fn>
  void on(CLI::App* sub, Fn fn) {
    sub->callback([this, fn] { action_ = fn; });
  }

  void setup_midi2roll(CLI::App& app) {
    auto* sub = app.add_subcommand("midi2roll", "MIDI file or directory to PRL");
    sub->add_option("input", input_, "a .mid file or a directory of them")->required();
    sub->add_option("-o,--output", output_, "PRL file, or output directory for a directory input")
        ->required();
    sub->add_option("--steps-per-beat", spb_, "grid resolution per quarter note")
        ->capture_default_str();
    add_jobs(sub, jobs_);
    on(sub, [this] { return midi2roll(); });
  }

  void setup_encode(CLI::App& app) {
    auto* sub = app.add_subcommand("encode", "PRL to pianoroll-event tokens");
    sub->add_option("input", input_, "PRL file")->required();
    sub->add_option("-o,--output", output_, "token file (stdout when omitted, text only)");
    add_codec_flags(sub, codec_);
    auto* bin = sub->add_flag("--binary", binary_, "write the binary token format");
    auto* txt = sub->add_flag("--text", text_, "write the text token format (default)");
    bin->excludes(txt);
    on(sub, [this] { return encode(); });
  }

  void setup_decode(CLI::App& app) {
    auto* sub = app.add_subcommand("decode", "pianoroll-event tokens to PRL");
    sub->add_option("input", input_, "token file, text or binary")->required();
    sub->add_option("-o,--output", output_, "PRL file")->required();
    add_codec_flags(sub, codec_);
    on(sub, [this] { return decode(); });
  }

  void setup_roundtrip(CLI::App& app) {
    auto* sub = app.add_subcommand("roundtrip", "check decode(encode(roll)) == roll");
    sub->add_option("input", input_, "PRL file")->required();
    add_codec_flags(sub, codec_);
    on(sub, [this] { return roundtrip(); });
  }

  void setup_tokenize(CLI::App& app) {
    auto* sub = app.add_subcommand("tokenize", "PRL to a baseline encoding");
    sub->add_option("input", input_, "PRL file")->required();
    sub->add_option("-o,--output", output_, "output file (stdout when omitted)");
    sub->add_option("--scheme", scheme_, "remi, midilike or abc")
        ->check(CLI::IsMember({"remi", "midilike", "abc"}))
        ->capture_default_str();
    on(sub, [this] { return tokenize(); });
  }

  void setup_bpe_train(CLI::App& app) {
    auto* sub = app.add_subcommand("bpe-train", "learn BPE merges over REMI tokens");
    sub->add_option("input", input_, "PRL file or directory")->required();
    sub->add_option("-o,--output", output_, "model file (stdout when omitted)");
    sub->add_option("--merges", merges_, "merge budget")->capture_default_str();
    add_jobs(sub, jobs_);
    on(sub, [this] { return bpe_train_cmd(); });
  }

  void setup_bpe_apply(CLI::App& app) {
    auto* sub = app.add_subcommand("bpe-apply", "apply or undo a BPE model on a token file");
    sub->add_option("model", input2_, "model file")->required();
    sub->add_option("input", input_, "token file")->required();
    sub->add_option("-o,--output", output_, "token file (stdout when omitted)");
    sub->add_flag("--decode", decode_, "expand merged tokens back to base tokens");
    on(sub, [this] { return bpe_apply_cmd(); });
  }

  void setup_stats(CLI::App& app) {
    auto* sub = app.add_subcommand("stats", "mean length, vocabulary and BDI per scheme");
    sub->add_option("input", input_, "PRL file or directory")->required();
    sub->add_option("--schemes", schemes_,
                    "comma-separated: full,p,pf,pf+,remi,midilike,abc,remi-bpe")
        ->capture_default_str();
    sub->add_option("--bpe-merges", merges_, "merges for remi-bpe")->capture_default_str();
    sub->add_option("--format", format_, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    add_codec_flags(sub, codec_);
    add_jobs(sub, jobs_);
    on(sub, [this] { return stats(); });
  }

  void setup_metrics(CLI::App& app) {
    auto* sub = app.add_subcommand("metrics", "PR/GC/SC per file, or JS similarity of two sets");
    sub->add_option("input", input_, "PRL file or directory")->required();
    sub->add_option("other", input2_, "second directory (with --js)");
    sub->add_flag("--js", js_, "compare the two sets");
    sub->add_option("--format", format_, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    add_jobs(sub, jobs_);
    on(sub, [this] { return metrics(); });
  }

  void setup_gen_corpus(CLI::App& app) {
    auto* sub = app.add_subcommand("gen-corpus", "write a seeded synthetic corpus of PRL files");
    sub->add_option("-o,--output", output_, "output directory")->required();
    sub->add_option("--seed", synth_.seed)->capture_default_str();
    sub->add_option("--pieces", synth_.pieces)->capture_default_str();
    sub->add_option("--bars", synth_.bars)->capture_default_str();
    sub->add_option("--timesig", synth_timesig_)->capture_default_str();
    sub->add_option("--chord-prob", synth_.chord_prob, "triad probability per beat")
        ->capture_default_str();
    sub->add_option("--chord-length", synth_.chord_length, "triad length in subdivisions")
        ->capture_default_str();
    sub->add_option("--half-range", synth_.half_range, "melody walk half-range in semitones")
        ->capture_default_str();
    sub->add_option("--density", synth_.density, "chance a melody slot sounds")
        ->capture_default_str();
    sub->add_option("--subdivisions", synth_.subdivisions, "melody slots per beat")
        ->capture_default_str();
    sub->add_option("--steps-per-beat", synth_.steps_per_beat)->capture_default_str();
    on(sub, [this] { return gen_corpus(); });
  }

  void setup_vocab(CLI::App& app) {
    auto* sub = app.add_subcommand("vocab", "dump the token vocabulary as JSON");
    sub->add_option("-o,--output", output_, "JSON file (stdout when omitted)");
    add_codec_flags(sub, codec_);
    on(sub, [this] { return vocab(); });
  }

  void apply_jobs() const { set_worker_count(jobs_); }

  int midi2roll() {
    apply_jobs();
    if (fs::is_directory(input_)) {
      const IngestResult result = ingest_directory(input_, output_, spb_);
      for (const auto& f : result.failures) err_ << "failed: " << f.source << ": " << f.error << "\n";
      err_ << result.entries.size() << " converted, " << result.failures.size() << " failed\n";
      return result.partial() ? kExitPartial : kExitOk;
    }
    const MidiImport imported = import_midi(read_file(input_), spb_);
    if (imported.dropped_notes) {
      err_ << "warning: dropped " << imported.dropped_notes << " notes outside the piano range\n";
    }
    save_prl(output_, imported.roll);
    return kExitOk;
  }

  int encode() {
    const EncodingConfig config = codec_.config();
    const TokenSequence tokens = encode_pianoroll(load_prl(input_), config);
    if (binary_) {
      if (output_.empty() || output_ == "-") throw UsageError("--binary needs -o <file>");
      write_file(output_, write_tokens_binary(tokens));
    } else {
      write_output(output_, write_tokens_text(tokens), out_);
    }
    return kExitOk;
  }

  int decode() {
    const EncodingConfig config = codec_.config();
    const TokenSequence tokens = read_tokens(read_file(input_));
    save_prl(output_, decode_tokens(tokens, config));
    return kExitOk;
  }

  int roundtrip() {
    const EncodingConfig config = codec_.config();
    const Pianoroll roll = load_prl(input_);
    const Pianoroll back = decode_tokens(encode_pianoroll(roll, config), config);
    if (roundtrip_equal(roll, back, config)) {
      out_ << "OK bit-exact\n";
      return kExitOk;
    }
    out_ << roll_diff(roll, back);
    return kExitData;
  }

  int tokenize() {
    const Pianoroll roll = load_prl(input_);
    if (scheme_ == "abc") {
      write_output(output_, abc_serialize(roll), out_);
    } else if (scheme_ == "remi") {
      write_output(output_, write_tokens_text(remi_tokenize(roll)), out_);
    } else {
      write_output(output_, write_tokens_text(midilike_tokenize(roll)), out_);
    }
    return kExitOk;
  }

  int bpe_train_cmd() {
    apply_jobs();
    std::vector<Pianoroll> rolls;
    for (auto& [name, roll] : load_rolls(input_)) rolls.push_back(std::move(roll));
    const RemiParams params;
    const auto corpus = parallel::remi_corpus(rolls, params);
    const BpeModel model = bpe_train(corpus, merges_, RemiLayout(params).size());
    if (model.merges.size() < merges_) {
      err_ << "stopped after " << model.merges.size() << " merges: no pair occurs twice\n";
    }
    write_output(output_, write_bpe_model(model), out_);
    return kExitOk;
  }

  int bpe_apply_cmd() {
    const BpeModel model = read_bpe_model(as_text(read_file(input2_)));
    const TokenSequence tokens = read_tokens(read_file(input_));
    const TokenSequence result = decode_ ? bpe_decode(model, tokens) : bpe_apply(model, tokens);
    write_output(output_, write_tokens_text(result), out_);
    return kExitOk;
  }

  int stats() {
    apply_jobs();
    const EncodingConfig base = codec_.config();
    std::vector<Scheme> schemes;
    try {
      schemes = parse_schemes(schemes_, base);
    } catch (const Error& e) {
      throw UsageError(e.detail());
    }
    for (auto& s : schemes) s.bpe_merges = merges_;
    std::vector<Pianoroll> rolls;
    for (auto& [name, roll] : load_rolls(input_)) rolls.push_back(std::move(roll));
    const auto rows = corpus_stats(rolls, schemes);
    out_ << (format_ == "json" ? format_efficiency_json(rows) : format_efficiency_text(rows));
    return kExitOk;
  }

  int metrics() {
    apply_jobs();
    if (js_) return js_metrics();
    if (!input2_.empty()) throw UsageError("a second path needs --js");
    const auto rolls = load_rolls(input_);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::string text = "file\tPR\tGC\tSC\n";
    bool partial = false;
    for (const auto& [name, roll] : rolls) {
      try {
        const PieceMetrics m = piece_metrics(roll);
        rows.push_back({{"file", name}, {"pr", m.pr}, {"gc", m.gc}, {"sc", m.sc}});
        text += name + "\t" + format_double(m.pr) + "\t" + format_double(m.gc) + "\t" +
                format_double(m.sc) + "\n";
      } catch (const Error& e) {
        err_ << name << ": " << e.what() << "\n";
        partial = true;
      }
    }
    out_ << (format_ == "json" ? rows.dump(2) + "\n" : text);
    return partial ? kExitPartial : kExitOk;
  }

  int js_metrics() {
    if (input2_.empty()) throw UsageError("--js needs two directories");
    auto collect = [](const std::string& path) {
      std::vector<Pianoroll> rolls;
      for (auto& [name, roll] : load_rolls(path)) rolls.push_back(std::move(roll));
      return parallel::corpus_metrics(rolls);
    };
    const auto a = collect(input_);
    const auto b = collect(input2_);
    const double js = js_similarity(a, b);
    if (format_ == "json") {
      nlohmann::ordered_json j{{"a", input_}, {"b", input2_}, {"pieces_a", a.size()},
                               {"pieces_b", b.size()}, {"js_similarity", js}};
      out_ << j.dump(2) << "\n";
    } else {
      out_ << "JS similarity: " << format_double(js) << "\n";
    }
    return kExitOk;
  }

  int gen_corpus() {
    synth_.timesig = parse_timesig(synth_timesig_);
    const auto corpus = generate_synthetic(synth_);
    std::error_code ec;
    fs::create_directories(output_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + output_ + ": " + ec.message());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "synth_%05zu.prl", i);
      save_prl(fs::path(output_) / name, corpus[i]);
    }
    err_ << corpus.size() << " pieces written to " << output_ << "\n";
    return kExitOk;
  }

  int vocab() {
    const Vocabulary v(codec_.config());
    write_output(output_, v.to_json() + "\n", out_);
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace prev::cli
