#include "prev/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "prev/error.hpp"
#include "prev/parallel.hpp"

namespace prev {
namespace {

constexpr std::array<int, 7> kMajor{0, 2, 4, 5, 7, 9, 11};
constexpr std::array<int, 7> kNaturalMinor{0, 2, 3, 5, 7, 8, 10};

std::vector<std::uint8_t> onset_vector(const Pianoroll& roll, const Measure& bar) {
  std::vector<std::uint8_t> onsets(static_cast<std::size_t>(bar.length), 0);
  for (int s = 0; s < bar.length; ++s) {
    const int t = bar.start + s;
    const auto col = roll.column(t);
    for (int row = 0; row < roll.pitches(); ++row) {
      if (col[row] && (t == 0 || !roll.at(row, t - 1))) {
        onsets[s] = 1;
        break;
      }
    }
  }
  return onsets;
}

Moments moments(std::span<const PieceMetrics> pieces, double PieceMetrics::*field) {
  const double n = static_cast<double>(pieces.size());
  double mean = 0;
  for (const auto& p : pieces) mean += p.*field;
  mean /= n;
  double ss = 0;
  for (const auto& p : pieces) ss += (p.*field - mean) * (p.*field - mean);
  return {mean, ss / (n - 1)};
}

double log_normal_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2 * std::numbers::pi);
}

}  // namespace

double bdi(double mean_length, double vocab_size) {
  if (!(mean_length > 0) || !(vocab_size > 0)) {
    throw Error(ErrorCode::DomainError, "BDI needs positive length and vocabulary size");
  }
  return mean_length * mean_length * std::sqrt(vocab_size);
}

double polyphony_rate(const Pianoroll& roll) {
  std::size_t sounding = 0, poly = 0;
  for (int t = 0; t < roll.steps(); ++t) {
    const auto col = roll.column(t);
    const auto active = std::count(col.begin(), col.end(), std::uint8_t{1});
    sounding += active >= 1;
    poly += active >= 2;
  }
  if (sounding == 0) throw Error(ErrorCode::EmptyRoll, "polyphony rate of a silent roll");
  return static_cast<double>(poly) / static_cast<double>(sounding);
}

double groove_consistency(const Pianoroll& roll) {
  auto bars = roll.measures();
  std::erase_if(bars, [&](const Measure& m) { return m.end() > roll.steps(); });
  if (bars.size() < 2) {
    throw Error(ErrorCode::TooFewBars, "groove consistency needs two complete bars, got " +
                                           std::to_string(bars.size()));
  }
  std::vector<std::vector<std::uint8_t>> onsets;
  for (const Measure& bar : bars) onsets.push_back(onset_vector(roll, bar));
  double total = 0;
  for (std::size_t b = 0; b + 1 < onsets.size(); ++b) {
    const auto& x = onsets[b];
    const auto& y = onsets[b + 1];
    const std::size_t width = std::max(x.size(), y.size());
    std::size_t diff = 0;
    for (std::size_t s = 0; s < width; ++s) {
      const std::uint8_t a = s < x.size() ? x[s] : 0;
      const std::uint8_t c = s < y.size() ? y[s] : 0;
      diff += a != c;
    }
    total += static_cast<double>(diff) / static_cast<double>(width);
  }
  return 1.0 - total / static_cast<double>(onsets.size() - 1);
}

double scale_consistency(const Pianoroll& roll) {
  std::array<std::size_t, 12> per_class{};
  std::size_t total = 0;
  for (int t = 0; t < roll.steps(); ++t) {
    const auto col = roll.column(t);
    for (int row = 0; row < roll.pitches(); ++row) {
      if (!col[row]) continue;
      ++per_class[(row + kLowestPitch) % 12];
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorCode::EmptyRoll, "scale consistency of a silent roll");
  std::size_t best = 0;
  for (int root = 0; root < 12; ++root) {
    for (const auto* scale : {&kMajor, &kNaturalMinor}) {
      std::size_t in_scale = 0;
      for (int degree : *scale) in_scale += per_class[(root + degree) % 12];
      best = std::max(best, in_scale);
    }
  }
  return static_cast<double>(best) / static_cast<double>(total);
}

PieceMetrics piece_metrics(const Pianoroll& roll) {
  return {polyphony_rate(roll), groove_consistency(roll), scale_consistency(roll)};
}

SetSummary summarize(std::span<const PieceMetrics> pieces) {
  if (pieces.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "need at least two pieces per set, got " +
                                              std::to_string(pieces.size()));
  }
  return {moments(pieces, &PieceMetrics::pr), moments(pieces, &PieceMetrics::gc),
          moments(pieces, &PieceMetrics::sc)};
}

double gaussian_js_divergence(const Moments& a, const Moments& b) {
  const double sa = std::max(std::sqrt(std::max(a.variance, 0.0)), kSigmaFloor);
  const double sb = std::max(std::sqrt(std::max(b.variance, 0.0)), kSigmaFloor);
  // KL(p || m) taken over p's own window, so narrow peaks are always resolved.
  auto half = [&](double mean, double sigma, auto&& log_self) {
    const double lo = mean - 6 * sigma;
    const double dx = 12 * sigma / (kJsGridPoints - 1);
    double sum = 0;
    for (int i = 0; i < kJsGridPoints; ++i) {
      const double x = lo + dx * i;
      const double lp = log_normal_pdf(x, a.mean, sa);
      const double lq = log_normal_pdf(x, b.mean, sb);
      const double top = std::max(lp, lq);
      const double lm = top + std::log(std::exp(lp - top) + std::exp(lq - top)) - std::numbers::ln2;
      const double ls = log_self(lp, lq);
      const double f = std::exp(ls) * (ls - lm);
      sum += (i == 0 || i == kJsGridPoints - 1) ? 0.5 * f : f;
    }
    return sum * dx;
  };
  const double kl_a = half(a.mean, sa, [](double lp, double) { return lp; });
  const double kl_b = half(b.mean, sb, [](double, double lq) { return lq; });
  return std::clamp(0.5 * (kl_a + kl_b), 0.0, std::numbers::ln2);
}

double js_similarity(const SetSummary& a, const SetSummary& b) {
  const double mean = (gaussian_js_divergence(a.pr, b.pr) + gaussian_js_divergence(a.gc, b.gc) +
                       gaussian_js_divergence(a.sc, b.sc)) /
                      3.0;
  return 100.0 * std::exp(-2.0 * mean);
}

double js_similarity(std::span<const PieceMetrics> a, std::span<const PieceMetrics> b) {
  return js_similarity(summarize(a), summarize(b));
}

std::vector<EfficiencyRow> efficiency_rows(
    std::span<const std::pair<std::string, std::pair<double, std::size_t>>> entries) {
  std::vector<EfficiencyRow> rows;
  for (const auto& [name, lv] : entries) {
    rows.push_back({name, lv.first, lv.second, bdi(lv.first, static_cast<double>(lv.second)), 1});
  }
  for (auto& r : rows) r.ratio = r.bdi / rows.front().bdi;
  return rows;
}

std::vector<EfficiencyRow> corpus_stats(std::span<const Pianoroll> corpus,
                                        std::span<const Scheme> schemes) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus_stats needs at least one piece");
  std::vector<EfficiencyRow> rows;
  for (const Scheme& scheme : schemes) {
    std::vector<std::size_t> lengths;
    std::size_t vocab = scheme_vocab_size(scheme);
    if (scheme.kind == SchemeKind::RemiBpe) {
      const auto remi = parallel::remi_corpus(corpus, scheme.remi);
      const BpeModel model = bpe_train(remi, scheme.bpe_merges, vocab);
      vocab = model.vocab_size();
      lengths = parallel::bpe_lengths(remi, model);
    } else {
      lengths = parallel::sequence_lengths(corpus, scheme);
    }
    double total = 0;
    for (std::size_t n : lengths) total += static_cast<double>(n);
    const double mean = total / static_cast<double>(lengths.size());
    rows.push_back({scheme.name, mean, vocab, bdi(mean, static_cast<double>(vocab)), 1});
  }
  if (rows.empty()) return rows;
  double reference = rows.front().bdi;
  for (const auto& r : rows) {
    if (r.scheme == "full") {
      reference = r.bdi;
      break;
    }
  }
  for (auto& r : rows) r.ratio = r.bdi / reference;
  return rows;
}

std::string format_efficiency_text(std::span<const EfficiencyRow> rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %12s %8s %14s %10s\n", "Method", "l", "V",
                "BDI (x1e7)", "vs. ref");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-14s %12.1f %8zu %14.3f %9.2fx\n", r.scheme.c_str(),
                  r.mean_length, r.vocab_size, r.bdi / 1e7, r.ratio);
    out += line;
  }
  return out;
}

std::string format_efficiency_json(std::span<const EfficiencyRow> rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j.push_back({{"scheme", r.scheme},
                 {"mean_length", r.mean_length},
                 {"vocab_size", r.vocab_size},
                 {"bdi", r.bdi},
                 {"ratio", r.ratio}});
  }
  return j.dump(2) + "\n";
}

}  // namespace prev
