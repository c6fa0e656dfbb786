#pragma once

#include <span>
#include <string>
#include <vector>

#include "prev/pianoroll.hpp"
#include "prev/scheme.hpp"

namespace prev {

/// Budget-aware difficulty index: mean_length^2 * sqrt(vocab_size).
/// Throws DomainError on non-positive input.
double bdi(double mean_length, double vocab_size);

/// Fraction of sounding steps with at least two active pitches.
/// Throws EmptyRoll.
double polyphony_rate(const Pianoroll& roll);

/// 1 - mean normalized Hamming distance between onset vectors of adjacent
/// complete bars. An onset is a 0->1 transition of any pitch; step 0 counts
/// when active. Throws TooFewBars with fewer than two complete bars.
double groove_consistency(const Pianoroll& roll);

/// Largest share of active cells whose pitch class lies in one of the 24
/// major / natural-minor scales. Throws EmptyRoll.
double scale_consistency(const Pianoroll& roll);

struct PieceMetrics {
  double pr = 0;
  double gc = 0;
  double sc = 0;

  friend bool operator==(const PieceMetrics&, const PieceMetrics&) = default;
};

PieceMetrics piece_metrics(const Pianoroll& roll);

struct Moments {
  double mean = 0;
  double variance = 0;  // sample (n - 1) variance
};

struct SetSummary {
  Moments pr, gc, sc;
};

/// Throws TooFewSamples with fewer than two pieces.
SetSummary summarize(std::span<const PieceMetrics> pieces);

inline constexpr double kSigmaFloor = 1e-6;
inline constexpr int kJsGridPoints = 4096;

/// Jensen-Shannon divergence (nats) between two normals fitted from moments.
/// Each KL(. || mixture) term is integrated by the trapezoid rule on
/// kJsGridPoints points over mean +- 6 sigma of its own distribution.
double gaussian_js_divergence(const Moments& a, const Moments& b);

/// 100 * exp(-2 * mean JS divergence over PR, GC, SC).
double js_similarity(const SetSummary& a, const SetSummary& b);
double js_similarity(std::span<const PieceMetrics> a, std::span<const PieceMetrics> b);

struct EfficiencyRow {
  std::string scheme;
  double mean_length = 0;
  std::size_t vocab_size = 0;
  double bdi = 0;
  double ratio = 1;  // bdi / reference bdi
};

/// Rows from known (length, V) pairs; ratios are relative to the first row.
std::vector<EfficiencyRow> efficiency_rows(
    std::span<const std::pair<std::string, std::pair<double, std::size_t>>> entries);

/// Tokenizes every piece under every scheme. Ratios are relative to the
/// "full" row when present, else to the first row. Row order follows
/// `schemes`.
std::vector<EfficiencyRow> corpus_stats(std::span<const Pianoroll> corpus,
                                        std::span<const Scheme> schemes);

std::string format_efficiency_text(std::span<const EfficiencyRow> rows);
std::string format_efficiency_json(std::span<const EfficiencyRow> rows);

}  // namespace prev
