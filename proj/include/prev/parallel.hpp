#pragma once

#include <span>
#include <vector>

#include "prev/baselines.hpp"
#include "prev/codec.hpp"
#include "prev/metrics.hpp"
#include "prev/scheme.hpp"

// Corpus-level kernels. Each piece is independent, so the OpenMP versions
// split the corpus across threads and write results by index; the serial
// versions are the reference they are tested against. Results are identical
// regardless of thread count. A failing piece is rethrown after the loop as
// the lowest-index error, prefixed with its index.

namespace prev::parallel {

std::vector<TokenSequence> encode_corpus(std::span<const Pianoroll> corpus, const Vocabulary& vocab);
std::vector<TokenSequence> remi_corpus(std::span<const Pianoroll> corpus, const RemiParams& params);
std::vector<std::size_t> sequence_lengths(std::span<const Pianoroll> corpus, const Scheme& scheme);
std::vector<std::size_t> bpe_lengths(std::span<const TokenSequence> corpus, const BpeModel& model);
std::vector<PieceMetrics> corpus_metrics(std::span<const Pianoroll> corpus);
/// Pieces whose decode(encode(piece)) differs from the piece.
std::size_t roundtrip_failures(std::span<const Pianoroll> corpus, const Vocabulary& vocab);

}  // namespace prev::parallel

namespace prev::serial {

std::vector<TokenSequence> encode_corpus(std::span<const Pianoroll> corpus, const Vocabulary& vocab);
std::vector<TokenSequence> remi_corpus(std::span<const Pianoroll> corpus, const RemiParams& params);
std::vector<std::size_t> sequence_lengths(std::span<const Pianoroll> corpus, const Scheme& scheme);
std::vector<std::size_t> bpe_lengths(std::span<const TokenSequence> corpus, const BpeModel& model);
std::vector<PieceMetrics> corpus_metrics(std::span<const Pianoroll> corpus);
std::size_t roundtrip_failures(std::span<const Pianoroll> corpus, const Vocabulary& vocab);

}  // namespace prev::serial

namespace prev {

/// Worker count for the parallel kernels; 0 restores the OpenMP default.
void set_worker_count(int workers);

}  // namespace prev
