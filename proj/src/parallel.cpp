#include "prev/parallel.hpp"

#include <exception>
#include <string>

#include <omp.h>

#include "prev/error.hpp"

namespace prev {
namespace {

void rethrow_with_index(std::exception_ptr error, std::size_t index) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    throw Error(e.code(), "piece " + std::to_string(index) + ": " + e.detail());
  }
}

template <typename Fn>
void for_each_parallel(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) rethrow_with_index(errors[i], i);
  }
}

template <typename Fn>
void for_each_serial(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      rethrow_with_index(std::current_exception(), i);
    }
  }
}

}  // namespace

void set_worker_count(int workers) {
  omp_set_num_threads(workers > 0 ? workers : omp_get_num_procs());
}

namespace {

template <typename Loop>
struct Kernels {
  Loop loop;

  std::vector<TokenSequence> encode_corpus(std::span<const Pianoroll> corpus,
                                           const Vocabulary& vocab) const {
    std::vector<TokenSequence> out(corpus.size());
    loop(corpus.size(), [&](std::size_t i) { out[i] = encode_pianoroll(corpus[i], vocab); });
    return out;
  }

  std::vector<TokenSequence> remi_corpus(std::span<const Pianoroll> corpus,
                                         const RemiParams& params) const {
    std::vector<TokenSequence> out(corpus.size());
    loop(corpus.size(), [&](std::size_t i) { out[i] = remi_tokenize(corpus[i], params); });
    return out;
  }

  std::vector<std::size_t> sequence_lengths(std::span<const Pianoroll> corpus,
                                            const Scheme& scheme) const {
    std::vector<std::size_t> out(corpus.size());
    loop(corpus.size(), [&](std::size_t i) { out[i] = sequence_length(corpus[i], scheme); });
    return out;
  }

  std::vector<std::size_t> bpe_lengths(std::span<const TokenSequence> corpus,
                                       const BpeModel& model) const {
    std::vector<std::size_t> out(corpus.size());
    loop(corpus.size(), [&](std::size_t i) { out[i] = bpe_apply(model, corpus[i]).ids.size(); });
    return out;
  }

  std::vector<PieceMetrics> corpus_metrics(std::span<const Pianoroll> corpus) const {
    std::vector<PieceMetrics> out(corpus.size());
    loop(corpus.size(), [&](std::size_t i) { out[i] = piece_metrics(corpus[i]); });
    return out;
  }

  std::size_t roundtrip_failures(std::span<const Pianoroll> corpus, const Vocabulary& vocab) const {
    std::vector<std::uint8_t> failed(corpus.size(), 0);
    loop(corpus.size(), [&](std::size_t i) {
      const Pianoroll back = decode_tokens(encode_pianoroll(corpus[i], vocab), vocab);
      failed[i] = !roundtrip_equal(corpus[i], back, vocab.config());
    });
    std::size_t n = 0;
    for (std::uint8_t f : failed) n += f;
    return n;
  }
};

struct ParallelLoop {
  template <typename Fn>
  void operator()(std::size_t n, Fn&& fn) const { for_each_parallel(n, fn); }
};
struct SerialLoop {
  template <typename Fn>
  void operator()(std::size_t n, Fn&& fn) const { for_each_serial(n, fn); }
};

constexpr Kernels<ParallelLoop> kParallel{};
constexpr Kernels<SerialLoop> kSerial{};

}  // namespace

namespace parallel {

std::vector<TokenSequence> encode_corpus(std::span<const Pianoroll> corpus, const Vocabulary& vocab) {
  return kParallel.encode_corpus(corpus, vocab);
}
std::vector<TokenSequence> remi_corpus(std::span<const Pianoroll> corpus, const RemiParams& params) {
  return kParallel.remi_corpus(corpus, params);
}
std::vector<std::size_t> sequence_lengths(std::span<const Pianoroll> corpus, const Scheme& scheme) {
  return kParallel.sequence_lengths(corpus, scheme);
}
std::vector<std::size_t> bpe_lengths(std::span<const TokenSequence> corpus, const BpeModel& model) {
  return kParallel.bpe_lengths(corpus, model);
}
std::vector<PieceMetrics> corpus_metrics(std::span<const Pianoroll> corpus) {
  return kParallel.corpus_metrics(corpus);
}
std::size_t roundtrip_failures(std::span<const Pianoroll> corpus, const Vocabulary& vocab) {
  return kParallel.roundtrip_failures(corpus, vocab);
}

}  // namespace parallel

namespace serial {

std::vector<TokenSequence> encode_corpus(std::span<const Pianoroll> corpus, const Vocabulary& vocab) {
  return kSerial.encode_corpus(corpus, vocab);
}
std::vector<TokenSequence> remi_corpus(std::span<const Pianoroll> corpus, const RemiParams& params) {
  return kSerial.remi_corpus(corpus, params);
}
std::vector<std::size_t> sequence_lengths(std::span<const Pianoroll> corpus, const Scheme& scheme) {
  return kSerial.sequence_lengths(corpus, scheme);
}
std::vector<std::size_t> bpe_lengths(std::span<const TokenSequence> corpus, const BpeModel& model) {
  return kSerial.bpe_lengths(corpus, model);
}
std::vector<PieceMetrics> corpus_metrics(std::span<const Pianoroll> corpus) {
  return kSerial.corpus_metrics(corpus);
}
std::size_t roundtrip_failures(std::span<const Pianoroll> corpus, const Vocabulary& vocab) {
  return kSerial.roundtrip_failures(corpus, vocab);
}

}  // namespace serial

}  // namespace prev
