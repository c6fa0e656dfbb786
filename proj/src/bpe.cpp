#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>

#include "prev/baselines.hpp"
#include "prev/error.hpp"
#include "prev/hash.hpp"

namespace prev {
namespace {

std::uint64_t pair_key(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

// One left-to-right pass replacing non-overlapping (left, right) pairs.
std::size_t merge_pass(std::vector<TokenId>& ids, const BpeMerge& m) {
  std::size_t out = 0, replaced = 0;
  for (std::size_t i = 0; i < ids.size();) {
    if (i + 1 < ids.size() && ids[i] == m.left && ids[i + 1] == m.right) {
      ids[out++] = m.merged;
      i += 2;
      ++replaced;
    } else {
      ids[out++] = ids[i++];
    }
  }
  ids.resize(out);
  return replaced;
}

}  // namespace

BpeModel bpe_train(std::span<const TokenSequence> corpus, std::size_t merges,
                   std::size_t base_size) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "BPE needs at least one sequence");
  BpeModel model;
  model.base_hash = corpus.front().config_hash;
  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(corpus.size());
  TokenId max_id = 0;
  for (const TokenSequence& s : corpus) {
    if (s.config_hash != model.base_hash) {
      throw Error(ErrorCode::MixedVocabularies, "corpus mixes token vocabularies");
    }
    for (TokenId id : s.ids) max_id = std::max(max_id, id);
    seqs.push_back(s.ids);
  }
  model.base_size = base_size ? base_size : static_cast<std::size_t>(max_id) + 1;
  if (max_id >= model.base_size) {
    throw Error(ErrorCode::UnknownToken, "corpus id " + std::to_string(max_id) +
                                             " is outside the base vocabulary");
  }

  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  while (model.merges.size() < merges) {
    counts.clear();
    for (const auto& ids : seqs) {
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) ++counts[pair_key(ids[i], ids[i + 1])];
    }
    std::uint64_t best_key = 0;
    std::uint32_t best = 0;
    for (const auto& [key, count] : counts) {
      if (count > best || (count == best && key < best_key)) {
        best = count;
        best_key = key;
      }
    }
    if (best < 2) break;
    const BpeMerge m{static_cast<TokenId>(best_key >> 32), static_cast<TokenId>(best_key),
                     static_cast<TokenId>(model.base_size + model.merges.size())};
    for (auto& ids : seqs) merge_pass(ids, m);
    model.merges.push_back(m);
  }
  return model;
}

TokenSequence bpe_apply(const BpeModel& model, const TokenSequence& tokens) {
  if (tokens.config_hash != model.base_hash) {
    throw Error(ErrorCode::ConfigHashMismatch, "sequence is not over the model's base vocabulary");
  }
  if (model.base_size) {
    for (TokenId id : tokens.ids) {
      if (id >= model.base_size) {
        throw Error(ErrorCode::UnknownToken, "id " + std::to_string(id) + " is not a base token");
      }
    }
  }
  TokenSequence out = tokens;
  for (const BpeMerge& m : model.merges) merge_pass(out.ids, m);
  return out;
}

TokenSequence bpe_decode(const BpeModel& model, const TokenSequence& tokens) {
  if (tokens.config_hash != model.base_hash) {
    throw Error(ErrorCode::ConfigHashMismatch, "sequence is not over the model's vocabulary");
  }
  const std::size_t first_merged = model.merges.empty() ? 0 : model.merges.front().merged;
  TokenSequence out = tokens;
  out.ids.clear();
  out.ids.reserve(tokens.ids.size() * 2);
  std::vector<TokenId> stack;
  for (TokenId id : tokens.ids) {
    stack.push_back(id);
    while (!stack.empty()) {
      const TokenId top = stack.back();
      stack.pop_back();
      if (model.base_size && top >= model.vocab_size()) {
        throw Error(ErrorCode::UnknownToken, "id " + std::to_string(top) + " is past the merged vocabulary");
      }
      if (model.merges.empty() || top < first_merged) {
        out.ids.push_back(top);
        continue;
      }
      const std::size_t idx = top - first_merged;
      if (idx >= model.merges.size()) {
        throw Error(ErrorCode::UnknownToken, "id " + std::to_string(top) + " is past the merged vocabulary");
      }
      stack.push_back(model.merges[idx].right);
      stack.push_back(model.merges[idx].left);
    }
  }
  return out;
}

std::string write_bpe_model(const BpeModel& model) {
  std::ostringstream s;
  s << "#bpe v1 base=" << to_hex(model.base_hash) << " merges=" << model.merges.size() << '\n';
  for (const BpeMerge& m : model.merges) s << m.left << ' ' << m.right << ' ' << m.merged << '\n';
  return s.str();
}

BpeModel read_bpe_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic, version, base, count;
  in >> magic >> version >> base >> count;
  if (magic != "#bpe" || version != "v1" || base.rfind("base=", 0) != 0 ||
      count.rfind("merges=", 0) != 0) {
    throw Error(ErrorCode::BadMagic, "not a bpe v1 model");
  }
  BpeModel model;
  std::size_t n = 0;
  const std::string hex = base.substr(5);
  const std::string num = count.substr(7);
  if (std::from_chars(hex.data(), hex.data() + hex.size(), model.base_hash, 16).ec != std::errc() ||
      std::from_chars(num.data(), num.data() + num.size(), n).ec != std::errc()) {
    throw Error(ErrorCode::InvariantViolation, "bad bpe header");
  }
  for (std::size_t i = 0; i < n; ++i) {
    BpeMerge m;
    if (!(in >> m.left >> m.right >> m.merged)) {
      throw Error(ErrorCode::TruncatedFile, "bpe model lists fewer merges than declared");
    }
    model.merges.push_back(m);
  }
  if (!model.merges.empty()) {
    model.base_size = model.merges.front().merged;
    for (std::size_t i = 0; i < n; ++i) {
      const BpeMerge& m = model.merges[i];
      if (m.merged != model.base_size + i || m.left >= m.merged || m.right >= m.merged) {
        throw Error(ErrorCode::InvariantViolation, "bpe merges are not contiguous");
      }
    }
  }
  return model;
}

}  // namespace prev
