#pragma once

// The discrete latent space: a small closed vocabulary with punctuation
// flags, special tokens, and a whitespace word-level tokenizer for the
// synthetic captions.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dedi/common.hpp"

namespace dedi {

class Vocabulary {
 public:
  // Token order: specials, punctuation, digits, attributes, fillers; each
  // block sorted lexicographically (specials keep their fixed order).
  static Vocabulary build(const std::vector<std::string>& attribute_lexicon,
                          const std::vector<std::string>& filler_words,
                          const std::vector<std::string>& digits,
                          const std::vector<std::string>& punctuation_set);

  // The desk default: 128 tokens, 8 of them punctuation.
  static Vocabulary default_desk();

  int64_t size() const { return static_cast<int64_t>(tokens_.size()); }
  const std::string& token(int64_t id) const { return tokens_.at(id); }
  int64_t id(const std::string& token) const;
  bool contains(const std::string& token) const {
    return ids_.count(token) != 0;
  }

  bool is_punctuation(int64_t id) const { return punct_.at(id); }
  bool is_special(int64_t id) const {
    return id == sos_ || id == eos_ || id == pad_;
  }
  bool is_content(int64_t id) const {
    return !is_punctuation(id) && !is_special(id);
  }

  int64_t sos() const { return sos_; }
  int64_t eos() const { return eos_; }
  int64_t pad() const { return pad_; }
  const std::vector<int64_t>& content_ids() const { return content_ids_; }
  int64_t punctuation_count() const { return punct_count_; }

  // UTF-8 file format: "#punct:<ids>" and "#special:<sos>,<eos>,<pad>"
  // header lines, then one token per line in id order.
  std::string serialize() const;
  static Vocabulary deserialize(const std::string& text);

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::vector<bool> punct_;
  std::unordered_map<std::string, int64_t> ids_;
  std::vector<int64_t> content_ids_;
  int64_t sos_ = -1, eos_ = -1, pad_ = -1;
  int64_t punct_count_ = 0;

  void index();
};

// A fixed-length-or-shorter discrete token sequence. Soft sequences carry a
// per-position distribution over the vocabulary (row-stochastic, used by the
// contract tests; the differentiable training path passes tensors directly).
struct TokenSequence {
  std::vector<int64_t> ids;
  bool hard = true;
  std::vector<float> soft;  // [ids.size() x vocab] when !hard
  int64_t vocab = 0;

  int64_t length() const { return static_cast<int64_t>(ids.size()); }
};

TokenSequence tokenize(const std::string& text, const Vocabulary& vocab);
std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab);

}  // namespace dedi
