#include "dedi/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dedi {

namespace {

const char* kSos = "<sos>";
const char* kEos = "<eos>";
const char* kPad = "<pad>";

}  // namespace

Vocabulary Vocabulary::build(const std::vector<std::string>& attribute_lexicon,
                             const std::vector<std::string>& filler_words,
                             const std::vector<std::string>& digits,
                             const std::vector<std::string>& punctuation_set) {
  Vocabulary v;
  auto add_block = [&](std::vector<std::string> block, bool punct, bool sort) {
    if (sort) std::sort(block.begin(), block.end());
    for (auto& tok : block) {
      if (tok.empty()) throw std::invalid_argument("empty token in vocabulary");
      if (std::any_of(v.tokens_.begin(), v.tokens_.end(),
                      [&](const std::string& t) { return t == tok; }))
        throw std::invalid_argument("duplicate token '" + tok + "' in vocabulary");
      v.tokens_.push_back(tok);
      v.punct_.push_back(punct);
    }
  };
  add_block({kSos, kEos, kPad}, false, false);
  v.sos_ = 0;
  v.eos_ = 1;
  v.pad_ = 2;
  add_block(punctuation_set, true, true);
  add_block(digits, false, true);
  add_block(attribute_lexicon, false, true);
  add_block(filler_words, false, true);
  v.index();
  return v;
}

void Vocabulary::index() {
  ids_.clear();
  content_ids_.clear();
  punct_count_ = 0;
  for (int64_t i = 0; i < size(); ++i) {
    ids_[tokens_[i]] = i;
    if (punct_[i]) ++punct_count_;
    if (!punct_[i] && !is_special(i)) content_ids_.push_back(i);
  }
}

int64_t Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end())
    throw std::invalid_argument("token '" + token + "' not in vocabulary");
  return it->second;
}

Vocabulary Vocabulary::default_desk() {
  std::vector<std::string> attributes = {
      // colors (also used for backgrounds)
      "red", "green", "blue", "yellow", "purple", "orange", "white", "black",
      // shapes
      "circle", "square", "triangle",
      // sizes
      "small", "medium", "large",
      // positions
      "left", "right", "top", "bottom", "center",
      // caption template words
      "background", "and"};
  std::vector<std::string> digits = {"0", "1", "2", "3", "4",
                                     "5", "6", "7", "8", "9"};
  std::vector<std::string> punctuation = {".", ",", "!", "?",
                                          ";", ":", "'", "-"};
  // 86 fillers bring the total to 128 (3 specials + 8 punct + 10 digits + 21
  // attributes + 86 fillers).
  std::vector<std::string> fillers = {
      "a",     "about", "above", "after", "again", "air",   "all",   "almost",
      "also",  "an",    "any",   "area",  "around", "away", "back",  "barn",
      "beach", "bird",  "boat",  "both",  "bridge", "cat",  "city",  "cliff",
      "cloud", "coast", "cold",  "corner", "dark",  "dawn", "day",   "deep",
      "desert", "dog",  "door",  "down",  "dream", "dry",   "dusk",  "each",
      "early", "earth", "east",  "edge",  "empty", "even",  "every", "far",
      "farm",  "fast",  "few",   "field", "fire",  "first", "fish",  "flat",
      "fog",   "forest", "frost", "full", "garden", "glow", "grass", "hazy",
      "hill",  "house", "ice",   "inside", "lake", "land",  "light", "low",
      "meadow", "mist", "moon",  "near",  "night", "north", "ocean", "open",
      "over",  "path",  "pond",  "rain",  "river", "road"};
  return build(attributes, fillers, digits, punctuation);
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  out << "#punct:";
  bool first = true;
  for (int64_t i = 0; i < size(); ++i) {
    if (!punct_[i]) continue;
    if (!first) out << ",";
    out << i;
    first = false;
  }
  out << "\n#special:" << sos_ << "," << eos_ << "," << pad_ << "\n";
  for (const auto& t : tokens_) out << t << "\n";
  return out.str();
}

Vocabulary Vocabulary::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::set<int64_t> punct_ids;
  int64_t sos = -1, eos = -1, pad = -1;
  Vocabulary v;
  bool have_punct = false, have_special = false;
  while (std::getline(in, line)) {
    if (line.rfind("#punct:", 0) == 0) {
      std::string body = line.substr(7);
      std::istringstream ids(body);
      std::string tok;
      while (std::getline(ids, tok, ','))
        if (!tok.empty()) punct_ids.insert(std::stoll(tok));
      have_punct = true;
    } else if (line.rfind("#special:", 0) == 0) {
      std::istringstream ids(line.substr(9));
      std::string tok;
      std::vector<int64_t> sp;
      while (std::getline(ids, tok, ',')) sp.push_back(std::stoll(tok));
      if (sp.size() != 3)
        throw std::invalid_argument("vocabulary: malformed #special header");
      sos = sp[0];
      eos = sp[1];
      pad = sp[2];
      have_special = true;
    } else if (!line.empty()) {
      v.tokens_.push_back(line);
    }
  }
  if (!have_punct || !have_special)
    throw std::invalid_argument("vocabulary: missing header lines");
  v.punct_.assign(v.tokens_.size(), false);
  for (int64_t id : punct_ids) {
    if (id < 0 || id >= v.size())
      throw std::invalid_argument("vocabulary: punctuation id out of range");
    v.punct_[id] = true;
  }
  if (sos < 0 || eos < 0 || pad < 0 || sos >= v.size() || eos >= v.size() ||
      pad >= v.size() || sos == eos || eos == pad || sos == pad)
    throw std::invalid_argument("vocabulary: invalid special ids");
  v.sos_ = sos;
  v.eos_ = eos;
  v.pad_ = pad;
  v.index();
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary to " + path);
  out << serialize();
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read vocabulary from " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

TokenSequence tokenize(const std::string& text, const Vocabulary& vocab) {
  TokenSequence seq;
  seq.vocab = vocab.size();
  std::istringstream in(text);
  std::string word;
  while (in >> word) seq.ids.push_back(vocab.id(word));
  return seq;
}

std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (size_t i = 0; i < seq.ids.size(); ++i) {
    if (i) out += " ";
    out += vocab.token(seq.ids[i]);
  }
  return out;
}

}  // namespace dedi
