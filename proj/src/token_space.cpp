#include "ogb/token_space.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ogb/errors.hpp"

namespace ogb {

namespace {

bool is_ascii(std::string_view s) {
  for (unsigned char c : s)
    if (c > 127) return false;
  return true;
}

bool is_alpha(std::string_view s) {
  for (unsigned char c : s)
    if (!std::isalpha(c)) return false;
  return true;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// \s, \t, \n, \\ escapes keep the vocab file one token per line.
std::string escape_piece(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case ' ': out += "\\s"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_piece(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      switch (s[i]) {
        case 's': out += ' '; break;
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case '\\': out += '\\'; break;
        default: out += s[i];
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

constexpr std::string_view kSimWords[] = {
    "repeat",  "story",   "forever",  "continue", "describe", "explain", "history",
    "number",  "letter",  "count",    "write",    "again",    "never",   "always",
    "ocean",   "mountain", "river",   "forest",   "silver",   "golden",  "market",
    "garden",  "window",  "journey",  "weather",  "morning",  "evening", "answer",
    "question", "teacher", "student", "yellow",   "purple",   "orange",  "circle",
    "square",  "machine", "engine",   "signal",   "memory"};

static_assert(std::size(kSimWords) == Vocabulary::kSimWordCount);

}  // namespace

Vocabulary::Vocabulary(std::string name, std::vector<std::string> decode_table,
                       TokenId eos_id, TokenId pad_id, bool has_encoder)
    : name_(std::move(name)),
      decode_table_(std::move(decode_table)),
      eos_id_(eos_id),
      pad_id_(pad_id),
      has_encoder_(has_encoder) {
  const TokenId n = size();
  if (n <= 0) throw ConfigError("vocabulary is empty");
  if (eos_id_ < 0 || eos_id_ >= n || pad_id_ < 0 || pad_id_ >= n)
    throw ConfigError("eos/pad ids out of range for vocabulary '" + name_ + "'");
  if (eos_id_ == pad_id_) throw ConfigError("eos and pad must be distinct");
  if (has_encoder_) build_encoder_index();
}

void Vocabulary::build_encoder_index() {
  for (auto& bucket : by_first_byte_) bucket.clear();
  for (TokenId id = 0; id < size(); ++id) {
    const std::string& p = decode_table_[id];
    if (p.empty()) continue;
    by_first_byte_[static_cast<unsigned char>(p[0])].push_back(id);
  }
  for (auto& bucket : by_first_byte_) {
    std::sort(bucket.begin(), bucket.end(), [this](TokenId a, TokenId b) {
      const size_t la = decode_table_[a].size(), lb = decode_table_[b].size();
      return la != lb ? la > lb : a < b;
    });
  }
}

const std::string& Vocabulary::piece(TokenId id) const {
  if (id < 0 || id >= size()) throw ConfigError("token id out of range");
  return decode_table_[id];
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += piece(id);
  return out;
}

Vocabulary::Encoding Vocabulary::encode(std::string_view text) const {
  if (!has_encoder_) throw BridgeError("vocabulary '" + name_ + "' has no encoder");
  Encoding enc;
  size_t pos = 0;
  while (pos < text.size()) {
    const auto& bucket = by_first_byte_[static_cast<unsigned char>(text[pos])];
    TokenId matched = -1;
    size_t matched_len = 0;
    for (TokenId id : bucket) {
      const std::string& p = decode_table_[id];
      if (p.size() <= text.size() - pos && text.compare(pos, p.size(), p) == 0) {
        matched = id;
        matched_len = p.size();
        break;  // bucket is longest-first
      }
    }
    if (matched >= 0) {
      enc.ids.push_back(matched);
      pos += matched_len;
    } else {
      enc.ids.push_back(pad_id_);
      enc.lossy_bytes += 1;
      pos += 1;
    }
  }
  return enc;
}

Vocabulary Vocabulary::simulated512() {
  std::vector<std::string> table(512);
  table[0] = "<pad>";
  table[1] = "<eos>";
  TokenId id = kSimWordFirst;
  for (auto w : kSimWords) table[id++] = std::string(w);
  table[id++] = " ";  // id 42
  for (int c = 33; c <= 126; ++c) table[id++] = std::string(1, static_cast<char>(c));
  // Remaining ids decode to two-letter syllables; duplicates are tolerated.
  constexpr char consonants[] = "bcdfghjklmnpqrstvwxyz";
  constexpr char vowels[] = "aeiou";
  for (TokenId k = 0; id < 512; ++id, ++k) {
    std::string syl;
    syl += consonants[k % 21];
    syl += vowels[(k / 21) % 5];
    table[id] = syl;
  }
  return Vocabulary("sim512", std::move(table), /*eos=*/1, /*pad=*/0);
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vocabulary file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("vocabspec 1", 0) != 0)
    throw ConfigError("unsupported vocabulary file version in " + path);
  std::string name;
  TokenId size = 0, eos = -1, pad = -1;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(in, line)) throw ConfigError("truncated vocabulary header: " + path);
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "name") ss >> name;
    else if (key == "size") ss >> size;
    else if (key == "eos") ss >> eos;
    else if (key == "pad") ss >> pad;
    else throw ConfigError("unknown vocabulary header key: " + key);
  }
  std::vector<std::string> table(size);
  std::vector<bool> seen(size, false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ConfigError("malformed vocabulary row: " + line);
    const TokenId id = static_cast<TokenId>(std::stol(line.substr(0, tab)));
    if (id < 0 || id >= size) throw ConfigError("vocabulary row id out of range");
    table[id] = unescape_piece(std::string_view(line).substr(tab + 1));
    seen[id] = true;
  }
  for (TokenId id = 0; id < size; ++id)
    if (!seen[id]) throw ConfigError("vocabulary decode table is not total");
  return Vocabulary(name, std::move(table), eos, pad);
}

void Vocabulary::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write vocabulary file: " + path);
  out << "vocabspec 1\n";
  out << "name " << name_ << "\n";
  out << "size " << size() << "\n";
  out << "eos " << eos_id_ << "\n";
  out << "pad " << pad_id_ << "\n";
  for (TokenId id = 0; id < size(); ++id)
    out << id << '\t' << escape_piece(decode_table_[id]) << '\n';
}

TokenSequence::TokenSequence(const Vocabulary& v, std::vector<TokenId> token_ids)
    : vocab(&v), ids(std::move(token_ids)) {
  for (TokenId id : ids)
    if (id < 0 || id >= v.size()) throw ConfigError("token id out of range for " + v.name());
}

std::string TokenSequence::decode() const {
  return vocab ? vocab->decode(ids) : std::string();
}

TokenSet::TokenSet(const Vocabulary& v, std::vector<TokenId> members)
    : vocab_(&v), ids_(std::move(members)), mask_(v.size(), 0) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (TokenId id : ids_) {
    if (id < 0 || id >= v.size()) throw ConfigError("token set member out of range");
    mask_[id] = 1;
  }
}

LengthBounds::LengthBounds(int lo, int hi) : min_len(lo), max_len(hi) {
  if (lo < 1 || lo > hi) throw ConfigError("invalid length bounds");
}

TokenSet build_wordlike_subset(const Vocabulary& vocab,
                               const std::unordered_set<std::string>& wordlist) {
  if (wordlist.empty()) throw ConfigError("word list is empty");
  std::vector<TokenId> members;
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (id == vocab.eos_id() || id == vocab.pad_id()) continue;
    const std::string& p = vocab.piece(id);
    if (p.empty() || !is_ascii(p) || !is_alpha(p)) continue;
    if (wordlist.count(to_lower(p))) members.push_back(id);
  }
  if (members.empty())
    throw ConfigError("word-like subset is empty; search space would be empty");
  return TokenSet(vocab, std::move(members));
}

TokenSet build_alltoken_subset(const Vocabulary& vocab) {
  std::vector<TokenId> members;
  members.reserve(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id)
    if (id != vocab.eos_id() && id != vocab.pad_id()) members.push_back(id);
  return TokenSet(vocab, std::move(members));
}

TokenSequence project_length(const TokenSequence& seq, const LengthBounds& bounds,
                             const TokenSet& allowed, Rng& rng) {
  if (allowed.empty()) throw ConfigError("allowed token set is empty");
  TokenSequence out = seq;
  const size_t max_len = static_cast<size_t>(bounds.max_len);
  const size_t min_len = static_cast<size_t>(bounds.min_len);
  if (out.ids.size() > max_len) out.ids.resize(max_len);
  while (out.ids.size() < min_len) out.ids.push_back(allowed.sample(rng));
  return out;
}

BridgeResult bridge_tokens(const TokenSequence& prefix, const Vocabulary& target) {
  if (!target.has_encoder())
    throw BridgeError("target vocabulary '" + target.name() + "' cannot encode");
  const std::string text = prefix.decode();
  auto enc = target.encode(text);
  BridgeResult out;
  out.tokens = TokenSequence(target, std::move(enc.ids));
  out.lossy_bytes = enc.lossy_bytes;
  return out;
}

std::unordered_set<std::string> load_wordlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open word list: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

std::span<const std::string_view> simulated_word_table() {
  return std::span<const std::string_view>(kSimWords, std::size(kSimWords));
}

}  // namespace ogb
