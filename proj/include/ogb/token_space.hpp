#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ogb/rng.hpp"

namespace ogb {

using TokenId = int32_t;

// A named token vocabulary with a total decode table over [0, size).
// Encoding, when available, is greedy longest-match over the decode strings;
// bytes no piece covers encode to the pad token and are counted as lossy.
class Vocabulary {
 public:
  struct Encoding {
    std::vector<TokenId> ids;
    int lossy_bytes = 0;
  };

  Vocabulary() = default;
  Vocabulary(std::string name, std::vector<std::string> decode_table, TokenId eos_id,
             TokenId pad_id, bool has_encoder = true);

  const std::string& name() const { return name_; }
  TokenId size() const { return static_cast<TokenId>(decode_table_.size()); }
  TokenId eos_id() const { return eos_id_; }
  TokenId pad_id() const { return pad_id_; }
  bool has_encoder() const { return has_encoder_; }

  const std::string& piece(TokenId id) const;
  std::string decode(std::span<const TokenId> ids) const;
  Encoding encode(std::string_view text) const;

  // Deterministic 512-token desk vocabulary: pad, eos, 40 English words,
  // a space token, the printable ASCII characters, then two-letter syllables.
  static Vocabulary simulated512();

  // Versioned id -> string table, one token per line.
  static Vocabulary load_file(const std::string& path);
  void save_file(const std::string& path) const;

  // First and last word-token ids in the simulated table (used when drawing
  // trigger tokens for desk-scale victims).
  static constexpr TokenId kSimWordFirst = 2;
  static constexpr TokenId kSimWordCount = 40;

 private:
  void build_encoder_index();

  std::string name_;
  std::vector<std::string> decode_table_;
  TokenId eos_id_ = 0;
  TokenId pad_id_ = 0;
  bool has_encoder_ = true;
  // Piece ids bucketed by first byte, longest (then lowest id) first.
  std::array<std::vector<TokenId>, 256> by_first_byte_{};
};

// Ordered token ids within one vocabulary.
struct TokenSequence {
  const Vocabulary* vocab = nullptr;
  std::vector<TokenId> ids;

  TokenSequence() = default;
  TokenSequence(const Vocabulary& v, std::vector<TokenId> token_ids);

  size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  std::string decode() const;
};

// Subset of a vocabulary with O(1) membership and uniform sampling.
class TokenSet {
 public:
  TokenSet() = default;
  TokenSet(const Vocabulary& v, std::vector<TokenId> members);

  const Vocabulary* vocab() const { return vocab_; }
  const std::vector<TokenId>& ids() const { return ids_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(TokenId id) const {
    return id >= 0 && id < static_cast<TokenId>(mask_.size()) && mask_[id] != 0;
  }
  TokenId sample(Rng& rng) const { return ids_[rng.below(ids_.size())]; }

 private:
  const Vocabulary* vocab_ = nullptr;
  std::vector<TokenId> ids_;  // sorted ascending
  std::vector<uint8_t> mask_;
};

struct LengthBounds {
  int min_len = 1;
  int max_len = 1;
  LengthBounds() = default;
  LengthBounds(int lo, int hi);
};

// Word-like ids: decoded form non-empty, pure ASCII, alphabetic only, and
// lowercase form present in the word list. EOS and PAD are always excluded.
// Throws ConfigError when the resulting set is empty.
TokenSet build_wordlike_subset(const Vocabulary& vocab,
                               const std::unordered_set<std::string>& wordlist);

// Every id except EOS and PAD.
TokenSet build_alltoken_subset(const Vocabulary& vocab);

// Clamp a sequence into [min_len, max_len]: truncate to max_len, or pad up to
// min_len with uniform draws from `allowed`. In-bounds input is unchanged.
TokenSequence project_length(const TokenSequence& seq, const LengthBounds& bounds,
                             const TokenSet& allowed, Rng& rng);

struct BridgeResult {
  TokenSequence tokens;
  int lossy_bytes = 0;  // bytes the target could not represent (pad substituted)
};

// Re-encode a prefix under another vocabulary by round-tripping through its
// decoded byte string. Throws BridgeError when the target has no encoder.
BridgeResult bridge_tokens(const TokenSequence& prefix, const Vocabulary& target);

// One lowercase word per line, blank lines ignored.
std::unordered_set<std::string> load_wordlist(const std::string& path);

// Fixed word pool shared by the simulated vocabulary and the bundled word
// list; the first kSimWordCount entries decode from ids 2..41 of sim512.
std::span<const std::string_view> simulated_word_table();

}  // namespace ogb
