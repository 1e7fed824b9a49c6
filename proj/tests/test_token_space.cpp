#include <cstdio>
#include <unordered_set>

#include "doctest.h"
#include "ogb/errors.hpp"
#include "ogb/token_space.hpp"

using namespace ogb;

namespace {

Vocabulary tiny_vocab(bool with_c = true) {
  // pad=0, eos=1, then single characters.
  std::vector<std::string> table = {"<pad>", "<eos>", "a", "b"};
  if (with_c) table.push_back("c");
  return Vocabulary("tiny", std::move(table), 1, 0);
}

std::unordered_set<std::string> full_wordlist() {
  std::unordered_set<std::string> words;
  for (auto w : simulated_word_table()) words.insert(std::string(w));
  words.insert("orchard");
  words.insert("thorn");
  return words;
}

}  // namespace

TEST_CASE("simulated vocabulary is total and well formed") {
  const Vocabulary v = Vocabulary::simulated512();
  CHECK(v.size() == 512);
  CHECK(v.eos_id() == 1);
  CHECK(v.pad_id() == 0);
  for (TokenId id = 0; id < v.size(); ++id) CHECK(!v.piece(id).empty());
  CHECK(v.piece(2) == "repeat");
  CHECK(v.piece(42) == " ");
}

TEST_CASE("wordlike subset keeps word tokens and drops everything else") {
  const Vocabulary v = Vocabulary::simulated512();
  const auto words = full_wordlist();
  const TokenSet s = build_wordlike_subset(v, words);
  // Brute-force oracle over the decode table.
  long expected = 0;
  for (TokenId id = 0; id < v.size(); ++id) {
    if (id == v.eos_id() || id == v.pad_id()) continue;
    const std::string& p = v.piece(id);
    bool ok = !p.empty();
    for (unsigned char c : p)
      if (c > 127 || !std::isalpha(c)) ok = false;
    std::string lower = p;
    for (char& c : lower) c = static_cast<char>(std::tolower(c));
    if (ok && words.count(lower)) ++expected;
  }
  CHECK(expected == 40);
  CHECK(static_cast<long>(s.size()) == expected);
  CHECK(s.contains(2));
  CHECK(!s.contains(v.eos_id()));
  CHECK(!s.contains(v.pad_id()));
  CHECK(!s.contains(42));  // space token is not alphabetic
}

TEST_CASE("wordlike filter edge cases") {
  std::vector<std::string> table = {"<pad>", "<eos>", "Repeat", "##ing", "caf\xc3\xa9", "thorn"};
  const Vocabulary v("edge", std::move(table), 1, 0);
  std::unordered_set<std::string> words = {"repeat", "ing", "cafe", "thorn"};
  const TokenSet s = build_wordlike_subset(v, words);
  CHECK(s.contains(2));   // case-insensitive word match
  CHECK(!s.contains(3));  // '#' is not alphabetic
  CHECK(!s.contains(4));  // non-ASCII bytes
  CHECK(s.contains(5));
  CHECK_THROWS_AS(build_wordlike_subset(v, {"zzzq"}), ConfigError);
}

TEST_CASE("alltoken subset excludes only eos and pad") {
  const Vocabulary v = Vocabulary::simulated512();
  const TokenSet s = build_alltoken_subset(v);
  CHECK(s.size() == 510);
  CHECK(!s.contains(v.eos_id()));
  CHECK(!s.contains(v.pad_id()));
  // union with {eos, pad} is the full vocabulary
  std::vector<bool> present(v.size(), false);
  for (TokenId id : s.ids()) present[id] = true;
  present[v.eos_id()] = present[v.pad_id()] = true;
  for (TokenId id = 0; id < v.size(); ++id) CHECK(present[id]);
}

TEST_CASE("wordlike subset is contained in the alltoken subset") {
  const Vocabulary v = Vocabulary::simulated512();
  const TokenSet wordlike = build_wordlike_subset(v, full_wordlist());
  const TokenSet all = build_alltoken_subset(v);
  for (TokenId id : wordlike.ids()) CHECK(all.contains(id));
}

TEST_CASE("project_length truncates, pads, and is idempotent") {
  const Vocabulary v = Vocabulary::simulated512();
  const TokenSet allowed = build_alltoken_subset(v);
  const LengthBounds bounds(3, 7);

  TokenSequence mid(v, {2, 3, 4, 5, 6});
  Rng r1(11);
  CHECK(project_length(mid, bounds, allowed, r1).ids == mid.ids);

  TokenSequence longseq(v, {2, 3, 4, 5, 6, 7, 8, 9, 10});
  Rng r2(11);
  const auto truncated = project_length(longseq, bounds, allowed, r2);
  CHECK(truncated.ids == std::vector<TokenId>({2, 3, 4, 5, 6, 7, 8}));

  TokenSequence shortseq(v, {2});
  Rng r3(99);
  const auto padded = project_length(shortseq, bounds, allowed, r3);
  REQUIRE(padded.ids.size() == 3);
  CHECK(padded.ids[0] == 2);
  // appended ids equal an independent re-draw with the same seed
  Rng replay(99);
  CHECK(padded.ids[1] == allowed.sample(replay));
  CHECK(padded.ids[2] == allowed.sample(replay));

  // idempotence under rng replay
  Rng r4(123), r5(123);
  const auto once = project_length(shortseq, bounds, allowed, r4);
  const auto twice = project_length(once, bounds, allowed, r5);
  CHECK(once.ids == twice.ids);
}

TEST_CASE("project_length always lands inside the bounds") {
  const Vocabulary v = Vocabulary::simulated512();
  const TokenSet allowed = build_alltoken_subset(v);
  const LengthBounds bounds(3, 7);
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TokenId> ids;
    const int len = static_cast<int>(rng.below(12));
    for (int i = 0; i < len; ++i) ids.push_back(static_cast<TokenId>(rng.below(512)));
    const auto projected = project_length(TokenSequence(v, ids), bounds, allowed, rng);
    CHECK(projected.ids.size() >= 3);
    CHECK(projected.ids.size() <= 7);
  }
}

TEST_CASE("encode is greedy longest-match") {
  const Vocabulary v = Vocabulary::simulated512();
  const auto enc = v.encode("repeat the story");
  CHECK(enc.lossy_bytes == 0);
  CHECK(enc.ids[0] == 2);  // "repeat" beats 'r','e',...
  const std::string round = v.decode(enc.ids);
  CHECK(round == "repeat the story");
}

TEST_CASE("bridge_tokens identity, re-encoding and lossy fallback") {
  const Vocabulary v = Vocabulary::simulated512();
  const Vocabulary tiny = tiny_vocab();

  // identity bridge for an injectively decodable sequence
  TokenSequence seq(v, {2, 42, 3});  // "repeat story" with a space
  const auto same = bridge_tokens(seq, v);
  CHECK(same.tokens.ids == seq.ids);
  CHECK(same.lossy_bytes == 0);

  // "abc" under a single-character vocabulary -> 3 tokens
  std::vector<std::string> abc_table = {"<pad>", "<eos>", "abc"};
  const Vocabulary abc("abc", std::move(abc_table), 1, 0);
  const auto bridged = bridge_tokens(TokenSequence(abc, {2}), tiny);
  CHECK(bridged.tokens.ids.size() == 3);
  CHECK(bridged.lossy_bytes == 0);
  CHECK(tiny.decode(bridged.tokens.ids) == "abc");

  // byte absent from the target -> pad substituted and flagged
  const Vocabulary no_c = tiny_vocab(false);
  const auto lossy = bridge_tokens(TokenSequence(abc, {2}), no_c);
  CHECK(lossy.lossy_bytes == 1);
  CHECK(lossy.tokens.ids.back() == no_c.pad_id());

  // round-trip decode matches whenever nothing was replaced
  CHECK(bridge_tokens(seq, v).tokens.decode() == seq.decode());
}

TEST_CASE("bridge into an encoder-less vocabulary fails") {
  std::vector<std::string> table = {"<pad>", "<eos>", "x"};
  const Vocabulary opaque("opaque", std::move(table), 1, 0, /*has_encoder=*/false);
  const Vocabulary v = Vocabulary::simulated512();
  CHECK_THROWS_AS(bridge_tokens(TokenSequence(v, {2}), opaque), BridgeError);
}

TEST_CASE("vocabulary file round-trip") {
  const Vocabulary v = Vocabulary::simulated512();
  const std::string path = "vocab_roundtrip_test.txt";
  v.save_file(path);
  const Vocabulary loaded = Vocabulary::load_file(path);
  CHECK(loaded.name() == v.name());
  CHECK(loaded.size() == v.size());
  CHECK(loaded.eos_id() == v.eos_id());
  CHECK(loaded.pad_id() == v.pad_id());
  for (TokenId id = 0; id < v.size(); ++id) CHECK(loaded.piece(id) == v.piece(id));
  std::remove(path.c_str());
}

TEST_CASE("invariant violations throw") {
  std::vector<std::string> table = {"<pad>", "<eos>"};
  CHECK_THROWS_AS(Vocabulary("bad", table, 0, 0), ConfigError);   // eos == pad
  CHECK_THROWS_AS(Vocabulary("bad", table, 5, 0), ConfigError);   // eos out of range
  CHECK_THROWS_AS(LengthBounds(0, 4), ConfigError);
  CHECK_THROWS_AS(LengthBounds(5, 4), ConfigError);
  const Vocabulary v = Vocabulary::simulated512();
  CHECK_THROWS_AS(TokenSequence(v, {9999}), ConfigError);
}
