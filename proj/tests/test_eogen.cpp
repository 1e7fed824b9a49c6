#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "doctest.h"
#include "ogb/eogen.hpp"
#include "ogb/errors.hpp"
#include "ogb/victim.hpp"

using namespace ogb;

namespace {

const Vocabulary& vocab() {
  static const Vocabulary v = Vocabulary::simulated512();
  return v;
}

std::unordered_set<std::string> wordlist() {
  std::unordered_set<std::string> words;
  for (auto w : simulated_word_table()) words.insert(std::string(w));
  return words;
}

GenerationResult result_with(long length, std::optional<long> eos_index, bool cap_hit) {
  GenerationResult r;
  r.length = length;
  r.eos_index = eos_index;
  r.cap_hit = cap_hit;
  return r;
}

EvoConfig desk_config(int generations, uint64_t seed) {
  EvoConfig cfg;
  cfg.population_size = 20;
  cfg.generations = generations;
  cfg.selection_fraction = 0.5;
  cfg.mutation_rate = 0.05;
  cfg.bounds = LengthBounds(3, 7);
  cfg.allowed = build_wordlike_subset(vocab(), wordlist());
  cfg.seed = seed;
  cfg.archive_threshold = 256;
  return cfg;
}

}  // namespace

TEST_CASE("fitness matches the closed form") {
  FitnessParams p;
  p.alpha = 2.0;
  p.beta = 5.0;
  p.budget = 100;
  CHECK(fitness(3, result_with(100, std::nullopt, true), p) == doctest::Approx(94.0));
  CHECK(fitness(3, result_with(100, 99, false), p) == doctest::Approx(89.0));
  CHECK(fitness(0, result_with(0, std::nullopt, false), p) == doctest::Approx(0.0));
  // alpha = beta = 0 reduces to L
  FitnessParams zero;
  zero.alpha = 0.0;
  zero.beta = 0.0;
  zero.budget = 100;
  CHECK(fitness(7, result_with(42, 10, false), zero) == doctest::Approx(42.0));
}

TEST_CASE("fitness oracle on random tuples") {
  Rng rng(31337);
  FitnessParams p;
  for (int i = 0; i < 1000; ++i) {
    p.alpha = rng.next_double() * 4.0;
    p.beta = rng.next_double() * 8.0;
    p.budget = 1 + static_cast<long>(rng.below(512));
    const long ell = static_cast<long>(rng.below(8));
    const long len = 1 + static_cast<long>(rng.below(p.budget));
    const bool eos = rng.bernoulli(0.5);
    const std::optional<long> idx = eos ? std::optional<long>(len - 1) : std::nullopt;
    const auto r = result_with(len, idx, !eos && len == p.budget);
    const double direct =
        static_cast<double>(len) - p.alpha * static_cast<double>(ell) -
        (eos ? p.beta * static_cast<double>(p.budget - *idx) : 0.0);
    CHECK(fitness(ell, r, p) == direct);
  }
}

TEST_CASE("init_population construction rules") {
  EvoConfig cfg = desk_config(0, 5);
  SUBCASE("seed with one allowed token") {
    cfg.seed_string = "repeat";
    Rng rng(1);
    const auto pop = init_population(cfg, vocab(), rng);
    CHECK(pop.size() == 20);
    for (const auto& c : pop) {
      CHECK(c.tokens.ids[0] == 2);  // "repeat"
      CHECK(c.tokens.size() >= 3);
      CHECK(c.tokens.size() <= 7);
    }
  }
  SUBCASE("seed with zero allowed tokens gives fully random candidates") {
    cfg.seed_string = "In";  // encodes to single characters, none word-like
    Rng rng(1);
    const auto pop = init_population(cfg, vocab(), rng);
    CHECK(pop.size() == 20);
    for (const auto& c : pop) {
      CHECK(c.tokens.size() >= 3);
      CHECK(c.tokens.size() <= 7);
      for (TokenId id : c.tokens.ids) CHECK(cfg.allowed.contains(id));
    }
  }
  SUBCASE("deterministic under seed") {
    Rng a(9), b(9);
    const auto p1 = init_population(cfg, vocab(), a);
    const auto p2 = init_population(cfg, vocab(), b);
    for (size_t i = 0; i < p1.size(); ++i) CHECK(p1[i].tokens.ids == p2[i].tokens.ids);
  }
}

TEST_CASE("one_point_crossover") {
  Candidate a{TokenSequence(vocab(), {10, 11, 12}), std::nullopt, std::nullopt};
  Candidate b{TokenSequence(vocab(), {20, 21, 22}), std::nullopt, std::nullopt};
  SUBCASE("identical parents give the parent back") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i)
      CHECK(one_point_crossover(a, a, rng).tokens.ids == a.tokens.ids);
  }
  SUBCASE("split point semantics") {
    // find a draw with s = 2 and check the child shape
    Rng rng(3);
    bool saw_s1 = false, saw_s2 = false;
    for (int i = 0; i < 100; ++i) {
      const auto child = one_point_crossover(a, b, rng);
      if (child.tokens.ids == std::vector<TokenId>({10, 21, 22})) saw_s1 = true;
      if (child.tokens.ids == std::vector<TokenId>({10, 11, 22})) saw_s2 = true;
    }
    CHECK(saw_s1);
    CHECK(saw_s2);
  }
  SUBCASE("split distribution is uniform over {1, 2} for length 3") {
    Rng rng(17);
    std::map<size_t, long> counts;
    const long draws = 10000;
    for (long i = 0; i < draws; ++i) {
      const auto child = one_point_crossover(a, b, rng);
      size_t s = 0;
      while (s < 3 && child.tokens.ids[s] == a.tokens.ids[s]) ++s;
      counts[s] += 1;
    }
    CHECK(counts.size() == 2);
    const double expected = draws / 2.0;
    double chi2 = 0.0;
    for (const auto& [s, n] : counts) chi2 += (n - expected) * (n - expected) / expected;
    CHECK(chi2 < 6.635);  // chi-square critical value, 1 dof, p = 0.01
  }
  SUBCASE("short second parent leaves an empty suffix") {
    Candidate shrt{TokenSequence(vocab(), {30}), std::nullopt, std::nullopt};
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
      const auto child = one_point_crossover(a, shrt, rng);
      CHECK(child.tokens.size() >= 1);
      CHECK(child.tokens.size() <= 3);
    }
  }
}

TEST_CASE("mutate") {
  const TokenSet allowed = build_wordlike_subset(vocab(), wordlist());
  Candidate c{TokenSequence(vocab(), {2, 3, 4, 5, 6, 7, 8}), std::nullopt, std::nullopt};
  SUBCASE("mu = 0 is the identity") {
    Rng rng(1);
    CHECK(mutate(c, 0.0, allowed, rng).tokens.ids == c.tokens.ids);
  }
  SUBCASE("mu = 1 redraws every position") {
    Rng rng(1);
    const auto m = mutate(c, 1.0, allowed, rng);
    for (TokenId id : m.tokens.ids) CHECK(allowed.contains(id));
  }
  SUBCASE("replacement count matches the binomial expectation") {
    Rng rng(6);
    const long trials = 100000;
    long replaced = 0;
    for (long t = 0; t < trials; ++t) {
      const auto m = mutate(c, 0.05, allowed, rng);
      for (size_t i = 0; i < c.tokens.size(); ++i)
        if (m.tokens.ids[i] != c.tokens.ids[i]) ++replaced;
    }
    // mean 0.35 per candidate; allow 3 sigma plus the small same-token
    // redraw slack (a mutation can redraw the original token)
    const double mean = static_cast<double>(replaced) / trials;
    const double p_eff = 0.05 * (1.0 - 1.0 / static_cast<double>(allowed.size()));
    const double sigma =
        std::sqrt(7.0 * p_eff * (1.0 - p_eff) / static_cast<double>(trials));
    CHECK(std::abs(mean - 7.0 * p_eff) < 3.0 * sigma);
  }
}

TEST_CASE("evolve basics") {
  const SimulatedVictim victim(VictimProfile::desk_default(vocab(), 7));
  FitnessParams params;
  params.budget = 256;

  SUBCASE("zero generations returns the initial population unevaluated") {
    const EvoConfig cfg = desk_config(0, 5);
    const auto cp = evolve(cfg, victim, params);
    CHECK(cp.generation_index == 0);
    CHECK(cp.population.size() == 20);
    CHECK(cp.best_reward == -std::numeric_limits<double>::infinity());
    for (const auto& c : cp.population) CHECK(!c.reward.has_value());
    CHECK(victim.query_count() == 0);
  }

  SUBCASE("victim call count is exactly P * G") {
    const EvoConfig cfg = desk_config(3, 5);
    const SimulatedVictim v2(VictimProfile::desk_default(vocab(), 7));
    evolve(cfg, v2, params);
    CHECK(v2.query_count() == 20 * 3);
  }

  SUBCASE("identical candidates on a deterministic victim score identically") {
    // hazard pinned to ~1: every continuation is a single EOS token
    VictimProfile pinned = VictimProfile::desk_default(vocab(), 7);
    pinned.base_hazard = 1.0 - 1e-12;
    pinned.hazard_ceiling = 1.0 - 1e-13;
    pinned.trigger_coeff = 0.0;
    pinned.repetition_coeff = 0.0;
    const SimulatedVictim deterministic(pinned);

    EvoConfig cfg = desk_config(1, 5);
    cfg.population_size = 2;
    cfg.bounds = LengthBounds(1, 1);
    cfg.seed_string = "repeat";  // every candidate is exactly [repeat]
    std::vector<double> rewards;
    EvolveHooks hooks;
    hooks.on_eval = [&](const EvalRecord& r) { rewards.push_back(r.reward); };
    evolve(cfg, deterministic, params, hooks);
    REQUIRE(rewards.size() == 2);
    CHECK(rewards[0] == rewards[1]);
  }
}

TEST_CASE("evolve invariants over a short run") {
  const SimulatedVictim victim(VictimProfile::desk_default(vocab(), 7));
  FitnessParams params;
  params.budget = 256;
  EvoConfig cfg = desk_config(10, 21);

  std::vector<double> best_per_generation;
  std::vector<EvalRecord> evals;
  EvolveHooks hooks;
  hooks.on_eval = [&](const EvalRecord& r) { evals.push_back(r); };
  hooks.on_checkpoint = [&](const EvoCheckpoint& cp) {
    best_per_generation.push_back(cp.best_reward);
    for (const auto& c : cp.population) {
      CHECK(c.tokens.size() >= 3);
      CHECK(c.tokens.size() <= 7);
      for (TokenId id : c.tokens.ids) CHECK(cfg.allowed.contains(id));
    }
  };
  const auto cp = evolve(cfg, victim, params, hooks);

  CHECK(evals.size() == 200);
  for (size_t i = 1; i < best_per_generation.size(); ++i)
    CHECK(best_per_generation[i] >= best_per_generation[i - 1]);
  CHECK(cp.best_reward >= best_per_generation.front());
  CHECK(cp.success_curve.size() == 200);
  for (size_t i = 1; i < cp.success_curve.size(); ++i) {
    CHECK(cp.success_curve[i].s2_count >= cp.success_curve[i - 1].s2_count);
    CHECK(cp.success_curve[i].s4_count >= cp.success_curve[i - 1].s4_count);
  }
}

TEST_CASE("checkpoint save/load round trip and resume determinism") {
  const SimulatedVictim victim(VictimProfile::desk_default(vocab(), 7));
  FitnessParams params;
  params.budget = 256;

  // Uninterrupted reference run: capture the population entering generation 6.
  EvoConfig cfg = desk_config(8, 99);
  std::vector<std::vector<std::vector<TokenId>>> populations_by_gen;
  EvolveHooks capture;
  capture.on_checkpoint = [&](const EvoCheckpoint& cp) {
    std::vector<std::vector<TokenId>> pop;
    for (const auto& c : cp.population) pop.push_back(c.tokens.ids);
    populations_by_gen.push_back(std::move(pop));
  };
  evolve(cfg, victim, params, capture);

  // Interrupted run: stop after generation 5, save, reload, resume one step.
  EvoConfig cfg5 = cfg;
  cfg5.generations = 5;
  const auto cp5 = evolve(cfg5, victim, params);
  const std::string path = "evo_checkpoint_test.json";
  save_checkpoint(path, cp5);
  const auto loaded = load_checkpoint(path, vocab());
  CHECK(loaded.generation_index == 5);
  REQUIRE(loaded.population.size() == cp5.population.size());
  for (size_t i = 0; i < loaded.population.size(); ++i)
    CHECK(loaded.population[i].tokens.ids == cp5.population[i].tokens.ids);
  CHECK(loaded.rng_state == cp5.rng_state);
  CHECK(loaded.best_reward == cp5.best_reward);

  EvoConfig cfg6 = cfg;
  cfg6.generations = 6;
  const auto resumed = evolve(cfg6, victim, params, {}, &loaded);
  std::vector<std::vector<TokenId>> resumed_pop;
  for (const auto& c : resumed.population) resumed_pop.push_back(c.tokens.ids);
  CHECK(resumed_pop == populations_by_gen[5]);  // population entering generation 6
  std::remove(path.c_str());
}
