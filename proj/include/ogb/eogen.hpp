#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ogb/metrics.hpp"
#include "ogb/rng.hpp"
#include "ogb/token_space.hpp"
#include "ogb/victim.hpp"

namespace ogb {

struct FitnessParams {
  double alpha = 2.0;  // prompt-length penalty weight
  double beta = 5.0;   // early-EOS penalty weight
  long budget = 256;   // decoding budget B

  void validate() const;
};

// R = L - alpha * ell - [eos present] * beta * (B - i_eos)
double fitness(long prompt_len, const GenerationResult& result, const FitnessParams& params);

struct EvoConfig {
  int population_size = 20;
  int generations = 500;
  double selection_fraction = 0.5;
  double mutation_rate = 0.05;
  LengthBounds bounds{3, 7};
  TokenSet allowed;
  std::string seed_string = "In";
  uint64_t seed = 0;
  long archive_threshold = 8192;  // continuations with L >= threshold are archived
  DecodingConfig decoding;        // max_new_tokens is taken from FitnessParams::budget

  void validate() const;
};

struct Candidate {
  TokenSequence tokens;
  std::optional<double> reward;
  std::optional<GenerationResult> last_result;
};

struct SuccessCurvePoint {
  long evaluations = 0;
  long s2_count = 0;  // cumulative evaluations with OGF >= 2
  long s4_count = 0;  // cumulative evaluations with OGF >= 4
};

struct EvalRecord {
  int generation = 0;
  int index = 0;
  std::vector<TokenId> tokens;
  double reward = 0.0;
  StopStats stats;
  bool failed = false;  // victim error after retries; reward is -inf
};

struct EvoCheckpoint {
  int generation_index = 0;  // next generation to evaluate
  std::vector<Candidate> population;
  std::optional<Candidate> best_prompt;
  double best_reward = -std::numeric_limits<double>::infinity();
  Rng::state_type rng_state{};
  std::vector<SuccessCurvePoint> success_curve;
  long evaluations = 0;
  std::vector<Candidate> archive;
};

// Seed-string tokens filtered to the allowed set, then padded/truncated to a
// per-candidate target length drawn uniformly from the bounds.
std::vector<Candidate> init_population(const EvoConfig& config, const Vocabulary& vocab,
                                       Rng& rng);

// child = a[0..s) ++ b[s..), split s uniform in [1, |a|).
Candidate one_point_crossover(const Candidate& a, const Candidate& b, Rng& rng);

// Each position independently replaced with probability mu.
Candidate mutate(const Candidate& c, double mu, const TokenSet& allowed, Rng& rng);

struct EvolveHooks {
  std::function<void(const EvalRecord&)> on_eval;
  std::function<void(const EvoCheckpoint&)> on_checkpoint;  // called after each generation
};

// Truncation-selection evolutionary search. Pass `resume` to continue from a
// saved checkpoint; the resumed run reproduces an uninterrupted one exactly.
EvoCheckpoint evolve(const EvoConfig& config, const Victim& victim,
                     const FitnessParams& params, const EvolveHooks& hooks = {},
                     const EvoCheckpoint* resume = nullptr);

void save_checkpoint(const std::string& path, const EvoCheckpoint& cp);
EvoCheckpoint load_checkpoint(const std::string& path, const Vocabulary& vocab);

void write_success_curve_csv(const std::string& path,
                             const std::vector<SuccessCurvePoint>& curve);

}  // namespace ogb
