#include "ogb/eogen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "ogb/errors.hpp"
#include "ogb/io.hpp"

namespace ogb {

using nlohmann::json;

void FitnessParams::validate() const {
  if (alpha < 0.0 || beta < 0.0) throw ConfigError("fitness weights must be non-negative");
  if (budget < 1) throw ConfigError("budget must be >= 1");
}

double fitness(long prompt_len, const GenerationResult& result, const FitnessParams& params) {
  double r = static_cast<double>(result.length) - params.alpha * static_cast<double>(prompt_len);
  if (result.eos_index.has_value())
    r -= params.beta * static_cast<double>(params.budget - *result.eos_index);
  return r;
}

void EvoConfig::validate() const {
  if (population_size < 2) throw ConfigError("population size must be >= 2");
  if (generations < 0) throw ConfigError("generations must be >= 0");
  if (!(selection_fraction > 0.0) || selection_fraction > 1.0)
    throw ConfigError("selection fraction must be in (0, 1]");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw ConfigError("mutation rate must be in [0, 1]");
  if (allowed.empty()) throw ConfigError("allowed token set is empty");
}

std::vector<Candidate> init_population(const EvoConfig& config, const Vocabulary& vocab,
                                       Rng& rng) {
  config.validate();
  std::vector<TokenId> seed_ids;
  if (vocab.has_encoder()) {
    for (TokenId id : vocab.encode(config.seed_string).ids)
      if (config.allowed.contains(id)) seed_ids.push_back(id);
  }
  std::vector<Candidate> population;
  population.reserve(config.population_size);
  for (int p = 0; p < config.population_size; ++p) {
    const int target = static_cast<int>(rng.range(config.bounds.min_len, config.bounds.max_len));
    std::vector<TokenId> ids = seed_ids;
    if (static_cast<int>(ids.size()) > target) ids.resize(target);
    while (static_cast<int>(ids.size()) < target) ids.push_back(config.allowed.sample(rng));
    population.push_back(Candidate{TokenSequence(vocab, std::move(ids)), std::nullopt, std::nullopt});
  }
  return population;
}

Candidate one_point_crossover(const Candidate& a, const Candidate& b, Rng& rng) {
  const size_t la = a.tokens.size(), lb = b.tokens.size();
  if (la < 1 || lb < 1) throw ConfigError("crossover parents must be non-empty");
  const size_t split = la >= 2 ? 1 + rng.below(la - 1) : 1;
  std::vector<TokenId> ids(a.tokens.ids.begin(), a.tokens.ids.begin() + split);
  if (split < lb) ids.insert(ids.end(), b.tokens.ids.begin() + split, b.tokens.ids.end());
  return Candidate{TokenSequence(*a.tokens.vocab, std::move(ids)), std::nullopt, std::nullopt};
}

Candidate mutate(const Candidate& c, double mu, const TokenSet& allowed, Rng& rng) {
  if (allowed.empty()) throw ConfigError("allowed token set is empty");
  Candidate out{c.tokens, std::nullopt, std::nullopt};
  for (auto& id : out.tokens.ids)
    if (rng.bernoulli(mu)) id = allowed.sample(rng);
  return out;
}

namespace {

json candidate_to_json(const Candidate& c) {
  json j;
  j["tokens"] = c.tokens.ids;
  if (c.reward.has_value()) j["reward"] = *c.reward;
  if (c.last_result.has_value()) j["length"] = c.last_result->length;
  return j;
}

Candidate candidate_from_json(const json& j, const Vocabulary& vocab) {
  Candidate c;
  c.tokens = TokenSequence(vocab, j.at("tokens").get<std::vector<TokenId>>());
  if (j.contains("reward")) c.reward = j.at("reward").get<double>();
  return c;
}

}  // namespace

EvoCheckpoint evolve(const EvoConfig& config, const Victim& victim,
                     const FitnessParams& params, const EvolveHooks& hooks,
                     const EvoCheckpoint* resume) {
  config.validate();
  params.validate();

  Rng master(hash_mix(config.seed, 0xE0E0));
  EvoCheckpoint cp;
  if (resume != nullptr) {
    cp = *resume;
    master.set_state(cp.rng_state);
  } else {
    cp.population = init_population(config, victim.vocab(), master);
    cp.rng_state = master.state();
  }

  DecodingConfig decoding = config.decoding;
  decoding.max_new_tokens = params.budget;
  const int pop = config.population_size;
  const int survivors_wanted =
      static_cast<int>(std::ceil(config.selection_fraction * static_cast<double>(pop)));

  for (int g = cp.generation_index; g < config.generations; ++g) {
    // Evaluate every candidate with one victim call each; the per-candidate
    // seed depends only on (run seed, generation, index) so a resumed run
    // replays identical trials.
    for (int i = 0; i < static_cast<int>(cp.population.size()); ++i) {
      Candidate& cand = cp.population[i];
      EvalRecord rec;
      rec.generation = g;
      rec.index = i;
      rec.tokens = cand.tokens.ids;
      const uint64_t trial_seed = hash_mix(config.seed, 0xEA11, static_cast<uint64_t>(g),
                                           static_cast<uint64_t>(i));
      try {
        const GenerationResult result = victim.generate(cand.tokens, decoding, trial_seed);
        cand.reward = fitness(static_cast<long>(cand.tokens.size()), result, params);
        cand.last_result = result;
        rec.reward = *cand.reward;
        rec.stats = make_stop_stats(result, victim.context_window());
        cp.evaluations += 1;
        SuccessCurvePoint pt;
        pt.evaluations = cp.evaluations;
        pt.s2_count = (cp.success_curve.empty() ? 0 : cp.success_curve.back().s2_count) +
                      (rec.stats.ogf >= 2.0 ? 1 : 0);
        pt.s4_count = (cp.success_curve.empty() ? 0 : cp.success_curve.back().s4_count) +
                      (rec.stats.ogf >= 4.0 ? 1 : 0);
        cp.success_curve.push_back(pt);
        if (result.length >= config.archive_threshold) cp.archive.push_back(cand);
        if (*cand.reward > cp.best_reward) {
          cp.best_reward = *cand.reward;
          cp.best_prompt = cand;
        }
      } catch (const std::exception&) {
        // Retries happen inside the victim; a candidate that still fails is
        // kept with -inf reward so selection skips it without aborting.
        cand.reward = -std::numeric_limits<double>::infinity();
        cand.last_result = std::nullopt;
        rec.reward = *cand.reward;
        rec.failed = true;
        cp.evaluations += 1;
        SuccessCurvePoint pt;
        pt.evaluations = cp.evaluations;
        pt.s2_count = cp.success_curve.empty() ? 0 : cp.success_curve.back().s2_count;
        pt.s4_count = cp.success_curve.empty() ? 0 : cp.success_curve.back().s4_count;
        cp.success_curve.push_back(pt);
      }
      if (hooks.on_eval) hooks.on_eval(rec);
    }

    // Truncation selection; ties keep earlier evaluation order.
    std::vector<int> order(cp.population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cp.population[a].reward.value() > cp.population[b].reward.value();
    });
    std::vector<Candidate> next;
    next.reserve(pop);
    for (int s = 0; s < survivors_wanted && s < static_cast<int>(order.size()); ++s)
      next.push_back(cp.population[order[s]]);
    const size_t survivor_count = next.size();

    while (static_cast<int>(next.size()) < pop) {
      size_t pa = master.below(survivor_count);
      size_t pb = survivor_count >= 2 ? master.below(survivor_count) : pa;
      while (survivor_count >= 2 && pb == pa) pb = master.below(survivor_count);
      Candidate child = one_point_crossover(next[pa], next[pb], master);
      child = mutate(child, config.mutation_rate, config.allowed, master);
      child.tokens = project_length(child.tokens, config.bounds, config.allowed, master);
      next.push_back(std::move(child));
    }

    cp.population = std::move(next);
    cp.generation_index = g + 1;
    cp.rng_state = master.state();
    if (hooks.on_checkpoint) hooks.on_checkpoint(cp);
  }
  return cp;
}

void save_checkpoint(const std::string& path, const EvoCheckpoint& cp) {
  json j;
  j["version"] = 1;
  j["generation_index"] = cp.generation_index;
  json pop = json::array();
  for (const auto& c : cp.population) pop.push_back(candidate_to_json(c));
  j["population"] = pop;
  if (cp.best_prompt.has_value()) j["best_prompt"] = candidate_to_json(*cp.best_prompt);
  j["best_reward"] = std::isfinite(cp.best_reward) ? json(cp.best_reward) : json();
  j["rng_state"] = cp.rng_state;
  json curve = json::array();
  for (const auto& pt : cp.success_curve)
    curve.push_back({pt.evaluations, pt.s2_count, pt.s4_count});
  j["success_curve"] = curve;
  j["evaluations"] = cp.evaluations;
  json arch = json::array();
  for (const auto& c : cp.archive) arch.push_back(candidate_to_json(c));
  j["archive"] = arch;
  atomic_write_file(path, j.dump(2) + "\n");
}

EvoCheckpoint load_checkpoint(const std::string& path, const Vocabulary& vocab) {
  const json j = json::parse(read_file(path));
  if (j.at("version").get<int>() != 1) throw ConfigError("unsupported checkpoint version");
  EvoCheckpoint cp;
  cp.generation_index = j.at("generation_index").get<int>();
  for (const auto& c : j.at("population")) cp.population.push_back(candidate_from_json(c, vocab));
  if (j.contains("best_prompt")) cp.best_prompt = candidate_from_json(j.at("best_prompt"), vocab);
  cp.best_reward = j.at("best_reward").is_null()
                       ? -std::numeric_limits<double>::infinity()
                       : j.at("best_reward").get<double>();
  const auto state = j.at("rng_state").get<std::vector<uint64_t>>();
  if (state.size() != cp.rng_state.size()) throw ConfigError("malformed rng state");
  std::copy(state.begin(), state.end(), cp.rng_state.begin());
  for (const auto& pt : j.at("success_curve"))
    cp.success_curve.push_back(
        SuccessCurvePoint{pt.at(0).get<long>(), pt.at(1).get<long>(), pt.at(2).get<long>()});
  cp.evaluations = j.at("evaluations").get<long>();
  for (const auto& c : j.at("archive")) cp.archive.push_back(candidate_from_json(c, vocab));
  return cp;
}

void write_success_curve_csv(const std::string& path,
                             const std::vector<SuccessCurvePoint>& curve) {
  std::ostringstream out;
  out << "evaluations,s2_count,s4_count\n";
  for (const auto& pt : curve)
    out << pt.evaluations << ',' << pt.s2_count << ',' << pt.s4_count << '\n';
  atomic_write_file(path, out.str());
}

}  // namespace ogb
