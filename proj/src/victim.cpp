#include "ogb/victim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "ogb/errors.hpp"
#include "ogb/rng.hpp"

namespace ogb {

void VictimProfile::validate() const {
  if (!vocab) throw ConfigError("victim profile has no vocabulary");
  if (context_window < 1) throw ConfigError("context window must be >= 1");
  if (!(hazard_floor > 0.0) || !(hazard_ceiling < 1.0) || hazard_floor > hazard_ceiling)
    throw ConfigError("hazard clamp bounds invalid");
  if (base_hazard < hazard_floor || base_hazard > hazard_ceiling)
    throw ConfigError("base hazard outside clamp bounds");
  if (trigger_coeff < 0.0 || repetition_coeff < 0.0)
    throw ConfigError("hazard coefficients must be non-negative");
  if (repetition_window < 1) throw ConfigError("repetition window must be >= 1");
}

VictimProfile VictimProfile::desk_default(const Vocabulary& vocab, uint64_t trigger_seed) {
  VictimProfile p;
  p.context_window = 64;
  p.vocab = &vocab;
  p.base_hazard = 0.02;
  p.trigger_coeff = 0.8;
  p.repetition_coeff = 1.5;
  p.hazard_floor = 1e-5;
  p.hazard_ceiling = 0.5;
  p.repetition_window = 16;
  p.next_token_seed = hash_mix(trigger_seed, 0x5eedu);

  // 8 distinct triggers from the word band [2, 41] of sim512.
  Rng rng(hash_mix(trigger_seed, 0x7716u));
  std::vector<TokenId> triggers;
  std::unordered_set<TokenId> seen;
  while (triggers.size() < 8) {
    const TokenId id = Vocabulary::kSimWordFirst +
                       static_cast<TokenId>(rng.below(Vocabulary::kSimWordCount));
    if (seen.insert(id).second) triggers.push_back(id);
  }
  p.trigger_tokens = TokenSet(vocab, std::move(triggers));
  p.validate();
  return p;
}

double hazard(const VictimProfile& profile, const TokenSequence& prompt,
              std::span<const TokenId> recent_output) {
  int distinct_triggers = 0;
  std::unordered_set<TokenId> counted;
  for (TokenId id : prompt.ids) {
    if (profile.trigger_tokens.contains(id) && counted.insert(id).second) ++distinct_triggers;
  }
  double repeat_fraction = 0.0;
  if (!recent_output.empty()) {
    long repeats = 0;
    for (size_t i = 1; i < recent_output.size(); ++i)
      if (recent_output[i] == recent_output[i - 1]) ++repeats;
    repeat_fraction = static_cast<double>(repeats) / static_cast<double>(recent_output.size());
  }
  const double h = profile.base_hazard *
                   std::exp(-profile.trigger_coeff * distinct_triggers -
                            profile.repetition_coeff * repeat_fraction);
  return std::clamp(h, profile.hazard_floor, profile.hazard_ceiling);
}

double expected_length(const VictimProfile& profile, const TokenSequence& prompt, long budget) {
  if (profile.repetition_coeff != 0.0)
    throw ConfigError("expected_length requires repetition_coeff = 0 (constant hazard)");
  if (budget < 1) throw ConfigError("budget must be >= 1");
  const double h = hazard(profile, prompt, {});
  const double q = 1.0 - h;
  double sum = 0.0;
  double qk = 1.0;  // q^(k-1)
  for (long k = 1; k <= budget - 1; ++k) {
    sum += static_cast<double>(k) * h * qk;
    qk *= q;
  }
  sum += static_cast<double>(budget) * qk;  // q^(budget-1)
  return sum;
}

SimulatedVictim::SimulatedVictim(VictimProfile profile) : profile_(std::move(profile)) {
  profile_.validate();
}

GenerationResult SimulatedVictim::generate(const TokenSequence& prompt,
                                           const DecodingConfig& config,
                                           uint64_t trial_seed) const {
  if (prompt.vocab != profile_.vocab)
    throw ConfigError("prompt vocabulary does not match the victim's");
  if (config.max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
  queries_.fetch_add(1);

  const auto t0 = std::chrono::steady_clock::now();

  GenerationResult out;
  TokenSequence effective = prompt;
  const size_t window = static_cast<size_t>(profile_.context_window);
  if (effective.ids.size() > window) {
    // Keep the most recent context worth of prompt tokens.
    effective.ids.erase(effective.ids.begin(),
                        effective.ids.end() - static_cast<long>(window));
    out.prompt_truncated = true;
  }

  Rng rng(hash_mix(profile_.next_token_seed, trial_seed));
  const TokenId eos = profile_.vocab->eos_id();
  const TokenId vocab_size = profile_.vocab->size();
  std::vector<TokenId> tokens;
  tokens.reserve(static_cast<size_t>(std::min<long>(config.max_new_tokens, 4096)));

  for (long step = 0; step < config.max_new_tokens; ++step) {
    const size_t w = std::min<size_t>(tokens.size(), profile_.repetition_window);
    const std::span<const TokenId> recent(tokens.data() + tokens.size() - w, w);
    const double h = hazard(profile_, effective, recent);
    if (rng.next_double() < h) {
      tokens.push_back(eos);
      out.eos_index = static_cast<long>(tokens.size()) - 1;
      break;
    }
    // Uniform over the non-EOS vocabulary; termination is the hazard's job.
    TokenId next = static_cast<TokenId>(rng.below(static_cast<uint64_t>(vocab_size) - 1));
    if (next >= eos) ++next;
    tokens.push_back(next);
  }

  out.length = static_cast<long>(tokens.size());
  out.cap_hit = !out.eos_index.has_value() && out.length == config.max_new_tokens;
  out.continuation = TokenSequence(*profile_.vocab, std::move(tokens));
  out.latency_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ogb
