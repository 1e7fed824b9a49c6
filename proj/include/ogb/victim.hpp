#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "ogb/token_space.hpp"

namespace ogb {

// Victim-side decoding regime for one query. "Library default" sampling is
// temperature 1.0, top_p 1.0, repetition_penalty 1.0.
struct DecodingConfig {
  long max_new_tokens = 256;
  bool sampling_enabled = true;
  double temperature = 1.0;
  double top_p = 1.0;
  double repetition_penalty = 1.0;
};

// One continuation record. The EOS token, when emitted, is counted inside
// `length`; cap_hit means the budget was exhausted with no EOS. Remote
// victims may report a usage-derived length with an empty continuation.
struct GenerationResult {
  TokenSequence continuation;
  long length = 0;
  std::optional<long> eos_index;  // zero-based index of the first EOS
  bool cap_hit = false;
  double latency_seconds = 0.0;
  bool prompt_truncated = false;
};

// Parametric simulated victim. Termination is a per-step EOS hazard
//   clamp(base * exp(-k_trig * m - k_rep * r), floor, ceiling)
// where m counts distinct trigger tokens in the prompt and r is the
// adjacent-repeat fraction over the recent output window. Content is uniform
// over the non-EOS vocabulary, so stopping statistics stay analytic.
struct VictimProfile {
  int context_window = 64;
  const Vocabulary* vocab = nullptr;
  TokenSet trigger_tokens;
  double base_hazard = 0.02;
  double trigger_coeff = 0.8;
  double repetition_coeff = 1.5;
  double hazard_floor = 1e-5;
  double hazard_ceiling = 0.5;
  int repetition_window = 16;
  uint64_t next_token_seed = 0;

  void validate() const;

  // Desk-scale profile: C=64, 8 trigger tokens drawn by seed from the
  // word band of the simulated vocabulary.
  static VictimProfile desk_default(const Vocabulary& vocab, uint64_t trigger_seed = 7);
};

struct RemoteEndpointConfig {
  std::string base_url;  // absolute, e.g. http://127.0.0.1:8080
  std::string model_name;
  double timeout_seconds = 60.0;
  std::optional<std::string> auth_token;
  int max_attempts = 3;
  double backoff_base_seconds = 1.0;  // doubles per retry
  int max_in_flight = 4;
};

// Query-only generate oracle shared by the simulated and remote victims.
class Victim {
 public:
  virtual ~Victim() = default;
  virtual GenerationResult generate(const TokenSequence& prompt, const DecodingConfig& config,
                                    uint64_t trial_seed) const = 0;
  virtual const Vocabulary& vocab() const = 0;
  virtual int context_window() const = 0;

  uint64_t query_count() const { return queries_.load(); }

 protected:
  mutable std::atomic<uint64_t> queries_{0};
};

class SimulatedVictim : public Victim {
 public:
  explicit SimulatedVictim(VictimProfile profile);

  GenerationResult generate(const TokenSequence& prompt, const DecodingConfig& config,
                            uint64_t trial_seed) const override;
  const Vocabulary& vocab() const override { return *profile_.vocab; }
  int context_window() const override { return profile_.context_window; }
  const VictimProfile& profile() const { return profile_; }

 private:
  VictimProfile profile_;
};

// Per-step EOS probability for a prompt plus the recent output window.
double hazard(const VictimProfile& profile, const TokenSequence& prompt,
              std::span<const TokenId> recent_output);

// Analytic mean continuation length for a constant-hazard profile
// (repetition_coeff must be 0). Throws ConfigError otherwise.
double expected_length(const VictimProfile& profile, const TokenSequence& prompt, long budget);

}  // namespace ogb
