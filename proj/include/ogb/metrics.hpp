#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ogb/victim.hpp"

namespace ogb {

// Per-trial stopping-time statistics.
struct StopStats {
  double ogf = 0.0;
  bool stall = false;
  bool over_context = false;
  std::optional<long> tail_length;  // absent when only lengths are known
  double latency_seconds = 0.0;
  long length = 0;
};

struct AggregateReport {
  long trials = 0;
  long prompts = 0;
  double mean_ogf = 0.0;
  double std_ogf = 0.0;  // population convention
  std::map<int, double> success_at;  // thresholds {1,2,3,4}
  double stall_rate = 0.0;
  double latency_median = 0.0;
  double latency_mean = 0.0;
  double latency_p95 = 0.0;
  double latency_max = 0.0;
  std::vector<double> per_prompt_max_ogf;
  std::vector<double> per_prompt_stall_rate;
};

// OGF = L / C. Throws std::domain_error when C = 0.
double ogf(long length, long context_window);

// True iff no EOS was observed and the generation cap was hit.
bool stall_flag(bool eos_present, bool cap_hit);

// True iff no EOS was observed and L >= C.
bool over_context_flag(bool eos_present, long length, long context_window);

// Tokens after the end of the last novel k-gram. Grams start at 0..n-k; a
// gram is novel if not seen earlier in the scan. Returns 0 when n < k.
long tail_persistence(std::span<const TokenId> tokens, int k = 8);

StopStats make_stop_stats(const GenerationResult& result, long context_window, int tail_k = 8);

// Aggregate per-prompt blocks of trials. Throws ConfigError on empty input.
AggregateReport aggregate(const std::vector<std::vector<StopStats>>& prompt_blocks);
AggregateReport aggregate(const std::vector<StopStats>& records, int trials_per_prompt);

// Nearest-rank percentile (p in (0, 100]) of an unsorted sample.
double percentile_nearest_rank(std::vector<double> values, double p);

}  // namespace ogb
