#include "ogb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "ogb/errors.hpp"

namespace ogb {

double ogf(long length, long context_window) {
  if (context_window < 1) throw std::domain_error("context window must be >= 1");
  if (length < 0) throw std::domain_error("length must be non-negative");
  return static_cast<double>(length) / static_cast<double>(context_window);
}

bool stall_flag(bool eos_present, bool cap_hit) { return !eos_present && cap_hit; }

bool over_context_flag(bool eos_present, long length, long context_window) {
  return !eos_present && length >= context_window;
}

long tail_persistence(std::span<const TokenId> tokens, int k) {
  if (k < 1) throw std::domain_error("gram size must be >= 1");
  const long n = static_cast<long>(tokens.size());
  if (n < k) return 0;
  std::unordered_set<std::string> seen;
  long last_novel = 0;
  for (long p = 0; p + k <= n; ++p) {
    std::string gram(reinterpret_cast<const char*>(tokens.data() + p),
                     static_cast<size_t>(k) * sizeof(TokenId));
    if (seen.insert(std::move(gram)).second) last_novel = p;
  }
  return n - (last_novel + k);
}

StopStats make_stop_stats(const GenerationResult& result, long context_window, int tail_k) {
  StopStats s;
  s.length = result.length;
  s.ogf = ogf(result.length, context_window);
  const bool eos_present = result.eos_index.has_value();
  s.stall = stall_flag(eos_present, result.cap_hit);
  s.over_context = over_context_flag(eos_present, result.length, context_window);
  if (!result.continuation.ids.empty() ||
      result.length == 0)  // token-level view available
    s.tail_length = tail_persistence(result.continuation.ids, tail_k);
  s.latency_seconds = result.latency_seconds;
  return s;
}

double percentile_nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return values[rank - 1];
}

AggregateReport aggregate(const std::vector<std::vector<StopStats>>& prompt_blocks) {
  AggregateReport rep;
  std::vector<double> ogfs, latencies;
  long stalls = 0;
  for (const auto& block : prompt_blocks) {
    if (block.empty()) continue;
    rep.prompts += 1;
    double block_max = 0.0;
    long block_stalls = 0;
    for (const auto& s : block) {
      rep.trials += 1;
      ogfs.push_back(s.ogf);
      latencies.push_back(s.latency_seconds);
      if (s.stall) {
        ++stalls;
        ++block_stalls;
      }
      block_max = std::max(block_max, s.ogf);
    }
    rep.per_prompt_max_ogf.push_back(block_max);
    rep.per_prompt_stall_rate.push_back(static_cast<double>(block_stalls) /
                                        static_cast<double>(block.size()));
  }
  if (rep.trials == 0) throw ConfigError("cannot aggregate an empty trial set");

  const double n = static_cast<double>(rep.trials);
  double mean = 0.0;
  for (double v : ogfs) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : ogfs) var += (v - mean) * (v - mean);
  var /= n;
  rep.mean_ogf = mean;
  rep.std_ogf = std::sqrt(var);

  for (int t : {1, 2, 3, 4}) {
    long hits = 0;
    for (double v : ogfs)
      if (v >= static_cast<double>(t)) ++hits;
    rep.success_at[t] = static_cast<double>(hits) / n;
  }
  rep.stall_rate = static_cast<double>(stalls) / n;

  double lat_sum = 0.0, lat_max = 0.0;
  for (double v : latencies) {
    lat_sum += v;
    lat_max = std::max(lat_max, v);
  }
  rep.latency_mean = lat_sum / n;
  rep.latency_max = lat_max;
  rep.latency_median = percentile_nearest_rank(latencies, 50.0);
  rep.latency_p95 = percentile_nearest_rank(latencies, 95.0);
  return rep;
}

AggregateReport aggregate(const std::vector<StopStats>& records, int trials_per_prompt) {
  if (trials_per_prompt < 1) throw ConfigError("trials_per_prompt must be >= 1");
  if (records.empty()) throw ConfigError("cannot aggregate an empty trial set");
  if (records.size() % static_cast<size_t>(trials_per_prompt) != 0)
    throw ConfigError("records are not grouped into equal per-prompt blocks");
  std::vector<std::vector<StopStats>> blocks;
  for (size_t i = 0; i < records.size(); i += trials_per_prompt)
    blocks.emplace_back(records.begin() + i, records.begin() + i + trials_per_prompt);
  return aggregate(blocks);
}

}  // namespace ogb
