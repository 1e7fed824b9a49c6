#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ogb/rng.hpp"
#include "ogb/token_space.hpp"

namespace ogb {

struct PolicyConfig {
  int vocab_size = 512;
  int embed_dim = 256;
  int layers = 2;
  int heads = 4;
  double dropout = 0.1;
  int window = 1024;           // observation length W
  int goal_bucket_width = 256;
  long goal_max = 16384;
  double length_bias_coeff = 0.4;
  double policy_temperature = 0.8;

  int bucket_count() const { return static_cast<int>(goal_max / goal_bucket_width) + 1; }
  void validate() const;
};

// index = min(floor(g / width), bucket_count - 1)
int bucketize_goal(long goal, const PolicyConfig& config);

// Fixed-length window of token ids, left-padded. pad_count identifies the
// padding region; padded key positions are excluded from attention, so the
// network output does not depend on their contents.
struct Observation {
  std::vector<TokenId> ids;
  int pad_count = 0;
};

Observation make_observation(std::span<const TokenId> tokens, int window);

struct EncoderLayerParams {
  Eigen::MatrixXd wq, wk, wv, wo;        // d x d
  Eigen::MatrixXd bq, bk, bv, bo;        // 1 x d
  Eigen::MatrixXd ln1_gamma, ln1_beta;   // 1 x d
  Eigen::MatrixXd ff1, ff2;              // d x 4d, 4d x d
  Eigen::MatrixXd fb1, fb2;              // 1 x 4d, 1 x d
  Eigen::MatrixXd ln2_gamma, ln2_beta;   // 1 x d
};

// Two-headed goal-conditioned encoder: token + learned positional embeddings
// with a goal embedding prepended at position 0; readout at the goal slot
// feeds a vocabulary policy head and a scalar value head (shared trunk).
struct PolicyParams {
  PolicyConfig config;
  Eigen::MatrixXd token_embedding;     // vocab x d
  Eigen::MatrixXd goal_embedding;      // buckets x d
  Eigen::MatrixXd position_embedding;  // (window + 1) x d
  std::vector<EncoderLayerParams> layers;
  Eigen::MatrixXd policy_w;  // d x vocab
  Eigen::MatrixXd policy_b;  // 1 x vocab
  Eigen::MatrixXd value_w;   // d x 1
  Eigen::MatrixXd value_b;   // 1 x 1

  static PolicyParams init(const PolicyConfig& config, Rng& rng);
  static PolicyParams zeros_like(const PolicyParams& other);
};

// Enumerates every parameter tensor as (name, matrix). Works for const and
// mutable parameter sets; iteration order is fixed.
template <class Params, class Fn>
void visit_params(Params& p, Fn&& fn) {
  fn("token_embedding", p.token_embedding);
  fn("goal_embedding", p.goal_embedding);
  fn("position_embedding", p.position_embedding);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    fn(prefix + "wq", layer.wq);
    fn(prefix + "wk", layer.wk);
    fn(prefix + "wv", layer.wv);
    fn(prefix + "wo", layer.wo);
    fn(prefix + "bq", layer.bq);
    fn(prefix + "bk", layer.bk);
    fn(prefix + "bv", layer.bv);
    fn(prefix + "bo", layer.bo);
    fn(prefix + "ln1_gamma", layer.ln1_gamma);
    fn(prefix + "ln1_beta", layer.ln1_beta);
    fn(prefix + "ff1", layer.ff1);
    fn(prefix + "fb1", layer.fb1);
    fn(prefix + "ff2", layer.ff2);
    fn(prefix + "fb2", layer.fb2);
    fn(prefix + "ln2_gamma", layer.ln2_gamma);
    fn(prefix + "ln2_beta", layer.ln2_beta);
  }
  fn("policy_w", p.policy_w);
  fn("policy_b", p.policy_b);
  fn("value_w", p.value_w);
  fn("value_b", p.value_b);
}

struct LayerTrace {
  Eigen::MatrixXd x_in;
  Eigen::MatrixXd q, k, v;
  std::vector<Eigen::MatrixXd> attn;   // per-head S x S attention weights
  Eigen::MatrixXd attn_concat;         // S x d before the output projection
  Eigen::MatrixXd attn_out;
  Eigen::MatrixXd drop1;               // inverted-dropout mask, empty in eval
  Eigen::MatrixXd r1;
  Eigen::MatrixXd ln1_xhat;
  Eigen::VectorXd ln1_inv_std;
  Eigen::MatrixXd x1;
  Eigen::MatrixXd ff_pre, ff_act, ff_out;
  Eigen::MatrixXd drop2;
  Eigen::MatrixXd r2;
  Eigen::MatrixXd ln2_xhat;
  Eigen::VectorXd ln2_inv_std;
};

struct ForwardTrace {
  Observation obs;
  int goal_bucket = 0;
  std::vector<uint8_t> key_masked;  // sequence positions excluded as keys
  Eigen::MatrixXd x0;
  std::vector<LayerTrace> layers;
  Eigen::MatrixXd x_final;
};

struct ForwardResult {
  Eigen::VectorXd logits;
  double value = 0.0;
};

// Inference-mode forward (dropout off, deterministic).
ForwardResult forward(const PolicyParams& params, const Observation& obs, int goal_bucket);

// Forward keeping intermediates for backward. Dropout is applied only when
// `training` and config.dropout > 0 (requires dropout_rng).
ForwardResult forward(const PolicyParams& params, const Observation& obs, int goal_bucket,
                      ForwardTrace* trace, bool training = false, Rng* dropout_rng = nullptr);

// Accumulates d(loss)/d(params) into `grads` given gradients at the heads.
void backward(const PolicyParams& params, const ForwardTrace& trace,
              const Eigen::VectorXd& dlogits, double dvalue, PolicyParams& grads);

// Restriction, length bias and temperature applied to raw logits.
struct ActionDistribution {
  Eigen::VectorXd probs;          // zero outside the support
  Eigen::VectorXd logp;           // -inf outside the support
  std::vector<TokenId> support;   // valid ids after masking, ascending
};

ActionDistribution masked_distribution(const Eigen::VectorXd& logits, const TokenSet& valid,
                                       bool eos_masked, double temperature,
                                       const std::vector<double>& decoded_lengths,
                                       double bias_coeff);

// Keep the smallest probability mass >= top_p (ties by id) and renormalize.
ActionDistribution nucleus_filter(const ActionDistribution& dist, double top_p);

// Epsilon-mixture draw; returns the action and log q(a) of the mixture.
std::pair<TokenId, double> sample_action(const ActionDistribution& dist, double epsilon,
                                         Rng& rng);

struct ExplorationSchedule {
  double epsilon_start = 0.01;
  double epsilon_end = 0.001;
  long decay_episodes = 20000;
};

double epsilon_at(long episode, const ExplorationSchedule& schedule);

// Decoded-string length per token id, precomputed once per vocabulary.
std::vector<double> decoded_lengths(const Vocabulary& vocab);

// Versioned binary snapshot of named tensors plus the embedded config;
// round-trips bitwise.
void save_policy(const std::string& path, const PolicyParams& params);
PolicyParams load_policy(const std::string& path);

}  // namespace ogb
