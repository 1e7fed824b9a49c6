#include "ogb/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "ogb/errors.hpp"
#include "ogb/io.hpp"

namespace ogb {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kMaskValue = -1e30;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * phi;
}

// Row-wise layer norm; writes xhat and 1/sqrt(var+eps) for backward.
MatrixXd layer_norm(const MatrixXd& x, const MatrixXd& gamma, const MatrixXd& beta,
                    MatrixXd& xhat, VectorXd& inv_std) {
  const auto rows = x.rows();
  const auto cols = x.cols();
  xhat.resize(rows, cols);
  inv_std.resize(rows);
  MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    const double is = 1.0 / std::sqrt(var + kLnEps);
    inv_std(r) = is;
    xhat.row(r) = (x.row(r).array() - mu) * is;
    out.row(r) = xhat.row(r).cwiseProduct(gamma.row(0)) + beta.row(0);
  }
  return out;
}

// dx for layer norm given dy; accumulates dgamma/dbeta.
MatrixXd layer_norm_backward(const MatrixXd& dy, const MatrixXd& xhat, const VectorXd& inv_std,
                             const MatrixXd& gamma, MatrixXd& dgamma, MatrixXd& dbeta) {
  const auto rows = dy.rows();
  const auto cols = dy.cols();
  MatrixXd dx(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const RowVectorXd dxhat = dy.row(r).cwiseProduct(gamma.row(0));
    const double mean_dxhat = dxhat.mean();
    const double mean_dxhat_xhat = dxhat.cwiseProduct(xhat.row(r)).mean();
    dx.row(r) = inv_std(r) * (dxhat.array() - mean_dxhat -
                              xhat.row(r).array() * mean_dxhat_xhat);
  }
  dgamma.row(0) += (dy.cwiseProduct(xhat)).colwise().sum();
  dbeta.row(0) += dy.colwise().sum();
  return dx;
}

MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stddev * rng.normal();
  return m;
}

}  // namespace

void PolicyConfig::validate() const {
  if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
  if (embed_dim < 1 || heads < 1 || embed_dim % heads != 0)
    throw ConfigError("embed_dim must be a positive multiple of heads");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (goal_bucket_width < 1 || goal_max < goal_bucket_width)
    throw ConfigError("invalid goal bucketing");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (!(policy_temperature > 0.0)) throw ConfigError("temperature must be positive");
}

int bucketize_goal(long goal, const PolicyConfig& config) {
  if (goal < 0) throw ConfigError("goal must be non-negative");
  const long idx = goal / config.goal_bucket_width;
  return static_cast<int>(std::min<long>(idx, config.bucket_count() - 1));
}

Observation make_observation(std::span<const TokenId> tokens, int window) {
  Observation obs;
  obs.ids.assign(static_cast<size_t>(window), 0);
  const size_t n = std::min<size_t>(tokens.size(), static_cast<size_t>(window));
  obs.pad_count = window - static_cast<int>(n);
  std::copy(tokens.end() - n, tokens.end(), obs.ids.begin() + obs.pad_count);
  return obs;
}

PolicyParams PolicyParams::init(const PolicyConfig& config, Rng& rng) {
  config.validate();
  const int d = config.embed_dim;
  PolicyParams p;
  p.config = config;
  const double s = 0.02;
  p.token_embedding = normal_matrix(config.vocab_size, d, s, rng);
  p.goal_embedding = normal_matrix(config.bucket_count(), d, s, rng);
  p.position_embedding = normal_matrix(config.window + 1, d, s, rng);
  p.layers.resize(config.layers);
  for (auto& layer : p.layers) {
    layer.wq = normal_matrix(d, d, s, rng);
    layer.wk = normal_matrix(d, d, s, rng);
    layer.wv = normal_matrix(d, d, s, rng);
    layer.wo = normal_matrix(d, d, s, rng);
    layer.bq = MatrixXd::Zero(1, d);
    layer.bk = MatrixXd::Zero(1, d);
    layer.bv = MatrixXd::Zero(1, d);
    layer.bo = MatrixXd::Zero(1, d);
    layer.ln1_gamma = MatrixXd::Ones(1, d);
    layer.ln1_beta = MatrixXd::Zero(1, d);
    layer.ff1 = normal_matrix(d, 4 * d, s, rng);
    layer.fb1 = MatrixXd::Zero(1, 4 * d);
    layer.ff2 = normal_matrix(4 * d, d, s, rng);
    layer.fb2 = MatrixXd::Zero(1, d);
    layer.ln2_gamma = MatrixXd::Ones(1, d);
    layer.ln2_beta = MatrixXd::Zero(1, d);
  }
  p.policy_w = normal_matrix(d, config.vocab_size, s, rng);
  p.policy_b = MatrixXd::Zero(1, config.vocab_size);
  p.value_w = normal_matrix(d, 1, s, rng);
  p.value_b = MatrixXd::Zero(1, 1);
  return p;
}

PolicyParams PolicyParams::zeros_like(const PolicyParams& other) {
  PolicyParams z = other;
  visit_params(z, [](const std::string&, MatrixXd& m) { m.setZero(); });
  return z;
}

ForwardResult forward(const PolicyParams& params, const Observation& obs, int goal_bucket) {
  return forward(params, obs, goal_bucket, nullptr, false, nullptr);
}

ForwardResult forward(const PolicyParams& params, const Observation& obs, int goal_bucket,
                      ForwardTrace* trace, bool training, Rng* dropout_rng) {
  const PolicyConfig& cfg = params.config;
  if (static_cast<int>(obs.ids.size()) != cfg.window)
    throw ConfigError("observation length must equal the configured window");
  if (obs.pad_count < 0 || obs.pad_count > cfg.window)
    throw ConfigError("observation pad count out of range");
  if (goal_bucket < 0 || goal_bucket >= cfg.bucket_count())
    throw ConfigError("goal bucket out of range");
  const bool use_dropout = training && cfg.dropout > 0.0;
  if (use_dropout && dropout_rng == nullptr)
    throw ConfigError("training-mode forward needs a dropout rng");

  const int d = cfg.embed_dim;
  const int S = cfg.window + 1;
  const int H = cfg.heads;
  const int dk = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  // Goal slot at position 0, observation tokens at 1..W.
  MatrixXd x(S, d);
  x.row(0) = params.goal_embedding.row(goal_bucket) + params.position_embedding.row(0);
  for (int i = 0; i < cfg.window; ++i) {
    const TokenId id = obs.ids[static_cast<size_t>(i)];
    if (id < 0 || id >= cfg.vocab_size) throw ConfigError("observation id out of range");
    x.row(i + 1) = params.token_embedding.row(id) + params.position_embedding.row(i + 1);
  }

  std::vector<uint8_t> key_masked(static_cast<size_t>(S), 0);
  for (int i = 0; i < obs.pad_count; ++i) key_masked[static_cast<size_t>(i + 1)] = 1;

  if (trace) {
    trace->obs = obs;
    trace->goal_bucket = goal_bucket;
    trace->key_masked = key_masked;
    trace->x0 = x;
    trace->layers.clear();
    trace->layers.resize(params.layers.size());
  }

  for (size_t l = 0; l < params.layers.size(); ++l) {
    const EncoderLayerParams& lp = params.layers[l];
    LayerTrace local;
    LayerTrace& lt = trace ? trace->layers[l] : local;
    lt.x_in = x;

    lt.q = x * lp.wq + lp.bq.replicate(S, 1);
    lt.k = x * lp.wk + lp.bk.replicate(S, 1);
    lt.v = x * lp.wv + lp.bv.replicate(S, 1);

    lt.attn.assign(static_cast<size_t>(H), MatrixXd());
    lt.attn_concat.resize(S, d);
    for (int h = 0; h < H; ++h) {
      const auto qh = lt.q.middleCols(h * dk, dk);
      const auto kh = lt.k.middleCols(h * dk, dk);
      const auto vh = lt.v.middleCols(h * dk, dk);
      MatrixXd scores = qh * kh.transpose() * scale;
      for (int j = 0; j < S; ++j)
        if (key_masked[static_cast<size_t>(j)]) scores.col(j).setConstant(kMaskValue);
      MatrixXd a(S, S);
      for (int r = 0; r < S; ++r) {
        const double m = scores.row(r).maxCoeff();
        a.row(r) = (scores.row(r).array() - m).exp();
        a.row(r) /= a.row(r).sum();
      }
      lt.attn[static_cast<size_t>(h)] = a;
      lt.attn_concat.middleCols(h * dk, dk) = a * vh;
    }
    lt.attn_out = lt.attn_concat * lp.wo + lp.bo.replicate(S, 1);

    MatrixXd attn_dropped = lt.attn_out;
    if (use_dropout) {
      lt.drop1.resize(S, d);
      const double keep = 1.0 - cfg.dropout;
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < d; ++c)
          lt.drop1(r, c) = dropout_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
      attn_dropped = attn_dropped.cwiseProduct(lt.drop1);
    }
    lt.r1 = lt.x_in + attn_dropped;
    lt.x1 = layer_norm(lt.r1, lp.ln1_gamma, lp.ln1_beta, lt.ln1_xhat, lt.ln1_inv_std);

    lt.ff_pre = lt.x1 * lp.ff1 + lp.fb1.replicate(S, 1);
    lt.ff_act = lt.ff_pre.unaryExpr([](double v) { return gelu(v); });
    lt.ff_out = lt.ff_act * lp.ff2 + lp.fb2.replicate(S, 1);

    MatrixXd ff_dropped = lt.ff_out;
    if (use_dropout) {
      lt.drop2.resize(S, d);
      const double keep = 1.0 - cfg.dropout;
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < d; ++c)
          lt.drop2(r, c) = dropout_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
      ff_dropped = ff_dropped.cwiseProduct(lt.drop2);
    }
    lt.r2 = lt.x1 + ff_dropped;
    x = layer_norm(lt.r2, lp.ln2_gamma, lp.ln2_beta, lt.ln2_xhat, lt.ln2_inv_std);
  }

  if (trace) trace->x_final = x;

  ForwardResult out;
  const RowVectorXd h0 = x.row(0);
  out.logits = (h0 * params.policy_w + params.policy_b.row(0)).transpose();
  out.value = (h0 * params.value_w)(0, 0) + params.value_b(0, 0);
  return out;
}

void backward(const PolicyParams& params, const ForwardTrace& trace,
              const Eigen::VectorXd& dlogits, double dvalue, PolicyParams& grads) {
  const PolicyConfig& cfg = params.config;
  const int d = cfg.embed_dim;
  const int S = cfg.window + 1;
  const int H = cfg.heads;
  const int dk = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  const RowVectorXd h0 = trace.x_final.row(0);
  grads.policy_w += h0.transpose() * dlogits.transpose();
  grads.policy_b.row(0) += dlogits.transpose();
  grads.value_w += h0.transpose() * dvalue;
  grads.value_b(0, 0) += dvalue;

  MatrixXd dx = MatrixXd::Zero(S, d);
  dx.row(0) = (params.policy_w * dlogits).transpose() + dvalue * params.value_w.transpose();

  for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
    const EncoderLayerParams& lp = params.layers[static_cast<size_t>(l)];
    const LayerTrace& lt = trace.layers[static_cast<size_t>(l)];
    EncoderLayerParams& gp = grads.layers[static_cast<size_t>(l)];

    // x_out = LN2(r2)
    MatrixXd dr2 = layer_norm_backward(dx, lt.ln2_xhat, lt.ln2_inv_std, lp.ln2_gamma,
                                       gp.ln2_gamma, gp.ln2_beta);
    // r2 = x1 + dropout(ff_out)
    MatrixXd dff_out = lt.drop2.size() > 0 ? dr2.cwiseProduct(lt.drop2) : dr2;
    MatrixXd dx1 = dr2;

    // ff_out = gelu(x1 ff1 + fb1) ff2 + fb2
    gp.ff2 += lt.ff_act.transpose() * dff_out;
    gp.fb2.row(0) += dff_out.colwise().sum();
    MatrixXd dff_act = dff_out * lp.ff2.transpose();
    MatrixXd dff_pre =
        dff_act.cwiseProduct(lt.ff_pre.unaryExpr([](double v) { return gelu_grad(v); }));
    gp.ff1 += lt.x1.transpose() * dff_pre;
    gp.fb1.row(0) += dff_pre.colwise().sum();
    dx1 += dff_pre * lp.ff1.transpose();

    // x1 = LN1(r1)
    MatrixXd dr1 = layer_norm_backward(dx1, lt.ln1_xhat, lt.ln1_inv_std, lp.ln1_gamma,
                                       gp.ln1_gamma, gp.ln1_beta);
    // r1 = x_in + dropout(attn_out)
    MatrixXd dattn_out = lt.drop1.size() > 0 ? dr1.cwiseProduct(lt.drop1) : dr1;
    MatrixXd dx_in = dr1;

    // attn_out = attn_concat wo + bo
    gp.wo += lt.attn_concat.transpose() * dattn_out;
    gp.bo.row(0) += dattn_out.colwise().sum();
    MatrixXd dconcat = dattn_out * lp.wo.transpose();

    MatrixXd dq = MatrixXd::Zero(S, d);
    MatrixXd dk_mat = MatrixXd::Zero(S, d);
    MatrixXd dv = MatrixXd::Zero(S, d);
    for (int h = 0; h < H; ++h) {
      const MatrixXd& a = lt.attn[static_cast<size_t>(h)];
      const auto qh = lt.q.middleCols(h * dk, dk);
      const auto kh = lt.k.middleCols(h * dk, dk);
      const auto vh = lt.v.middleCols(h * dk, dk);
      const MatrixXd dhead = dconcat.middleCols(h * dk, dk);

      const MatrixXd da = dhead * vh.transpose();
      dv.middleCols(h * dk, dk) = a.transpose() * dhead;

      MatrixXd dscores(S, S);
      for (int r = 0; r < S; ++r) {
        const double dot = da.row(r).cwiseProduct(a.row(r)).sum();
        dscores.row(r) = a.row(r).cwiseProduct(da.row(r).array() - dot);
      }
      dq.middleCols(h * dk, dk) = dscores * kh * scale;
      dk_mat.middleCols(h * dk, dk) = dscores.transpose() * qh * scale;
    }

    gp.wq += lt.x_in.transpose() * dq;
    gp.bq.row(0) += dq.colwise().sum();
    gp.wk += lt.x_in.transpose() * dk_mat;
    gp.bk.row(0) += dk_mat.colwise().sum();
    gp.wv += lt.x_in.transpose() * dv;
    gp.bv.row(0) += dv.colwise().sum();
    dx_in += dq * lp.wq.transpose() + dk_mat * lp.wk.transpose() + dv * lp.wv.transpose();
    dx = std::move(dx_in);
  }

  // Embedding rows.
  grads.goal_embedding.row(trace.goal_bucket) += dx.row(0);
  grads.position_embedding.row(0) += dx.row(0);
  for (int i = 0; i < cfg.window; ++i) {
    grads.token_embedding.row(trace.obs.ids[static_cast<size_t>(i)]) += dx.row(i + 1);
    grads.position_embedding.row(i + 1) += dx.row(i + 1);
  }
}

ActionDistribution masked_distribution(const Eigen::VectorXd& logits, const TokenSet& valid,
                                       bool eos_masked, double temperature,
                                       const std::vector<double>& decoded_lengths,
                                       double bias_coeff) {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (static_cast<size_t>(logits.size()) != decoded_lengths.size())
    throw ConfigError("decoded length table does not match the logits size");
  const TokenId eos = valid.vocab()->eos_id();

  ActionDistribution dist;
  dist.probs = VectorXd::Zero(logits.size());
  dist.logp = VectorXd::Constant(logits.size(), kNegInf);
  for (TokenId id : valid.ids()) {
    if (eos_masked && id == eos) continue;
    dist.support.push_back(id);
  }
  if (dist.support.empty()) throw ConfigError("empty action set after masking");

  double max_adj = kNegInf;
  std::vector<double> adjusted(dist.support.size());
  for (size_t i = 0; i < dist.support.size(); ++i) {
    const TokenId id = dist.support[i];
    adjusted[i] = (logits(id) + bias_coeff * decoded_lengths[static_cast<size_t>(id)]) /
                  temperature;
    max_adj = std::max(max_adj, adjusted[i]);
  }
  double z = 0.0;
  for (double a : adjusted) z += std::exp(a - max_adj);
  const double log_z = std::log(z) + max_adj;
  for (size_t i = 0; i < dist.support.size(); ++i) {
    const TokenId id = dist.support[i];
    dist.logp(id) = adjusted[i] - log_z;
    dist.probs(id) = std::exp(dist.logp(id));
  }
  return dist;
}

ActionDistribution nucleus_filter(const ActionDistribution& dist, double top_p) {
  if (!(top_p > 0.0) || top_p > 1.0) throw ConfigError("top_p must be in (0, 1]");
  if (top_p == 1.0) return dist;
  std::vector<TokenId> order = dist.support;
  std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
    return dist.probs(a) != dist.probs(b) ? dist.probs(a) > dist.probs(b) : a < b;
  });
  double cum = 0.0;
  std::vector<TokenId> kept;
  for (TokenId id : order) {
    kept.push_back(id);
    cum += dist.probs(id);
    if (cum >= top_p) break;
  }
  std::sort(kept.begin(), kept.end());

  ActionDistribution out;
  out.probs = VectorXd::Zero(dist.probs.size());
  out.logp = VectorXd::Constant(dist.logp.size(), kNegInf);
  out.support = kept;
  double mass = 0.0;
  for (TokenId id : kept) mass += dist.probs(id);
  for (TokenId id : kept) {
    out.probs(id) = dist.probs(id) / mass;
    out.logp(id) = std::log(out.probs(id));
  }
  return out;
}

std::pair<TokenId, double> sample_action(const ActionDistribution& dist, double epsilon,
                                         Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon must be in [0, 1]");
  const size_t n = dist.support.size();
  TokenId action;
  if (rng.next_double() < epsilon) {
    action = dist.support[rng.below(n)];
  } else {
    const double u = rng.next_double();
    double cum = 0.0;
    action = dist.support.back();
    for (TokenId id : dist.support) {
      cum += dist.probs(id);
      if (u < cum) {
        action = id;
        break;
      }
    }
  }
  const double q = (1.0 - epsilon) * dist.probs(action) + epsilon / static_cast<double>(n);
  return {action, std::log(q)};
}

double epsilon_at(long episode, const ExplorationSchedule& schedule) {
  if (episode < 0) throw ConfigError("episode must be non-negative");
  if (schedule.decay_episodes <= 0 || episode >= schedule.decay_episodes)
    return schedule.epsilon_end;
  const double frac = static_cast<double>(episode) / static_cast<double>(schedule.decay_episodes);
  return schedule.epsilon_start + (schedule.epsilon_end - schedule.epsilon_start) * frac;
}

std::vector<double> decoded_lengths(const Vocabulary& vocab) {
  std::vector<double> lengths(static_cast<size_t>(vocab.size()));
  for (TokenId id = 0; id < vocab.size(); ++id)
    lengths[static_cast<size_t>(id)] = static_cast<double>(vocab.piece(id).size());
  return lengths;
}

namespace {

constexpr char kSnapshotMagic[8] = {'O', 'G', 'B', 'P', 'O', 'L', '0', '1'};

void write_u64(std::ostream& out, uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

}  // namespace

void save_policy(const std::string& path, const PolicyParams& params) {
  std::ofstream out(path + ".tmp", std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write policy snapshot: " + path);
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));

  nlohmann::json cfg;
  const PolicyConfig& c = params.config;
  cfg["vocab_size"] = c.vocab_size;
  cfg["embed_dim"] = c.embed_dim;
  cfg["layers"] = c.layers;
  cfg["heads"] = c.heads;
  cfg["dropout"] = c.dropout;
  cfg["window"] = c.window;
  cfg["goal_bucket_width"] = c.goal_bucket_width;
  cfg["goal_max"] = c.goal_max;
  cfg["length_bias_coeff"] = c.length_bias_coeff;
  cfg["policy_temperature"] = c.policy_temperature;
  const std::string cfg_str = cfg.dump();
  write_u64(out, cfg_str.size());
  out.write(cfg_str.data(), static_cast<std::streamsize>(cfg_str.size()));

  uint64_t count = 0;
  visit_params(const_cast<PolicyParams&>(params),
               [&](const std::string&, MatrixXd&) { ++count; });
  write_u64(out, count);
  visit_params(const_cast<PolicyParams&>(params), [&](const std::string& name, MatrixXd& m) {
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<uint64_t>(m.rows()));
    write_u64(out, static_cast<uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
  });
  out.close();
  if (!out) throw ConfigError("policy snapshot write failed: " + path);
  if (std::rename((path + ".tmp").c_str(), path.c_str()) != 0)
    throw ConfigError("rename failed for " + path);
}

PolicyParams load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open policy snapshot: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kSnapshotMagic, 8) != 0)
    throw ConfigError("not a policy snapshot: " + path);

  const uint64_t cfg_len = read_u64(in);
  std::string cfg_str(cfg_len, '\0');
  in.read(cfg_str.data(), static_cast<std::streamsize>(cfg_len));
  const auto cfg = nlohmann::json::parse(cfg_str);
  PolicyConfig c;
  c.vocab_size = cfg.at("vocab_size").get<int>();
  c.embed_dim = cfg.at("embed_dim").get<int>();
  c.layers = cfg.at("layers").get<int>();
  c.heads = cfg.at("heads").get<int>();
  c.dropout = cfg.at("dropout").get<double>();
  c.window = cfg.at("window").get<int>();
  c.goal_bucket_width = cfg.at("goal_bucket_width").get<int>();
  c.goal_max = cfg.at("goal_max").get<long>();
  c.length_bias_coeff = cfg.at("length_bias_coeff").get<double>();
  c.policy_temperature = cfg.at("policy_temperature").get<double>();

  Rng throwaway(0);
  PolicyParams params = PolicyParams::init(c, throwaway);
  const uint64_t count = read_u64(in);
  for (uint64_t t = 0; t < count; ++t) {
    const uint64_t name_len = read_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const uint64_t rows = read_u64(in);
    const uint64_t cols = read_u64(in);
    bool found = false;
    visit_params(params, [&](const std::string& n, MatrixXd& m) {
      if (n != name) return;
      found = true;
      if (static_cast<uint64_t>(m.rows()) != rows || static_cast<uint64_t>(m.cols()) != cols)
        throw ConfigError("tensor shape mismatch in snapshot: " + name);
      in.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * rows * cols));
    });
    if (!found) throw ConfigError("unknown tensor in snapshot: " + name);
  }
  if (!in) throw ConfigError("truncated policy snapshot: " + path);
  return params;
}

}  // namespace ogb
