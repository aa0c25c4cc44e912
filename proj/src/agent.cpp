#include "gridlang/agent.hpp"

#include <cmath>
#include <stdexcept>

#include "gridlang/checkpoint.hpp"
#include "gridlang/loss.hpp"

namespace gridlang {

AgentParams make_agent(const Vocabulary& vocab, const AgentConfig& config, Rng& rng) {
  AgentParams p;
  p.vocab_size = vocab.size();
  p.hidden = config.hidden;
  p.attention = config.attention;
  const int d = config.hidden;
  p.embedding = Tensor::zeros({p.vocab_size, d});
  p.encoder = LstmParams::create(d, d);
  p.decoder = LstmParams::create(d, d);
  if (config.attention) p.attn = AttentionParams::create(d, d);
  p.combine_w = Tensor::zeros({d, config.attention ? 2 * d : d});
  p.combine_b = Tensor::zeros({d});
  p.out_bias = Tensor::zeros({p.vocab_size});
  for_each_tensor(p, [&](const std::string&, Tensor& t) { fill_uniform(t, rng, -0.08, 0.08); });
  return p;
}

AgentParams zeros_like(const AgentParams& params) {
  AgentParams p;
  p.vocab_size = params.vocab_size;
  p.hidden = params.hidden;
  p.attention = params.attention;
  p.embedding = Tensor::zeros(params.embedding.shape);
  const int d = params.hidden;
  p.encoder = LstmParams::create(d, d);
  p.decoder = LstmParams::create(d, d);
  if (params.attention) p.attn = AttentionParams::create(d, d);
  p.combine_w = Tensor::zeros(params.combine_w.shape);
  p.combine_b = Tensor::zeros(params.combine_b.shape);
  p.out_bias = Tensor::zeros(params.out_bias.shape);
  return p;
}

std::vector<Tensor*> tensor_pointers(AgentParams& p) {
  std::vector<Tensor*> out;
  for_each_tensor(p, [&](const std::string&, Tensor& t) { out.push_back(&t); });
  return out;
}

std::vector<const Tensor*> tensor_pointers(const AgentParams& p) {
  std::vector<const Tensor*> out;
  for_each_tensor(const_cast<AgentParams&>(p),
                  [&](const std::string&, Tensor& t) { out.push_back(&t); });
  return out;
}

void set_zero(AgentParams& p) {
  for_each_tensor(p, [](const std::string&, Tensor& t) { t.set_zero(); });
}

void scale(AgentParams& p, double factor) {
  for_each_tensor(p, [factor](const std::string&, Tensor& t) {
    for (double& x : t.v) x *= factor;
  });
}

double squared_norm(const AgentParams& p) {
  double acc = 0.0;
  for_each_tensor(const_cast<AgentParams&>(p), [&](const std::string&, Tensor& t) {
    for (double x : t.v) acc += x * x;
  });
  return acc;
}

void encode_sequence(const AgentParams& p, std::span<const int> ids, EncodeCache& cache) {
  if (ids.empty()) throw std::invalid_argument("encoder input is empty");
  const int d = p.hidden;
  const int len = static_cast<int>(ids.size());
  cache.ids.assign(ids.begin(), ids.end());
  cache.lstm.reset(len, d, d);
  for (int t = 0; t < len; ++t) {
    const int id = ids[t];
    if (id < 0 || id >= p.vocab_size) throw std::invalid_argument("unknown token id");
    std::copy(p.embedding.row(id), p.embedding.row(id) + d, cache.lstm.row_x(t));
    lstm_forward_step(p.encoder, cache.lstm, t, t > 0 ? cache.lstm.row_h(t - 1) : nullptr,
                      t > 0 ? cache.lstm.row_c(t - 1) : nullptr);
  }
}

namespace {

// Shared by teacher forcing and the decoding loops: one decoder step from
// (prev embedding already in lstm cache row k) to logits row.
void output_head(const AgentParams& p, const double* h, const EncodeCache& enc,
                 AttentionCache* attn_cache, double* zin, double* z, double* logits) {
  const int d = p.hidden;
  std::copy(h, h + d, zin);
  if (p.attention) {
    attention_forward(p.attn, h, enc.states(), enc.length(), *attn_cache);
    std::copy(attn_cache->context.begin(), attn_cache->context.end(), zin + d);
  }
  matvec(p.combine_w, zin, z, false);
  add_to({p.combine_b.v.data(), p.combine_b.v.size()}, z);
  for (int j = 0; j < d; ++j) z[j] = std::tanh(z[j]);
  matvec(p.embedding, z, logits, false);
  add_to({p.out_bias.v.data(), p.out_bias.v.size()}, logits);
}

}  // namespace

void decode_teacher_forced(const AgentParams& p, const EncodeCache& enc,
                           std::span<const int> targets, DecoderCache& cache) {
  if (targets.empty()) throw std::invalid_argument("empty decode target");
  const int d = p.hidden;
  const int len = static_cast<int>(targets.size());
  const int v = p.vocab_size;
  cache.len = len;
  cache.zin_dim = p.attention ? 2 * d : d;
  cache.prev_ids.assign(len, Vocabulary::kSos);
  for (int k = 1; k < len; ++k) cache.prev_ids[k] = targets[k - 1];
  cache.lstm.reset(len, d, d);
  if (p.attention) {
    if (static_cast<int>(cache.attn.size()) < len) cache.attn.resize(len);
  }
  cache.zin.assign(static_cast<size_t>(len) * cache.zin_dim, 0.0);
  cache.z.assign(static_cast<size_t>(len) * d, 0.0);
  cache.logits.assign(static_cast<size_t>(len) * v, 0.0);
  for (int k = 0; k < len; ++k) {
    const int prev = cache.prev_ids[k];
    if (prev < 0 || prev >= v) throw std::invalid_argument("unknown token id");
    std::copy(p.embedding.row(prev), p.embedding.row(prev) + d, cache.lstm.row_x(k));
    const double* h_prev = k > 0 ? cache.lstm.row_h(k - 1) : enc.final_h();
    const double* c_prev = k > 0 ? cache.lstm.row_c(k - 1) : enc.final_c();
    lstm_forward_step(p.decoder, cache.lstm, k, h_prev, c_prev);
    output_head(p, cache.lstm.row_h(k), enc, p.attention ? &cache.attn[k] : nullptr,
                cache.zin.data() + static_cast<size_t>(k) * cache.zin_dim,
                cache.z.data() + static_cast<size_t>(k) * d,
                cache.logits.data() + static_cast<size_t>(k) * v);
  }
}

void decoder_backward(const AgentParams& p, const EncodeCache& enc, const DecoderCache& cache,
                      const double* dlogits, AgentParams& grads, double* denc_states,
                      double* dc_final) {
  const int d = p.hidden;
  const int v = p.vocab_size;
  const int len = cache.len;

  thread_local std::vector<double> dz, da, dzin, dh, dc, dh_prev, dc_prev, dx;
  dz.assign(d, 0.0);
  da.assign(d, 0.0);
  dzin.assign(cache.zin_dim, 0.0);
  dh.assign(d, 0.0);
  dc.assign(d, 0.0);
  dh_prev.assign(d, 0.0);
  dc_prev.assign(d, 0.0);
  dx.assign(d, 0.0);

  std::fill(dh.begin(), dh.end(), 0.0);
  std::fill(dc.begin(), dc.end(), 0.0);
  for (int k = len - 1; k >= 0; --k) {
    const double* dlog = dlogits + static_cast<size_t>(k) * v;
    const double* z = cache.z.data() + static_cast<size_t>(k) * d;
    const double* zin = cache.zin.data() + static_cast<size_t>(k) * cache.zin_dim;
    // logits = E z + out_bias
    add_outer(grads.embedding, dlog, z);
    for (int i = 0; i < v; ++i) grads.out_bias.v[i] += dlog[i];
    matvec_transposed(p.embedding, dlog, dz.data(), false);
    // z = tanh(Wc zin + bc)
    for (int j = 0; j < d; ++j) da[j] = dz[j] * (1.0 - z[j] * z[j]);
    add_outer(grads.combine_w, da.data(), zin);
    for (int j = 0; j < d; ++j) grads.combine_b.v[j] += da[j];
    matvec_transposed(p.combine_w, da.data(), dzin.data(), false);
    // split zin gradient into hidden + context parts
    for (int j = 0; j < d; ++j) dh[j] += dzin[j];
    if (p.attention) {
      attention_backward(p.attn, cache.lstm.row_h(k), enc.states(), cache.attn[k],
                         dzin.data() + d, grads.attn, dh.data(), denc_states);
    }
    const double* h_prev = k > 0 ? cache.lstm.row_h(k - 1) : enc.final_h();
    const double* c_prev = k > 0 ? cache.lstm.row_c(k - 1) : enc.final_c();
    lstm_backward_step(p.decoder, cache.lstm, k, h_prev, c_prev, dh.data(), dc.data(),
                       grads.decoder, dx.data(), dh_prev.data(), dc_prev.data());
    add_to({dx.data(), dx.size()}, grads.embedding.row(cache.prev_ids[k]));
    std::swap(dh, dh_prev);
    std::swap(dc, dc_prev);
  }
  // Decoder initial state was the encoder's final state.
  const int enc_last = enc.length() - 1;
  add_to({dh.data(), dh.size()}, denc_states + static_cast<size_t>(enc_last) * d);
  add_to({dc.data(), dc.size()}, dc_final);
}

void encoder_backward(const AgentParams& p, const EncodeCache& enc, const double* denc_states,
                      const double* dc_final, AgentParams& grads) {
  const int d = p.hidden;
  const int len = enc.length();

  thread_local std::vector<double> dh, dc, dh_prev, dc_prev, dx;
  dh.assign(d, 0.0);
  dc.assign(d, 0.0);
  dh_prev.assign(d, 0.0);
  dc_prev.assign(d, 0.0);
  dx.assign(d, 0.0);

  std::copy(dc_final, dc_final + d, dc.begin());
  std::fill(dh.begin(), dh.end(), 0.0);
  for (int t = len - 1; t >= 0; --t) {
    for (int j = 0; j < d; ++j) dh[j] += denc_states[static_cast<size_t>(t) * d + j];
    const double* h_prev = t > 0 ? enc.lstm.row_h(t - 1) : nullptr;
    const double* c_prev = t > 0 ? enc.lstm.row_c(t - 1) : nullptr;
    lstm_backward_step(p.encoder, enc.lstm, t, h_prev, c_prev, dh.data(), dc.data(),
                       grads.encoder, dx.data(), t > 0 ? dh_prev.data() : nullptr,
                       t > 0 ? dc_prev.data() : nullptr);
    add_to({dx.data(), dx.size()}, grads.embedding.row(enc.ids[t]));
    if (t > 0) {
      std::copy(dh_prev.begin(), dh_prev.end(), dh.begin());
      std::copy(dc_prev.begin(), dc_prev.end(), dc.begin());
    }
  }
}

std::vector<double> step_logits(const AgentParams& p, std::span<const double> h,
                                const EncodeCache& enc) {
  if (static_cast<int>(h.size()) != p.hidden) {
    throw std::invalid_argument("step_logits: hidden state size mismatch");
  }
  AttentionCache attn_cache;
  std::vector<double> zin(p.attention ? 2 * p.hidden : p.hidden);
  std::vector<double> z(p.hidden);
  std::vector<double> logits(p.vocab_size);
  output_head(p, h.data(), enc, p.attention ? &attn_cache : nullptr, zin.data(), z.data(),
              logits.data());
  return logits;
}

namespace {

// One free decoding step; h/c updated in place.
void advance_state(const AgentParams& p, int prev, std::vector<double>& h, std::vector<double>& c,
                   LstmSequenceCache& scratch) {
  const int d = p.hidden;
  scratch.reset(1, d, d);
  std::copy(p.embedding.row(prev), p.embedding.row(prev) + d, scratch.row_x(0));
  lstm_forward_step(p.decoder, scratch, 0, h.data(), c.data());
  std::copy(scratch.h.begin(), scratch.h.begin() + d, h.begin());
  std::copy(scratch.c.begin(), scratch.c.begin() + d, c.begin());
}

template <typename PickToken>
DecodeResult decode_loop(const AgentParams& p, std::span<const int> input_ids, int max_len,
                         PickToken&& pick) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  EncodeCache enc;
  encode_sequence(p, input_ids, enc);
  const int d = p.hidden;
  std::vector<double> h(enc.final_h(), enc.final_h() + d);
  std::vector<double> c(enc.final_c(), enc.final_c() + d);
  LstmSequenceCache scratch;
  DecodeResult result;
  int prev = Vocabulary::kSos;
  for (int k = 0; k < max_len; ++k) {
    advance_state(p, prev, h, c, scratch);
    const std::vector<double> logits = step_logits(p, h, enc);
    const int token = pick(logits);
    if (token == Vocabulary::kEos) return result;
    result.ids.push_back(token);
    prev = token;
  }
  result.truncated = true;
  return result;
}

}  // namespace

DecodeResult greedy_decode(const AgentParams& p, std::span<const int> input_ids, int max_len) {
  return decode_loop(p, input_ids, max_len, [](const std::vector<double>& logits) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(logits.size()); ++i) {
      if (logits[i] > logits[best]) best = i;  // strict: ties keep the lowest id
    }
    return best;
  });
}

DecodeResult sample_decode(const AgentParams& p, std::span<const int> input_ids, Rng& rng,
                           int max_len) {
  return decode_loop(p, input_ids, max_len, [&rng](const std::vector<double>& logits) {
    std::vector<double> probs(logits.size());
    softmax(logits, probs);
    const double r = rng.uniform();
    double cum = 0.0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      cum += probs[i];
      if (r < cum) return i;
    }
    return static_cast<int>(probs.size()) - 1;
  });
}

void save_agent(const std::filesystem::path& path, const AgentParams& p, const Vocabulary& vocab) {
  nlohmann::json header;
  header["format"] = "agent";
  header["vocab_hash"] = vocab.hash();
  header["vocab_size"] = p.vocab_size;
  header["hidden"] = p.hidden;
  header["attention"] = p.attention;
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for_each_tensor(const_cast<AgentParams&>(p), [&](const std::string& name, Tensor& t) {
    tensors.emplace_back(name, &t);
  });
  save_tensors(path, tensors, header);
}

AgentParams load_agent(const std::filesystem::path& path, const Vocabulary& vocab) {
  LoadedTensors loaded = load_tensors(path);
  if (loaded.header.value("format", "") != "agent") {
    throw std::runtime_error("not an agent checkpoint: " + path.string());
  }
  if (loaded.header.at("vocab_hash").get<uint64_t>() != vocab.hash()) {
    throw std::runtime_error("agent checkpoint was built against a different vocabulary");
  }
  AgentConfig config;
  config.hidden = loaded.header.at("hidden").get<int>();
  config.attention = loaded.header.at("attention").get<bool>();
  Rng rng(0);
  AgentParams p = make_agent(vocab, config, rng);
  for_each_tensor(p, [&](const std::string& name, Tensor& t) {
    auto it = loaded.tensors.find(name);
    if (it == loaded.tensors.end()) {
      throw std::runtime_error("checkpoint missing tensor: " + name);
    }
    if (it->second.shape != t.shape) {
      throw std::runtime_error("checkpoint tensor shape mismatch: " + name);
    }
    t = std::move(it->second);
  });
  return p;
}

}  // namespace gridlang
