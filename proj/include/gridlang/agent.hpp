#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridlang/attention.hpp"
#include "gridlang/corpus.hpp"
#include "gridlang/lstm.hpp"
#include "gridlang/rng.hpp"
#include "gridlang/tensor.hpp"

namespace gridlang {

// One parameter set serving both roles: Speaker (actions -> words) and
// Listener (words -> actions). The embedding matrix is shared between the
// encoder input lookup and the decoder output projection (logits = E z), so
// the embedding dimension equals the hidden size.
//
// Decoder wiring: the LSTM consumes the previous token's embedding; with
// attention the context vector (additive scoring against all encoder
// states, score dimension = hidden size) is concatenated to the new hidden
// state; the concatenation passes through tanh(Wc [h; ctx] + bc) and is
// projected to vocabulary logits through the tied embedding plus a free
// output bias. The decoder starts from the encoder's final (h, c).
struct AgentParams {
  int vocab_size = 0;
  int hidden = 0;
  bool attention = false;

  Tensor embedding;  // V x d
  LstmParams encoder;
  LstmParams decoder;
  AttentionParams attn;
  Tensor combine_w;  // d x (attention ? 2d : d)
  Tensor combine_b;  // d
  Tensor out_bias;   // V
};

enum class RoleDirection : uint8_t { Speaker = 0, Listener };

struct AgentConfig {
  int hidden = 16;
  bool attention = true;
};

// All tensors uniform in [-0.08, 0.08], in canonical visit order.
AgentParams make_agent(const Vocabulary& vocab, const AgentConfig& config, Rng& rng);
AgentParams zeros_like(const AgentParams& params);

template <typename F>
void for_each_tensor(AgentParams& p, F&& f) {
  f(std::string("embedding"), p.embedding);
  for_each_tensor(p.encoder, "encoder", f);
  for_each_tensor(p.decoder, "decoder", f);
  if (p.attention) for_each_tensor(p.attn, "attention", f);
  f(std::string("combine_w"), p.combine_w);
  f(std::string("combine_b"), p.combine_b);
  f(std::string("out_bias"), p.out_bias);
}

std::vector<Tensor*> tensor_pointers(AgentParams& p);
std::vector<const Tensor*> tensor_pointers(const AgentParams& p);
void set_zero(AgentParams& p);
void scale(AgentParams& p, double factor);
double squared_norm(const AgentParams& p);

// --- Forward / backward -------------------------------------------------

struct EncodeCache {
  std::vector<int> ids;
  LstmSequenceCache lstm;

  int length() const { return lstm.len; }
  const double* states() const { return lstm.h.data(); }
  const double* final_h() const { return lstm.row_h(lstm.len - 1); }
  const double* final_c() const { return lstm.row_c(lstm.len - 1); }
};

// One encoder state per input position. Throws on empty input or unknown id.
void encode_sequence(const AgentParams& p, std::span<const int> ids, EncodeCache& cache);

struct DecoderCache {
  int len = 0;
  int zin_dim = 0;
  std::vector<int> prev_ids;          // SOS, target[0], ..., target[len-2]
  LstmSequenceCache lstm;
  std::vector<AttentionCache> attn;   // per step, when attention is on
  std::vector<double> zin;            // len x zin_dim
  std::vector<double> z;              // len x d
  std::vector<double> logits;         // len x V
};

// Teacher forcing: step k scores targets[k] conditioned on the gold prefix.
void decode_teacher_forced(const AgentParams& p, const EncodeCache& enc,
                           std::span<const int> targets, DecoderCache& cache);

// dlogits is len x V. Gradients accumulate into `grads`; encoder-state
// gradients (including the initial-state contribution) accumulate into
// denc_states (L x d) and dc_final (d).
void decoder_backward(const AgentParams& p, const EncodeCache& enc, const DecoderCache& cache,
                      const double* dlogits, AgentParams& grads, double* denc_states,
                      double* dc_final);

void encoder_backward(const AgentParams& p, const EncodeCache& enc, const double* denc_states,
                      const double* dc_final, AgentParams& grads);

// Output head on its own: attention (if any) against the encoder states,
// combine, project through the tied embedding.
std::vector<double> step_logits(const AgentParams& p, std::span<const double> h,
                                const EncodeCache& enc);

// --- Decoding -------------------------------------------------------------

struct DecodeResult {
  std::vector<int> ids;    // produced tokens, EOS not included
  bool truncated = false;  // hit max_len before EOS
};

// Argmax at each step, fed back, halting at EOS; ties break to the lowest
// token id.
DecodeResult greedy_decode(const AgentParams& p, std::span<const int> input_ids, int max_len = 40);

// Ancestral sampling from the decoder's softmax, temperature 1.
DecodeResult sample_decode(const AgentParams& p, std::span<const int> input_ids, Rng& rng,
                           int max_len = 40);

// --- Persistence ------------------------------------------------------------

void save_agent(const std::filesystem::path& path, const AgentParams& p, const Vocabulary& vocab);
AgentParams load_agent(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace gridlang
