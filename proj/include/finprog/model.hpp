#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "finprog/pretrain.hpp"
#include "finprog/rng.hpp"
#include "finprog/text.hpp"

// Desk-scale reference encoder and the three loss heads. The encoder is a
// deliberately small, deterministic stand-in: token embeddings plus one tanh
// feed-forward mixer. The losses and heads do not depend on the encoder's
// internals, so they transfer to any encoder that yields sequence and
// per-token representations; everything here exists so the objectives can be
// verified exactly (closed-form anchors and finite-difference checks).

namespace finprog {

enum class ModelErrc {
  SpanOutOfRange,
  AllCorporaEmpty,
};

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ModelErrc code() const { return code_; }

 private:
  ModelErrc code_;
};

// --------------------------------------------------------------------------
// Vocabulary

struct Vocab {
  static constexpr std::size_t kUnkId = 0;
  static constexpr std::size_t kMaskId = 1;

  Vocab() {
    add("[UNK]");
    add(std::string(kMaskToken));
  }

  std::size_t add(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    const std::size_t id = tokens.size();
    ids_.emplace(token, id);
    tokens.push_back(token);
    return id;
  }

  std::size_t lookup(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnkId : it->second;
  }

  std::size_t size() const { return tokens.size(); }

  std::vector<std::string> tokens;

 private:
  std::unordered_map<std::string, std::size_t> ids_;
};

inline std::vector<std::size_t> encode(const Vocab& vocab, std::string_view text) {
  std::vector<std::size_t> ids;
  for (const TextToken& tok : whitespace_tokenize(text)) {
    ids.push_back(vocab.lookup(tok.surface));
  }
  return ids;
}

// --------------------------------------------------------------------------
// Encoder

// Parameter layout (flat, for gradient checking):
//   [ |V| * d embeddings ][ d * d mixer weight, row-major ][ d mixer bias ]
struct TinyEncoder {
  Vocab vocab;
  std::size_t dim = 32;
  std::vector<double> params;

  static TinyEncoder zeros(Vocab vocab, std::size_t dim) {
    TinyEncoder enc;
    enc.vocab = std::move(vocab);
    enc.dim = dim;
    enc.params.assign(enc.vocab.size() * dim + dim * dim + dim, 0.0);
    return enc;
  }

  static TinyEncoder random_init(Vocab vocab, std::size_t dim, std::mt19937_64& rng,
                                 double scale = 0.1) {
    TinyEncoder enc = zeros(std::move(vocab), dim);
    for (double& p : enc.params) p = (uniform_real(rng) * 2.0 - 1.0) * scale;
    return enc;
  }

  std::size_t emb_offset(std::size_t token_id) const { return token_id * dim; }
  std::size_t weight_offset() const { return vocab.size() * dim; }
  std::size_t bias_offset() const { return vocab.size() * dim + dim * dim; }

  // h = tanh(W x + b)
  std::vector<double> mix(const std::vector<double>& x) const {
    std::vector<double> h(dim, 0.0);
    const double* w = params.data() + weight_offset();
    const double* b = params.data() + bias_offset();
    for (std::size_t r = 0; r < dim; ++r) {
      double z = b[r];
      const double* row = w + r * dim;
      for (std::size_t c = 0; c < dim; ++c) z += row[c] * x[c];
      h[r] = std::tanh(z);
    }
    return h;
  }

  std::vector<double> embedding(std::size_t token_id) const {
    const double* e = params.data() + emb_offset(token_id);
    return std::vector<double>(e, e + dim);
  }

  /// Per-token representation: the mixed embedding.
  std::vector<double> token_repr(std::size_t token_id) const { return mix(embedding(token_id)); }

  /// Sequence representation: the mixed mean of token embeddings.
  std::vector<double> sequence_repr(const std::vector<std::size_t>& token_ids) const {
    std::vector<double> mean(dim, 0.0);
    if (!token_ids.empty()) {
      for (std::size_t id : token_ids) {
        const double* e = params.data() + emb_offset(id);
        for (std::size_t c = 0; c < dim; ++c) mean[c] += e[c];
      }
      for (double& v : mean) v /= static_cast<double>(token_ids.size());
    }
    return mix(mean);
  }
};

// --------------------------------------------------------------------------
// Loss heads

// Parameter layout:
//   [ d rank weight ][ 1 rank bias ]
//   [ 10 * d operator weight ][ 10 operator bias ]
//   [ |V| * d mlm weight ][ |V| mlm bias ]
struct LossHeads {
  static constexpr std::size_t kOperatorCount = 10;

  std::size_t dim = 32;
  std::size_t vocab_size = 2;
  std::vector<double> params;

  static LossHeads zeros(std::size_t dim, std::size_t vocab_size) {
    LossHeads heads;
    heads.dim = dim;
    heads.vocab_size = vocab_size;
    heads.params.assign(heads.total_params(), 0.0);
    return heads;
  }

  static LossHeads random_init(std::size_t dim, std::size_t vocab_size, std::mt19937_64& rng,
                               double scale = 0.1) {
    LossHeads heads = zeros(dim, vocab_size);
    for (double& p : heads.params) p = (uniform_real(rng) * 2.0 - 1.0) * scale;
    return heads;
  }

  std::size_t total_params() const {
    return (dim + 1) + (kOperatorCount * dim + kOperatorCount) + (vocab_size * dim + vocab_size);
  }
  std::size_t rank_w_offset() const { return 0; }
  std::size_t rank_b_offset() const { return dim; }
  std::size_t op_w_offset() const { return dim + 1; }
  std::size_t op_b_offset() const { return op_w_offset() + kOperatorCount * dim; }
  std::size_t mlm_w_offset() const { return op_b_offset() + kOperatorCount; }
  std::size_t mlm_b_offset() const { return mlm_w_offset() + vocab_size * dim; }

  double rank_score_raw(const std::vector<double>& h) const {
    const double* w = params.data() + rank_w_offset();
    double a = params[rank_b_offset()];
    for (std::size_t c = 0; c < dim; ++c) a += w[c] * h[c];
    return a;
  }

  std::vector<double> op_logits(const std::vector<double>& h) const {
    return linear(h, op_w_offset(), op_b_offset(), kOperatorCount);
  }

  std::vector<double> mlm_logits(const std::vector<double>& h) const {
    return linear(h, mlm_w_offset(), mlm_b_offset(), vocab_size);
  }

 private:
  std::vector<double> linear(const std::vector<double>& h, std::size_t w_off, std::size_t b_off,
                             std::size_t rows) const {
    std::vector<double> out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double z = params[b_off + r];
      const double* row = params.data() + w_off + r * dim;
      for (std::size_t c = 0; c < dim; ++c) z += row[c] * h[c];
      out[r] = z;
    }
    return out;
  }
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> enc_grad;
  std::vector<double> head_grad;
};

// --------------------------------------------------------------------------
// Shared backprop pieces

namespace detail {

inline std::vector<double> softmax(const std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline double softplus(double x) {
  // log(1 + e^x) without overflow
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Backward through h = tanh(W x + b) given dL/dh; accumulates into grad and
// returns dL/dx.
inline std::vector<double> mixer_backward(const TinyEncoder& enc, const std::vector<double>& x,
                                          const std::vector<double>& h,
                                          const std::vector<double>& dh,
                                          std::vector<double>& enc_grad) {
  const std::size_t d = enc.dim;
  const double* w = enc.params.data() + enc.weight_offset();
  std::vector<double> dx(d, 0.0);
  double* gw = enc_grad.data() + enc.weight_offset();
  double* gb = enc_grad.data() + enc.bias_offset();
  for (std::size_t r = 0; r < d; ++r) {
    const double dz = dh[r] * (1.0 - h[r] * h[r]);
    if (dz == 0.0) continue;
    gb[r] += dz;
    const double* row = w + r * d;
    double* grow = gw + r * d;
    for (std::size_t c = 0; c < d; ++c) {
      grow[c] += dz * x[c];
      dx[c] += dz * row[c];
    }
  }
  return dx;
}

// Forward + backward for a sequence representation; dL/dh flows back into the
// mixer and the mean of the token embeddings.
struct SequenceRepr {
  std::vector<double> mean;
  std::vector<double> h;
};

inline SequenceRepr sequence_forward(const TinyEncoder& enc,
                                     const std::vector<std::size_t>& ids) {
  SequenceRepr out;
  out.mean.assign(enc.dim, 0.0);
  if (!ids.empty()) {
    for (std::size_t id : ids) {
      const double* e = enc.params.data() + enc.emb_offset(id);
      for (std::size_t c = 0; c < enc.dim; ++c) out.mean[c] += e[c];
    }
    for (double& v : out.mean) v /= static_cast<double>(ids.size());
  }
  out.h = enc.mix(out.mean);
  return out;
}

inline void sequence_backward(const TinyEncoder& enc, const std::vector<std::size_t>& ids,
                              const SequenceRepr& repr, const std::vector<double>& dh,
                              std::vector<double>& enc_grad) {
  const std::vector<double> dmean = mixer_backward(enc, repr.mean, repr.h, dh, enc_grad);
  if (ids.empty()) return;
  const double inv = 1.0 / static_cast<double>(ids.size());
  for (std::size_t id : ids) {
    double* ge = enc_grad.data() + enc.emb_offset(id);
    for (std::size_t c = 0; c < enc.dim; ++c) ge[c] += dmean[c] * inv;
  }
}

inline std::vector<std::size_t> encode_ranked_set(const Vocab& vocab, const std::string& question,
                                                  const std::vector<EvidenceItem>& evidence) {
  std::vector<std::size_t> ids = encode(vocab, question);
  for (const EvidenceItem& item : evidence) {
    const std::vector<std::size_t> more = encode(vocab, item.sentence);
    ids.insert(ids.end(), more.begin(), more.end());
  }
  return ids;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Losses

/// Pairwise ranking loss: s = tanh(rank head(sequence repr)), and the pair
/// loss is binary cross-entropy on sigmoid(s_higher - s_lower) with target 1,
/// i.e. -log sigma(s_u - s_v). Returns exact analytic gradients for every
/// encoder and head parameter.
inline LossResult loss_vir(const RankPair& pair, const TinyEncoder& enc, const LossHeads& heads) {
  LossResult result;
  result.enc_grad.assign(enc.params.size(), 0.0);
  result.head_grad.assign(heads.params.size(), 0.0);

  const auto ids_u = detail::encode_ranked_set(enc.vocab, pair.question, pair.higher.evidence);
  const auto ids_v = detail::encode_ranked_set(enc.vocab, pair.question, pair.lower.evidence);
  const auto repr_u = detail::sequence_forward(enc, ids_u);
  const auto repr_v = detail::sequence_forward(enc, ids_v);
  const double a_u = heads.rank_score_raw(repr_u.h);
  const double a_v = heads.rank_score_raw(repr_v.h);
  const double s_u = std::tanh(a_u);
  const double s_v = std::tanh(a_v);
  const double diff = s_u - s_v;
  result.loss = detail::softplus(-diff);

  const double ddiff = detail::sigmoid(diff) - 1.0;  // dL/d(diff)
  const double da_u = ddiff * (1.0 - s_u * s_u);
  const double da_v = -ddiff * (1.0 - s_v * s_v);

  double* grank_w = result.head_grad.data() + heads.rank_w_offset();
  const double* rank_w = heads.params.data() + heads.rank_w_offset();
  std::vector<double> dh_u(enc.dim, 0.0);
  std::vector<double> dh_v(enc.dim, 0.0);
  for (std::size_t c = 0; c < enc.dim; ++c) {
    grank_w[c] += da_u * repr_u.h[c] + da_v * repr_v.h[c];
    dh_u[c] = da_u * rank_w[c];
    dh_v[c] = da_v * rank_w[c];
  }
  result.head_grad[heads.rank_b_offset()] += da_u + da_v;

  detail::sequence_backward(enc, ids_u, repr_u, dh_u, result.enc_grad);
  detail::sequence_backward(enc, ids_v, repr_v, dh_v, result.enc_grad);
  return result;
}

/// Sequence score of one evidence set under the rank head; higher means the
/// set looks more complete.
inline double rank_score(const std::string& question, const std::vector<EvidenceItem>& evidence,
                         const TinyEncoder& enc, const LossHeads& heads) {
  const auto ids = detail::encode_ranked_set(enc.vocab, question, evidence);
  return std::tanh(heads.rank_score_raw(detail::sequence_forward(enc, ids).h));
}

namespace detail {

// Global token positions of the operand first tokens within the concatenated
// question-then-evidence sequence.
inline std::vector<std::size_t> operand_positions(const OperatorExample& example,
                                                  std::vector<std::size_t>& sequence_ids,
                                                  const Vocab& vocab) {
  sequence_ids = encode(vocab, example.question);
  std::vector<std::size_t> offsets;  // start of each evidence sentence
  std::vector<std::size_t> lengths;
  for (const EvidenceItem& item : example.evidence) {
    const auto ids = encode(vocab, item.sentence);
    offsets.push_back(sequence_ids.size());
    lengths.push_back(ids.size());
    sequence_ids.insert(sequence_ids.end(), ids.begin(), ids.end());
  }
  std::vector<std::size_t> positions;
  for (const OperandSpan& span : example.spans) {
    if (span.evidence_index >= offsets.size() || span.token_begin >= span.token_end ||
        span.token_end > lengths[span.evidence_index]) {
      throw ModelError(ModelErrc::SpanOutOfRange,
                       "operand span does not fit its evidence sentence");
    }
    positions.push_back(offsets[span.evidence_index] + span.token_begin);
  }
  return positions;
}

}  // namespace detail

/// Operator-prediction loss: the operator representation is the average of
/// the operands' first-token representations (averaging keeps the dimension
/// independent of the operand count), mapped to ten logits; the loss is the
/// negative log-likelihood of the labelled operator.
inline LossResult loss_vop(const OperatorExample& example, const TinyEncoder& enc,
                           const LossHeads& heads) {
  LossResult result;
  result.enc_grad.assign(enc.params.size(), 0.0);
  result.head_grad.assign(heads.params.size(), 0.0);

  std::vector<std::size_t> sequence_ids;
  const auto positions = detail::operand_positions(example, sequence_ids, enc.vocab);
  const std::size_t m = positions.size();

  std::vector<std::vector<double>> inputs(m);
  std::vector<std::vector<double>> reprs(m);
  std::vector<double> h_op(enc.dim, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    inputs[i] = enc.embedding(sequence_ids[positions[i]]);
    reprs[i] = enc.mix(inputs[i]);
    for (std::size_t c = 0; c < enc.dim; ++c) h_op[c] += reprs[i][c];
  }
  for (double& v : h_op) v /= static_cast<double>(m);

  const std::vector<double> logits = heads.op_logits(h_op);
  const std::vector<double> probs = detail::softmax(logits);
  const std::size_t label = static_cast<std::size_t>(example.label);
  result.loss = -std::log(probs[label]);

  std::vector<double> dlogits = probs;
  dlogits[label] -= 1.0;
  std::vector<double> dh_op(enc.dim, 0.0);
  const double* op_w = heads.params.data() + heads.op_w_offset();
  double* gop_w = result.head_grad.data() + heads.op_w_offset();
  double* gop_b = result.head_grad.data() + heads.op_b_offset();
  for (std::size_t k = 0; k < LossHeads::kOperatorCount; ++k) {
    gop_b[k] += dlogits[k];
    const double* row = op_w + k * enc.dim;
    double* grow = gop_w + k * enc.dim;
    for (std::size_t c = 0; c < enc.dim; ++c) {
      grow[c] += dlogits[k] * h_op[c];
      dh_op[c] += dlogits[k] * row[c];
    }
  }

  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> dh(enc.dim);
    for (std::size_t c = 0; c < enc.dim; ++c) dh[c] = dh_op[c] * inv_m;
    const std::vector<double> dx = detail::mixer_backward(enc, inputs[i], reprs[i], dh,
                                                          result.enc_grad);
    double* ge = result.enc_grad.data() + enc.emb_offset(sequence_ids[positions[i]]);
    for (std::size_t c = 0; c < enc.dim; ++c) ge[c] += dx[c];
  }
  return result;
}

inline std::vector<double> op_logits(const OperatorExample& example, const TinyEncoder& enc,
                                     const LossHeads& heads) {
  std::vector<std::size_t> sequence_ids;
  const auto positions = detail::operand_positions(example, sequence_ids, enc.vocab);
  std::vector<double> h_op(enc.dim, 0.0);
  for (std::size_t pos : positions) {
    const auto h = enc.token_repr(sequence_ids[pos]);
    for (std::size_t c = 0; c < enc.dim; ++c) h_op[c] += h[c];
  }
  for (double& v : h_op) v /= static_cast<double>(positions.size());
  return heads.op_logits(h_op);
}

/// Masked-keyphrase loss: mean cross-entropy of the vocabulary head over the
/// masked positions only.
inline LossResult loss_vkm(const MaskedExample& example, const TinyEncoder& enc,
                           const LossHeads& heads) {
  LossResult result;
  result.enc_grad.assign(enc.params.size(), 0.0);
  result.head_grad.assign(heads.params.size(), 0.0);
  if (example.targets.empty()) return result;

  const double inv_m = 1.0 / static_cast<double>(example.targets.size());
  const double* mlm_w = heads.params.data() + heads.mlm_w_offset();
  double* gmlm_w = result.head_grad.data() + heads.mlm_w_offset();
  double* gmlm_b = result.head_grad.data() + heads.mlm_b_offset();

  for (const auto& [position, original] : example.targets) {
    const std::size_t input_id = position < example.tokens.size()
                                     ? enc.vocab.lookup(example.tokens[position])
                                     : Vocab::kUnkId;
    const std::size_t target_id = enc.vocab.lookup(original);
    const std::vector<double> x = enc.embedding(input_id);
    const std::vector<double> h = enc.mix(x);
    const std::vector<double> logits = heads.mlm_logits(h);
    const std::vector<double> probs = detail::softmax(logits);
    result.loss += -std::log(probs[target_id]) * inv_m;

    std::vector<double> dh(enc.dim, 0.0);
    for (std::size_t k = 0; k < heads.vocab_size; ++k) {
      const double dlogit = (probs[k] - (k == target_id ? 1.0 : 0.0)) * inv_m;
      if (dlogit == 0.0) continue;
      gmlm_b[k] += dlogit;
      const double* row = mlm_w + k * enc.dim;
      double* grow = gmlm_w + k * enc.dim;
      for (std::size_t c = 0; c < enc.dim; ++c) {
        grow[c] += dlogit * h[c];
        dh[c] += dlogit * row[c];
      }
    }
    const std::vector<double> dx = detail::mixer_backward(enc, x, h, dh, result.enc_grad);
    double* ge = result.enc_grad.data() + enc.emb_offset(input_id);
    for (std::size_t c = 0; c < enc.dim; ++c) ge[c] += dx[c];
  }
  return result;
}

// --------------------------------------------------------------------------
// Accuracy helpers

inline double vir_pair_accuracy(const std::vector<RankPair>& pairs, const TinyEncoder& enc,
                                const LossHeads& heads) {
  if (pairs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const RankPair& pair : pairs) {
    const double s_u = rank_score(pair.question, pair.higher.evidence, enc, heads);
    const double s_v = rank_score(pair.question, pair.lower.evidence, enc, heads);
    if (s_u > s_v) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

inline double vop_accuracy(const std::vector<OperatorExample>& examples, const TinyEncoder& enc,
                           const LossHeads& heads) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const OperatorExample& example : examples) {
    const std::vector<double> logits = op_logits(example, enc, heads);
    const std::size_t best =
        static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == static_cast<std::size_t>(example.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

inline double vkm_accuracy(const std::vector<MaskedExample>& examples, const TinyEncoder& enc,
                           const LossHeads& heads) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const MaskedExample& example : examples) {
    for (const auto& [position, original] : example.targets) {
      const std::size_t input_id = position < example.tokens.size()
                                       ? enc.vocab.lookup(example.tokens[position])
                                       : Vocab::kUnkId;
      const std::vector<double> logits = heads.mlm_logits(enc.token_repr(input_id));
      const std::size_t best = static_cast<std::size_t>(
          std::max_element(logits.begin(), logits.end()) - logits.begin());
      ++total;
      if (best == enc.vocab.lookup(original)) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

// --------------------------------------------------------------------------
// Multi-task training

struct TrainOptions {
  std::size_t dim = 32;
  std::size_t batch_size = 4;
  std::size_t steps = 100;
  double lr = 0.5;
  std::uint64_t seed = 0;
};

struct TrainLogRow {
  std::size_t step = 0;
  std::string task;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  TinyEncoder encoder;
  LossHeads heads;
  std::vector<TrainLogRow> log;
};

inline Vocab build_vocab(const std::vector<RankPair>& vir,
                         const std::vector<OperatorExample>& vop,
                         const std::vector<MaskedExample>& vkm) {
  Vocab vocab;
  auto add_text = [&](const std::string& text) {
    for (const TextToken& tok : whitespace_tokenize(text)) vocab.add(tok.surface);
  };
  for (const RankPair& pair : vir) {
    add_text(pair.question);
    for (const EvidenceItem& e : pair.higher.evidence) add_text(e.sentence);
    for (const EvidenceItem& e : pair.lower.evidence) add_text(e.sentence);
  }
  for (const OperatorExample& example : vop) {
    add_text(example.question);
    for (const EvidenceItem& e : example.evidence) add_text(e.sentence);
  }
  for (const MaskedExample& example : vkm) {
    add_text(example.question);
    for (const std::string& tok : example.tokens) vocab.add(tok);
    for (const auto& [_, original] : example.targets) vocab.add(original);
  }
  return vocab;
}

/// Plain gradient descent over fixed homogeneous mini-batches: every batch
/// holds instances of exactly one task, the union of batches is reshuffled
/// each epoch, and each update applies only that batch's task loss. Seeded
/// runs are bit-identical.
inline TrainResult train_multitask(const std::vector<RankPair>& vir,
                                   const std::vector<OperatorExample>& vop,
                                   const std::vector<MaskedExample>& vkm,
                                   const TrainOptions& opts = {}) {
  if (vir.empty() && vop.empty() && vkm.empty()) {
    throw ModelError(ModelErrc::AllCorporaEmpty, "no pretraining instances to train on");
  }
  std::mt19937_64 rng(opts.seed);
  Vocab vocab = build_vocab(vir, vop, vkm);
  TrainResult result{TinyEncoder::random_init(std::move(vocab), opts.dim, rng),
                     LossHeads::zeros(opts.dim, 0), {}};
  result.heads = LossHeads::random_init(opts.dim, result.encoder.vocab.size(), rng);

  struct Batch {
    int task = 0;  // 0 = vir, 1 = vop, 2 = vkm
    std::size_t begin = 0;
    std::size_t end = 0;
  };
  std::vector<Batch> batches;
  auto chunk = [&](int task, std::size_t count) {
    for (std::size_t b = 0; b < count; b += opts.batch_size) {
      batches.push_back({task, b, std::min(b + opts.batch_size, count)});
    }
  };
  chunk(0, vir.size());
  chunk(1, vop.size());
  chunk(2, vkm.size());

  static constexpr const char* kTaskNames[] = {"vir", "vop", "vkm"};
  std::size_t step = 0;
  while (step < opts.steps) {
    shuffle_in_place(batches, rng);
    for (const Batch& batch : batches) {
      if (step >= opts.steps) break;
      ++step;
      const std::size_t n = batch.end - batch.begin;
      std::vector<double> enc_grad(result.encoder.params.size(), 0.0);
      std::vector<double> head_grad(result.heads.params.size(), 0.0);
      double loss = 0.0;
      double accuracy = 0.0;
      std::size_t accuracy_total = 0;
      for (std::size_t i = batch.begin; i < batch.end; ++i) {
        LossResult r;
        if (batch.task == 0) {
          r = loss_vir(vir[i], result.encoder, result.heads);
          const double s_u = rank_score(vir[i].question, vir[i].higher.evidence, result.encoder,
                                        result.heads);
          const double s_v = rank_score(vir[i].question, vir[i].lower.evidence, result.encoder,
                                        result.heads);
          accuracy += s_u > s_v ? 1.0 : 0.0;
          ++accuracy_total;
        } else if (batch.task == 1) {
          r = loss_vop(vop[i], result.encoder, result.heads);
          const auto logits = op_logits(vop[i], result.encoder, result.heads);
          const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
          accuracy += static_cast<std::size_t>(best) ==
                              static_cast<std::size_t>(vop[i].label)
                          ? 1.0
                          : 0.0;
          ++accuracy_total;
        } else {
          r = loss_vkm(vkm[i], result.encoder, result.heads);
          accuracy += vkm_accuracy({vkm[i]}, result.encoder, result.heads);
          ++accuracy_total;
        }
        loss += r.loss;
        for (std::size_t p = 0; p < enc_grad.size(); ++p) enc_grad[p] += r.enc_grad[p];
        for (std::size_t p = 0; p < head_grad.size(); ++p) head_grad[p] += r.head_grad[p];
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t p = 0; p < enc_grad.size(); ++p) {
        result.encoder.params[p] -= opts.lr * enc_grad[p] * inv_n;
      }
      for (std::size_t p = 0; p < head_grad.size(); ++p) {
        result.heads.params[p] -= opts.lr * head_grad[p] * inv_n;
      }
      result.log.push_back({step, kTaskNames[batch.task], loss * inv_n,
                            accuracy / static_cast<double>(accuracy_total)});
    }
    if (batches.empty()) break;
  }
  return result;
}

}  // namespace finprog
