#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vocadapt/embedding.hpp"

namespace vocadapt {

/// Two readings of the contrastive regularizer. PerSample averages the log
/// ratio per anchor (the standard in-batch contrastive objective);
/// Eq2Literal takes the log of the summed ratios. PerSample is the
/// default: the literal form is zero on uniform similarities and can go
/// negative, which fights its role as an agreement term.
enum class RegForm { PerSample, Eq2Literal };

/// How a piece sequence becomes one sentence vector: mean of the piece
/// embeddings, or the first piece alone (a CLS-style stand-in).
enum class Pooling { Mean, First };

struct LossConfig {
  double tau = 2.5;    // softmax temperature, published sweep is 1.5..3.5
  double lambda = 1.0; // regularization weight
  RegForm form = RegForm::PerSample;
  Pooling pooling = Pooling::Mean;
  int layer = 1;       // pooled layer index; the one-layer stand-in ignores it
  bool stop_target = false;  // treat pretrained-side vectors as constants

  void validate() const;
};

inline constexpr std::size_t kDefaultBatchSize = 16;

/// u.v / (|u||v|); throws ZeroVector when either norm is below 1e-12.
double cosine_sim(std::span<const double> u, std::span<const double> v);

/// In-batch contrastive regularization over pooled representations.
/// Anchors index the adapted side; negatives sweep the pretrained side.
/// Stabilized with max-subtraction, exact for similarity magnitudes up to
/// 1/tau.
double contrastive_reg(const std::vector<std::vector<double>>& h_adapted,
                       const std::vector<std::vector<double>>& h_pretrained, double tau,
                       RegForm form);

/// Mean over the batch of -log softmax(logits)[target], log-sum-exp
/// stabilized.
double cross_entropy(const std::vector<std::vector<double>>& logits,
                     const std::vector<std::size_t>& targets);

inline double total_loss(double ce, double reg, double lambda) { return ce + lambda * reg; }

/// Row-major dense matrix, just enough for the classifier head.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// One sentence tokenized both ways plus its class label.
struct DualBatchItem {
  std::vector<std::string> pretrained_pieces;
  std::vector<std::string> adapted_pieces;
  std::size_t label = 0;
};

struct DualBatch {
  std::vector<DualBatchItem> items;

  std::size_t size() const { return items.size(); }
};

/// Single shared encoder for both tokenizations: embedding lookup over the
/// adapted vocabulary, mean pooling, optional linear classifier (dim x C)
/// on the adapted-side representation.
struct EncoderStandIn {
  const EmbeddingTable* embeddings = nullptr;
  std::optional<Matrix> classifier;
};

struct Gradients {
  /// Partials w.r.t. embedding vectors, keyed by token. Only tokens the
  /// loss can reach appear.
  std::map<std::string, std::vector<double>> embeddings;
  Matrix classifier;
};

struct ForwardBackwardResult {
  double loss = 0;
  double ce = 0;
  double reg = 0;
  Gradients grads;
};

/// Evaluates total_loss(cross_entropy, contrastive_reg, lambda) and its
/// exact analytic gradients w.r.t. every reachable embedding vector and
/// the classifier weights.
ForwardBackwardResult forward_backward(const DualBatch& batch, const EncoderStandIn& encoder,
                                       const LossConfig& cfg);

}  // namespace vocadapt
