#include "vocadapt/loss.hpp"

#include <algorithm>
#include <cmath>

#include "vocadapt/errors.hpp"

namespace vocadapt {
namespace {

constexpr double kZeroNorm = 1e-12;

double l2_norm(std::span<const double> v) {
  double sum = 0;
  for (const double x : v) sum += x * x;
  return std::sqrt(sum);
}

// log(sum_j exp(z_j)) with max-subtraction; every exponent argument <= 0.
double log_sum_exp(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (const double x : z) sum += std::exp(x - zmax);
  return zmax + std::log(sum);
}

// Pairwise scaled similarities z[i][j] = sim(a_i, p_j) / tau.
std::vector<std::vector<double>> scaled_similarities(
    const std::vector<std::vector<double>>& h_adapted,
    const std::vector<std::vector<double>>& h_pretrained, double tau) {
  const std::size_t batch = h_adapted.size();
  std::vector<std::vector<double>> z(batch, std::vector<double>(batch, 0.0));
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < batch; ++j) {
      z[i][j] = cosine_sim(h_adapted[i], h_pretrained[j]) / tau;
    }
  }
  return z;
}

void check_batch_shapes(const std::vector<std::vector<double>>& h_adapted,
                        const std::vector<std::vector<double>>& h_pretrained) {
  if (h_adapted.empty() || h_adapted.size() != h_pretrained.size()) {
    throw Error(ErrorCode::SizeMismatch, "batch sides have sizes " +
                                             std::to_string(h_adapted.size()) + " and " +
                                             std::to_string(h_pretrained.size()));
  }
  const std::size_t dim = h_adapted.front().size();
  for (const auto& v : h_adapted) {
    if (v.size() != dim) throw Error(ErrorCode::SizeMismatch, "ragged adapted vectors");
  }
  for (const auto& v : h_pretrained) {
    if (v.size() != dim) throw Error(ErrorCode::SizeMismatch, "ragged pretrained vectors");
  }
}

}  // namespace

void LossConfig::validate() const {
  if (!(tau > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tau must be > 0");
  }
  if (lambda < 0) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  }
}

double cosine_sim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::SizeMismatch, "cosine of vectors with lengths " +
                                             std::to_string(u.size()) + " and " +
                                             std::to_string(v.size()));
  }
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu < kZeroNorm || nv < kZeroNorm) {
    throw Error(ErrorCode::ZeroVector, "cosine similarity of a (near-)zero vector");
  }
  double dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return dot / (nu * nv);
}

double contrastive_reg(const std::vector<std::vector<double>>& h_adapted,
                       const std::vector<std::vector<double>>& h_pretrained, double tau,
                       RegForm form) {
  if (!(tau > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tau must be > 0");
  }
  check_batch_shapes(h_adapted, h_pretrained);

  const std::size_t batch = h_adapted.size();
  const auto z = scaled_similarities(h_adapted, h_pretrained, tau);

  if (form == RegForm::PerSample) {
    double sum = 0;
    for (std::size_t i = 0; i < batch; ++i) {
      sum += z[i][i] - log_sum_exp(z[i]);
    }
    return -sum / static_cast<double>(batch);
  }

  // Literal form: log outside the sum over anchors. Each ratio is
  // exp(z_ii - lse_i) in (0, 1], so the sum is safe to take directly.
  double ratio_sum = 0;
  for (std::size_t i = 0; i < batch; ++i) {
    ratio_sum += std::exp(z[i][i] - log_sum_exp(z[i]));
  }
  return -std::log(ratio_sum) / static_cast<double>(batch);
}

double cross_entropy(const std::vector<std::vector<double>>& logits,
                     const std::vector<std::size_t>& targets) {
  if (logits.empty() || logits.size() != targets.size()) {
    throw Error(ErrorCode::SizeMismatch, "logit rows " + std::to_string(logits.size()) +
                                             " vs targets " + std::to_string(targets.size()));
  }
  const std::size_t classes = logits.front().size();
  if (classes < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two classes");
  }
  double sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto& row = logits[i];
    if (row.size() != classes) {
      throw Error(ErrorCode::SizeMismatch, "ragged logit rows");
    }
    if (targets[i] >= classes) {
      throw Error(ErrorCode::InvalidTarget, "target " + std::to_string(targets[i]) +
                                                " out of range for " + std::to_string(classes) +
                                                " classes");
    }
    sum += log_sum_exp(row) - row[targets[i]];
  }
  return sum / static_cast<double>(logits.size());
}

ForwardBackwardResult forward_backward(const DualBatch& batch, const EncoderStandIn& encoder,
                                       const LossConfig& cfg) {
  cfg.validate();
  if (encoder.embeddings == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "encoder stand-in has no embedding table");
  }
  if (batch.items.empty()) {
    throw Error(ErrorCode::SizeMismatch, "empty batch");
  }
  const EmbeddingTable& table = *encoder.embeddings;
  const std::size_t dim = table.dim();
  const std::size_t size = batch.items.size();

  const bool has_classifier = encoder.classifier.has_value();
  if (has_classifier && encoder.classifier->rows != dim) {
    throw Error(ErrorCode::DimMismatch, "classifier expects dim " +
                                            std::to_string(encoder.classifier->rows) +
                                            ", embeddings have dim " + std::to_string(dim));
  }

  const auto pool = [&](const std::vector<std::string>& pieces) {
    if (pieces.empty()) {
      throw Error(ErrorCode::SizeMismatch, "batch item with no pieces");
    }
    std::vector<double> h(dim, 0.0);
    if (cfg.pooling == Pooling::First) {
      const auto vec = table.vector_of(pieces.front());
      h.assign(vec.begin(), vec.end());
      return h;
    }
    for (const std::string& piece : pieces) {
      const auto vec = table.vector_of(piece);
      for (std::size_t d = 0; d < dim; ++d) h[d] += vec[d];
    }
    for (double& x : h) x /= static_cast<double>(pieces.size());
    return h;
  };

  std::vector<std::vector<double>> h_adapted(size);
  std::vector<std::vector<double>> h_pretrained(size);
  for (std::size_t i = 0; i < size; ++i) {
    h_adapted[i] = pool(batch.items[i].adapted_pieces);
    h_pretrained[i] = pool(batch.items[i].pretrained_pieces);
  }

  ForwardBackwardResult result;
  std::vector<std::vector<double>> dh_adapted(size, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> dh_pretrained(size, std::vector<double>(dim, 0.0));

  // Cross entropy over the adapted-side representation.
  if (has_classifier) {
    const Matrix& w = *encoder.classifier;
    const std::size_t classes = w.cols;
    std::vector<std::vector<double>> logits(size, std::vector<double>(classes, 0.0));
    std::vector<std::size_t> targets(size);
    for (std::size_t i = 0; i < size; ++i) {
      targets[i] = batch.items[i].label;
      for (std::size_t c = 0; c < classes; ++c) {
        double s = 0;
        for (std::size_t d = 0; d < dim; ++d) s += w.at(d, c) * h_adapted[i][d];
        logits[i][c] = s;
      }
    }
    result.ce = cross_entropy(logits, targets);

    result.grads.classifier = Matrix(dim, classes);
    const double inv_batch = 1.0 / static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i) {
      const double lse = log_sum_exp(logits[i]);
      for (std::size_t c = 0; c < classes; ++c) {
        const double g = (std::exp(logits[i][c] - lse) - (c == targets[i] ? 1.0 : 0.0)) * inv_batch;
        for (std::size_t d = 0; d < dim; ++d) {
          result.grads.classifier.at(d, c) += h_adapted[i][d] * g;
          dh_adapted[i][d] += w.at(d, c) * g;
        }
      }
    }
  }

  // Contrastive regularization between the two tokenizations.
  result.reg = contrastive_reg(h_adapted, h_pretrained, cfg.tau, cfg.form);
  if (cfg.lambda != 0.0) {
    std::vector<std::vector<double>> sims(size, std::vector<double>(size, 0.0));
    std::vector<std::vector<double>> z(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        sims[i][j] = cosine_sim(h_adapted[i], h_pretrained[j]);
        z[i][j] = sims[i][j] / cfg.tau;
      }
    }
    std::vector<double> lse(size);
    for (std::size_t i = 0; i < size; ++i) lse[i] = log_sum_exp(z[i]);

    // d(reg)/d(z_ij) for both forms; ratios r_i = exp(z_ii - lse_i).
    std::vector<double> ratio(size);
    double ratio_sum = 0;
    for (std::size_t i = 0; i < size; ++i) {
      ratio[i] = std::exp(z[i][i] - lse[i]);
      ratio_sum += ratio[i];
    }
    const double inv_batch = 1.0 / static_cast<double>(size);

    for (std::size_t i = 0; i < size; ++i) {
      const double scale = cfg.form == RegForm::PerSample ? 1.0 : ratio[i] / ratio_sum;
      for (std::size_t j = 0; j < size; ++j) {
        const double softmax_ij = std::exp(z[i][j] - lse[i]);
        const double dz = -inv_batch * scale * ((i == j ? 1.0 : 0.0) - softmax_ij);
        if (dz == 0.0) continue;
        const double dsim = cfg.lambda * dz / cfg.tau;

        // Cosine backward.
        const auto& u = h_adapted[i];
        const auto& v = h_pretrained[j];
        const double nu = l2_norm(u);
        const double nv = l2_norm(v);
        const double cos_uv = sims[i][j];
        for (std::size_t d = 0; d < dim; ++d) {
          dh_adapted[i][d] += dsim * (v[d] / (nu * nv) - cos_uv * u[d] / (nu * nu));
          if (!cfg.stop_target) {
            dh_pretrained[j][d] += dsim * (u[d] / (nu * nv) - cos_uv * v[d] / (nv * nv));
          }
        }
      }
    }
  }

  result.loss = total_loss(result.ce, result.reg, cfg.lambda);

  // Pool backward: distribute onto piece embeddings. Pretrained-side
  // tokens are reachable only when the regularizer gradient flows there.
  const bool pretrained_reachable = cfg.lambda != 0.0 && !cfg.stop_target;
  const auto accumulate = [&](const std::string& piece, const std::vector<double>& dh,
                              double weight) {
    auto [it, inserted] = result.grads.embeddings.try_emplace(piece);
    if (inserted) it->second.assign(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) it->second[d] += dh[d] * weight;
  };
  const auto scatter = [&](const std::vector<std::string>& pieces,
                           const std::vector<double>& dh) {
    if (cfg.pooling == Pooling::First) {
      accumulate(pieces.front(), dh, 1.0);
      return;
    }
    const double inv = 1.0 / static_cast<double>(pieces.size());
    for (const std::string& piece : pieces) accumulate(piece, dh, inv);
  };
  for (std::size_t i = 0; i < size; ++i) {
    scatter(batch.items[i].adapted_pieces, dh_adapted[i]);
    if (pretrained_reachable) {
      scatter(batch.items[i].pretrained_pieces, dh_pretrained[i]);
    }
  }

  return result;
}

}  // namespace vocadapt
