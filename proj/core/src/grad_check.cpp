#include "vocadapt/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace vocadapt {

EmbeddingTable instance_table(const GradCheckInstance& instance) {
  EmbeddingTable table(instance.vectors.front().size(), VocabLabel::Adapted);
  for (std::size_t i = 0; i < instance.vocab_tokens.size(); ++i) {
    table.insert(instance.vocab_tokens[i], instance.vectors[i]);
  }
  return table;
}

double instance_loss(const GradCheckInstance& instance) {
  const EmbeddingTable table = instance_table(instance);
  EncoderStandIn encoder;
  encoder.embeddings = &table;
  if (instance.classifier.rows > 0) encoder.classifier = instance.classifier;
  return forward_backward(instance.batch, encoder, instance.config).loss;
}

double gradient_rel_err(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / denom;
}

double max_gradient_error(GradCheckInstance instance, double eps) {
  const EmbeddingTable table = instance_table(instance);
  EncoderStandIn encoder;
  encoder.embeddings = &table;
  if (instance.classifier.rows > 0) encoder.classifier = instance.classifier;
  const ForwardBackwardResult result = forward_backward(instance.batch, encoder, instance.config);

  double worst = 0;
  const auto probe = [&](double& parameter, double analytic) {
    const double saved = parameter;
    parameter = saved + eps;
    const double up = instance_loss(instance);
    parameter = saved - eps;
    const double down = instance_loss(instance);
    parameter = saved;
    worst = std::max(worst, gradient_rel_err(analytic, (up - down) / (2 * eps)));
  };

  for (std::size_t t = 0; t < instance.vocab_tokens.size(); ++t) {
    const auto it = result.grads.embeddings.find(instance.vocab_tokens[t]);
    for (std::size_t d = 0; d < instance.vectors[t].size(); ++d) {
      probe(instance.vectors[t][d],
            it == result.grads.embeddings.end() ? 0.0 : it->second[d]);
    }
  }
  for (std::size_t r = 0; r < instance.classifier.rows; ++r) {
    for (std::size_t c = 0; c < instance.classifier.cols; ++c) {
      probe(instance.classifier.at(r, c),
            result.grads.classifier.rows > 0 ? result.grads.classifier.at(r, c) : 0.0);
    }
  }
  return worst;
}

GradCheckInstance random_gradcheck_instance(std::mt19937& rng, const GradCheckLimits& limits) {
  GradCheckInstance instance;
  std::uniform_real_distribution<double> component(0.25, 1.75);
  std::normal_distribution<double> weight(0.0, 1.0);

  const std::size_t batch = 1 + rng() % limits.max_batch;
  const std::size_t dim = 4 + rng() % (limits.max_dim - 3);
  const std::size_t classes = 2 + rng() % (limits.max_classes - 1);
  const std::size_t vocab_size = 6 + rng() % 10;

  for (std::size_t i = 0; i < vocab_size; ++i) {
    instance.vocab_tokens.push_back("t" + std::to_string(i));
    std::vector<double> vec(dim);
    for (double& x : vec) x = component(rng);
    instance.vectors.push_back(std::move(vec));
  }

  instance.classifier = Matrix(dim, classes);
  for (double& x : instance.classifier.data) x = weight(rng);

  const auto random_pieces = [&] {
    std::vector<std::string> pieces;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      pieces.push_back(instance.vocab_tokens[rng() % vocab_size]);
    }
    return pieces;
  };
  for (std::size_t b = 0; b < batch; ++b) {
    DualBatchItem item;
    item.pretrained_pieces = random_pieces();
    item.adapted_pieces = random_pieces();
    item.label = rng() % classes;
    instance.batch.items.push_back(std::move(item));
  }

  instance.config.tau = 1.5 + (rng() % 21) * 0.1;  // the published sweep
  instance.config.lambda = (rng() % 2 == 0) ? 1.0 : 0.0;
  instance.config.form = (rng() % 2 == 0) ? RegForm::PerSample : RegForm::Eq2Literal;
  instance.config.pooling = (rng() % 2 == 0) ? Pooling::Mean : Pooling::First;
  return instance;
}

GradCheckSummary run_gradient_check(std::uint64_t seed, std::size_t trials,
                                    const GradCheckLimits& limits) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  GradCheckSummary summary;
  summary.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    GradCheckInstance instance = random_gradcheck_instance(rng, limits);
    instance.config.form = (i % 2 == 0) ? RegForm::PerSample : RegForm::Eq2Literal;
    instance.config.lambda = ((i / 2) % 2 == 0) ? 1.0 : 0.0;
    summary.max_rel_err = std::max(summary.max_rel_err, max_gradient_error(instance));
  }
  return summary;
}

}  // namespace vocadapt
