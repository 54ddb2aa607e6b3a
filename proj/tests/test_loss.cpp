#include "vocadapt/loss.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "vocadapt/adapter.hpp"
#include "vocadapt/errors.hpp"
#include "vocadapt/grad_check.hpp"

using namespace vocadapt;

namespace {

using Vectors = std::vector<std::vector<double>>;

// Unstabilized textbook evaluation of the per-sample and literal forms.
double naive_reg(const Vectors& h_a, const Vectors& h_p, double tau, RegForm form) {
  const std::size_t batch = h_a.size();
  double per_sample = 0;
  double ratio_sum = 0;
  for (std::size_t i = 0; i < batch; ++i) {
    double denom = 0;
    for (std::size_t j = 0; j < batch; ++j) {
      denom += std::exp(cosine_sim(h_a[i], h_p[j]) / tau);
    }
    const double ratio = std::exp(cosine_sim(h_a[i], h_p[i]) / tau) / denom;
    per_sample += std::log(ratio);
    ratio_sum += ratio;
  }
  if (form == RegForm::PerSample) return -per_sample / static_cast<double>(batch);
  return -std::log(ratio_sum) / static_cast<double>(batch);
}

}  // namespace

TEST_CASE("cosine similarity") {
  const std::vector<double> v{1.0, 2.0, -3.0};
  CHECK(cosine_sim(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_sim(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) == 0.0);
  CHECK(cosine_sim(std::vector<double>{1.0, 2.0}, std::vector<double>{-1.0, -2.0}) ==
        doctest::Approx(-1.0).epsilon(1e-12));

  try {
    cosine_sim(std::vector<double>{0.0, 0.0, 0.0}, v);
    FAIL("expected ZeroVector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
  CHECK_THROWS_AS(cosine_sim(std::vector<double>{1.0}, v), Error);
}

TEST_CASE("degenerate batch of one scores zero under both forms") {
  const Vectors h{{0.4, -1.9, 2.2}};
  CHECK(contrastive_reg(h, h, 2.0, RegForm::PerSample) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(contrastive_reg(h, h, 2.0, RegForm::Eq2Literal) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("uniform-similarity batch separates the two forms") {
  // All four sentences pool to the same direction: every pairwise cosine
  // is 1, so each softmax ratio is 1/4.
  Vectors h_a, h_p;
  for (int i = 0; i < 4; ++i) {
    const double scale = 1.0 + 0.5 * i;  // cosine ignores positive scale
    h_a.push_back({scale * 0.6, scale * 0.8});
    h_p.push_back({scale * 1.2, scale * 1.6});
  }
  for (const double tau : {1.5, 2.5, 3.5}) {
    CHECK(contrastive_reg(h_a, h_p, tau, RegForm::PerSample) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(contrastive_reg(h_a, h_p, tau, RegForm::Eq2Literal) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("two-sentence batch with opposing negatives, closed form") {
  // sims: diagonal +1, off-diagonal -1, tau=1 ->
  // L = -log(e / (e + 1/e)) per anchor under the per-sample form.
  const Vectors h{{2.0, 0.0}, {-2.0, 0.0}};
  const double expected = -std::log(std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0)));
  CHECK(contrastive_reg(h, h, 1.0, RegForm::PerSample) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.126928).epsilon(1e-4));
}

TEST_CASE("stabilized evaluation matches the naive formula") {
  std::mt19937 rng(1001);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int round = 0; round < 40; ++round) {
    const std::size_t batch = 1 + rng() % 6;
    const std::size_t dim = 2 + rng() % 6;
    Vectors h_a(batch, std::vector<double>(dim));
    Vectors h_p(batch, std::vector<double>(dim));
    for (auto& v : h_a) {
      for (double& x : v) x = dist(rng);
      v[0] += 3.0;  // keep norms clear of zero
    }
    for (auto& v : h_p) {
      for (double& x : v) x = dist(rng);
      v[0] += 3.0;
    }
    const double tau = 0.5 + (rng() % 30) * 0.1;
    for (const RegForm form : {RegForm::PerSample, RegForm::Eq2Literal}) {
      CHECK(contrastive_reg(h_a, h_p, tau, form) ==
            doctest::Approx(naive_reg(h_a, h_p, tau, form)).epsilon(1e-12));
    }
  }
}

TEST_CASE("per-sample form is nonnegative, literal form goes negative") {
  std::mt19937 rng(2002);
  std::normal_distribution<double> dist(0.0, 1.0);
  bool found_negative = false;
  for (int round = 0; round < 200; ++round) {
    Vectors h_a(3, std::vector<double>(4));
    Vectors h_p(3, std::vector<double>(4));
    for (auto& v : h_a) {
      for (double& x : v) x = dist(rng);
    }
    for (auto& v : h_p) {
      for (double& x : v) x = dist(rng);
    }
    const double per_sample = contrastive_reg(h_a, h_p, 1.0, RegForm::PerSample);
    CHECK(per_sample >= 0.0);
    if (contrastive_reg(h_a, h_p, 1.0, RegForm::Eq2Literal) < 0.0) found_negative = true;
  }
  CHECK(found_negative);
}

TEST_CASE("cosine scale invariance carries over to the loss") {
  const Vectors h_a{{1.0, 2.0, 0.5}, {0.3, -0.7, 1.1}, {2.0, 0.1, -0.4}};
  const Vectors h_p{{0.9, 1.8, 0.2}, {0.5, -0.5, 1.0}, {1.5, 0.2, -0.2}};
  Vectors scaled = h_a;
  for (double& x : scaled[1]) x *= 37.5;
  for (const RegForm form : {RegForm::PerSample, RegForm::Eq2Literal}) {
    CHECK(contrastive_reg(h_a, h_p, 2.0, form) ==
          doctest::Approx(contrastive_reg(scaled, h_p, 2.0, form)).epsilon(1e-14));
  }
}

TEST_CASE("no overflow at small temperature") {
  const Vectors h{{1e6, 0.0}, {0.0, 1e-6}};
  const double loss = contrastive_reg(h, h, 0.1, RegForm::PerSample);
  CHECK(std::isfinite(loss));
  CHECK(loss >= 0.0);
}

TEST_CASE("size mismatches are rejected") {
  const Vectors h3{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  const Vectors h2{{1.0, 0.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(contrastive_reg(h3, h2, 1.0, RegForm::PerSample), Error);
  const Vectors ragged{{1.0, 0.0}, {0.0, 1.0, 3.0}};
  CHECK_THROWS_AS(contrastive_reg(ragged, ragged, 1.0, RegForm::PerSample), Error);
  CHECK_THROWS_AS(contrastive_reg(h2, h2, 0.0, RegForm::PerSample), Error);
}

TEST_CASE("cross entropy analytic cases") {
  SUBCASE("uniform logits over 13 classes") {
    const std::vector<std::vector<double>> logits(3, std::vector<double>(13, 0.7));
    const std::vector<std::size_t> targets{0, 5, 12};
    CHECK(cross_entropy(logits, targets) ==
          doctest::Approx(std::log(13.0)).epsilon(1e-12));
  }
  SUBCASE("loss decreases monotonically toward zero as the margin grows") {
    double previous = std::log(2.0);
    for (const double margin : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
      const double loss = cross_entropy({{margin, 0.0}}, {0});
      CHECK(loss < previous);
      previous = loss;
    }
    CHECK(previous < 1e-13);
  }
  SUBCASE("identical rows average to the single-row loss") {
    const std::vector<double> row{0.3, -1.2, 2.0};
    CHECK(cross_entropy({row, row}, {2, 2}) ==
          doctest::Approx(cross_entropy({row}, {2})).epsilon(1e-14));
  }
  SUBCASE("stabilized equals naive when nothing overflows") {
    std::mt19937 rng(3003);
    std::normal_distribution<double> dist(0.0, 2.0);
    for (int round = 0; round < 30; ++round) {
      const std::size_t batch = 1 + rng() % 5;
      const std::size_t classes = 2 + rng() % 8;
      std::vector<std::vector<double>> logits(batch, std::vector<double>(classes));
      std::vector<std::size_t> targets(batch);
      for (std::size_t i = 0; i < batch; ++i) {
        for (double& x : logits[i]) x = dist(rng);
        targets[i] = rng() % classes;
      }
      double naive = 0;
      for (std::size_t i = 0; i < batch; ++i) {
        double denom = 0;
        for (const double s : logits[i]) denom += std::exp(s);
        naive -= std::log(std::exp(logits[i][targets[i]]) / denom);
      }
      naive /= static_cast<double>(batch);
      CHECK(std::abs(cross_entropy(logits, targets) - naive) < 1e-10);
    }
  }
  SUBCASE("error paths") {
    CHECK_THROWS_AS(cross_entropy({{1.0, 2.0}}, {2}), Error);      // InvalidTarget
    CHECK_THROWS_AS(cross_entropy({{1.0, 2.0}}, {0, 1}), Error);   // SizeMismatch
    CHECK_THROWS_AS(cross_entropy({{1.0}}, {0}), Error);           // one class
    CHECK_THROWS_AS(cross_entropy({}, {}), Error);
  }
}

TEST_CASE("total loss arithmetic") {
  CHECK(total_loss(2.0, 0.5, 1.0) == 2.5);
  CHECK(total_loss(1.75, 123.0, 0.0) == 1.75);  // lambda=0 ablation
  CHECK(total_loss(0.0, 0.0, 3.0) == 0.0);
}

TEST_CASE("forward_backward wires the pieces together") {
  GradCheckInstance inst;
  inst.vocab_tokens = {"a", "b", "c"};
  inst.vectors = {{1.0, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
  inst.classifier = Matrix(2, 2);
  inst.classifier.at(0, 0) = 1.0;
  inst.classifier.at(1, 1) = -1.0;
  inst.batch.items.push_back({{"a"}, {"b", "c"}, 1});
  inst.batch.items.push_back({{"c"}, {"a"}, 0});
  inst.config.tau = 2.0;
  inst.config.lambda = 1.0;

  const EmbeddingTable table = instance_table(inst);
  EncoderStandIn encoder{&table, inst.classifier};
  const ForwardBackwardResult result = forward_backward(inst.batch, encoder, inst.config);
  CHECK(result.loss ==
        doctest::Approx(total_loss(result.ce, result.reg, inst.config.lambda)).epsilon(1e-15));
  CHECK(result.grads.classifier.rows == 2);
  CHECK(result.grads.classifier.cols == 2);

  SUBCASE("lambda zero touches only adapted-side embeddings") {
    inst.config.lambda = 0.0;
    const ForwardBackwardResult r0 = forward_backward(inst.batch, encoder, inst.config);
    CHECK(r0.grads.embeddings.count("b") == 1);
    CHECK(r0.grads.embeddings.count("c") == 1);
    CHECK(r0.grads.embeddings.count("a") == 1);  // adapted side of item 2
    inst.batch.items[1].adapted_pieces = {"b"};
    const ForwardBackwardResult r1 = forward_backward(inst.batch, encoder, inst.config);
    CHECK(r1.grads.embeddings.count("a") == 0);  // now reachable nowhere
  }
  SUBCASE("stop_target keeps pretrained-only tokens out of the gradient") {
    inst.config.stop_target = true;
    inst.batch.items[0].pretrained_pieces = {"a"};
    inst.batch.items[1].pretrained_pieces = {"a"};
    inst.batch.items[1].adapted_pieces = {"b"};
    const ForwardBackwardResult r = forward_backward(inst.batch, encoder, inst.config);
    CHECK(r.grads.embeddings.count("a") == 0);
  }
  SUBCASE("missing piece vector is reported") {
    inst.batch.items[0].adapted_pieces = {"zzz"};
    CHECK_THROWS_AS(forward_backward(inst.batch, encoder, inst.config), Error);
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937 rng(424242);
  for (int round = 0; round < 12; ++round) {
    GradCheckInstance inst = random_gradcheck_instance(rng);
    CHECK(max_gradient_error(inst) <= 1e-4);
  }
}

TEST_CASE("gradients stay correct on a symmetric batch") {
  std::mt19937 rng(515151);
  for (int round = 0; round < 4; ++round) {
    GradCheckInstance inst = random_gradcheck_instance(rng);
    for (auto& item : inst.batch.items) {
      item.pretrained_pieces = item.adapted_pieces;  // identical tokenizations
    }
    inst.config.lambda = 1.0;
    CHECK(max_gradient_error(inst) <= 1e-4);
  }
}

TEST_CASE("gradients flow without a classifier") {
  std::mt19937 rng(616161);
  GradCheckInstance bare = random_gradcheck_instance(rng);
  bare.classifier = Matrix();  // reg-only model
  bare.config.lambda = 1.0;
  CHECK(max_gradient_error(bare) <= 1e-4);
}

TEST_CASE("first-piece pooling: forward value and gradients") {
  GradCheckInstance inst;
  inst.vocab_tokens = {"a", "b"};
  inst.vectors = {{1.0, 0.0}, {0.0, 1.0}};
  inst.batch.items.push_back({{"a", "b"}, {"a", "b"}, 0});
  inst.config.lambda = 1.0;
  inst.config.pooling = Pooling::First;

  const EmbeddingTable table = instance_table(inst);
  EncoderStandIn encoder{&table, std::nullopt};
  const ForwardBackwardResult r = forward_backward(inst.batch, encoder, inst.config);
  // Both sides pool to the first piece "a"; batch of one scores zero,
  // and "b" is never reachable.
  CHECK(r.reg == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.grads.embeddings.count("b") == 0);

  std::mt19937 rng(818181);
  for (int round = 0; round < 4; ++round) {
    GradCheckInstance random = random_gradcheck_instance(rng);
    random.config.pooling = Pooling::First;
    CHECK(max_gradient_error(random) <= 1e-4);
  }
}

TEST_CASE("stop_target zeroes exactly the pretrained-side flow") {
  // Disjoint token sets per side: adapted-token gradients are then the
  // same with or without the stop, and pretrained-only tokens drop out.
  std::mt19937 rng(717171);
  GradCheckInstance inst = random_gradcheck_instance(rng);
  const std::size_t half = inst.vocab_tokens.size() / 2;
  const auto side_token = [&](bool adapted, std::size_t i) {
    return inst.vocab_tokens[adapted ? i % half : half + i % (inst.vocab_tokens.size() - half)];
  };
  std::size_t salt = 0;
  for (auto& item : inst.batch.items) {
    for (std::size_t p = 0; p < item.adapted_pieces.size(); ++p) {
      item.adapted_pieces[p] = side_token(true, ++salt);
    }
    for (std::size_t p = 0; p < item.pretrained_pieces.size(); ++p) {
      item.pretrained_pieces[p] = side_token(false, ++salt);
    }
  }
  inst.config.lambda = 1.0;

  const EmbeddingTable table = instance_table(inst);
  EncoderStandIn encoder{&table, inst.classifier};
  inst.config.stop_target = false;
  const ForwardBackwardResult full = forward_backward(inst.batch, encoder, inst.config);
  inst.config.stop_target = true;
  const ForwardBackwardResult stopped = forward_backward(inst.batch, encoder, inst.config);

  CHECK(stopped.loss == doctest::Approx(full.loss).epsilon(1e-15));
  for (const auto& [token, grad] : stopped.grads.embeddings) {
    REQUIRE(full.grads.embeddings.count(token) == 1);
    const auto& reference = full.grads.embeddings.at(token);
    for (std::size_t d = 0; d < grad.size(); ++d) {
      CHECK(grad[d] == doctest::Approx(reference[d]).epsilon(1e-14));
    }
  }
  for (std::size_t i = half; i < inst.vocab_tokens.size(); ++i) {
    CHECK(stopped.grads.embeddings.count(inst.vocab_tokens[i]) == 0);
  }
}

TEST_CASE("published defaults snapshot") {
  const LossConfig cfg;
  CHECK(cfg.lambda == 1.0);
  CHECK(cfg.tau >= 1.5);
  CHECK(cfg.tau <= 3.5);
  CHECK(cfg.form == RegForm::PerSample);
  CHECK(kDefaultBatchSize == 16);

  const AdaptConfig adapt;
  CHECK(adapt.alpha == 500);
  CHECK(adapt.beta == 50);
  CHECK(adapt.gamma == 3.0);
  CHECK(adapt.domain_vocab_size == 10000);
}
