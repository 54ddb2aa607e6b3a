#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vocadapt/loss.hpp"

namespace vocadapt {

/// One self-contained gradient-check problem: a synthetic vocabulary with
/// its embedding vectors, an optional classifier, a dual batch, and the
/// loss configuration.
struct GradCheckInstance {
  std::vector<std::string> vocab_tokens;
  std::vector<std::vector<double>> vectors;  // aligned with vocab_tokens
  Matrix classifier;                         // rows == 0 means no head
  DualBatch batch;
  LossConfig config;
};

struct GradCheckLimits {
  std::size_t max_batch = 8;
  std::size_t max_dim = 16;
  std::size_t max_classes = 5;
};

EmbeddingTable instance_table(const GradCheckInstance& instance);

double instance_loss(const GradCheckInstance& instance);

/// Relative error with a 1e-3 denominator floor: central differences carry
/// ~1e-10 absolute noise, so components below the floor are compared
/// quasi-absolutely instead of amplifying that noise.
double gradient_rel_err(double analytic, double numeric);

/// Max relative error between the analytic gradients and eps-central
/// finite differences, over every embedding component and classifier
/// weight. Instance taken by value; parameters are nudged one at a time.
double max_gradient_error(GradCheckInstance instance, double eps = 1e-5);

/// Seeded random instance within the limits. Embedding components are
/// drawn positive so pooled vectors stay away from the cosine singularity.
/// stop_target is left off: finite differences see the true derivative, so
/// a stopped-gradient path cannot be checked this way.
GradCheckInstance random_gradcheck_instance(std::mt19937& rng, const GradCheckLimits& limits = {});

struct GradCheckSummary {
  std::size_t trials = 0;
  double max_rel_err = 0;
};

/// Runs `trials` seeded instances, cycling through both regularizer forms
/// and lambda in {0, 1} so every combination is exercised.
GradCheckSummary run_gradient_check(std::uint64_t seed, std::size_t trials,
                                    const GradCheckLimits& limits = {});

}  // namespace vocadapt
