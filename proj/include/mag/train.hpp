// Gradient training of layer graphs: MSE loss, Adam/SGD, deterministic
// batching. Frozen MAG feature matrices receive no updates.
#pragma once

#include "mag/layers.hpp"

#include <map>

namespace mag {

enum class OptimizerKind { kAdam, kSgd };

struct TrainConfig {
  std::size_t epochs = 0;
  std::size_t batch_size = 0;  // 0 = full batch
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  RngStream rng;        // drives batch shuffling only
  bool shuffle = true;
};

using HeadTargets = std::map<std::string, Matrix>;

struct TrainResult {
  std::vector<double> epoch_loss;  // mean MSE per epoch, measured pre-update
};

TrainResult train(NetworkSpec& net, const Matrix& inputs, const Matrix& targets,
                  const TrainConfig& cfg);
TrainResult train(NetworkSpec& net, const Matrix& inputs,
                  const HeadTargets& targets, const TrainConfig& cfg);

struct LayerGrads {
  Matrix dw;
  std::vector<double> dbias;
};

struct LossAndGrads {
  double loss = 0.0;
  std::vector<LayerGrads> grads;  // aligned with net.layers
};

LossAndGrads compute_loss_and_gradients(const NetworkSpec& net, const Matrix& x,
                                        const Matrix& targets);
LossAndGrads compute_loss_and_gradients(const NetworkSpec& net, const Matrix& x,
                                        const HeadTargets& targets);

double network_loss(const NetworkSpec& net, const Matrix& x,
                    const Matrix& targets);
double network_loss(const NetworkSpec& net, const Matrix& x,
                    const HeadTargets& targets);

// Full-batch Adam on a single MAG layer against fixed targets, with the
// feature matrix phi = f(X G^T) precomputed once (G is frozen, so phi never
// changes). The gradient is evaluated through the Gram matrices phi^T phi and
// y^T phi, which is algebraically the same gradient train() computes but
// costs O(l m^2) per epoch instead of O(n m l).
TrainResult fit_mag_adam_gram(MagLayer& layer, const Matrix& phi,
                              const Matrix& targets, const TrainConfig& cfg);

}  // namespace mag
