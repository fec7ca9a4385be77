#include "mag/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mag {

namespace {

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> sums(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) sums[j] += m(i, j);
  return sums;
}

void require_no_fused(const NetworkSpec& net, const char* op) {
  for (const auto& layer : net.layers)
    if (std::holds_alternative<FusedLayer>(layer))
      throw std::invalid_argument(std::string(op) +
                                  ": fused networks are inference-only");
}

// dL/d(final pre-head output) plus the scalar loss, for both target forms.
struct OutputGrad {
  double loss = 0.0;
  Matrix dfinal;
};

OutputGrad output_gradient(const NetworkSpec& net, const Matrix& final_output,
                           const Matrix& targets) {
  if (targets.rows() != final_output.rows() ||
      targets.cols() != final_output.cols())
    throw std::invalid_argument("train: target shape != network output shape");
  OutputGrad og;
  og.dfinal = Matrix(final_output.rows(), final_output.cols());
  const double scale = 1.0 / static_cast<double>(final_output.size());
  for (std::size_t i = 0; i < final_output.size(); ++i) {
    const double diff = final_output.storage()[i] - targets.storage()[i];
    og.loss += diff * diff * scale;
    og.dfinal.storage()[i] = 2.0 * diff * scale;
  }
  return og;
}

OutputGrad output_gradient(const NetworkSpec& net, const Matrix& final_output,
                           const HeadTargets& targets) {
  if (net.heads.empty())
    throw std::invalid_argument("train: named targets need declared heads");
  OutputGrad og;
  og.dfinal = Matrix(final_output.rows(), final_output.cols());
  for (const auto& h : net.heads) {
    auto it = targets.find(h.name);
    if (it == targets.end())
      throw std::invalid_argument("train: missing target for head '" + h.name + "'");
    const Matrix& t = it->second;
    if (t.rows() != final_output.rows() || t.cols() != h.width)
      throw std::invalid_argument("train: target shape mismatch for head '" +
                                  h.name + "'");
    Matrix slice = final_output.col_block(h.offset, h.offset + h.width);
    Matrix a = apply_head_activation(h.act, slice);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      // Gradient through the head activation, accumulated into the slice.
      if (h.act == HeadActivation::kSoftmax) {
        double dot = 0.0;
        for (std::size_t j = 0; j < h.width; ++j) {
          const double da = 2.0 * (a(i, j) - t(i, j)) * scale;
          dot += da * a(i, j);
        }
        for (std::size_t j = 0; j < h.width; ++j) {
          const double da = 2.0 * (a(i, j) - t(i, j)) * scale;
          og.dfinal(i, h.offset + j) += a(i, j) * (da - dot);
        }
      } else {
        for (std::size_t j = 0; j < h.width; ++j) {
          const double diff = a(i, j) - t(i, j);
          og.loss += diff * diff * scale;
          double dz = 2.0 * diff * scale;
          if (h.act == HeadActivation::kSigmoid) dz *= a(i, j) * (1.0 - a(i, j));
          og.dfinal(i, h.offset + j) += dz;
        }
      }
    }
    if (h.act == HeadActivation::kSoftmax) {
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < h.width; ++j) {
          const double diff = a(i, j) - t(i, j);
          og.loss += diff * diff * scale;
        }
    }
  }
  return og;
}

template <typename Targets>
LossAndGrads backprop(const NetworkSpec& net, const Matrix& x,
                      const Targets& targets) {
  require_no_fused(net, "compute_loss_and_gradients");
  auto trace = network_forward_trace(net, x);
  OutputGrad og = output_gradient(net, trace.back().output, targets);

  LossAndGrads result;
  result.loss = og.loss;
  result.grads.resize(net.layers.size());

  Matrix dout = std::move(og.dfinal);
  for (std::size_t idx = net.layers.size(); idx-- > 0;) {
    const LayerTrace& t = trace[idx];
    LayerGrads& lg = result.grads[idx];
    Matrix dinput;
    if (const auto* dense = std::get_if<DenseLayer>(&net.layers[idx])) {
      Matrix dz(dout.rows(), dout.cols());
      for (std::size_t i = 0; i < dout.size(); ++i)
        dz.storage()[i] =
            dout.storage()[i] * dense->act.derivative(t.pre.storage()[i]);
      lg.dw = matmul_tn(dz, t.input);
      lg.dbias = column_sums(dz);
      if (idx > 0) dinput = matmul(dz, dense->w);
    } else {
      const auto& mag = std::get<MagLayer>(net.layers[idx]);
      lg.dw = matmul_tn(dout, t.feat);
      if (!mag.bias.empty()) lg.dbias = column_sums(dout);
      if (idx > 0) {
        Matrix dfeat = matmul(dout, mag.w);
        for (std::size_t i = 0; i < dfeat.size(); ++i)
          dfeat.storage()[i] *= mag.act.derivative(t.pre.storage()[i]);
        dinput = matmul(dfeat, mag.g);
      }
    }
    if (idx == 0) break;
    // A skip point saw [original | previous]; only the previous-output part
    // propagates (the original input is not a parameter path).
    if (net.has_skip_at(idx))
      dinput = dinput.col_block(net.input_dim, dinput.cols());
    dout = std::move(dinput);
  }
  return result;
}

struct AdamState {
  Matrix mw, vw;
  std::vector<double> mb, vb;
};

class Optimizer {
 public:
  Optimizer(const NetworkSpec& net, const TrainConfig& cfg) : cfg_(cfg) {
    states_.resize(net.layers.size());
    if (cfg.optimizer != OptimizerKind::kAdam) return;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      if (const auto* dense = std::get_if<DenseLayer>(&net.layers[i])) {
        states_[i].mw = Matrix(dense->w.rows(), dense->w.cols());
        states_[i].vw = Matrix(dense->w.rows(), dense->w.cols());
        states_[i].mb.assign(dense->bias.size(), 0.0);
        states_[i].vb.assign(dense->bias.size(), 0.0);
      } else if (const auto* mag = std::get_if<MagLayer>(&net.layers[i])) {
        states_[i].mw = Matrix(mag->w.rows(), mag->w.cols());
        states_[i].vw = Matrix(mag->w.rows(), mag->w.cols());
        states_[i].mb.assign(mag->bias.size(), 0.0);
        states_[i].vb.assign(mag->bias.size(), 0.0);
      }
    }
  }

  void step(NetworkSpec& net, const LossAndGrads& lg) {
    ++t_;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      if (auto* dense = std::get_if<DenseLayer>(&net.layers[i])) {
        update(dense->w.storage(), lg.grads[i].dw.storage(), states_[i].mw.storage(),
               states_[i].vw.storage());
        update(dense->bias, lg.grads[i].dbias, states_[i].mb, states_[i].vb);
      } else if (auto* mag = std::get_if<MagLayer>(&net.layers[i])) {
        update(mag->w.storage(), lg.grads[i].dw.storage(), states_[i].mw.storage(),
               states_[i].vw.storage());
        if (!mag->bias.empty())
          update(mag->bias, lg.grads[i].dbias, states_[i].mb, states_[i].vb);
      }
    }
  }

 private:
  void update(std::vector<double>& param, const std::vector<double>& grad,
              std::vector<double>& m, std::vector<double>& v) {
    if (param.empty() || grad.empty()) return;
    const double lr = cfg_.learning_rate;
    if (cfg_.optimizer == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
      return;
    }
    const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      param[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.adam_epsilon);
    }
  }

  TrainConfig cfg_;
  std::vector<AdamState> states_;
  std::uint64_t t_ = 0;
};

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& order,
                   std::size_t begin, std::size_t end) {
  Matrix out(end - begin, m.cols());
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i - begin, j) = m(order[i], j);
  return out;
}

template <typename Targets>
Targets gather_targets(const Targets& t, const std::vector<std::size_t>& order,
                       std::size_t begin, std::size_t end);

template <>
Matrix gather_targets(const Matrix& t, const std::vector<std::size_t>& order,
                      std::size_t begin, std::size_t end) {
  return gather_rows(t, order, begin, end);
}

template <>
HeadTargets gather_targets(const HeadTargets& t,
                           const std::vector<std::size_t>& order,
                           std::size_t begin, std::size_t end) {
  HeadTargets out;
  for (const auto& [name, m] : t) out.emplace(name, gather_rows(m, order, begin, end));
  return out;
}

template <typename Targets>
TrainResult train_impl(NetworkSpec& net, const Matrix& inputs,
                       const Targets& targets, const TrainConfig& cfg) {
  validate_network(net);
  require_no_fused(net, "train");
  if (!(cfg.learning_rate > 0.0))
    throw std::invalid_argument("train: learning rate must be > 0");
  const std::size_t n = inputs.rows();
  if (n == 0) throw std::invalid_argument("train: empty input");
  const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);

  Optimizer opt(net, cfg);
  TrainResult result;
  result.epoch_loss.reserve(cfg.epochs);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle && batch < n) {
      Rng r(cfg.rng.substream(epoch));
      for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[r.index(i + 1)]);
    }
    double weighted_loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(begin + batch, n);
      LossAndGrads lg;
      if (end - begin == n) {
        lg = backprop(net, inputs, targets);
      } else {
        Matrix bx = gather_rows(inputs, order, begin, end);
        auto bt = gather_targets<Targets>(targets, order, begin, end);
        lg = backprop(net, bx, bt);
      }
      weighted_loss += lg.loss * static_cast<double>(end - begin);
      opt.step(net, lg);
    }
    const double epoch_loss = weighted_loss / static_cast<double>(n);
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("train: non-finite loss at epoch " +
                               std::to_string(epoch));
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

}  // namespace

LossAndGrads compute_loss_and_gradients(const NetworkSpec& net, const Matrix& x,
                                        const Matrix& targets) {
  return backprop(net, x, targets);
}

LossAndGrads compute_loss_and_gradients(const NetworkSpec& net, const Matrix& x,
                                        const HeadTargets& targets) {
  return backprop(net, x, targets);
}

double network_loss(const NetworkSpec& net, const Matrix& x,
                    const Matrix& targets) {
  auto out = network_forward(net, x);
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(out.final_output.size());
  for (std::size_t i = 0; i < out.final_output.size(); ++i) {
    const double d = out.final_output.storage()[i] - targets.storage()[i];
    loss += d * d * scale;
  }
  return loss;
}

double network_loss(const NetworkSpec& net, const Matrix& x,
                    const HeadTargets& targets) {
  auto out = network_forward(net, x);
  double loss = 0.0;
  for (const auto& h : net.heads) {
    const Matrix& a = out.heads.at(h.name);
    const Matrix& t = targets.at(h.name);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a.storage()[i] - t.storage()[i];
      loss += d * d * scale;
    }
  }
  return loss;
}

TrainResult train(NetworkSpec& net, const Matrix& inputs, const Matrix& targets,
                  const TrainConfig& cfg) {
  return train_impl(net, inputs, targets, cfg);
}

TrainResult train(NetworkSpec& net, const Matrix& inputs,
                  const HeadTargets& targets, const TrainConfig& cfg) {
  return train_impl(net, inputs, targets, cfg);
}

TrainResult fit_mag_adam_gram(MagLayer& layer, const Matrix& phi,
                              const Matrix& targets, const TrainConfig& cfg) {
  if (phi.rows() != targets.rows())
    throw std::invalid_argument("fit_mag_adam_gram: row mismatch");
  if (phi.cols() != layer.feature_dim() ||
      targets.cols() != layer.out_dim())
    throw std::invalid_argument("fit_mag_adam_gram: shape mismatch");
  if (!layer.bias.empty())
    throw std::invalid_argument("fit_mag_adam_gram: bias-free layers only");
  if (!(cfg.learning_rate > 0.0))
    throw std::invalid_argument("fit_mag_adam_gram: learning rate must be > 0");

  const double n_entries =
      static_cast<double>(targets.rows()) * static_cast<double>(targets.cols());
  const Matrix gram = matmul_tn(phi, phi);      // m x m
  const Matrix cross = matmul_tn(targets, phi); // l x m
  double target_ss = 0.0;
  for (double v : targets.storage()) target_ss += v * v;

  Matrix mw(layer.w.rows(), layer.w.cols());
  Matrix vw(layer.w.rows(), layer.w.cols());
  TrainResult result;
  result.epoch_loss.reserve(cfg.epochs);
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Matrix wa = matmul(layer.w, gram);  // l x m
    double loss = target_ss;
    for (std::size_t i = 0; i < layer.w.size(); ++i)
      loss += (wa.storage()[i] - 2.0 * cross.storage()[i]) * layer.w.storage()[i];
    loss /= n_entries;
    if (!std::isfinite(loss))
      throw std::runtime_error("fit_mag_adam_gram: non-finite loss at epoch " +
                               std::to_string(epoch));
    result.epoch_loss.push_back(loss);

    const double t = static_cast<double>(epoch + 1);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    if (cfg.optimizer == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < layer.w.size(); ++i) {
        const double g =
            2.0 * (wa.storage()[i] - cross.storage()[i]) / n_entries;
        layer.w.storage()[i] -= cfg.learning_rate * g;
      }
    } else {
      for (std::size_t i = 0; i < layer.w.size(); ++i) {
        const double g =
            2.0 * (wa.storage()[i] - cross.storage()[i]) / n_entries;
        mw.storage()[i] = b1 * mw.storage()[i] + (1.0 - b1) * g;
        vw.storage()[i] = b2 * vw.storage()[i] + (1.0 - b2) * g * g;
        layer.w.storage()[i] -= cfg.learning_rate * (mw.storage()[i] / c1) /
                                (std::sqrt(vw.storage()[i] / c2) + cfg.adam_epsilon);
      }
    }
  }
  return result;
}

}  // namespace mag
