#include "d3hrl/dense_net.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "d3hrl/rng.hpp"

namespace d3hrl {

NetGradients NetGradients::zeros_like(const DenseNet& net) {
  NetGradients g;
  g.weights.reserve(net.weights.size());
  g.biases.reserve(net.biases.size());
  for (size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.push_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

void NetGradients::add_scaled(const NetGradients& other, double scale) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] += scale * other.weights[l];
    biases[l] += scale * other.biases[l];
  }
}

void NetGradients::scale(double s) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    biases[l] *= s;
  }
}

DenseNet make_net(const std::vector<int>& widths, uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("make_net: need at least input and output width");
  Rng rng(mix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseNet net;
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    // He scaling for the rectifier layers.
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    MatrixXd w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = scale * gauss(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(VectorXd::Zero(out));
  }
  return net;
}

namespace {

struct ForwardCache {
  std::vector<VectorXd> activations;      // activations[0] = input, last = output
  std::vector<VectorXd> preactivations;   // z of each layer
};

ForwardCache forward_cached(const DenseNet& net, const VectorXd& input) {
  ForwardCache cache;
  cache.activations.push_back(input);
  VectorXd a = input;
  for (int l = 0; l < net.layer_count(); ++l) {
    VectorXd z = net.weights[l] * a + net.biases[l];
    cache.preactivations.push_back(z);
    if (l + 1 < net.layer_count()) {
      a = z.cwiseMax(0.0);
    } else {
      a = z;
    }
    cache.activations.push_back(a);
  }
  return cache;
}

NetGradients backprop(const DenseNet& net, const ForwardCache& cache, VectorXd delta) {
  NetGradients g = NetGradients::zeros_like(net);
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    g.weights[l] = delta * cache.activations[l].transpose();
    g.biases[l] = delta;
    if (l > 0) {
      VectorXd back = net.weights[l].transpose() * delta;
      const VectorXd& z = cache.preactivations[l - 1];
      for (int i = 0; i < back.size(); ++i)
        if (z(i) <= 0.0) back(i) = 0.0;
      delta = std::move(back);
    }
  }
  return g;
}

}  // namespace

VectorXd forward(const DenseNet& net, const VectorXd& input) {
  if (input.size() != net.input_width())
    throw std::invalid_argument("forward: input width mismatch");
  VectorXd a = input;
  for (int l = 0; l < net.layer_count(); ++l) {
    a = net.weights[l] * a + net.biases[l];
    if (l + 1 < net.layer_count()) a = a.cwiseMax(0.0);
  }
  return a;
}

VectorXd log_softmax(const VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

double log_likelihood(const DenseNet& net, const VectorXd& input, int label) {
  const VectorXd logits = forward(net, input);
  if (label < 0 || label >= logits.size())
    throw std::out_of_range("log_likelihood: label outside output domain");
  return log_softmax(logits)(label);
}

NetGradients loss_gradients(const DenseNet& net, const VectorXd& input, int label) {
  if (input.size() != net.input_width())
    throw std::invalid_argument("loss_gradients: input width mismatch");
  ForwardCache cache = forward_cached(net, input);
  const VectorXd& logits = cache.activations.back();
  VectorXd probs = log_softmax(logits).array().exp();
  probs(label) -= 1.0;  // d(-log softmax[label]) / d logits
  return backprop(net, cache, std::move(probs));
}

NetGradients output_gradients(const DenseNet& net, const VectorXd& input,
                              const VectorXd& output_grad) {
  ForwardCache cache = forward_cached(net, input);
  return backprop(net, cache, output_grad);
}

void apply_sgd(DenseNet& net, const NetGradients& grads, double learning_rate) {
  for (int l = 0; l < net.layer_count(); ++l) {
    net.weights[l] -= learning_rate * grads.weights[l];
    net.biases[l] -= learning_rate * grads.biases[l];
  }
}

double mean_log_likelihood(const DenseNet& net, const std::vector<Example>& dataset) {
  if (dataset.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : dataset) total += log_likelihood(net, ex.input, ex.label);
  return total / static_cast<double>(dataset.size());
}

TrainReport train(DenseNet& net, const std::vector<Example>& dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");

  Rng rng(derive_seed(cfg.seed, 0x7261696eULL));
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  size_t holdout_count =
      static_cast<size_t>(cfg.holdout_fraction * static_cast<double>(dataset.size()));
  holdout_count = std::min(holdout_count, dataset.size() - 1);
  std::vector<Example> holdout;
  std::vector<int> train_idx;
  for (size_t k = 0; k < order.size(); ++k) {
    if (k < holdout_count) holdout.push_back(dataset[order[k]]);
    else train_idx.push_back(order[k]);
  }
  const bool use_holdout = !holdout.empty();

  TrainReport report;
  double best_ll = -std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    for (size_t start = 0; start < train_idx.size(); start += cfg.minibatch_size) {
      const size_t end = std::min(train_idx.size(), start + cfg.minibatch_size);
      NetGradients batch = NetGradients::zeros_like(net);
      for (size_t k = start; k < end; ++k) {
        const Example& ex = dataset[train_idx[k]];
        batch.add_scaled(loss_gradients(net, ex.input, ex.label), 1.0);
      }
      batch.scale(1.0 / static_cast<double>(end - start));
      apply_sgd(net, batch, cfg.learning_rate);
    }
    report.epochs_run = epoch + 1;

    const double ll = use_holdout
                          ? mean_log_likelihood(net, holdout)
                          : mean_log_likelihood(net, dataset);
    if (!std::isfinite(ll)) throw std::runtime_error("train: non-finite likelihood");
    if (ll > best_ll + cfg.tolerance) {
      best_ll = ll;
      stale_epochs = 0;
    } else {
      if (++stale_epochs >= cfg.patience) {
        report.converged = true;
        report.final_holdout_ll = ll;
        return report;
      }
    }
    report.final_holdout_ll = ll;
  }
  return report;
}

double grad_check(const DenseNet& net, const VectorXd& input, int label) {
  const NetGradients analytic = loss_gradients(net, input, label);
  DenseNet probe = net;
  const double eps = 1e-5;
  double max_rel = 0.0;

  auto loss_at = [&](const DenseNet& n) { return -log_likelihood(n, input, label); };

  for (int l = 0; l < net.layer_count(); ++l) {
    for (int r = 0; r < net.weights[l].rows(); ++r) {
      for (int c = 0; c < net.weights[l].cols(); ++c) {
        const double saved = probe.weights[l](r, c);
        probe.weights[l](r, c) = saved + eps;
        const double up = loss_at(probe);
        probe.weights[l](r, c) = saved - eps;
        const double down = loss_at(probe);
        probe.weights[l](r, c) = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(numeric), std::abs(analytic.weights[l](r, c)), 1e-8});
        max_rel = std::max(max_rel, std::abs(numeric - analytic.weights[l](r, c)) / denom);
      }
      const double saved = probe.biases[l](r);
      probe.biases[l](r) = saved + eps;
      const double up = loss_at(probe);
      probe.biases[l](r) = saved - eps;
      const double down = loss_at(probe);
      probe.biases[l](r) = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::abs(numeric), std::abs(analytic.biases[l](r)), 1e-8});
      max_rel = std::max(max_rel, std::abs(numeric - analytic.biases[l](r)) / denom);
    }
  }
  return max_rel;
}

void save_net(const DenseNet& net, std::ostream& out) {
  out << net.layer_count() + 1;
  out << ' ' << net.input_width();
  for (int l = 0; l < net.layer_count(); ++l) out << ' ' << net.weights[l].rows();
  out << '\n';
  out.precision(17);
  for (int l = 0; l < net.layer_count(); ++l) {
    for (int r = 0; r < net.weights[l].rows(); ++r)
      for (int c = 0; c < net.weights[l].cols(); ++c) out << net.weights[l](r, c) << '\n';
    for (int r = 0; r < net.biases[l].size(); ++r) out << net.biases[l](r) << '\n';
  }
}

DenseNet load_net(std::istream& in) {
  int n_widths = 0;
  if (!(in >> n_widths) || n_widths < 2) throw std::runtime_error("load_net: bad width header");
  std::vector<int> widths(n_widths);
  for (int& w : widths)
    if (!(in >> w) || w <= 0) throw std::runtime_error("load_net: bad width header");
  DenseNet net;
  for (int l = 0; l + 1 < n_widths; ++l) {
    MatrixXd w(widths[l + 1], widths[l]);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c)
        if (!(in >> w(r, c))) throw std::runtime_error("load_net: truncated parameters");
    VectorXd b(widths[l + 1]);
    for (int r = 0; r < b.size(); ++r)
      if (!(in >> b(r))) throw std::runtime_error("load_net: truncated parameters");
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void expand_output(DenseNet& net, int new_width) {
  const int old_width = net.output_width();
  if (new_width < old_width) throw std::invalid_argument("expand_output: output may not shrink");
  if (new_width == old_width) return;
  MatrixXd w = MatrixXd::Zero(new_width, net.weights.back().cols());
  w.topRows(old_width) = net.weights.back();
  VectorXd b = VectorXd::Zero(new_width);
  b.head(old_width) = net.biases.back();
  net.weights.back() = std::move(w);
  net.biases.back() = std::move(b);
}

}  // namespace d3hrl
