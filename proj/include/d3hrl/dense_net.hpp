#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace d3hrl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Small fully connected net: rectifier on hidden layers, identity output.
/// Used as categorical predictor (log-softmax head) and as Q-value head.
struct DenseNet {
  std::vector<MatrixXd> weights;  // weights[l] is out x in
  std::vector<VectorXd> biases;

  int input_width() const { return static_cast<int>(weights.front().cols()); }
  int output_width() const { return static_cast<int>(weights.back().rows()); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

/// Parameter-shaped gradient accumulator.
struct NetGradients {
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;

  static NetGradients zeros_like(const DenseNet& net);
  void add_scaled(const NetGradients& other, double scale);
  void scale(double s);
};

struct TrainConfig {
  double learning_rate = 0.05;
  int minibatch_size = 32;
  int max_epochs = 80;
  int patience = 6;
  double tolerance = 1e-3;
  uint64_t seed = 0;
  double holdout_fraction = 0.1;
};

struct TrainReport {
  int epochs_run = 0;
  double final_holdout_ll = 0.0;  // mean log-likelihood on the held-out split
  bool converged = false;
};

DenseNet make_net(const std::vector<int>& widths, uint64_t seed);

VectorXd forward(const DenseNet& net, const VectorXd& input);

/// log softmax(logits)[label]; always <= 0.
double log_likelihood(const DenseNet& net, const VectorXd& input, int label);

VectorXd log_softmax(const VectorXd& logits);

/// Gradients of -log_likelihood(input, label) w.r.t. all parameters.
NetGradients loss_gradients(const DenseNet& net, const VectorXd& input, int label);

/// Gradients of the scalar loss whose derivative w.r.t. the output vector is
/// `output_grad` (used for squared-error Q updates).
NetGradients output_gradients(const DenseNet& net, const VectorXd& input,
                              const VectorXd& output_grad);

void apply_sgd(DenseNet& net, const NetGradients& grads, double learning_rate);

/// One labelled example of a categorical dataset.
struct Example {
  VectorXd input;
  int label = 0;
};

TrainReport train(DenseNet& net, const std::vector<Example>& dataset, const TrainConfig& cfg);

double mean_log_likelihood(const DenseNet& net, const std::vector<Example>& dataset);

/// Max relative error between analytic and central-finite-difference
/// gradients of -log_likelihood at (input, label).
double grad_check(const DenseNet& net, const VectorXd& input, int label);

/// Flat text snapshot: width header then parameters, row-major.
void save_net(const DenseNet& net, std::ostream& out);
DenseNet load_net(std::istream& in);

/// Grow the output layer to `new_width`, keeping existing rows. New rows are
/// zero-initialized so appended actions start with neutral values.
void expand_output(DenseNet& net, int new_width);

}  // namespace d3hrl
