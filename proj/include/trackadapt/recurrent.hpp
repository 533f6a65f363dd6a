#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace trackadapt {

enum class PredictorArch { kf, ekf, mlp, lstm };

std::string to_string(PredictorArch a);
// ConfigError for unknown names.
PredictorArch parse_arch(const std::string& name);

// Learned box-delta regressor: a k x 8 feature window in, a 4-vector delta out
// (see history_bank.hpp for the feature and delta conventions).
//
// Batched entry points take inputs as a (k*8) x B matrix, one column per window,
// and produce a 4 x B matrix. forward_train() records what backward() needs.
class SequenceNet {
 public:
  struct Cache {
    virtual ~Cache() = default;
  };

  virtual ~SequenceNet() = default;

  virtual PredictorArch arch() const = 0;
  virtual int context() const = 0;
  virtual std::unique_ptr<SequenceNet> clone() const = 0;

  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  void set_parameters(std::span<const double> p);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
  virtual Eigen::MatrixXd forward_train(const Eigen::MatrixXd& inputs, std::unique_ptr<Cache>& cache) const = 0;
  // Accumulates d(loss)/d(params) into grad given d(loss)/d(outputs).
  virtual void backward(const Cache& cache, const Eigen::MatrixXd& d_out, std::span<double> grad) const = 0;

  // Single window convenience wrapper.
  std::array<double, 4> predict_delta(std::span<const double> window) const;

  // Uniform(-1/sqrt(fan), 1/sqrt(fan)) initialization, fully determined by seed.
  virtual void initialize(std::uint64_t seed) = 0;

 protected:
  explicit SequenceNet(std::size_t n_params) : params_(n_params, 0.0) {}
  std::vector<double> params_;
};

// Stacked LSTM (PyTorch gate order i, f, g, o; separate input and recurrent
// biases) followed by a linear head on the last step's top hidden state.
// Defaults give 4 layers of 64 units: 119,044 parameters.
class LstmPredictor final : public SequenceNet {
 public:
  static constexpr int kDefaultLayers = 4;
  static constexpr int kDefaultHidden = 64;

  explicit LstmPredictor(int context, int layers = kDefaultLayers, int hidden = kDefaultHidden);

  static std::size_t count_parameters(int layers, int hidden);

  PredictorArch arch() const override { return PredictorArch::lstm; }
  int context() const override { return context_; }
  int layers() const { return layers_; }
  int hidden() const { return hidden_; }
  std::unique_ptr<SequenceNet> clone() const override { return std::make_unique<LstmPredictor>(*this); }

  Eigen::MatrixXd forward_train(const Eigen::MatrixXd& inputs, std::unique_ptr<Cache>& cache) const override;
  void backward(const Cache& cache, const Eigen::MatrixXd& d_out, std::span<double> grad) const override;
  void initialize(std::uint64_t seed) override;

 private:
  struct LayerOffsets {
    std::size_t w_ih, w_hh, b_ih, b_hh;
    int in;
  };
  LayerOffsets layer(int l) const;
  std::size_t head_offset() const;

  int context_;
  int layers_;
  int hidden_;
};

// Two tanh hidden layers over the flattened window, linear 4-output head.
// With k = 5 and the default 64/64 widths: 7,044 parameters.
class MlpPredictor final : public SequenceNet {
 public:
  static constexpr int kDefaultHidden = 64;

  explicit MlpPredictor(int context, int hidden1 = kDefaultHidden, int hidden2 = kDefaultHidden);

  static std::size_t count_parameters(int context, int hidden1, int hidden2);

  PredictorArch arch() const override { return PredictorArch::mlp; }
  int context() const override { return context_; }
  int hidden1() const { return hidden1_; }
  int hidden2() const { return hidden2_; }
  std::unique_ptr<SequenceNet> clone() const override { return std::make_unique<MlpPredictor>(*this); }

  Eigen::MatrixXd forward_train(const Eigen::MatrixXd& inputs, std::unique_ptr<Cache>& cache) const override;
  void backward(const Cache& cache, const Eigen::MatrixXd& d_out, std::span<double> grad) const override;
  void initialize(std::uint64_t seed) override;

 private:
  int context_;
  int hidden1_;
  int hidden2_;
};

}  // namespace trackadapt
