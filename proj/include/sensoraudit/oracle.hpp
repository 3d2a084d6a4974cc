#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensoraudit/features.hpp"
#include "sensoraudit/matrix.hpp"

namespace sensoraudit {

struct OracleConfig {
  std::size_t hidden_units = 64;
  std::size_t epochs = 200;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(nlohmann::ordered_json& j, const OracleConfig& cfg);
void from_json(const nlohmann::ordered_json& j, OracleConfig& cfg);

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
};

// MCC from a confusion table; 0 when any marginal is empty.
double matthews(const Confusion& c) noexcept;

struct MccResult {
  double mcc = 0.0;
  double accuracy = 0.0;
  Confusion confusion;
};

// Labels are 0/1 (nonzero counts as 1), 1 is the positive class. Throws
// kLengthMismatch on unequal or empty inputs.
MccResult evaluate_mcc(std::span<const int> predictions, std::span<const int> truth);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 0 marks a zero-variance column

  void apply(Matrix& rows) const;
};

// z-scores both sets with training statistics (population SD); columns that
// are constant in training map to 0.
Standardizer fit_standardizer(const Matrix& train);
std::pair<Matrix, Matrix> standardize(const Matrix& train, const Matrix& test, Standardizer* fitted = nullptr);

// One ReLU hidden layer, one logistic output, mean binary cross-entropy.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t hidden() const noexcept { return hidden_; }

  // Parameters flattened as [W1 (hidden x inputs), b1, w2, b2].
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }

  double predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

  // Mean cross-entropy over all rows of x.
  double loss(const Matrix& x, std::span<const int> y) const;
  // Analytic gradient of loss() with respect to parameters().
  std::vector<double> gradient(const Matrix& x, std::span<const int> y) const;

 private:
  double forward(std::span<const double> x, std::vector<double>* hidden_out) const;
  double loss_over(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows) const;
  void accumulate_gradient(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                           std::span<double> grad) const;

  friend struct MlpTrainer;

  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> params_;
};

struct TrainingTrace {
  std::vector<double> epoch_loss;  // full-batch training loss after each epoch
};

// Mini-batch gradient descent; batch order reshuffled each epoch from `seed`.
Mlp train_mlp(const Matrix& x, std::span<const int> y, const OracleConfig& cfg, std::uint64_t seed,
              TrainingTrace* trace = nullptr);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-label shuffle; round(n * fraction) of each label go to test, keeping at
// least one row of each label in train.
Split stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

struct OracleResult {
  std::string class_a;
  std::string class_b;
  double mcc = 0.0;
  double accuracy = 0.0;
  Confusion confusion;
  std::uint64_t seed = 0;
};

// Seed for one pair, derived from the run seed and the two class names.
std::uint64_t pair_seed(std::uint64_t global_seed, const std::string& a, const std::string& b);

// Binary classifier for class_a (label 1) vs class_b (label 0).
OracleResult run_pair_oracle(const FeatureMatrix& a, const FeatureMatrix& b, const OracleConfig& cfg);

// One classifier per unordered pair, pairs ordered lexicographically.
std::vector<OracleResult> run_oracle_audit(const std::map<std::string, FeatureMatrix>& matrices,
                                           const std::vector<std::string>& classes,
                                           const OracleConfig& cfg, unsigned jobs = 1);

std::string oracle_csv(std::span<const OracleResult> results);

}  // namespace sensoraudit
