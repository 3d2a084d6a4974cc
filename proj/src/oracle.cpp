#include "sensoraudit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sensoraudit/error.hpp"
#include "sensoraudit/parallel.hpp"
#include "sensoraudit/report.hpp"

using nlohmann::ordered_json;

namespace sensoraudit {

void OracleConfig::validate() const {
  if (hidden_units == 0 || epochs == 0 || batch_size == 0) {
    throw AuditError(ErrorCode::kInvalidSpec, "oracle hidden_units, epochs and batch_size must be positive");
  }
  if (!(learning_rate > 0.0)) throw AuditError(ErrorCode::kInvalidSpec, "oracle learning_rate must be positive");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw AuditError(ErrorCode::kInvalidSpec, "oracle test_fraction must be in (0, 1)");
  }
}

void to_json(ordered_json& j, const OracleConfig& cfg) {
  j = ordered_json{{"hidden_units", cfg.hidden_units},
                   {"epochs", cfg.epochs},
                   {"learning_rate", cfg.learning_rate},
                   {"batch_size", cfg.batch_size},
                   {"test_fraction", cfg.test_fraction},
                   {"seed", cfg.seed}};
}

void from_json(const ordered_json& j, OracleConfig& cfg) {
  cfg = OracleConfig{};
  try {
    cfg.hidden_units = j.value("hidden_units", cfg.hidden_units);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kInvalidSpec, std::string("oracle config: ") + e.what());
  }
  cfg.validate();
}

double matthews(const Confusion& c) noexcept {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

MccResult evaluate_mcc(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size() || predictions.empty()) {
    throw AuditError(ErrorCode::kLengthMismatch,
                     "predictions (" + std::to_string(predictions.size()) + ") and truth (" +
                         std::to_string(truth.size()) + ") must have equal nonzero length");
  }
  MccResult r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) ++r.confusion.tp;
    else if (!p && !t) ++r.confusion.tn;
    else if (p) ++r.confusion.fp;
    else ++r.confusion.fn;
  }
  r.mcc = matthews(r.confusion);
  r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) / static_cast<double>(truth.size());
  return r;
}

// ---------------------------------------------------------------------------

void Standardizer::apply(Matrix& rows) const {
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto row = rows.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = scale[k] > 0.0 ? (row[k] - mean[k]) / scale[k] : 0.0;
    }
  }
}

Standardizer fit_standardizer(const Matrix& train) {
  if (train.rows() == 0) throw AuditError(ErrorCode::kEmptyTrainingSet, "cannot standardize an empty training set");
  Standardizer s;
  const std::size_t n = train.rows();
  s.mean.assign(train.cols(), 0.0);
  s.scale.assign(train.cols(), 0.0);
  for (std::size_t k = 0; k < train.cols(); ++k) {
    double lo = train(0, k);
    double hi = lo;
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sum += train(r, k);
      lo = std::min(lo, train(r, k));
      hi = std::max(hi, train(r, k));
    }
    if (lo == hi) {
      s.mean[k] = lo;
      continue;
    }
    s.mean[k] = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (train(r, k) - s.mean[k]) * (train(r, k) - s.mean[k]);
    s.scale[k] = std::sqrt(ss / static_cast<double>(n));
  }
  return s;
}

std::pair<Matrix, Matrix> standardize(const Matrix& train, const Matrix& test, Standardizer* fitted) {
  Standardizer s = fit_standardizer(train);
  Matrix a = train;
  Matrix b = test;
  s.apply(a);
  if (!b.empty() && b.cols() != a.cols()) {
    throw AuditError(ErrorCode::kMismatchedColumns, "train and test column counts differ");
  }
  s.apply(b);
  if (fitted) *fitted = std::move(s);
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Mlp::Mlp(std::size_t inputs, std::size_t hidden, std::uint64_t seed)
    : inputs_(inputs), hidden_(hidden), params_(hidden * inputs + hidden + hidden + 1) {
  std::mt19937_64 rng(seed);
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(inputs, 1)));
  const double hid_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> first(-in_bound, in_bound);
  std::uniform_real_distribution<double> second(-hid_bound, hid_bound);
  const std::size_t layer1 = hidden * inputs + hidden;
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] = i < layer1 ? first(rng) : second(rng);
}

double Mlp::forward(std::span<const double> x, std::vector<double>* hidden_out) const {
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * inputs_;
  const double* w2 = b1 + hidden_;
  const double b2 = w2[hidden_];
  double z = b2;
  if (hidden_out) hidden_out->resize(hidden_);
  for (std::size_t h = 0; h < hidden_; ++h) {
    double a = b1[h];
    const double* row = w1 + h * inputs_;
    for (std::size_t i = 0; i < inputs_; ++i) a += row[i] * x[i];
    a = std::max(0.0, a);
    if (hidden_out) (*hidden_out)[h] = a;
    z += w2[h] * a;
  }
  return z;
}

double Mlp::predict_proba(std::span<const double> x) const { return sigmoid(forward(x, nullptr)); }

double Mlp::loss_over(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows) const {
  double total = 0.0;
  for (std::size_t r : rows) {
    const double z = forward(x.row(r), nullptr);
    total += softplus(z) - (y[r] != 0 ? z : 0.0);
  }
  return rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
}

void Mlp::accumulate_gradient(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                              std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  if (rows.empty()) return;
  const double* w2 = params_.data() + hidden_ * inputs_ + hidden_;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + hidden_ * inputs_;
  double* g_w2 = g_b1 + hidden_;
  double& g_b2 = g_w2[hidden_];
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  std::vector<double> act;
  for (std::size_t r : rows) {
    const auto xr = x.row(r);
    const double z = forward(xr, &act);
    const double dz = (sigmoid(z) - (y[r] != 0 ? 1.0 : 0.0)) * inv_n;
    g_b2 += dz;
    for (std::size_t h = 0; h < hidden_; ++h) {
      g_w2[h] += dz * act[h];
      if (act[h] <= 0.0) continue;
      const double dh = dz * w2[h];
      g_b1[h] += dh;
      double* g_row = g_w1 + h * inputs_;
      for (std::size_t i = 0; i < inputs_; ++i) g_row[i] += dh * xr[i];
    }
  }
}

double Mlp::loss(const Matrix& x, std::span<const int> y) const {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return loss_over(x, y, rows);
}

std::vector<double> Mlp::gradient(const Matrix& x, std::span<const int> y) const {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> grad(params_.size());
  accumulate_gradient(x, y, rows, grad);
  return grad;
}

struct MlpTrainer {
  static void step(Mlp& net, const Matrix& x, std::span<const int> y, std::span<const std::size_t> batch,
                   double lr, std::vector<double>& grad) {
    net.accumulate_gradient(x, y, batch, grad);
    for (std::size_t i = 0; i < grad.size(); ++i) net.params_[i] -= lr * grad[i];
  }
  static double full_loss(const Mlp& net, const Matrix& x, std::span<const int> y,
                          std::span<const std::size_t> rows) {
    return net.loss_over(x, y, rows);
  }
};

Mlp train_mlp(const Matrix& x, std::span<const int> y, const OracleConfig& cfg, std::uint64_t seed,
              TrainingTrace* trace) {
  cfg.validate();
  if (x.rows() == 0) throw AuditError(ErrorCode::kEmptyTrainingSet, "training set is empty");
  if (y.size() != x.rows()) throw AuditError(ErrorCode::kLengthMismatch, "labels and rows differ in count");
  const bool has_pos = std::any_of(y.begin(), y.end(), [](int v) { return v != 0; });
  const bool has_neg = std::any_of(y.begin(), y.end(), [](int v) { return v == 0; });
  if (!has_pos || !has_neg) {
    throw AuditError(ErrorCode::kSingleClassTraining, "training labels contain a single class");
  }

  std::mt19937_64 rng(seed);
  Mlp net(x.cols(), cfg.hidden_units, rng());
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(net.parameters().size());
  const std::span<const std::size_t> all(order);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      MlpTrainer::step(net, x, y, all.subspan(start, len), cfg.learning_rate, grad);
    }
    if (trace) trace->epoch_loss.push_back(MlpTrainer::full_loss(net, x, y, all));
  }
  return net;
}

Split stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Split split;
  for (int label : {1, 0}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] != 0 ? 1 : 0) == label) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(idx.size()) * test_fraction + 0.5));
    if (!idx.empty()) n_test = std::min(n_test, idx.size() - 1);
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::uint64_t pair_seed(std::uint64_t global_seed, const std::string& a, const std::string& b) {
  // FNV-1a over both names (0xff-separated), then a splitmix64 finalizer keyed by the run seed.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_in = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  mix_in(a);
  mix_in(b);
  std::uint64_t z = global_seed + 0x9e3779b97f4a7c15ULL + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

OracleResult run_pair_oracle(const FeatureMatrix& a, const FeatureMatrix& b, const OracleConfig& cfg) {
  cfg.validate();
  if (a.cols() != b.cols()) throw AuditError(ErrorCode::kMismatchedColumns, "oracle pair has different column counts");
  Matrix x;
  std::vector<int> y;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    x.append_row(a.values.row(r));
    y.push_back(1);
  }
  for (std::size_t r = 0; r < b.rows(); ++r) {
    x.append_row(b.values.row(r));
    y.push_back(0);
  }
  if (a.rows() == 0 || b.rows() == 0) {
    throw AuditError(ErrorCode::kSingleClassTraining, "oracle pair '" + a.class_label + "' vs '" +
                                                          b.class_label + "' has an empty class");
  }

  std::mt19937_64 seeder(cfg.seed);
  const Split split = stratified_split(y, cfg.test_fraction, seeder());
  Matrix train_x;
  Matrix test_x;
  std::vector<int> train_y;
  std::vector<int> test_y;
  for (std::size_t i : split.train) {
    train_x.append_row(x.row(i));
    train_y.push_back(y[i]);
  }
  for (std::size_t i : split.test) {
    test_x.append_row(x.row(i));
    test_y.push_back(y[i]);
  }
  if (test_y.empty()) throw AuditError(ErrorCode::kTooFewRows, "oracle test split is empty");
  auto [train_std, test_std] = standardize(train_x, test_x);
  const Mlp net = train_mlp(train_std, train_y, cfg, seeder());

  std::vector<int> pred(test_y.size());
  for (std::size_t i = 0; i < test_y.size(); ++i) pred[i] = net.predict(test_std.row(i));
  const MccResult m = evaluate_mcc(pred, test_y);

  OracleResult out;
  out.class_a = a.class_label;
  out.class_b = b.class_label;
  out.mcc = m.mcc;
  out.accuracy = m.accuracy;
  out.confusion = m.confusion;
  out.seed = cfg.seed;
  return out;
}

std::vector<OracleResult> run_oracle_audit(const std::map<std::string, FeatureMatrix>& matrices,
                                           const std::vector<std::string>& classes, const OracleConfig& cfg,
                                           unsigned jobs) {
  cfg.validate();
  std::vector<std::string> sorted = classes;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 2) {
    throw AuditError(ErrorCode::kTooFewClasses,
                     "oracle audit needs at least 2 classes, got " + std::to_string(sorted.size()));
  }
  std::vector<std::pair<const FeatureMatrix*, const FeatureMatrix*>> pairs;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const auto a = matrices.find(sorted[i]);
      const auto b = matrices.find(sorted[j]);
      if (a == matrices.end() || b == matrices.end()) {
        throw AuditError(ErrorCode::kTooFewRows,
                         "class '" + (a == matrices.end() ? sorted[i] : sorted[j]) + "' has no samples");
      }
      pairs.emplace_back(&a->second, &b->second);
    }
  }
  std::vector<OracleResult> results(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t p) {
    OracleConfig pair_cfg = cfg;
    pair_cfg.seed = pair_seed(cfg.seed, pairs[p].first->class_label, pairs[p].second->class_label);
    results[p] = run_pair_oracle(*pairs[p].first, *pairs[p].second, pair_cfg);
  });
  return results;
}

std::string oracle_csv(std::span<const OracleResult> results) {
  CsvWriter csv({"class_a", "class_b", "mcc", "accuracy", "tp", "tn", "fp", "fn", "seed"});
  for (const auto& r : results) {
    csv.field(r.class_a)
        .field(r.class_b)
        .field(r.mcc)
        .field(r.accuracy)
        .field(r.confusion.tp)
        .field(r.confusion.tn)
        .field(r.confusion.fp)
        .field(r.confusion.fn)
        .field(static_cast<unsigned long long>(r.seed));
    csv.end_row();
  }
  return csv.str();
}

}  // namespace sensoraudit
