#pragma once

// Test-only helpers: independent reference computations and synthetic
// fixtures shared by the unit tests and the acceptance binary. Nothing here
// calls into the library's numerics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "sensoraudit/ingest.hpp"

namespace satest {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sensoraudit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Row-major rows x cols values for one class.
struct Table {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

struct NaiveScores {
  double f1 = 0.0;
  long f1_argmax = -1;
  double f2 = 1.0;
  double f3 = 0.0;
  long f3_argmax = -1;
};

// Straight transcription of the metric definitions, column by column.
inline NaiveScores naive_separability(const Table& a, const Table& b) {
  NaiveScores s;
  long best_capped = -1;
  for (std::size_t k = 0; k < a.cols; ++k) {
    std::vector<double> xa, xb;
    for (std::size_t r = 0; r < a.rows; ++r) xa.push_back(a.at(r, k));
    for (std::size_t r = 0; r < b.rows; ++r) xb.push_back(b.at(r, k));

    auto all_equal = [](const std::vector<double>& x) {
      for (double e : x) {
        if (e != x[0]) return false;
      }
      return true;
    };
    auto mean = [&](const std::vector<double>& x) {
      if (all_equal(x)) return x[0];
      double t = 0.0;
      for (double e : x) t += e;
      return t / static_cast<double>(x.size());
    };
    auto pvar = [&](const std::vector<double>& x) {
      if (all_equal(x)) return 0.0;
      const double m = mean(x);
      double t = 0.0;
      for (double e : x) t += (e - m) * (e - m);
      return t / static_cast<double>(x.size());
    };

    const double ma = mean(xa), mb = mean(xb);
    const double vs = pvar(xa) + pvar(xb);
    if (vs > 0.0) {
      const double f = (ma - mb) * (ma - mb) / vs;
      if (s.f1_argmax < 0 || f > s.f1) {
        s.f1 = f;
        s.f1_argmax = static_cast<long>(k);
      }
    } else if (ma != mb && best_capped < 0) {
      best_capped = static_cast<long>(k);
    }

    const double mina = *std::min_element(xa.begin(), xa.end());
    const double maxa = *std::max_element(xa.begin(), xa.end());
    const double minb = *std::min_element(xb.begin(), xb.end());
    const double maxb = *std::max_element(xb.begin(), xb.end());
    double overlap = std::min(maxa, maxb) - std::max(mina, minb);
    if (overlap < 0.0) overlap = 0.0;
    const double range = std::max(maxa, maxb) - std::min(mina, minb);
    if (range > 0.0) {
      s.f2 *= overlap / range;
      const double eff = 1.0 - overlap / range;
      if (s.f3_argmax < 0 || eff > s.f3) {
        s.f3 = eff;
        s.f3_argmax = static_cast<long>(k);
      }
    }
  }
  if (s.f1_argmax < 0 && best_capped >= 0) {
    s.f1 = 1e12;
    s.f1_argmax = best_capped;
  }
  return s;
}

inline bool close_rel(double a, double b, double rel) {
  if (a == b) return true;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= rel * scale;
}

// Kendall tau-b between two equally long score vectors.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tie_x;
      } else if (dy == 0.0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((n0 + tie_x) * (n0 + tie_y));
  return denom == 0.0 ? 0.0 : static_cast<double>(concordant - discordant) / denom;
}

// O(N^2) template counting. Returns -ln(A/B), or the cap when A or B is 0.
inline double naive_sample_entropy(const std::vector<double>& x, std::size_t m, double r_coeff,
                                   bool* capped = nullptr) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double r = r_coeff * std::sqrt(ss / static_cast<double>(n - 1));
  const std::size_t templates = n - m;
  long a = 0, b = 0;
  for (std::size_t i = 0; i < templates; ++i) {
    for (std::size_t j = i + 1; j < templates; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < m; ++k) d = std::max(d, std::fabs(x[i + k] - x[j + k]));
      if (d <= r) {
        ++b;
        if (std::fabs(x[i + m] - x[j + m]) <= r) ++a;
      }
    }
  }
  const bool cap = a == 0 || b == 0;
  if (capped) *capped = cap;
  if (cap) return std::log(static_cast<double>(templates) * static_cast<double>(templates - 1));
  return -std::log(static_cast<double>(a) / static_cast<double>(b));
}

// Katz dimension written out step by step on the curve (i, x_i).
inline double naive_katz(const std::vector<double>& x) {
  double length = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dy = x[i] - x[i - 1];
    length += std::sqrt(1.0 + dy * dy);
  }
  double extent = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double di = static_cast<double>(i);
    const double dy = x[i] - x[0];
    extent = std::max(extent, std::sqrt(di * di + dy * dy));
  }
  const double steps = static_cast<double>(x.size() - 1);
  return std::log10(steps) / (std::log10(steps) + std::log10(extent / length));
}

// Energy of the level-L Haar approximation of a length divisible by 2^L:
// each coefficient is a block sum scaled by 2^(-L/2).
inline double haar_approximation_energy(const std::vector<double>& x, std::size_t levels) {
  const std::size_t block = std::size_t{1} << levels;
  double e = 0.0;
  for (std::size_t s = 0; s + block <= x.size(); s += block) {
    double t = 0.0;
    for (std::size_t i = 0; i < block; ++i) t += x[s + i];
    e += t * t / static_cast<double>(block);
  }
  return e;
}

inline std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

inline std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

// Three classes separated along one amplitude channel. Class pair (a, b) is
// the engineered low-separation pair; (a, c) is the widest.
inline sensoraudit::SyntheticSpec graded_spec(std::size_t trials_per_class) {
  sensoraudit::SyntheticSpec spec;
  spec.class_names = {"a", "b", "c"};
  spec.trials_per_class = trials_per_class;
  sensoraudit::ChannelModel informative;
  informative.gains = {1.0, 1.4, 2.6};
  spec.channels.push_back(informative);
  for (int k = 0; k < 3; ++k) {
    sensoraudit::ChannelModel noise;
    noise.gains = {1.0, 1.0, 1.0};
    spec.channels.push_back(noise);
  }
  return spec;
}

// One loud channel per class on a quantized front end; the remaining
// channels idle near the ADC resolution for every class.
inline sensoraudit::SyntheticSpec one_informative_spec(std::size_t classes, std::size_t channels,
                                                       std::size_t trials_per_class) {
  sensoraudit::SyntheticSpec spec;
  for (std::size_t c = 0; c < classes; ++c) spec.class_names.push_back("g" + std::to_string(c));
  spec.trials_per_class = trials_per_class;
  spec.quantization_step = 1.0;
  for (std::size_t k = 0; k < channels; ++k) {
    sensoraudit::ChannelModel ch;
    ch.gains.assign(classes, 0.5);
    if (k < classes) ch.gains[k] = 30.0;
    ch.noise_floor = 0.3;
    spec.channels.push_back(ch);
  }
  return spec;
}

}  // namespace satest
