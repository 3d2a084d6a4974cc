#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "sensoraudit/error.hpp"
#include "sensoraudit/ingest.hpp"

using nlohmann::ordered_json;

namespace sensoraudit {

void SyntheticSpec::validate() const {
  if (class_names.empty()) throw AuditError(ErrorCode::kInvalidSpec, "synthetic spec has no classes");
  if (channels.empty()) throw AuditError(ErrorCode::kInvalidSpec, "synthetic spec has no channels");
  if (trials_per_class == 0 || samples_per_trial == 0) {
    throw AuditError(ErrorCode::kInvalidSpec, "trial and sample counts must be positive");
  }
  if (trials_per_class > 9999) throw AuditError(ErrorCode::kInvalidSpec, "at most 9999 trials per class");
  if (!(sampling_rate_hz > 0.0)) throw AuditError(ErrorCode::kInvalidSpec, "sampling rate must be positive");
  if (!(quantization_step >= 0.0) || !std::isfinite(quantization_step)) {
    throw AuditError(ErrorCode::kInvalidSpec, "quantization_step must be >= 0");
  }
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const auto& ch = channels[k];
    const std::string where = "channel " + std::to_string(k + 1) + ": ";
    if (ch.gains.size() != class_names.size()) {
      throw AuditError(ErrorCode::kInvalidSpec, where + "needs one gain per class");
    }
    for (double g : ch.gains) {
      if (!(g >= 0.0) || !std::isfinite(g)) throw AuditError(ErrorCode::kInvalidSpec, where + "gains must be >= 0");
    }
    if (!(ch.gain_spread >= 0.0) || !(ch.noise_floor >= 0.0) || !(ch.modulation_depth >= 0.0)) {
      throw AuditError(ErrorCode::kInvalidSpec, where + "spreads and levels must be >= 0");
    }
    if (!(ch.noise_mix >= 0.0 && ch.noise_mix <= 1.0)) {
      throw AuditError(ErrorCode::kInvalidSpec, where + "noise_mix must be in [0, 1]");
    }
    if (!(ch.noise_cutoff_hz > 0.0)) throw AuditError(ErrorCode::kInvalidSpec, where + "noise_cutoff_hz must be > 0");
  }
}

void to_json(ordered_json& j, const SyntheticSpec& spec) {
  ordered_json channels = ordered_json::array();
  for (const auto& ch : spec.channels) {
    channels.push_back({{"gains", ch.gains},
                        {"gain_spread", ch.gain_spread},
                        {"tone_hz", ch.tone_hz},
                        {"noise_mix", ch.noise_mix},
                        {"noise_cutoff_hz", ch.noise_cutoff_hz},
                        {"modulation_depth", ch.modulation_depth},
                        {"modulation_hz", ch.modulation_hz},
                        {"noise_floor", ch.noise_floor}});
  }
  j = ordered_json{{"class_names", spec.class_names},
                   {"sampling_rate_hz", spec.sampling_rate_hz},
                   {"trials_per_class", spec.trials_per_class},
                   {"samples_per_trial", spec.samples_per_trial},
                   {"quantization_step", spec.quantization_step},
                   {"seed", spec.seed},
                   {"channels", std::move(channels)}};
}

void from_json(const ordered_json& j, SyntheticSpec& spec) {
  spec = SyntheticSpec{};
  try {
    spec.class_names = j.at("class_names").get<std::vector<std::string>>();
    spec.sampling_rate_hz = j.value("sampling_rate_hz", spec.sampling_rate_hz);
    spec.trials_per_class = j.value("trials_per_class", spec.trials_per_class);
    if (j.contains("windows_per_class")) spec.trials_per_class = j.at("windows_per_class").get<std::size_t>();
    spec.samples_per_trial = j.value("samples_per_trial", spec.samples_per_trial);
    spec.quantization_step = j.value("quantization_step", spec.quantization_step);
    spec.seed = j.value("seed", spec.seed);
    for (const auto& c : j.at("channels")) {
      ChannelModel ch;
      ch.gains = c.at("gains").get<std::vector<double>>();
      ch.gain_spread = c.value("gain_spread", ch.gain_spread);
      ch.tone_hz = c.value("tone_hz", ch.tone_hz);
      ch.noise_mix = c.value("noise_mix", ch.noise_mix);
      ch.noise_cutoff_hz = c.value("noise_cutoff_hz", ch.noise_cutoff_hz);
      ch.modulation_depth = c.value("modulation_depth", ch.modulation_depth);
      ch.modulation_hz = c.value("modulation_hz", ch.modulation_hz);
      ch.noise_floor = c.value("noise_floor", ch.noise_floor);
      spec.channels.push_back(std::move(ch));
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kInvalidSpec, std::string("synthetic spec: ") + e.what());
  }
  spec.validate();
}

RecordingSet generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);

  RecordingSet set;
  set.sampling_rate_hz = spec.sampling_rate_hz;
  set.class_names = spec.class_names;
  set.channel_count = spec.channels.size();

  const double fs = spec.sampling_rate_hz;
  const std::size_t n = spec.samples_per_trial;
  const double q = spec.quantization_step;
  // Session-major order matches the lexicographic order load_dataset uses for
  // the same files on disk.
  for (std::size_t trial = 0; trial < spec.trials_per_class; ++trial) {
    char session[16];
    std::snprintf(session, sizeof session, "s%04zu", trial + 1);
    for (std::size_t cls = 0; cls < spec.class_names.size(); ++cls) {
      Recording rec;
      rec.class_label = spec.class_names[cls];
      rec.participant_id = "p01";
      rec.session_id = session;
      rec.trial_id = "1";
      rec.samples = Matrix(set.channel_count, n);
      for (std::size_t k = 0; k < spec.channels.size(); ++k) {
        const ChannelModel& ch = spec.channels[k];
        const double amplitude = ch.gains[cls] * std::exp(ch.gain_spread * normal(rng));
        const double tone_phase = phase(rng);
        const double mod_phase = phase(rng);
        // One-pole low-pass, rescaled to unit stationary variance.
        const double alpha = 1.0 - std::exp(-kTwoPi * ch.noise_cutoff_hz / fs);
        const double unit = std::sqrt((2.0 - alpha) / alpha);
        double state = normal(rng) * std::sqrt(alpha / (2.0 - alpha));
        auto out = rec.samples.row(k);
        for (std::size_t t = 0; t < n; ++t) {
          const double time = static_cast<double>(t) / fs;
          state += alpha * (normal(rng) - state);
          const double envelope = 1.0 + ch.modulation_depth * std::sin(kTwoPi * ch.modulation_hz * time + mod_phase);
          const double carrier = ch.noise_mix * state * unit +
                                 (1.0 - ch.noise_mix) * std::numbers::sqrt2 *
                                     std::sin(kTwoPi * ch.tone_hz * time + tone_phase);
          const double x = amplitude * envelope * carrier + ch.noise_floor * normal(rng);
          out[t] = q > 0.0 ? q * std::nearbyint(x / q) : x;
        }
      }
      set.recordings.push_back(std::move(rec));
    }
  }
  return set;
}

}  // namespace sensoraudit
