#pragma once

#include <vector>

#include "playroom/common/error.hpp"

namespace playroom::audio {

// Multichannel windowed audio. All channels have equal length.
struct AudioFrame {
  std::vector<std::vector<double>> samples;  // channels x T
  double sample_rate = 16000.0;
  double start_s = 0.0;

  size_t channels() const { return samples.size(); }
  size_t length() const { return samples.empty() ? 0 : samples[0].size(); }

  void validate() const {
    if (sample_rate <= 0.0) throw Error("audio frame: rate must be > 0");
    for (const auto& ch : samples)
      if (ch.size() != length())
        throw Error("audio frame: channels differ in length");
  }
};

}  // namespace playroom::audio
