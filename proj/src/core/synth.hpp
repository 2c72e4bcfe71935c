// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_SYNTH_HPP
#define EARVERIFY_CORE_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mls.hpp"
#include "preprocess.hpp"
#include "rng.hpp"

namespace earverify {

// One resonant peak of an ear-canal model: a two-pole section mixed with the
// direct path, so the cascade stays a bounded-dynamic-range transfer
// function with a gain_db bump around center_hz.
struct Resonance {
    double center_hz = 3000.0;
    double q_factor = 10.0;
    double gain_db = 6.0;
};

struct EarModel {
    std::vector<Resonance> resonances; // 2..4 entries
    int base_delay = 0;                // samples, 0..32
};

struct SynthConfig {
    int n_subjects = 12;
    int n_measurements = 30;
    int shots_per_measurement = 5;
    int mls_order = 14;
    double sample_rate = kDefaultSampleRate;
    double snr_db = 40.0;
    double jitter = 0.02; // fractional center-freq/gain perturbation per measurement
    std::uint64_t rng_seed = 1;
    int threads = 0; // 0 = hardware concurrency

    void validate() const;
};

// Draws a subject model: 2-4 resonances, log-uniform centers in 1..12 kHz
// separated by >= 300 Hz.
EarModel sample_subject(Rng& rng);

// Renders the model impulse response. Errors out if the response has not
// decayed below 1e-6 of its peak by the end of the buffer.
std::vector<double> render_ir(const EarModel& model, std::size_t length, double fs_hz);

// Simulated measurement: the jittered model IR convolved (circularly) with
// the excitation, plus per-shot white noise at snr_db. One jitter draw per
// measurement; the shots share it, as repeated shots of one insertion would.
std::vector<RecordedResponse> simulate_measurement(const EarModel& model,
                                                   const MlsSequence& mls,
                                                   const SynthConfig& cfg,
                                                   Rng& rng);

struct SynthDataset {
    std::vector<std::string> subject_ids;
    // features[s][m] = 256-dim feature of subject s, measurement m (0-based)
    std::vector<std::vector<FeatureVector>> features;
    SynthConfig config;
};

// Full generation pipeline: sample subjects, simulate every measurement,
// average shots, deconvolve (fast Hadamard path), extract features.
SynthDataset build_dataset(const SynthConfig& cfg);

std::size_t default_render_length(const SynthConfig& cfg);

} // namespace earverify

#endif
