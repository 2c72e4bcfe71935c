// SPDX-License-Identifier: Apache-2.0
#include "synth.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "fft.hpp"
#include "parallel.hpp"

namespace earverify {

void SynthConfig::validate() const {
    require(n_subjects >= 3, ErrorKind::InvalidArgument,
            "synth: need at least 3 subjects");
    require(n_measurements >= 1, ErrorKind::InvalidArgument,
            "synth: need at least 1 measurement per subject");
    require(shots_per_measurement >= 1, ErrorKind::InvalidArgument,
            "synth: need at least 1 shot per measurement");
    // short excitations cannot capture the slowest sampled resonances
    // (Q=16 at 1 kHz rings for ~3,400 samples at 48 kHz)
    require(mls_order >= 13 && mls_order <= 20, ErrorKind::InvalidArgument,
            "synth: mls_order must be in [13, 20]");
    require(std::isfinite(jitter) && jitter >= 0.0 && jitter <= 0.1,
            ErrorKind::InvalidArgument, "synth: jitter must be in [0, 0.1]");
    require(!std::isnan(snr_db), ErrorKind::InvalidArgument,
            "synth: snr_db must not be NaN");
}

EarModel sample_subject(Rng& rng) {
    EarModel model;
    const int n_res = 2 + static_cast<int>(rng.uniform_int(3));
    const double log_lo = std::log(1000.0), log_hi = std::log(12000.0);
    std::vector<double> centers;
    while (static_cast<int>(centers.size()) < n_res) {
        const double f = std::exp(rng.uniform(log_lo, log_hi));
        bool separated = true;
        for (double g : centers) {
            if (std::fabs(g - f) < 300.0) separated = false;
        }
        if (separated) centers.push_back(f);
    }
    std::sort(centers.begin(), centers.end());
    for (double f : centers) {
        Resonance r;
        r.center_hz = f;
        r.q_factor = rng.uniform(4.0, 16.0);
        r.gain_db = rng.uniform(3.0, 10.0);
        model.resonances.push_back(r);
    }
    model.base_delay = static_cast<int>(rng.uniform_int(17));
    return model;
}

namespace {

// One resonant section: direct path plus a peak-normalized two-pole
// resonator scaled so the section gain at center is 10^(gain_db/20).
struct Biquad {
    double b0, b1, b2, a1, a2;
};

Biquad resonance_section(const Resonance& r, double fs_hz) {
    const double theta = 2.0 * M_PI * r.center_hz / fs_hz;
    const double rho = std::exp(-M_PI * r.center_hz / (r.q_factor * fs_hz));
    const double a1 = -2.0 * rho * std::cos(theta);
    const double a2 = rho * rho;

    // constrained bandpass resonator (zeros at z = +-1) has ~zero phase at
    // the pole frequency, so mixing it with the direct path keeps the
    // section peak on center; normalize it to unit gain there
    const cplx z = std::polar(1.0, theta);
    const cplx den = 1.0 + a1 / z + a2 / (z * z);
    const cplx num = 1.0 - 1.0 / (z * z);
    const double n0 = std::abs(den) / std::abs(num);

    const double depth = std::pow(10.0, r.gain_db / 20.0) - 1.0;

    // H(z) = 1 + depth * n0 * (1 - z^-2) / (1 + a1 z^-1 + a2 z^-2)
    Biquad q;
    q.b0 = 1.0 + depth * n0;
    q.b1 = a1;
    q.b2 = a2 - depth * n0;
    q.a1 = a1;
    q.a2 = a2;
    return q;
}

} // namespace

std::vector<double> render_ir(const EarModel& model, std::size_t length, double fs_hz) {
    require(length >= 512, ErrorKind::InvalidArgument,
            "render_ir: length must be at least 512");
    require(model.base_delay >= 0 && model.base_delay <= 32,
            ErrorKind::InvalidArgument, "render_ir: base_delay out of range");
    require(model.resonances.size() <= 4, ErrorKind::InvalidArgument,
            "render_ir: at most 4 resonances");
    for (const auto& r : model.resonances) {
        require(r.center_hz > 100.0 && r.center_hz < 22000.0,
                ErrorKind::InvalidArgument, "render_ir: center_hz out of band");
        require(r.q_factor >= 2.0 && r.q_factor <= 30.0,
                ErrorKind::InvalidArgument, "render_ir: q_factor out of [2, 30]");
    }

    std::vector<double> x(length, 0.0);
    x[static_cast<std::size_t>(model.base_delay)] = 1.0;
    for (const auto& r : model.resonances) {
        const Biquad q = resonance_section(r, fs_hz);
        double w1 = 0.0, w2 = 0.0;
        for (std::size_t i = 0; i < length; ++i) {
            const double w0 = x[i] - q.a1 * w1 - q.a2 * w2;
            x[i] = q.b0 * w0 + q.b1 * w1 + q.b2 * w2;
            w2 = w1;
            w1 = w0;
        }
    }

    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::fabs(v));
    double tail = 0.0;
    for (std::size_t i = length - std::min<std::size_t>(64, length); i < length; ++i) {
        tail = std::max(tail, std::fabs(x[i]));
    }
    require(peak > 0.0 && tail <= 1e-6 * peak, ErrorKind::Numeric,
            "render_ir: response has not decayed within the buffer "
            "(unstable or too-narrow parameterization)");
    return x;
}

std::size_t default_render_length(const SynthConfig& cfg) {
    // long enough for Q=30 at 1 kHz to decay below 1e-6, and at most half the
    // excitation period so circular wrap stays unambiguous
    const std::size_t L = (std::size_t{1} << cfg.mls_order) - 1;
    return std::min<std::size_t>(8192, next_pow2(L + 1) / 2);
}

std::vector<RecordedResponse> simulate_measurement(const EarModel& model,
                                                   const MlsSequence& mls,
                                                   const SynthConfig& cfg,
                                                   Rng& rng) {
    cfg.validate();

    // Per-measurement jitter of centers and gains. Reinsertion mostly changes
    // the effective canal length, which moves every resonance together, so
    // the perturbation is a shared draw plus a small per-resonance residual.
    EarModel jittered = model;
    if (cfg.jitter > 0.0) {
        const double shared_freq = rng.uniform(-1.0, 1.0);
        const double shared_gain = rng.uniform(-1.0, 1.0);
        for (auto& r : jittered.resonances) {
            const double freq_draw = 0.8 * shared_freq + 0.2 * rng.uniform(-1.0, 1.0);
            const double gain_draw = 0.8 * shared_gain + 0.2 * rng.uniform(-1.0, 1.0);
            r.center_hz *= 1.0 + cfg.jitter * freq_draw;
            r.gain_db *= 1.0 + cfg.jitter * gain_draw;
        }
    }

    const std::size_t ir_len = default_render_length(cfg);
    const std::vector<double> ir = render_ir(jittered, ir_len, cfg.sample_rate);
    const std::vector<double> clean = circular_convolve_mls(ir, mls);

    double signal_power = 0.0;
    for (double v : clean) signal_power += v * v;
    signal_power /= static_cast<double>(clean.size());

    const bool noiseless = std::isinf(cfg.snr_db) && cfg.snr_db > 0.0;
    const double noise_sigma =
        noiseless ? 0.0
                  : std::sqrt(signal_power * std::pow(10.0, -cfg.snr_db / 10.0));

    std::vector<RecordedResponse> shots;
    shots.reserve(static_cast<std::size_t>(cfg.shots_per_measurement));
    for (int s = 0; s < cfg.shots_per_measurement; ++s) {
        RecordedResponse shot;
        shot.shot_index = s + 1;
        shot.samples = clean;
        if (noise_sigma > 0.0) {
            for (auto& v : shot.samples) v += noise_sigma * rng.normal();
        }
        shots.push_back(std::move(shot));
    }
    return shots;
}

namespace {

// Log-frequency discrepancy between two resonance sets; near zero when every
// peak of one subject has a close counterpart in the other.
double subject_separation(const EarModel& a, const EarModel& b) {
    auto directed = [](const EarModel& x, const EarModel& y) {
        double acc = 0.0;
        for (const auto& rx : x.resonances) {
            double best = 1e9;
            for (const auto& ry : y.resonances) {
                best = std::min(best, std::fabs(std::log(rx.center_hz / ry.center_hz)));
            }
            acc += best;
        }
        return acc / static_cast<double>(x.resonances.size());
    };
    const double count_gap = 0.05 * std::fabs(static_cast<double>(a.resonances.size()) -
                                              static_cast<double>(b.resonances.size()));
    return 0.5 * (directed(a, b) + directed(b, a)) + count_gap;
}

// Keeps the synthetic population anatomically distinct: two subjects whose
// resonance sets coincide act as biometric twins and swamp the low-FAR tail
// with irreducible errors.
constexpr double kMinSubjectSeparation = 0.2;

} // namespace

SynthDataset build_dataset(const SynthConfig& cfg) {
    cfg.validate();
    const MlsSequence mls = generate_mls(cfg.mls_order);

    SynthDataset ds;
    ds.config = cfg;
    ds.subject_ids.resize(static_cast<std::size_t>(cfg.n_subjects));
    ds.features.resize(static_cast<std::size_t>(cfg.n_subjects));

    std::vector<EarModel> models(static_cast<std::size_t>(cfg.n_subjects));
    for (int s = 0; s < cfg.n_subjects; ++s) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "S%03d", s + 1);
        ds.subject_ids[static_cast<std::size_t>(s)] = buf;
        for (int retry = 0;; ++retry) {
            std::string label = std::string("subject/") + buf;
            if (retry > 0) label += "/retry/" + std::to_string(retry);
            require(retry < 1000, ErrorKind::Numeric,
                    "build_dataset: cannot place a distinct subject (population "
                    "too large for the model space)");
            Rng rng(derive_seed(cfg.rng_seed, label));
            EarModel candidate = sample_subject(rng);
            bool separated = true;
            for (int prev = 0; prev < s; ++prev) {
                if (subject_separation(candidate, models[static_cast<std::size_t>(prev)]) <
                    kMinSubjectSeparation) {
                    separated = false;
                    break;
                }
            }
            if (separated) {
                models[static_cast<std::size_t>(s)] = std::move(candidate);
                break;
            }
        }
    }

    // Each measurement is an independent work unit with a derived seed, so
    // the dataset is a pure function of the config regardless of threading.
    const int total = cfg.n_subjects * cfg.n_measurements;
    std::vector<FeatureVector> flat(static_cast<std::size_t>(total));
    parallel_for(static_cast<std::size_t>(total), cfg.threads, [&](std::size_t idx) {
        const int s = static_cast<int>(idx) / cfg.n_measurements;
        const int m = static_cast<int>(idx) % cfg.n_measurements;
        const std::string& sid = ds.subject_ids[static_cast<std::size_t>(s)];
        Rng rng(derive_seed(cfg.rng_seed,
                            sid + "/meas/" + std::to_string(m + 1)));
        const auto shots =
            simulate_measurement(models[static_cast<std::size_t>(s)], mls, cfg, rng);
        const std::vector<double> avg = average_shots(shots);
        const ImpulseResponse h = deconvolve_fht(avg, mls, cfg.sample_rate);
        flat[idx] = extract_feature(h, sid, m + 1);
    });

    for (int s = 0; s < cfg.n_subjects; ++s) {
        auto& per_subject = ds.features[static_cast<std::size_t>(s)];
        per_subject.reserve(static_cast<std::size_t>(cfg.n_measurements));
        for (int m = 0; m < cfg.n_measurements; ++m) {
            per_subject.push_back(
                std::move(flat[static_cast<std::size_t>(s * cfg.n_measurements + m)]));
        }
    }
    return ds;
}

} // namespace earverify
