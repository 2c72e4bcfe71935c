// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "bc.hpp"
#include "dataset.hpp"
#include "fft.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace earverify;

TEST_SUITE_BEGIN("synth");

TEST_CASE("sample_subject is deterministic per seed") {
    Rng a(7), b(7);
    const EarModel m1 = sample_subject(a);
    const EarModel m2 = sample_subject(b);
    REQUIRE(m1.resonances.size() == m2.resonances.size());
    for (std::size_t i = 0; i < m1.resonances.size(); ++i) {
        CHECK(m1.resonances[i].center_hz == m2.resonances[i].center_hz);
        CHECK(m1.resonances[i].q_factor == m2.resonances[i].q_factor);
        CHECK(m1.resonances[i].gain_db == m2.resonances[i].gain_db);
    }
    CHECK(m1.base_delay == m2.base_delay);
}

TEST_CASE("sampled models stay inside the declared ranges") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const EarModel m = sample_subject(rng);
        REQUIRE(m.resonances.size() >= 2);
        REQUIRE(m.resonances.size() <= 4);
        for (std::size_t i = 0; i < m.resonances.size(); ++i) {
            const auto& r = m.resonances[i];
            REQUIRE(r.center_hz >= 1000.0);
            REQUIRE(r.center_hz <= 12000.0);
            REQUIRE(r.q_factor >= 2.0);
            REQUIRE(r.q_factor <= 30.0);
            for (std::size_t j = i + 1; j < m.resonances.size(); ++j) {
                REQUIRE(std::fabs(r.center_hz - m.resonances[j].center_hz) >= 300.0);
            }
        }
        REQUIRE(m.base_delay >= 0);
        REQUIRE(m.base_delay <= 32);
    }
}

TEST_CASE("52 sampled subjects are pairwise distinct") {
    std::vector<EarModel> models;
    for (int s = 0; s < 52; ++s) {
        Rng rng(derive_seed(1, "subject/" + std::to_string(s)));
        models.push_back(sample_subject(rng));
    }
    for (std::size_t a = 0; a < models.size(); ++a) {
        for (std::size_t b = a + 1; b < models.size(); ++b) {
            bool distinct = models[a].resonances.size() != models[b].resonances.size();
            if (!distinct) {
                for (std::size_t i = 0; i < models[a].resonances.size(); ++i) {
                    if (models[a].resonances[i].center_hz !=
                        models[b].resonances[i].center_hz) {
                        distinct = true;
                    }
                }
            }
            REQUIRE(distinct);
        }
    }
}

TEST_CASE("render_ir") {
    SUBCASE("no resonances, no delay: unit impulse") {
        EarModel m;
        const auto ir = render_ir(m, 512, 48000.0);
        CHECK(ir[0] == 1.0);
        for (std::size_t i = 1; i < ir.size(); ++i) REQUIRE(ir[i] == 0.0);
    }
    SUBCASE("single resonance peaks within 2% of its center") {
        EarModel m;
        m.resonances = {{3000.0, 10.0, 6.0}};
        const auto ir = render_ir(m, 4096, 48000.0);
        const auto spec = fft_real(ir, 8192);
        std::size_t peak = 0;
        for (std::size_t i = 1; i < spec.size() / 2; ++i) {
            if (std::abs(spec[i]) > std::abs(spec[peak])) peak = i;
        }
        const double peak_hz = static_cast<double>(peak) * 48000.0 / 8192.0;
        CHECK(std::fabs(peak_hz - 3000.0) / 3000.0 < 0.02);
    }
    SUBCASE("delay shifts the peak") {
        EarModel m;
        m.resonances = {{4000.0, 6.0, 6.0}};
        m.base_delay = 5;
        const auto ir = render_ir(m, 2048, 48000.0);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < ir.size(); ++i) {
            if (std::fabs(ir[i]) > std::fabs(ir[arg])) arg = i;
        }
        CHECK(arg == 5);
    }
    SUBCASE("undecayed parameterization is rejected") {
        EarModel m;
        m.resonances = {{1000.0, 29.0, 6.0}}; // rings for ~6300 samples
        CHECK_THROWS_AS(render_ir(m, 512, 48000.0), Error);
    }
    SUBCASE("length precondition") {
        EarModel m;
        CHECK_THROWS_AS(render_ir(m, 100, 48000.0), Error);
    }
}

TEST_CASE("noiseless jitter-free measurement round-trips through deconvolution") {
    SynthConfig cfg;
    cfg.snr_db = std::numeric_limits<double>::infinity();
    cfg.jitter = 0.0;
    const MlsSequence mls = generate_mls(14);
    Rng rng(77);
    const EarModel model = sample_subject(rng);
    const auto ir = render_ir(model, default_render_length(cfg), cfg.sample_rate);
    Rng meas_rng(78);
    const auto shots = simulate_measurement(model, mls, cfg, meas_rng);
    REQUIRE(shots.size() == 5);
    const auto avg = average_shots(shots);
    const auto h = deconvolve_fht(avg, mls, cfg.sample_rate);
    CHECK(evtest::rel_l2(h.samples, ir) < 1e-6);
}

TEST_CASE("measured SNR lands within 3 dB of nominal") {
    SynthConfig cfg;
    cfg.snr_db = 20.0;
    cfg.jitter = 0.0;
    const MlsSequence mls = generate_mls(14);
    const std::size_t L = mls.length();
    Rng rng(79);
    const EarModel model = sample_subject(rng);
    const std::size_t ir_len = default_render_length(cfg);
    Rng meas_rng(80);
    const auto shots = simulate_measurement(model, mls, cfg, meas_rng);
    const auto avg = average_shots(shots);
    const auto h = deconvolve_fht(avg, mls, cfg.sample_rate);

    // noise floor from the tail region the response never reaches
    double tail_energy = 0.0;
    std::size_t tail_n = 0;
    for (std::size_t i = L - L / 4; i < L; ++i) {
        tail_energy += h.samples[i] * h.samples[i];
        ++tail_n;
    }
    const double noise_var = tail_energy / static_cast<double>(tail_n);
    double head_energy = 0.0;
    for (std::size_t i = 0; i < ir_len; ++i) head_energy += h.samples[i] * h.samples[i];
    const double signal_energy = head_energy - noise_var * static_cast<double>(ir_len);

    // per-shot recording-domain noise: deconvolution scales white noise by
    // L/(L+1)^2, averaging divides by the shot count
    const double shot_noise_var = noise_var * static_cast<double>(L + 1) *
                                  static_cast<double>(L + 1) /
                                  static_cast<double>(L) * 5.0;
    const double measured_db = 10.0 * std::log10(signal_energy / shot_noise_var);
    CHECK(measured_db == doctest::Approx(cfg.snr_db).epsilon(0.15)); // +-3 dB
}

TEST_CASE("same-subject features are closer than cross-subject features") {
    SynthConfig cfg;
    cfg.n_subjects = 6;
    cfg.n_measurements = 4;
    cfg.rng_seed = 11;
    const SynthDataset ds = build_dataset(cfg);

    int favorable = 0, total = 0;
    for (int s = 0; s < cfg.n_subjects; ++s) {
        for (int t = s + 1; t < cfg.n_subjects; ++t) {
            const double same =
                cosine_similarity(ds.features[s][0].values, ds.features[s][1].values);
            const double cross =
                cosine_similarity(ds.features[s][0].values, ds.features[t][0].values);
            if (same > cross) ++favorable;
            ++total;
        }
    }
    CHECK(static_cast<double>(favorable) / total >= 0.95);
}

TEST_CASE("build_dataset shapes and determinism") {
    SynthConfig cfg;
    cfg.n_subjects = 3;
    cfg.n_measurements = 4;
    cfg.rng_seed = 5;

    const SynthDataset a = build_dataset(cfg);
    REQUIRE(a.subject_ids.size() == 3);
    std::size_t rows = 0;
    for (const auto& s : a.features) {
        rows += s.size();
        for (const auto& f : s) REQUIRE(f.values.size() == 256);
    }
    CHECK(rows == 12);

    cfg.threads = 2;
    const SynthDataset b = build_dataset(cfg); // thread count must not matter
    for (int s = 0; s < 3; ++s) {
        for (int m = 0; m < 4; ++m) {
            REQUIRE(a.features[s][m].values == b.features[s][m].values);
        }
    }
}

TEST_CASE("dataset CSV serialization is byte-stable for a fixed seed") {
    SynthConfig cfg;
    cfg.n_subjects = 3;
    cfg.n_measurements = 3;
    cfg.rng_seed = 9;

    auto render = [&]() {
        const SynthDataset ds = build_dataset(cfg);
        StoredDataset stored;
        stored.subject_ids = ds.subject_ids;
        stored.features.resize(ds.features.size());
        for (std::size_t s = 0; s < ds.features.size(); ++s) {
            for (const auto& f : ds.features[s]) stored.features[s].push_back(f.values);
        }
        return features_csv_string(stored);
    };
    CHECK(render() == render());
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.n_subjects = 2;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.n_subjects = 3;
    cfg.jitter = 0.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.jitter = 0.02;
    cfg.mls_order = 10;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_SUITE_END();
