#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/dft.hpp"
#include "synth.hpp"
#include "test_support.hpp"

using namespace lamit;

namespace {

AudioBuffer noisy_tone(double gain = 1.0) {
    auto x = synth::tone(1000, 0.5, 0.3).samples;
    auto n = synth::noise(0.5, 0.05, 2, false);  // deepest bin stays 20 dB clear of the floor at gain 0.1
    for (size_t i = 0; i < x.size(); ++i) x[i] += n[i];
    return synth::buffer(std::move(x), gain);
}

}  // namespace

TEST(Spectrogram, SilenceSitsOnTheFloor) {
    auto s = compute_spectrogram(synth::silence(1.0), 0.025, 0.010);
    for (double v : s.db) EXPECT_EQ(v, -120.0);
}

TEST(Spectrogram, FrameCountFormula) {
    auto s = compute_spectrogram(synth::silence(0.5), 0.025, 0.010);
    EXPECT_EQ(s.n_frames, 48u);
    EXPECT_EQ(s.n_bins, 201u);
    EXPECT_DOUBLE_EQ(s.freq_resolution, 40.0);
}

TEST(Spectrogram, Errors) {
    EXPECT_THROW(compute_spectrogram(AudioBuffer{{}, 16000}, 0.025, 0.010), Error);
    EXPECT_THROW(compute_spectrogram(synth::silence(0.02), 0.025, 0.010), Error);
    EXPECT_THROW(compute_spectrogram(synth::silence(0.5), 0.005, 0.010), Error);
    EXPECT_THROW(compute_spectrogram(synth::silence(0.5), 0.025, 0.0), Error);
}

TEST(Spectrogram, ToneBinLocalizedAgainstDftOracle) {
    auto a = synth::tone(1000, 0.5);
    auto s = compute_spectrogram(a, 0.025, 0.010);
    const double target = 1000.0 / s.freq_resolution;
    for (size_t f = 0; f < s.n_frames; ++f) {
        std::vector<double> row(s.db.begin() + f * s.n_bins, s.db.begin() + (f + 1) * s.n_bins);
        auto ref = oracle::dft_power_db(a.samples, f * s.step_samples, s.frame_samples);
        EXPECT_NEAR(double(oracle::argmax(row)), target, 1.0);
        EXPECT_EQ(oracle::argmax(row), oracle::argmax(ref));
    }
}

TEST(Spectrogram, ValuesMatchDftOracle) {
    auto a = noisy_tone();
    auto s = compute_spectrogram(a, 0.025, 0.010);
    for (size_t f : {size_t(0), s.n_frames / 2, s.n_frames - 1}) {
        auto ref = oracle::dft_power_db(a.samples, f * s.step_samples, s.frame_samples);
        for (size_t k = 0; k < s.n_bins; ++k) EXPECT_NEAR(s.at(f, k), ref[k], 1e-6) << f << " " << k;
    }
}

TEST(Spectrogram, FullScaleSineLevel) {
    auto s = compute_spectrogram(synth::tone(1000, 0.5, 1.0), 0.025, 0.010);
    // 1 kHz lands exactly on bin 25; Hann-normalized peak of a unit sine is 1/2 in amplitude
    EXPECT_NEAR(s.at(10, 25), 20 * std::log10(0.5), 0.01);
}

TEST(BandEnergies, SilenceGivesFlatFloor) {
    auto s = compute_spectrogram(synth::silence(0.5), 0.025, 0.005);
    auto t = band_energies(s, AnalysisParams{}.bands);
    for (auto& e : t.energy)
        for (double v : e) EXPECT_EQ(v, -120.0);
}

TEST(BandEnergies, BeyondNyquistRejected) {
    auto s = compute_spectrogram(synth::silence(0.5), 0.025, 0.005);
    EXPECT_THROW(band_energies(s, {{"x", 0, 9000}}), Error);
    EXPECT_THROW(band_energies(s, {{"x", 500, 500}}), Error);
}

TEST(BandEnergies, FullBandDominatesEverySubBand) {
    auto s = compute_spectrogram(synth::cv(), 0.025, 0.005);
    auto bands = AnalysisParams{}.bands;
    bands.push_back({"all", 0, 8000});
    auto t = band_energies(s, bands);
    const auto& all = t.track("all");
    for (size_t b = 0; b + 1 < bands.size(); ++b)
        for (size_t f = 0; f < t.size(); ++f) EXPECT_GE(all[f] + 1e-9, t.energy[b][f]);
}

TEST(BandEnergies, OpenVowelLowBandsExceedHighBand) {
    auto a = synth::buffer(synth::vowel(0.4, 120, synth::open_a(), [](double) { return -6.0; }));
    auto s = compute_spectrogram(a, 0.025, 0.005);
    auto t = band_energies(s, {{"low", 0, 400}, {"f1", 300, 900}, {"high", 2000, 8000}});
    std::vector<double> d_low, d_f1;
    for (size_t f = 10; f + 10 < t.size(); ++f) {
        d_low.push_back(t.track("low")[f] - t.track("high")[f]);
        d_f1.push_back(t.track("f1")[f] - t.track("high")[f]);
    }
    EXPECT_GE(*std::min_element(d_low.begin(), d_low.end()), 10.0);
    EXPECT_GE(*std::min_element(d_f1.begin(), d_f1.end()), 10.0);
}

TEST(BandEnergies, MonotoneUnderSpectralIncrease) {
    auto s = compute_spectrogram(noisy_tone(), 0.025, 0.010);
    auto t0 = band_energies(s, AnalysisParams{}.bands);
    std::mt19937 rng(1);
    for (auto& v : s.db) v += std::uniform_real_distribution<double>(0, 3)(rng);
    auto t1 = band_energies(s, AnalysisParams{}.bands);
    for (size_t b = 0; b < t0.energy.size(); ++b)
        for (size_t f = 0; f < t0.size(); ++f) EXPECT_GE(t1.energy[b][f], t0.energy[b][f]);
}

TEST(RateOfRise, ConstantTrackIsZero) {
    auto r = rate_of_rise(std::vector<double>(100, -40.0), 0.005, 0.020);
    for (double v : r) EXPECT_EQ(v, 0.0);
}

TEST(RateOfRise, StepGivesOnePositivePeakAtTheStep) {
    std::vector<double> tr(200, -60.0);
    for (size_t i = 100; i < tr.size(); ++i) tr[i] = -30.0;
    const double step = 0.005, window = 0.020;
    auto r = rate_of_rise(tr, step, window);
    size_t peak = oracle::argmax(r);
    EXPECT_LE(std::abs(double(peak) - 99.5) * step, window / 2 + step / 2);
    for (double v : r) EXPECT_GE(v, 0.0);
    // the area under the rate equals the step height
    double area = 0;
    for (double v : r) area += v * step;
    EXPECT_NEAR(area, 30.0, 1e-9);
}

TEST(RateOfRise, RampSlopeRecoveredAwayFromEdges) {
    const double step = 0.005, slope = 250.0;
    std::vector<double> tr(200);
    for (size_t i = 0; i < tr.size(); ++i) tr[i] = -80 + slope * step * double(i);
    auto r = rate_of_rise(tr, step, 0.020);
    for (size_t i = 10; i + 10 < tr.size(); ++i) EXPECT_NEAR(r[i], slope, 0.05 * slope);
    EXPECT_EQ(r.size(), tr.size());
    EXPECT_EQ(r.front(), 0.0);
    EXPECT_EQ(r.back(), 0.0);
}

TEST(RateOfRise, WindowTooSmallRejected) {
    EXPECT_THROW(rate_of_rise(std::vector<double>(10, 0.0), 0.005, 0.005), Error);
}

TEST(EstimateF0, PulseTrain) {
    auto a = synth::pulse_train(120, 0.6);
    auto s = compute_spectrogram(a, 0.025, 0.005);
    auto f0 = estimate_f0(a, s);
    size_t interior = 0;
    for (size_t f = 10; f + 10 < f0.size(); ++f) {
        ASSERT_TRUE(f0[f].has_value()) << f;
        EXPECT_NEAR(*f0[f], 120.0, 2.0);
        ++interior;
    }
    EXPECT_GT(interior, 50u);
}

TEST(EstimateF0, WhiteNoiseIsMostlyUnvoiced) {
    auto a = synth::buffer(synth::noise(1.0, 0.3, 29, false));
    auto s = compute_spectrogram(a, 0.025, 0.005);
    auto f0 = estimate_f0(a, s);
    size_t unvoiced = 0;
    for (auto& v : f0) unvoiced += !v.has_value();
    EXPECT_GE(double(unvoiced), 0.95 * double(f0.size()));
}

TEST(EstimateF0, SilenceIsUnvoiced) {
    auto a = synth::silence(0.5);
    auto f0 = estimate_f0(a, compute_spectrogram(a, 0.025, 0.005));
    for (auto& v : f0) EXPECT_FALSE(v.has_value());
}

TEST(EstimateF0, VoicedValuesStayInRange) {
    for (double hz : {60.0, 95.0, 180.0, 260.0, 440.0}) {
        auto a = synth::pulse_train(hz, 0.4);
        for (auto& v : estimate_f0(a, compute_spectrogram(a, 0.025, 0.005))) {
            if (!v) continue;
            EXPECT_GE(*v, 50.0);
            EXPECT_LE(*v, 500.0);
        }
    }
}

TEST(Analyze, SilenceHasNoSpan) {
    auto an = analyze(synth::silence());
    EXPECT_FALSE(an.span.has_value());
    for (auto& fr : an.frames) EXPECT_EQ(fr.categories, 0u);
}

TEST(Analyze, VowelFramesCarryVocalicCategories) {
    auto an = analyze(synth::steady_vowel());
    ASSERT_TRUE(an.span.has_value());
    const auto& mid = an.frames[an.frames.size() / 2];
    EXPECT_TRUE(mid.f0.has_value());
    EXPECT_TRUE(mid.categories & Cat1);
    EXPECT_TRUE(mid.categories & Cat10);
    EXPECT_FALSE(mid.categories & Cat6);
}

TEST(Analyze, RejectsLowSampleRate) { EXPECT_THROW(analyze(synth::tone(1000, 0.5, 0.5, 8000)), Error); }

TEST(UtteranceSpan, ShortBurstsDoNotMoveTheEdges) {
    std::vector<double> e(200, -100.0);
    for (size_t i = 50; i < 150; ++i) e[i] = -10.0;
    e[10] = e[11] = -10.0;  // 10 ms click
    auto span = utterance_span(e, 0.005, -120, 60, 0.100);
    ASSERT_TRUE(span);
    EXPECT_EQ(span->first, 50u);
    EXPECT_EQ(span->second, 149u);
}

TEST(Wav, RoundTrip16BitAndFloat) {
    auto a = synth::tone(440, 0.1, 0.5);
    auto b16 = decode_wav(encode_wav(a));
    ASSERT_EQ(b16.samples.size(), a.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) EXPECT_NEAR(b16.samples[i], a.samples[i], 1.0 / 32768);
    auto bf = decode_wav(encode_wav(a, true));
    for (size_t i = 0; i < a.samples.size(); ++i) EXPECT_NEAR(bf.samples[i], a.samples[i], 1e-7);
    EXPECT_EQ(bf.sample_rate, 16000);
}

TEST(Wav, RejectsStereoAndLowRate) {
    auto a = synth::tone(440, 0.1, 0.5);
    EXPECT_THROW(decode_wav(encode_wav(a, false, 2)), Error);
    EXPECT_THROW(decode_wav(encode_wav(synth::tone(440, 0.1, 0.5, 8000))), Error);
    EXPECT_THROW(decode_wav("RIFF0000WAVX"), Error);
}

// ---- properties

TEST(DspProperties, GainShiftsEveryValueByExactlyTwentyLogG) {
    auto base = noisy_tone();
    auto s0 = compute_spectrogram(base, 0.025, 0.005);
    auto t0 = band_energies(s0, AnalysisParams{}.bands);
    for (double g : {0.1, 0.5, 3.0, 10.0}) {
        auto s = compute_spectrogram(noisy_tone(g), 0.025, 0.005);
        auto t = band_energies(s, AnalysisParams{}.bands);
        const double shift = 20 * std::log10(g);
        double worst = 0;
        for (size_t i = 0; i < s.db.size(); ++i) worst = std::max(worst, std::abs(s.db[i] - s0.db[i] - shift));
        for (size_t b = 0; b < t.energy.size(); ++b)
            for (size_t f = 0; f < t.size(); ++f)
                worst = std::max(worst, std::abs(t.energy[b][f] - t0.energy[b][f] - shift));
        EXPECT_LE(worst, 1e-6) << g;
        for (size_t b = 0; b < t.energy.size(); ++b) {
            auto r0 = rate_of_rise(t0.energy[b], t0.frame_step, 0.020);
            auto r = rate_of_rise(t.energy[b], t.frame_step, 0.020);
            for (size_t f = 0; f < r.size(); ++f) EXPECT_NEAR(r[f], r0[f], 1e-4);
        }
    }
}

TEST(DspProperties, DelayByWholeFramesShiftsTracks) {
    auto a = synth::cv();
    const size_t k = 7, H = 80;
    AudioBuffer d = a;
    d.samples.insert(d.samples.begin(), k * H, 0.0);
    auto t0 = band_energies(compute_spectrogram(a, 0.025, 0.005), AnalysisParams{}.bands);
    auto t1 = band_energies(compute_spectrogram(d, 0.025, 0.005), AnalysisParams{}.bands);
    ASSERT_EQ(t1.size(), t0.size() + k);
    for (size_t b = 0; b < t0.energy.size(); ++b)
        for (size_t f = 0; f < t0.size(); ++f) EXPECT_NEAR(t1.energy[b][f + k], t0.energy[b][f], 1e-9);
}

TEST(DspProperties, OutputsFiniteForRandomInput) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(8000);
        for (auto& v : x) v = std::uniform_real_distribution<double>(-1, 1)(rng) * (rng() % 3 == 0 ? 0.0 : 1.0);
        auto an = analyze(synth::buffer(x));
        for (double v : an.spectrogram.db) EXPECT_TRUE(std::isfinite(v));
        for (auto& fr : an.frames) {
            EXPECT_TRUE(std::isfinite(fr.spectral_tilt));
            EXPECT_TRUE(!fr.f0 || (*fr.f0 >= 50 && *fr.f0 <= 500));
        }
    }
}
