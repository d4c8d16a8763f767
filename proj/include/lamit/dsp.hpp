#pragma once
// Spectrogram, band energies, rate of rise, F0 and the per-frame acoustic parameters.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lamit/wav.hpp"

namespace lamit {

struct Band {
    std::string name;
    double f_lo = 0, f_hi = 0;
};

struct AnalysisParams {
    double frame_length = 0.025;
    double frame_step = 0.005;
    double floor_db = -120.0;
    std::vector<Band> bands = {{"low", 0, 400}, {"f1", 300, 900}, {"mid", 800, 2500}, {"high", 2500, 8000}};
    double ror_window = 0.020;
    double f0_min = 50, f0_max = 500;
    double f0_window = 0.040;
    double voicing_threshold = 0.45;
    double gate_db = 60;      // utterance gate below the peak frame energy
    double gate_min = 0.100;  // runs shorter than this do not move the utterance edges
};

struct Spectrogram {
    std::vector<double> db;  // n_frames x n_bins, row-major
    size_t n_frames = 0, n_bins = 0;
    size_t frame_samples = 0, step_samples = 0;
    double sample_rate = 0;
    double frame_step = 0, frame_length = 0, freq_resolution = 0;
    double floor_db = -120;

    double at(size_t frame, size_t bin) const { return db[frame * n_bins + bin]; }
    double time(size_t frame) const { return (frame * step_samples + frame_samples / 2.0) / sample_rate; }
};

namespace dsp_detail {
inline std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
inline std::vector<double> hann(size_t n) {
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2 * M_PI * (i + 0.5) / n);
    return w;
}
}  // namespace dsp_detail

inline Spectrogram compute_spectrogram(const AudioBuffer& audio, double frame_length, double frame_step,
                                       double floor_db = -120.0) {
    if (audio.samples.empty()) throw validation_error("empty audio");
    if (!(frame_step > 0) || frame_length < frame_step)
        throw config_error("frame_length must be >= frame_step > 0");
    const size_t N = static_cast<size_t>(std::lround(frame_length * audio.sample_rate));
    const size_t H = static_cast<size_t>(std::lround(frame_step * audio.sample_rate));
    if (N < 2 || H < 1) throw config_error("frame too short for the sample rate");
    if (N > audio.samples.size()) throw validation_error("frame length exceeds audio duration");

    Spectrogram s;
    s.frame_samples = N;
    s.step_samples = H;
    s.sample_rate = audio.sample_rate;
    s.frame_step = double(H) / audio.sample_rate;
    s.frame_length = double(N) / audio.sample_rate;
    s.freq_resolution = audio.sample_rate / N;
    s.floor_db = floor_db;
    s.n_frames = (audio.samples.size() - N) / H + 1;
    s.n_bins = N / 2 + 1;
    s.db.assign(s.n_frames * s.n_bins, floor_db);

    auto win = dsp_detail::hann(N);
    const double wsum = std::accumulate(win.begin(), win.end(), 0.0);
    double* in = fftw_alloc_real(N);
    fftw_complex* out = fftw_alloc_complex(s.n_bins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(dsp_detail::plan_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(N), in, out, FFTW_ESTIMATE);
    }
    for (size_t f = 0; f < s.n_frames; ++f) {
        const double* x = audio.samples.data() + f * H;
        for (size_t i = 0; i < N; ++i) in[i] = x[i] * win[i];
        fftw_execute(plan);
        for (size_t k = 0; k < s.n_bins; ++k) {
            double re = out[k][0] / wsum, im = out[k][1] / wsum;
            double p = re * re + im * im;
            double v = p > 0 ? 10.0 * std::log10(p) : floor_db;
            s.db[f * s.n_bins + k] = std::max(v, floor_db);
        }
    }
    {
        std::lock_guard<std::mutex> lk(dsp_detail::plan_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return s;
}

struct BandEnergyTracks {
    std::vector<Band> bands;
    std::vector<std::vector<double>> energy;  // per band, dB
    std::vector<double> times;
    double frame_step = 0;
    double floor_db = -120;

    std::optional<size_t> find(const std::string& name) const {
        for (size_t i = 0; i < bands.size(); ++i)
            if (bands[i].name == name) return i;
        return std::nullopt;
    }
    const std::vector<double>& track(const std::string& name) const {
        auto i = find(name);
        if (!i) throw config_error("missing band '" + name + "'");
        return energy[*i];
    }
    size_t size() const { return times.size(); }
};

// Per-frame power sum over the bins inside each band, in dB.
inline BandEnergyTracks band_energies(const Spectrogram& spec, const std::vector<Band>& bands) {
    const double nyq = spec.sample_rate / 2;
    BandEnergyTracks t;
    t.bands = bands;
    t.frame_step = spec.frame_step;
    t.floor_db = spec.floor_db;
    t.times.resize(spec.n_frames);
    for (size_t f = 0; f < spec.n_frames; ++f) t.times[f] = spec.time(f);
    for (auto& b : bands) {
        if (!(b.f_lo < b.f_hi) || b.f_lo < 0) throw config_error("band '" + b.name + "' is degenerate");
        if (b.f_hi > nyq + 1e-9) throw config_error("band '" + b.name + "' extends beyond Nyquist");
        size_t k0 = static_cast<size_t>(std::ceil(b.f_lo / spec.freq_resolution - 1e-9));
        size_t k1 = std::min(spec.n_bins - 1, static_cast<size_t>(std::floor(b.f_hi / spec.freq_resolution + 1e-9)));
        if (k0 > k1) throw config_error("band '" + b.name + "' contains no frequency bins");
        std::vector<double> e(spec.n_frames);
        for (size_t f = 0; f < spec.n_frames; ++f) {
            double p = 0;
            // floored bins carry no power
            for (size_t k = k0; k <= k1; ++k)
                if (spec.at(f, k) > spec.floor_db) p += std::pow(10.0, spec.at(f, k) / 10.0);
            e[f] = p > 0 ? std::max(spec.floor_db, 10.0 * std::log10(p)) : spec.floor_db;
        }
        t.energy.push_back(std::move(e));
    }
    return t;
}

inline long smoothing_half(double frame_step, double window) {
    if (!(frame_step > 0)) throw config_error("frame step must be positive");
    const long w = std::lround(window / frame_step);
    if (w < 2) throw config_error("rate-of-rise window must span at least 2 frame steps");
    return w / 2;
}

// Centered moving average over `window` seconds, shrinking symmetrically at the edges.
inline std::vector<double> smooth_track(const std::vector<double>& track, double frame_step, double window) {
    const long half = smoothing_half(frame_step, window);
    const long n = static_cast<long>(track.size());
    std::vector<double> sm(track.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        long h = std::min({half, i, n - 1 - i});
        double acc = 0;
        for (long j = i - h; j <= i + h; ++j) acc += track[j];
        sm[i] = acc / double(2 * h + 1);
    }
    return sm;
}

// Centered difference of the smoothed track, in dB/s.
// Frames without a full smoothing window on both sides are zero.
inline std::vector<double> rate_of_rise(const std::vector<double>& track, double frame_step, double window) {
    const long half = smoothing_half(frame_step, window);
    const long n = static_cast<long>(track.size());
    auto sm = smooth_track(track, frame_step, window);
    std::vector<double> out(track.size(), 0.0);
    for (long i = half + 1; i + half + 1 < n; ++i) out[i] = (sm[i + 1] - sm[i - 1]) / (2 * frame_step);
    return out;
}

// Normalized autocorrelation F0 per spectrogram frame; nullopt = unvoiced.
inline std::vector<std::optional<double>> estimate_f0(const AudioBuffer& audio, const Spectrogram& grid,
                                                      const AnalysisParams& p = {}) {
    std::vector<std::optional<double>> out(grid.n_frames);
    const double sr = audio.sample_rate;
    const long W = std::max<long>(std::lround(p.f0_window * sr), static_cast<long>(grid.frame_samples));
    const long lag_min = std::max<long>(2, std::lround(sr / p.f0_max));
    const long lag_max = std::lround(sr / p.f0_min);
    const long n = static_cast<long>(audio.samples.size());
    std::vector<double> r(lag_max + 2);
    for (size_t f = 0; f < grid.n_frames; ++f) {
        long center = static_cast<long>(f * grid.step_samples + grid.frame_samples / 2);
        long a = std::max<long>(0, center - W / 2), b = std::min<long>(n, a + W);
        if (b - a < 2 * lag_min + 2) continue;
        const double* x = audio.samples.data() + a;
        long len = b - a;
        double e0 = 0;
        for (long i = 0; i < len; ++i) e0 += x[i] * x[i];
        if (e0 < 1e-20) continue;
        long lmax = std::min(lag_max, len / 2);
        if (lmax <= lag_min) continue;
        double best = 0;
        for (long L = lag_min - 1; L <= lmax + 1 && L < len; ++L) {
            double num = 0, ea = 0, eb = 0;
            for (long i = 0; i + L < len; ++i) {
                num += x[i] * x[i + L];
                ea += x[i] * x[i];
                eb += x[i + L] * x[i + L];
            }
            r[L] = (ea > 0 && eb > 0) ? num / std::sqrt(ea * eb) : 0;
            if (L >= lag_min && L <= lmax) best = std::max(best, r[L]);
        }
        if (best < p.voicing_threshold) continue;
        // first local peak close to the best one avoids octave-down errors
        long pick = -1;
        for (long L = lag_min; L <= lmax; ++L) {
            if (r[L] >= 0.9 * best && r[L] >= r[L - 1] && r[L] >= r[L + 1]) {
                pick = L;
                break;
            }
        }
        if (pick < 0) continue;
        double y0 = r[pick - 1], y1 = r[pick], y2 = r[pick + 1];
        double den = y0 - 2 * y1 + y2;
        double lag = pick + (std::abs(den) > 1e-12 ? 0.5 * (y0 - y2) / den : 0.0);
        double f0 = sr / lag;
        if (f0 < p.f0_min || f0 > p.f0_max) continue;
        out[f] = f0;
    }
    return out;
}

// Frame index range [first, last] of the utterance, or nullopt for silence.
inline std::optional<std::pair<size_t, size_t>> utterance_span(const std::vector<double>& energy, double frame_step,
                                                              double floor_db, double gate_db, double gate_min) {
    if (energy.empty()) return std::nullopt;
    double peak = *std::max_element(energy.begin(), energy.end());
    if (peak <= floor_db + 1.0) return std::nullopt;
    const double thr = peak - gate_db;
    std::vector<std::pair<size_t, size_t>> runs;
    for (size_t i = 0; i < energy.size();) {
        if (energy[i] < thr) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < energy.size() && energy[j + 1] >= thr) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    const double min_frames = gate_min / frame_step;
    std::vector<std::pair<size_t, size_t>> long_runs;
    for (auto& r : runs)
        if (double(r.second - r.first + 1) >= min_frames) long_runs.push_back(r);
    const auto& use = long_runs.empty() ? runs : long_runs;
    return std::make_pair(use.front().first, use.back().second);
}

// Per-frame energy used by the gate: the loudest band.
inline std::vector<double> gate_energy(const BandEnergyTracks& t) {
    std::vector<double> e(t.size(), t.floor_db);
    for (auto& band : t.energy)
        for (size_t i = 0; i < e.size(); ++i) e[i] = std::max(e[i], band[i]);
    return e;
}

// Acoustic parameter categories (numbered as in the landmark-vicinity list):
// 1 tongue body/rounding, 2 vocalic nasality, 3 rapid articulator movement,
// 4 vocal-fold vibration, 5 glottal state in vowels, 6 frication place,
// 7 glottal state under pressure, 8 nasal murmur, 10 landmark spacing.
// Category 9 (subglottal pressure) is not computed.
enum ParameterCategory : unsigned {
    Cat1 = 1u << 1, Cat2 = 1u << 2, Cat3 = 1u << 3, Cat4 = 1u << 4, Cat5 = 1u << 5,
    Cat6 = 1u << 6, Cat7 = 1u << 7, Cat8 = 1u << 8, Cat10 = 1u << 10
};

struct ParameterFrame {
    double time = 0;
    double low_band_dB = 0, mid_band_dB = 0, high_band_dB = 0, f1_proxy_dB = 0;
    std::optional<double> f0;
    double spectral_tilt = 0;  // dB/octave between the F1-proxy and mid bands
    unsigned categories = 0;   // ParameterCategory bits measurable at this frame
};

struct Analysis {
    Spectrogram spectrogram;
    BandEnergyTracks tracks;
    std::vector<std::optional<double>> f0;
    std::vector<ParameterFrame> frames;
    std::optional<std::pair<size_t, size_t>> span;
};

inline double band_center(const Band& b) { return std::sqrt(std::max(b.f_lo, 50.0) * b.f_hi); }

inline Analysis analyze(const AudioBuffer& audio, const AnalysisParams& p = {}) {
    validate_audio(audio);
    Analysis a;
    a.spectrogram = compute_spectrogram(audio, p.frame_length, p.frame_step, p.floor_db);
    a.tracks = band_energies(a.spectrogram, p.bands);
    a.f0 = estimate_f0(audio, a.spectrogram, p);
    a.span = utterance_span(gate_energy(a.tracks), a.tracks.frame_step, p.floor_db, p.gate_db, p.gate_min);
    auto li = a.tracks.find("low"), mi = a.tracks.find("mid"), hi = a.tracks.find("high"), fi = a.tracks.find("f1");
    double octaves = (fi && mi) ? std::log2(band_center(a.tracks.bands[*mi]) / band_center(a.tracks.bands[*fi])) : 1.0;
    auto ge = gate_energy(a.tracks);
    double peak = ge.empty() ? p.floor_db : *std::max_element(ge.begin(), ge.end());
    a.frames.resize(a.tracks.size());
    for (size_t i = 0; i < a.frames.size(); ++i) {
        auto& fr = a.frames[i];
        fr.time = a.tracks.times[i];
        fr.low_band_dB = li ? a.tracks.energy[*li][i] : p.floor_db;
        fr.mid_band_dB = mi ? a.tracks.energy[*mi][i] : p.floor_db;
        fr.high_band_dB = hi ? a.tracks.energy[*hi][i] : p.floor_db;
        fr.f1_proxy_dB = fi ? a.tracks.energy[*fi][i] : p.floor_db;
        fr.f0 = a.f0[i];
        fr.spectral_tilt = (fr.mid_band_dB - fr.f1_proxy_dB) / octaves;
        bool inside = a.span && i >= a.span->first && i <= a.span->second;
        if (!inside) continue;
        bool vocalic = fr.f0 && ge[i] >= peak - 30;
        fr.categories = Cat10 | (vocalic ? (Cat1 | Cat2 | Cat3 | Cat4 | Cat5) : (Cat6 | Cat7 | Cat8));
    }
    return a;
}

}  // namespace lamit
