#include "talaseg/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "talaseg/error.hpp"
#include "talaseg/rng.hpp"

namespace talaseg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kRate = 16000;
constexpr double kJitter = 0.005;  // +-5 ms onset jitter

struct Stroke {
  double time = 0.0;
  int cls = 0;      // 0 = resonant low, 1 = sharp high
  double ioi = 0.1;  // local inter-onset interval, sets the ring length
};

SectionLabel parse_label(const std::string& name) {
  if (name == "alap") return SectionLabel::Alap;
  if (name == "pe") return SectionLabel::Pe;
  if (name == "ka") return SectionLabel::Ka;
  if (name == "gtc") return SectionLabel::Gtc;
  throw Error(Errc::invalid_argument, "unknown section label: " + name);
}

bool inside_any(const std::vector<TimedSpan>& spans, double t) {
  for (const auto& s : spans) {
    if (t >= s.at_s && t < s.at_s + s.len_s) return true;
  }
  return false;
}

void validate(const ConcertSpec& spec) {
  if (spec.sections.empty()) throw Error(Errc::invalid_argument, "spec has no sections");
  for (const auto& s : spec.sections) {
    if (!(s.duration_s > 0.0)) throw Error(Errc::invalid_argument, "section duration <= 0");
    if (s.base_density < 0.0) throw Error(Errc::invalid_argument, "negative density");
    parse_label(s.label);
    for (const auto& p : s.pauses) {
      if (p.at_s < 0.0 || p.at_s + p.len_s > s.duration_s) {
        throw Error(Errc::invalid_argument, "pause outside its section");
      }
    }
    for (const auto& p : s.recitation_inserts) {
      if (p.at_s < 0.0 || p.at_s + p.len_s > s.duration_s) {
        throw Error(Errc::invalid_argument, "recitation outside its section");
      }
    }
  }
}

/// Scheduled stroke instants for one section, local times.
std::vector<Stroke> schedule_section(const SectionSpec& s, Rng& rng) {
  std::vector<Stroke> out;
  if (s.base_density <= 1e-9) return out;

  std::vector<double> pattern = s.pattern.empty() ? std::vector<double>{1.0} : s.pattern;
  double mean = 0.0;
  for (double p : pattern) mean += p;
  mean /= pattern.size();
  for (double& p : pattern) p /= mean;

  std::vector<SpeedStep> steps = s.speed_steps;
  std::sort(steps.begin(), steps.end(),
            [](const SpeedStep& a, const SpeedStep& b) { return a.at_s < b.at_s; });

  double t = 0.0;
  size_t idx = 0;
  size_t next_step = 0;
  double factor = 1.0;
  while (t < s.duration_s) {
    while (next_step < steps.size() && steps[next_step].at_s <= t) {
      factor *= steps[next_step].factor;
      ++next_step;
    }
    const double density = s.base_density * factor;
    if (density <= 1e-9) break;

    const double jittered = t + rng.uniform(-kJitter, kJitter);
    const double ioi = pattern[idx % pattern.size()] / density;
    if (jittered >= 0.0 && jittered < s.duration_s && !inside_any(s.pauses, jittered)) {
      out.push_back({jittered, static_cast<int>(idx % 2), ioi});
    }
    t += ioi;
    ++idx;
  }
  std::sort(out.begin(), out.end(),
            [](const Stroke& a, const Stroke& b) { return a.time < b.time; });
  return out;
}

/// One decaying band-passed burst. The ring time follows the local
/// inter-onset interval (slow passages ring open, fast ones are damped), so
/// the depth of the inter-stroke troughs does not depend on the stroke rate.
void render_stroke(std::vector<double>& mix, int64_t at, const Stroke& stroke,
                   Rng& rng, double drift_phase) {
  const int cls = stroke.cls;
  // the drum head's tuning wanders slowly through the concert; timbre
  // features see this drift, the onset-based rhythm features do not
  const double drift =
      1.0 + 0.15 * std::sin(2.0 * kPi * at / (140.0 * kRate) + drift_phase);
  const double f0 =
      drift * (cls == 0 ? rng.uniform(105.0, 125.0) : rng.uniform(2300.0, 2700.0));
  const double tau = std::clamp((cls == 0 ? 0.45 : 0.11) * stroke.ioi, 0.004, 0.200);
  const double amp = cls == 0 ? 0.55 : 0.42;
  const int len = static_cast<int>(std::min(5.0 * tau, 0.6) * kRate);
  const double phase = rng.uniform(0.0, 2.0 * kPi);
  // lighter attack at speed: transient energy per second stays rate-free
  const double attack = 0.12 * std::clamp(std::sqrt(stroke.ioi / 0.1), 0.5, 1.6);

  for (int i = 0; i < len; ++i) {
    const int64_t n = at + i;
    if (n < 0 || n >= static_cast<int64_t>(mix.size())) break;
    const double t = static_cast<double>(i) / kRate;
    const double decay = std::exp(-t / tau);
    const double tone = std::sin(2.0 * kPi * f0 * t + phase);
    // noise only in the attack so the ring decays smoothly
    const double noise = rng.uniform(-1.0, 1.0) * std::exp(-t / 0.012);
    mix[n] += amp * (0.8 * decay * tone + attack * noise);
  }
}

}  // namespace

double ConcertSpec::total_duration() const {
  double d = 0.0;
  for (const auto& s : sections) d += s.duration_s;
  return d;
}

GeneratedConcert generate_concert(const ConcertSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  GeneratedConcert out;
  out.mode = spec.render_mode;
  const double total = spec.total_duration();
  out.truth.duration_s = total;

  // schedule strokes and collect the exact truth
  std::vector<Stroke> strokes;
  double offset = 0.0;
  for (const auto& s : spec.sections) {
    if (offset > 0.0) out.truth.boundaries_s.push_back(offset);
    const SectionLabel label = parse_label(s.label);
    if (!out.truth.sections.empty() && out.truth.sections.back().label == label) {
      out.truth.sections.back().end_s = offset + s.duration_s;
    } else {
      out.truth.sections.push_back({offset, offset + s.duration_s, label});
    }
    for (const Stroke& st : schedule_section(s, rng)) {
      strokes.push_back({st.time + offset, st.cls, st.ioi});
    }
    offset += s.duration_s;
  }
  for (const Stroke& st : strokes) out.onset_times.push_back(st.time);

  if (spec.render_mode == RenderMode::Odf) {
    out.odf.values.assign(static_cast<size_t>(std::ceil(total * 100.0 - 1e-9)), 0.0);
    for (const Stroke& st : strokes) {
      const size_t frame = static_cast<size_t>(std::llround(st.time * 100.0));
      if (frame < out.odf.values.size()) out.odf.values[frame] += 1.0;
    }
    return out;
  }

  const int64_t n_samples = static_cast<int64_t>(std::llround(total * kRate));
  std::vector<double> mix(static_cast<size_t>(n_samples), 0.0);

  // alap melody where a section has the alap label
  offset = 0.0;
  for (const auto& s : spec.sections) {
    if (parse_label(s.label) == SectionLabel::Alap) {
      const int64_t a = static_cast<int64_t>(std::llround(offset * kRate));
      const int64_t b =
          static_cast<int64_t>(std::llround((offset + s.duration_s) * kRate));
      for (int64_t n = a; n < std::min(b, n_samples); ++n) {
        const double t = static_cast<double>(n) / kRate;
        const double vib = 1.0 + 0.006 * std::sin(2.0 * kPi * 0.7 * t);
        const double f = 220.0 * vib;
        mix[n] += 0.12 * (std::sin(2.0 * kPi * f * t) + 0.5 * std::sin(2.0 * kPi * 2.0 * f * t) +
                          0.25 * std::sin(2.0 * kPi * 3.0 * f * t));
      }
    }
    offset += s.duration_s;
  }

  const double drift_phase = rng.uniform(0.0, 2.0 * kPi);
  for (const Stroke& st : strokes) {
    render_stroke(mix, static_cast<int64_t>(std::llround(st.time * kRate)), st, rng,
                  drift_phase);
  }

  // recitation: band-limited speech-like noise spoken over the playing; the
  // noise itself is smooth and contributes no onsets
  offset = 0.0;
  for (const auto& s : spec.sections) {
    for (const auto& r : s.recitation_inserts) {
      const int64_t a = static_cast<int64_t>(std::llround((offset + r.at_s) * kRate));
      const int64_t b =
          static_cast<int64_t>(std::llround((offset + r.at_s + r.len_s) * kRate));
      double lp = 0.0;
      for (int64_t n = a; n < std::min(b, n_samples); ++n) {
        if (n < 0) continue;
        const double u = static_cast<double>(n - a) / std::max<int64_t>(b - a, 1);
        const double t = static_cast<double>(n) / kRate;
        lp = 0.85 * lp + 0.15 * rng.uniform(-1.0, 1.0);  // one-pole lowpass
        const double syllable = 0.6 + 0.4 * std::sin(2.0 * kPi * 4.0 * t);
        const double fade = std::sin(kPi * u);  // smooth in and out
        mix[n] += 1.2 * lp * syllable * fade;
      }
    }
    offset += s.duration_s;
  }

  // pauses silence the performed signal; the hall floor below runs through
  offset = 0.0;
  for (const auto& s : spec.sections) {
    for (const auto& p : s.pauses) {
      const int64_t a = static_cast<int64_t>(std::llround((offset + p.at_s) * kRate));
      const int64_t b =
          static_cast<int64_t>(std::llround((offset + p.at_s + p.len_s) * kRate));
      for (int64_t n = std::max<int64_t>(a, 0); n < std::min(b, n_samples); ++n) {
        mix[n] = 0.0;
      }
    }
    offset += s.duration_s;
  }

  // quiet hall ambience floor
  double lp_floor = 0.0;
  for (int64_t n = 0; n < n_samples; ++n) {
    lp_floor = 0.9 * lp_floor + 0.1 * rng.uniform(-1.0, 1.0);
    mix[n] += 0.006 * lp_floor;
  }

  double peak = 0.0;
  for (double v : mix) peak = std::max(peak, std::fabs(v));
  const double gain = peak > 1.0 ? 0.99 / peak : 1.0;

  out.audio.sample_rate = kRate;
  out.audio.samples.resize(mix.size());
  for (size_t i = 0; i < mix.size(); ++i) out.audio.samples[i] = mix[i] * gain;
  return out;
}

namespace {

/// Acklam's rational approximation of the standard normal quantile.
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Mild inter-onset templates: enough shape to distinguish ACF rows, gentle
/// enough that the windowed stroke counts stay phase-stable.
const std::vector<std::vector<double>>& pattern_templates() {
  static const std::vector<std::vector<double>> kPatterns = {
      {1.0, 1.0, 1.0, 1.0},
      {1.0, 0.85, 1.15, 1.0},
      {0.9, 1.1, 0.9, 1.1},
      {1.1, 1.0, 0.8, 1.1},
      {0.95, 1.05, 1.1, 0.9},
  };
  return kPatterns;
}

/// Mean of the cumulative speed ladder over the section, for density scaling.
double mean_speed_factor(const SectionSpec& s) {
  if (s.speed_steps.empty()) return 1.0;
  double mean = 0.0;
  double factor = 1.0;
  double prev = 0.0;
  for (const auto& step : s.speed_steps) {
    mean += factor * (step.at_s - prev);
    factor *= step.factor;
    prev = step.at_s;
  }
  mean += factor * (s.duration_s - prev);
  return mean / s.duration_s;
}

}  // namespace

std::vector<ConcertSpec> statistics_batch(int n, uint64_t seed,
                                          const BatchOptions& options) {
  if (n < 1) throw Error(Errc::invalid_argument, "batch size must be >= 1");
  Rng master(seed);
  const auto& patterns = pattern_templates();

  // stratified concert-mean targets: quantile-spaced normal scores in a
  // seeded shuffle, so the batch reproduces the dataset moments at any size
  std::vector<double> targets(n);
  for (int i = 0; i < n; ++i) {
    targets[i] = std::clamp(
        10.62 + 3.9 * inverse_normal_cdf((i + 0.5) / static_cast<double>(n)), 2.0, 21.0);
  }
  for (int i = n - 1; i > 0; --i) {
    std::swap(targets[i], targets[master.uniform_int(0, i)]);
  }

  std::vector<ConcertSpec> batch;
  batch.reserve(n);

  for (int c = 0; c < n; ++c) {
    Rng rng(master.derive_seed());
    ConcertSpec spec;
    spec.seed = rng.derive_seed();
    spec.render_mode = options.render_mode;

    const double total = 60.0 * rng.uniform(options.min_minutes, options.max_minutes);

    double alap = 0.0;
    if (options.with_alap && rng.uniform() < 0.8) {
      alap = std::clamp(total * rng.uniform(0.03, 0.06), 20.0, 180.0);
      SectionSpec s;
      s.label = "alap";
      s.duration_s = alap;
      s.base_density = 0.0;
      spec.sections.push_back(s);
    }
    const double span = total - alap;

    double pe_r = std::clamp(rng.normal(0.30, 0.03), 0.22, 0.38);
    double ka_r = std::clamp(rng.normal(0.48, 0.04), 0.38, 0.56);
    if (1.0 - pe_r - ka_r < 0.15) ka_r = 1.0 - pe_r - 0.15;
    const double gtc_r = 1.0 - pe_r - ka_r;

    // peshkar: one long extempore section; the density climbs gently through
    // many small steps, staying under the novelty detection thresholds
    SectionSpec pe;
    pe.label = "pe";
    pe.duration_s = pe_r * span;
    pe.base_density = 5.5;
    pe.pattern = patterns[0];
    const int n_steps = 12;
    for (int step = 0; step < n_steps; ++step) {
      const double at =
          pe.duration_s * ((step + 1.0) / (n_steps + 1.0) + rng.uniform(-0.01, 0.01));
      pe.speed_steps.push_back({at, 1.009});
    }
    spec.sections.push_back(pe);

    // compositions sit on a per-concert grid of quantized speed levels, about
    // 5 strokes/s apart, so the mixture's components line up with the speeds;
    // adjacent compositions always alternate levels
    const double ka_slow = 10.0 + rng.uniform(-0.4, 0.4);
    const double ka_fast = 15.0 + rng.uniform(-0.4, 0.4);
    const double gtc_fast = 20.0 + rng.uniform(-0.4, 0.4);

    const int ka_count =
        std::max(2, static_cast<int>(std::lround(ka_r * span / 210.0)));
    const int gtc_count =
        std::max(2, static_cast<int>(std::lround(gtc_r * span / 60.0)));

    std::vector<double> ka_lens(ka_count), gtc_lens(gtc_count);
    double ka_sum = 0.0, gtc_sum = 0.0;
    for (double& l : ka_lens) {
      l = rng.uniform(0.75, 1.25);
      ka_sum += l;
    }
    for (double& l : gtc_lens) {
      l = rng.uniform(0.7, 1.3);
      gtc_sum += l;
    }

    int pattern_cursor = rng.uniform_int(0, static_cast<int>(patterns.size()) - 1);
    for (int i = 0; i < ka_count; ++i) {
      SectionSpec s;
      s.label = "ka";
      s.duration_s = ka_r * span * ka_lens[i] / ka_sum;
      s.base_density = (i % 2 == 0 ? ka_slow : ka_fast) + rng.uniform(-0.15, 0.15);
      pattern_cursor = (pattern_cursor + 1 + (i % 2)) % patterns.size();
      s.pattern = patterns[pattern_cursor];
      spec.sections.push_back(s);
    }
    for (int i = 0; i < gtc_count; ++i) {
      SectionSpec s;
      s.label = "gtc";
      s.duration_s = gtc_r * span * gtc_lens[i] / gtc_sum;
      s.base_density = (i % 2 == 0 ? gtc_fast : ka_fast) + rng.uniform(-0.15, 0.15);
      pattern_cursor = (pattern_cursor + 1 + (i % 2)) % patterns.size();
      s.pattern = patterns[pattern_cursor];
      spec.sections.push_back(s);
    }

    // scale densities so the concert mean lands on the dataset statistics
    double expected = 0.0;
    for (const auto& s : spec.sections) {
      expected += s.base_density * mean_speed_factor(s) * s.duration_s / total;
    }
    const double scale = targets[c] / expected;
    for (auto& s : spec.sections) s.base_density *= scale;

    // occasional mid-composition pauses and one recitation
    const int n_pauses = rng.uniform_int(0, 2);
    for (int p = 0; p < n_pauses; ++p) {
      const int idx = rng.uniform_int(alap > 0.0 ? 2 : 1,
                                      static_cast<int>(spec.sections.size()) - 1);
      SectionSpec& s = spec.sections[idx];
      if (s.duration_s < 40.0) continue;
      TimedSpan pause;
      pause.len_s = rng.uniform(2.0, 4.0);
      pause.at_s = rng.uniform(12.0, s.duration_s - 12.0 - pause.len_s);
      s.pauses.push_back(pause);
    }
    if (rng.uniform() < 0.3) {
      SectionSpec& s = spec.sections.back();
      if (s.duration_s >= 40.0) {
        TimedSpan rec;
        rec.len_s = rng.uniform(3.0, 6.0);
        rec.at_s = rng.uniform(12.0, s.duration_s - 12.0 - rec.len_s);
        s.recitation_inserts.push_back(rec);
      }
    }

    batch.push_back(std::move(spec));
  }
  return batch;
}

std::string ConcertSpec::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["render_mode"] = render_mode == RenderMode::Audio ? "audio" : "odf";
  nlohmann::json secs = nlohmann::json::array();
  for (const auto& s : sections) {
    nlohmann::json js;
    js["label"] = s.label;
    js["duration_s"] = s.duration_s;
    js["base_density"] = s.base_density;
    js["pattern"] = s.pattern;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : s.speed_steps) {
      steps.push_back({{"at_s", st.at_s}, {"factor", st.factor}});
    }
    js["speed_steps"] = steps;
    nlohmann::json pauses = nlohmann::json::array();
    for (const auto& p : s.pauses) {
      pauses.push_back({{"at_s", p.at_s}, {"len_s", p.len_s}});
    }
    js["pauses"] = pauses;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : s.recitation_inserts) {
      recs.push_back({{"at_s", r.at_s}, {"len_s", r.len_s}});
    }
    js["recitation_inserts"] = recs;
    secs.push_back(js);
  }
  j["sections"] = secs;
  return j.dump(2);
}

ConcertSpec ConcertSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad JSON: ") + e.what());
  }
  ConcertSpec spec;
  try {
    spec.seed = j.value("seed", 7ull);
    const std::string mode = j.value("render_mode", std::string("audio"));
    if (mode == "audio") {
      spec.render_mode = RenderMode::Audio;
    } else if (mode == "odf") {
      spec.render_mode = RenderMode::Odf;
    } else {
      throw Error(Errc::invalid_argument, "unknown render_mode: " + mode);
    }
    for (const auto& js : j.at("sections")) {
      SectionSpec s;
      s.label = js.at("label").get<std::string>();
      s.duration_s = js.at("duration_s").get<double>();
      s.base_density = js.value("base_density", 0.0);
      if (js.contains("pattern")) s.pattern = js["pattern"].get<std::vector<double>>();
      if (js.contains("speed_steps")) {
        for (const auto& st : js["speed_steps"]) {
          s.speed_steps.push_back(
              {st.at("at_s").get<double>(), st.at("factor").get<double>()});
        }
      }
      if (js.contains("pauses")) {
        for (const auto& p : js["pauses"]) {
          s.pauses.push_back({p.at("at_s").get<double>(), p.at("len_s").get<double>()});
        }
      }
      if (js.contains("recitation_inserts")) {
        for (const auto& r : js["recitation_inserts"]) {
          s.recitation_inserts.push_back(
              {r.at("at_s").get<double>(), r.at("len_s").get<double>()});
        }
      }
      spec.sections.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad schema: ") + e.what());
  }
  return spec;
}

ConcertSpec ConcertSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_unreadable, "cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace talaseg
