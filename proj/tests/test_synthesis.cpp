#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "talaseg/error.hpp"
#include "talaseg/features.hpp"
#include "talaseg/onsets.hpp"
#include "talaseg/synthesis.hpp"
#include "test_util.hpp"

using namespace talaseg;
using namespace testutil;

namespace {

ConcertSpec three_sections(RenderMode mode, uint64_t seed = 7) {
  ConcertSpec spec;
  spec.seed = seed;
  spec.render_mode = mode;
  for (const auto& [label, dur, density] :
       {std::tuple{"pe", 300.0, 6.0}, {"ka", 400.0, 12.0}, {"gtc", 200.0, 20.0}}) {
    SectionSpec s;
    s.label = label;
    s.duration_s = dur;
    s.base_density = density;
    s.pattern = {1.0};
    spec.sections.push_back(s);
  }
  return spec;
}

}  // namespace

TEST_CASE("generated concert has exact truth and matching ASD") {
  const GeneratedConcert gen = generate_concert(three_sections(RenderMode::Odf));
  CHECK(gen.truth.boundaries_s == std::vector<double>{300.0, 700.0});
  CHECK(gen.truth.duration_s == 900.0);
  REQUIRE(gen.truth.sections.size() == 3);
  CHECK(gen.truth.sections[1].start_s == 300.0);
  CHECK(gen.truth.sections[1].end_s == 700.0);

  // features module on the output: ASD within +-0.5 of the spec densities
  const OnsetList onsets = detect_onsets(gen.odf);
  const AsdCurve curve = asd(onsets, gen.truth.duration_s);
  auto check_span = [&](double lo, double hi, double density) {
    for (int g = 0; g < curve.grid.rows; ++g) {
      const double start = curve.grid.start(g);
      if (start >= lo + 1.0 && start + 4.0 <= hi - 1.0) {
        CHECK(curve.values[g] == doctest::Approx(density).epsilon(0.5 / density));
      }
    }
  };
  check_span(0.0, 300.0, 6.0);
  check_span(300.0, 700.0, 12.0);
  check_span(700.0, 900.0, 20.0);
}

TEST_CASE("zero-density section has no onsets") {
  ConcertSpec spec = three_sections(RenderMode::Odf);
  spec.sections[1].base_density = 0.0;
  const GeneratedConcert gen = generate_concert(spec);
  for (double t : gen.onset_times) {
    CHECK((t < 300.0 || t >= 700.0));
  }
}

TEST_CASE("pauses carry no onsets; recitations ride over the playing") {
  ConcertSpec spec = three_sections(RenderMode::Odf);
  spec.sections[1].pauses.push_back(TimedSpan{100.0, 4.0});
  spec.sections[1].recitation_inserts.push_back(TimedSpan{200.0, 6.0});
  const GeneratedConcert gen = generate_concert(spec);
  int in_recitation = 0;
  for (double t : gen.onset_times) {
    CHECK_FALSE((t >= 400.0 && t < 404.0));
    if (t >= 500.0 && t < 506.0) ++in_recitation;
  }
  // the recitation is spoken over the theka: strokes continue underneath
  CHECK(in_recitation > 0);
}

TEST_CASE("same seed gives bit-identical output") {
  const ConcertSpec spec = three_sections(RenderMode::Audio, 99);
  const GeneratedConcert a = generate_concert(spec);
  const GeneratedConcert b = generate_concert(spec);
  CHECK(a.audio.samples == b.audio.samples);
  CHECK(a.onset_times == b.onset_times);

  const ConcertSpec ospec = three_sections(RenderMode::Odf, 99);
  CHECK(generate_concert(ospec).odf.values == generate_concert(ospec).odf.values);
}

TEST_CASE("generator validates its spec") {
  ConcertSpec spec;
  CHECK_THROWS_AS(generate_concert(spec), Error);  // no sections

  spec = three_sections(RenderMode::Odf);
  spec.sections[0].duration_s = -5.0;
  CHECK_THROWS_AS(generate_concert(spec), Error);

  spec = three_sections(RenderMode::Odf);
  spec.sections[0].pauses.push_back(TimedSpan{290.0, 20.0});  // beyond the section
  CHECK_THROWS_AS(generate_concert(spec), Error);

  spec = three_sections(RenderMode::Odf);
  spec.sections[0].label = "intro";
  CHECK_THROWS_AS(generate_concert(spec), Error);
}

TEST_CASE("audio render produces wav-ready samples") {
  ConcertSpec spec = three_sections(RenderMode::Audio);
  spec.sections[0].duration_s = 30.0;
  spec.sections[1].duration_s = 30.0;
  spec.sections[2].duration_s = 30.0;
  const GeneratedConcert gen = generate_concert(spec);
  CHECK(gen.audio.sample_rate == 16000);
  CHECK(gen.audio.samples.size() == 90 * 16000);
  for (double v : gen.audio.samples) {
    CHECK(std::fabs(v) <= 1.0);
  }
}

TEST_CASE("statistics batch matches the dataset composition lengths") {
  const std::vector<ConcertSpec> batch = statistics_batch(50, 7);

  double ka_len = 0.0, gtc_len = 0.0, pe_ratio = 0.0, ka_ratio = 0.0;
  int ka_n = 0, gtc_n = 0;
  for (const ConcertSpec& spec : batch) {
    double total = spec.total_duration();
    double alap = 0.0, pe = 0.0, ka = 0.0, gtc = 0.0;
    for (const SectionSpec& s : spec.sections) {
      if (s.label == "alap") alap += s.duration_s;
      if (s.label == "pe") pe += s.duration_s;
      if (s.label == "ka") {
        ka += s.duration_s;
        ka_len += s.duration_s;
        ++ka_n;
      }
      if (s.label == "gtc") {
        gtc += s.duration_s;
        gtc_len += s.duration_s;
        ++gtc_n;
      }
    }
    const double span = total - alap;
    pe_ratio += pe / span;
    ka_ratio += ka / span;
    CHECK(total >= 15.0 * 60.0);
    CHECK(total <= 80.0 * 60.0);
  }

  CHECK(ka_len / ka_n == doctest::Approx(210.0).epsilon(0.15));
  CHECK(gtc_len / gtc_n == doctest::Approx(60.0).epsilon(0.15));
  CHECK(pe_ratio / batch.size() == doctest::Approx(0.30).epsilon(0.1));
  CHECK(ka_ratio / batch.size() == doctest::Approx(0.48).epsilon(0.1));

  CHECK(statistics_batch(1, 3).size() == 1);
  CHECK_THROWS_AS(statistics_batch(0, 3), Error);
}

TEST_CASE("concert spec JSON round trip") {
  ConcertSpec spec = three_sections(RenderMode::Audio, 31);
  spec.sections[1].speed_steps.push_back(SpeedStep{120.0, 2.0});
  spec.sections[1].pauses.push_back(TimedSpan{60.0, 3.0});
  spec.sections[2].recitation_inserts.push_back(TimedSpan{50.0, 5.0});

  const ConcertSpec back = ConcertSpec::from_json(spec.to_json());
  CHECK(back.seed == spec.seed);
  CHECK(back.render_mode == spec.render_mode);
  REQUIRE(back.sections.size() == 3);
  CHECK(back.sections[1].speed_steps.size() == 1);
  CHECK(back.sections[1].speed_steps[0].factor == 2.0);
  CHECK(back.sections[1].pauses.size() == 1);
  CHECK(back.sections[2].recitation_inserts.size() == 1);
  CHECK(back.sections[2].base_density == 20.0);

  // byte-identical audio from the round-tripped spec
  CHECK(generate_concert(back).audio.samples ==
        generate_concert(spec).audio.samples);

  CHECK_THROWS_AS(ConcertSpec::from_json("{]"), Error);
  CHECK_THROWS_AS(ConcertSpec::from_json("{\"render_mode\": \"tape\"}"), Error);
}
