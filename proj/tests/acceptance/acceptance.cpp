// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "dft_oracle.hpp"
#include "fixtures.hpp"
#include "guide/pipeline.hpp"

using namespace guide;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kThresholdTolHz = 0.05;
constexpr double kDftRelTol = 1e-9;
constexpr double kParsevalRelTol = 1e-6;
constexpr int kFftTrialsPerLength = 200;
constexpr int kArgmaxTrials = 1000;
constexpr int kWavTrials = 1000;

/// Thrown by check() to fail the current criterion with a reason.
struct Failure {
  std::string why;
};

void check(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

struct Criterion {
  int id;
  std::string name;
  double budget_ms;
  std::function<std::string()> body;  // returns a short detail string
};

std::string fmt_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f ms", ms);
  return buf;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ----------------------------------------------------------------- 1

std::string threshold_reproduction() {
  const auto model = train_from_peaks(testing::kTrainingMale, testing::kTrainingFemale);
  check(std::abs(model.threshold_hz() - 598.3) <= kThresholdTolHz, "threshold " + fmt(model.threshold_hz()));
  check(model.display_threshold_hz() == 598, "display " + std::to_string(model.display_threshold_hz()));
  return "threshold " + fmt(model.threshold_hz(), 2) + " Hz, displayed " +
         std::to_string(model.display_threshold_hz()) + " Hz";
}

// ----------------------------------------------------------------- 2

LabeledFeature labeled(double hz, GenderLabel g) { return {SpectralFeature{hz, 1.0, kVoiceBand}, g}; }

std::string accuracy_reproduction() {
  const auto model = train_from_peaks(testing::kTrainingMale, testing::kTrainingFemale);
  // Outcomes of the recognition runs: speakers 2 and 9 wrong, the rest right.
  // Speaker 5's recognition recording is taken at the male class mean.
  std::vector<LabeledFeature> recognition;
  for (double hz : {512.0, 698.0, 497.0, 506.0, 568.0}) recognition.push_back(labeled(hz, GenderLabel::Male));
  for (double hz : {623.0, 676.0, 628.0, 576.0, 639.0}) recognition.push_back(labeled(hz, GenderLabel::Female));
  const auto report = evaluate(model, recognition);
  check(report.accuracy_percent == 80.0, "recognition accuracy " + fmt(report.accuracy_percent, 1));
  const bool expected_wrong[] = {false, true, false, false, false, false, false, false, true, false};
  for (std::size_t i = 0; i < 10; ++i) {
    check(report.per_sample[i].correct() != expected_wrong[i], "speaker " + std::to_string(i + 1) + " outcome");
  }

  std::vector<LabeledFeature> training;
  for (double hz : testing::kTrainingMale) training.push_back(labeled(hz, GenderLabel::Male));
  for (double hz : testing::kTrainingFemale) training.push_back(labeled(hz, GenderLabel::Female));
  const auto self = evaluate(model, training);
  check(self.accuracy_percent == 70.0, "self accuracy " + fmt(self.accuracy_percent, 1));
  return "recognition manifest 80.0%, training peaks self-classified 70.0%";
}

// ----------------------------------------------------------------- 3

std::string fft_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> value(-32768.0, 32767.0);
  double worst_dft = 0.0, worst_parseval = 0.0;
  int lengths = 0;
  for (std::size_t n = 2; n <= 512; n *= 2, ++lengths) {
    for (int trial = 0; trial < kFftTrialsPerLength; ++trial) {
      const auto signal = testing::random_signal(rng, n, 44100);
      std::vector<double> x(signal.samples().begin(), signal.samples().end());
      const auto spectrum = fft(signal);
      const auto half = spectrum.magnitudes();
      const auto oracle = testing::direct_dft_magnitudes(x);
      const double scale = std::max(1.0, *std::max_element(oracle.begin(), oracle.end()));
      for (std::size_t k = 0; k < n / 2; ++k) {
        const double rel = std::abs(half[k] - oracle[k]) / scale;
        worst_dft = std::max(worst_dft, rel);
        check(rel <= kDftRelTol, "N=" + std::to_string(n) + " bin " + std::to_string(k) + " rel " + fmt(rel, 12));
      }

      const auto full = fft_complex(x);
      double time = 0.0, freq = 0.0;
      for (double v : x) time += v * v;
      for (const auto& c : full) freq += std::norm(c);
      freq /= static_cast<double>(n);
      if (time > 0.0) {
        const double rel = std::abs(time - freq) / time;
        worst_parseval = std::max(worst_parseval, rel);
        check(rel <= kParsevalRelTol, "Parseval N=" + std::to_string(n));
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d lengths x %d signals, worst DFT rel %.2e, worst Parseval rel %.2e", lengths,
                kFftTrialsPerLength, worst_dft, worst_parseval);
  return buf;
}

// ----------------------------------------------------------------- 4

std::string argmax_invariance() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  for (int trial = 0; trial < kArgmaxTrials; ++trial) {
    const auto signal = testing::random_signal(rng, 512, 8000);
    const auto spectrum = fft(signal);
    const auto mags = spectrum.magnitudes();
    std::vector<double> power(mags.size());
    std::transform(mags.begin(), mags.end(), power.begin(), [](double m) { return m * m; });
    check(std::max_element(mags.begin(), mags.end()) - mags.begin() ==
              std::max_element(power.begin(), power.end()) - power.begin(),
          "argmax differs on trial " + std::to_string(trial));

    // Peak under a positive rescaling of the input.
    std::vector<double> x(512);
    for (auto& v : x) v = value(rng);
    const double a = std::pow(10.0, log_scale(rng));
    std::vector<double> ax(x);
    for (auto& v : ax) v *= a;
    auto spectrum_of = [](const std::vector<double>& in) {
      const auto full = fft_complex(in);
      std::vector<double> half(full.size() / 2);
      for (std::size_t k = 0; k < half.size(); ++k) half[k] = std::abs(full[k]);
      return Spectrum(std::move(half), 8000.0);
    };
    check(extract_peak(spectrum_of(x)).peak_frequency_hz == extract_peak(spectrum_of(ax)).peak_frequency_hz,
          "peak moved under scaling by " + fmt(a, 6));
  }
  return std::to_string(kArgmaxTrials) + " spectra, argmax and scaled peaks agree";
}

// ----------------------------------------------------------------- 5

std::string tone_peaks() {
  constexpr double kBin = 44100.0 / 65536.0;
  std::vector<PcmSignal> male, female;
  for (double f : testing::kTrainingMale) male.push_back(testing::make_tone(f));
  for (double f : testing::kTrainingFemale) female.push_back(testing::make_tone(f));
  const auto model = train(male, female);
  for (std::size_t i = 0; i < 5; ++i) {
    check(std::abs(model.male_peaks_hz()[i] - testing::kTrainingMale[i]) <= kBin, "male tone " + std::to_string(i + 1));
    check(std::abs(model.female_peaks_hz()[i] - testing::kTrainingFemale[i]) <= kBin,
          "female tone " + std::to_string(i + 1));
  }
  const GenderLabel M = GenderLabel::Male, F = GenderLabel::Female;
  const GenderLabel want_male[] = {M, F, M, M, F};
  const GenderLabel want_female[] = {F, F, F, M, F};
  for (std::size_t i = 0; i < 5; ++i) {
    check(classify(model, peak_feature(male[i])) == want_male[i], "male speaker " + std::to_string(i + 1));
    check(classify(model, peak_feature(female[i])) == want_female[i], "female speaker " + std::to_string(i + 1));
  }
  return "10 tones within one bin (" + fmt(kBin) + " Hz), labels as tabulated, threshold " +
         std::to_string(model.display_threshold_hz()) + " Hz";
}

// ----------------------------------------------------------------- 6

std::string asr_round_trip() {
  const auto hello = testing::make_tone(310.0, 1.5);
  const auto short_clip = testing::make_tone(180.0, 0.4);
  MockAsrServer server;
  server.prime(fingerprint(write_wav(hello)), "hello my friend");
  server.prime(fingerprint(write_wav(short_clip)), "a war");
  server.start();
  AsrClientOptions options;
  options.endpoint = server.endpoint();
  const AsrClient client(options);
  for (int run = 1; run <= 5; ++run) {
    const auto t = client.recognize(hello);
    check(t.text == "hello my friend", "run " + std::to_string(run) + " got '" + t.text + "'");
  }
  const auto t = client.recognize(short_clip);
  check(t.text == "a war", "short clip got '" + t.text + "'");
  return "5 x \"hello my friend\", 1 x \"a war\"";
}

// ----------------------------------------------------------------- 7

std::string dialogue_properties() {
  const DialogueEngine engine;
  constexpr Condition kAll[] = {Condition::A, Condition::NotA, Condition::B, Condition::NotB, Condition::C,
                                Condition::NotC, Condition::D, Condition::NotD, Condition::E, Condition::F,
                                Condition::G, Condition::H, Condition::NotH, Condition::I, Condition::J,
                                Condition::Timeout20s, Condition::Auto};
  std::set<DialogueState> seen{DialogueState::Standby};
  std::queue<DialogueState> todo;
  todo.push(DialogueState::Standby);
  while (!todo.empty()) {
    SessionContext ctx;
    ctx.state = todo.front();
    todo.pop();
    for (Condition c : kAll) {
      const auto next = engine.next(ctx, c, "hello").context.state;
      if (seen.insert(next).second) todo.push(next);
    }
  }
  check(seen.size() == kStateCount, std::to_string(seen.size()) + " states reachable");

  std::set<std::pair<DialogueState, Condition>> keys;
  for (const auto& arc : transition_table()) {
    check(keys.insert({arc.from, arc.condition}).second, "duplicate arc");
  }

  SessionContext ctx;
  std::vector<std::string> actions;
  auto feed = [&](Condition c, std::string_view utterance) {
    const auto t = engine.advance(ctx, c, utterance);
    ctx = t.context;
    for (const auto& a : t.actions) actions.push_back(describe(a));
  };
  feed(Condition::A, "");
  feed(Condition::NotB, "");
  feed(Condition::C, "my name is putri");
  feed(Condition::D, "I am fine");
  feed(Condition::F, "can you dance");
  feed(Condition::I, "no thank you");
  check(ctx.state == DialogueState::Standby, "trace ended in state " + std::to_string(state_id(ctx.state)));

  auto speak = [](std::string_view s) { return "Speak(\"" + std::string(s) + "\")"; };
  const std::vector<std::string> want{
      "Posture(Stand)",
      speak("Hello, I am Lumen. I am robot guide and you are now in Lumen Super Intelligence Agent stand."),
      speak("What is your name?"),
      "SaveNameFace(\"Putri\")",
      speak("good morning, how are you today Putri?"),
      speak("I am happy to hear that"),
      speak("what can I help you?"),
      speak(answers::kDance),
      "Dance",
      speak("Is there anything else I can help you with?"),
      speak("Thank you for visiting. Goodbye!"),
      "WaveHands",
      "Posture(Sit)",
  };
  check(actions == want, "action sequence differs");
  return "15/15 reachable, " + std::to_string(keys.size()) + " arcs unique, trace ends in state 1 with " +
         std::to_string(actions.size()) + " actions";
}

// ----------------------------------------------------------------- 8

std::string qa_corpus() {
  struct Row {
    const char* question;
    std::string_view answer;
  };
  const Row rows[] = {
      {"What is your name?", answers::kName},
      {"Where is the toilet?", answers::kLocation},
      {"Can you explain about yourself?", answers::kExplain},
      {"Can you dance?", answers::kDance},
      {"Can you sing a song?", answers::kSing},
      {"What is this exhibition?", answers::kExhibition},
      {"Who made you?", answers::kMade},
      {"What can you do?", answers::kWhatDo},
      {"Can you walk?", answers::kBusy},
      {"Can you sit down?", answers::kBusy},
      {"Can you run?", answers::kRun},
      {"Can you speak slow, please?", answers::kSpeakSlow},
      {"How tall are you?", answers::kHeight},
      {"What is your weight?", answers::kWeight},
      {"Do you want to play with me?", answers::kPlay},
      {"Who programmed you?", answers::kProgrammed},
      {"What is Lumen?", answers::kLumen},
      {"What is Aldebaran?", answers::kAldebaran},
      {"How old are you?", answers::kOld},
      {"How is the weather today?", answers::kWeather},
      {"What kind of stand is this?", answers::kStands},
  };
  const auto& rules = default_rules();
  int asserted = 0;
  for (const auto& row : rows) {
    check(respond(rules, row.question) == std::string(row.answer), std::string("row: ") + row.question);
    ++asserted;
  }
  check(respond(rules, "what is your name") == std::string(answers::kName), "tie-break: name");
  check(respond(rules, "can you walk") == std::string(answers::kBusy), "tie-break: can walk");
  check(respond(rules, "can you dance") == std::string(answers::kDance), "tie-break: can dance");
  check(!respond(rules, "xylophone").has_value(), "no-match");
  return std::to_string(asserted) + " table rows (the table has 21, not 22) + 3 tie-breaks + no-match";
}

// ----------------------------------------------------------------- 9

std::string wav_round_trip() {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::size_t> length(0, 4096);
  std::uniform_int_distribution<uint32_t> rate(1, 192000);
  for (int trial = 0; trial < kWavTrials; ++trial) {
    const auto s = testing::random_signal(rng, length(rng), rate(rng));
    check(parse_wav(write_wav(s)) == s, "trial " + std::to_string(trial));
  }
  return std::to_string(kWavTrials) + " random signals bit-exact";
}

// ----------------------------------------------------------------- 10

std::string end_to_end_turn() {
#ifndef GUIDE_CLI_PATH
  throw Failure{"built without the guide CLI"};
#else
  testing::TempDir dir;
  const std::string script = "/person\n/face Putri\nI am fine\nwhat is your name\n";
  std::ofstream(dir / "script.txt") << script;
  const auto out_dir = dir / "speech";
  const std::string cmd = std::string("GUIDE_ASR_ENDPOINT= '") + GUIDE_CLI_PATH + "' converse --script '" +
                          (dir / "script.txt").string() + "' --output-dir '" + out_dir.string() + "' > '" +
                          (dir / "out.txt").string() + "' 2>&1";
  const int raw = std::system(cmd.c_str());
  check(WIFEXITED(raw) && WEXITSTATUS(raw) == 0, "converse exited with " + std::to_string(raw));
  std::ifstream in(dir / "out.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string cli = ss.str();

  // The same turns through the library; the last one is the typed question.
  PipelineConfig config;
  config.output_dir = out_dir;
  GuideSession session(config, std::make_shared<AsrClient>(AsrClientOptions{}), std::make_shared<ToneSynthesizer>(),
                       std::nullopt);
  session.inject(Condition::A, {}, "/person");
  session.inject(Condition::B, "Putri", "/face");
  session.run_text_turn("I am fine");
  check(session.context().state == DialogueState::AskingRequest, "library session not at state 8");
  const auto record = session.run_text_turn("what is your name");
  check(record.state_after == DialogueState::AnsweringFirstQuestion, "library state_after");
  const std::vector<RobotAction> want_actions{action::Speak{"My name is Lumen"}};
  check(record.actions == want_actions, "library actions");

  std::string expected;
  for (const auto& l : describe_turn(record)) expected += l + "\n";
  check(cli.size() >= expected.size() && cli.compare(cli.size() - expected.size(), expected.size(), expected) == 0,
        "CLI output for the question turn differs from the library record");
  check(cli.find("STATE 13 | COND H | ACTION Speak(\"My name is Lumen\")\n") != std::string::npos,
        "trace line missing");
  check(record.output_wav.has_value(), "no WAV written");

  const auto wav = read_wav_file(*record.output_wav);
  const std::string_view text = "My name is Lumen";
  const std::size_t seg = tone_segment_samples(wav.sample_rate_hz());
  check(wav.size() == seg * text.size(), "WAV length " + std::to_string(wav.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto s = wav.samples().subspan(i * seg, seg);
    const PcmSignal segment(std::vector<int16_t>(s.begin(), s.end()), wav.sample_rate_hz());
    const auto spectrum = fft(segment);
    const auto f = extract_peak(spectrum, FrequencyBand{100, 1000});
    const double want = tone_frequency_hz(static_cast<uint8_t>(text[i]));
    check(std::abs(f.peak_frequency_hz - want) <= spectrum.bin_width_hz(),
          "character " + std::to_string(i) + " tone " + fmt(f.peak_frequency_hz, 2) + " Hz");
  }
  return "state 8 -> 13, Speak(\"My name is Lumen\"), " + std::to_string(text.size()) + " tones recovered";
#endif
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "threshold reproduction", 1.0, threshold_reproduction},
      {2, "accuracy reproduction", 1.0, accuracy_reproduction},
      {3, "FFT oracle equivalence", 10000.0, fft_oracle},
      {4, "argmax invariance", 1000.0, argmax_invariance},
      {5, "peak extraction on tones", 5000.0, tone_peaks},
      {6, "ASR protocol round-trip", 1000.0, asr_round_trip},
      {7, "dialogue machine properties", 1000.0, dialogue_properties},
      {8, "QA corpus", 1000.0, qa_corpus},
      {9, "WAV round-trip", 5000.0, wav_round_trip},
      {10, "end-to-end turn", 10000.0, end_to_end_turn},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = true;
    const auto start = Clock::now();
    try {
      detail = c.body();
    } catch (const Failure& f) {
      ok = false;
      detail = f.why;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (ok && ms > c.budget_ms) {
      ok = false;
      detail += "; over budget";
    }
    failures += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << (c.id < 10 ? " " : "") << c.id << "  " << c.name << "  ["
              << fmt_ms(ms) << " / " << fmt_ms(c.budget_ms) << "]  " << detail << '\n';
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
