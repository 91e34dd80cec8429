#include "guide/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include "text_util.hpp"

namespace guide {

namespace {

template <typename Fn>
auto in_stage(PipelineStage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

bool contains(const std::vector<std::string>& tokens, std::string_view word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

bool contains_any(const std::vector<std::string>& tokens, std::initializer_list<std::string_view> words) {
  return std::any_of(words.begin(), words.end(), [&](std::string_view w) { return contains(tokens, w); });
}

bool declines(const std::vector<std::string>& tokens) {
  if (contains(tokens, "no") && contains_any(tokens, {"thanks", "thank"})) return true;
  if (tokens.size() == 1 && tokens.front() == "no") return true;
  return contains_any(tokens, {"nothing", "bye", "goodbye"});
}

bool waits_for_question(DialogueState s) {
  switch (s) {
    case DialogueState::ExplainingProduct:
    case DialogueState::Dancing:
    case DialogueState::Singing:
    case DialogueState::PosingForPicture:
    case DialogueState::AnsweringFirstQuestion:
    case DialogueState::AskingAnythingElse:
      return true;
    default:
      return false;
  }
}

std::string turn_file_name(int turn) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "turn_%03d.wav", turn);
  return buf;
}

}  // namespace

std::string_view to_string(PipelineStage stage) noexcept {
  switch (stage) {
    case PipelineStage::Setup: return "setup";
    case PipelineStage::Recognition: return "recognition";
    case PipelineStage::GenderIdentification: return "gender";
    case PipelineStage::Dialogue: return "dialogue";
    case PipelineStage::Synthesis: return "synthesis";
    case PipelineStage::Output: return "output";
  }
  return "";
}

StageError::StageError(PipelineStage stage, const Error& cause)
    : Error(Preformatted{}, cause.code(), "[" + std::string(to_string(stage)) + "] " + cause.what()), stage_(stage) {}

std::optional<Condition> interpret_utterance(DialogueState state, std::string_view utterance,
                                             const RuleTable& rules) {
  const auto tokens = normalize(utterance);
  switch (state) {
    case DialogueState::AskingName:
      return tokens.empty() ? Condition::NotC : Condition::C;
    case DialogueState::GreetingByName:
      return tokens.empty() ? Condition::NotD : Condition::D;
    case DialogueState::AskingRequest:
      if (tokens.empty()) return Condition::NotH;
      if (declines(tokens)) return Condition::I;
      if (contains_any(tokens, {"dance", "dancing"})) return Condition::F;
      if (contains_any(tokens, {"sing", "singing", "song", "music"})) return Condition::G;
      if (contains_any(tokens, {"picture", "photo", "photograph"})) return Condition::J;
      if (contains(tokens, "product")) return Condition::E;
      return match(rules, utterance).matched ? Condition::H : Condition::NotH;
    default:
      break;
  }
  if (waits_for_question(state)) {
    // Only H and I leave "anything else?"; requests there are answered as questions.
    if (tokens.empty()) return Condition::NotH;
    if (declines(tokens)) return Condition::I;
    return match(rules, utterance).matched ? Condition::H : Condition::NotH;
  }
  return std::nullopt;
}

GuideSession::GuideSession(PipelineConfig config, std::shared_ptr<const SpeechRecognizer> recognizer,
                           std::shared_ptr<const SpeechSynthesizer> synthesizer, std::optional<GenderModel> model,
                           RuleTable rules)
    : config_(std::move(config)),
      recognizer_(std::move(recognizer)),
      synthesizer_(std::move(synthesizer)),
      model_(std::move(model)),
      engine_(std::move(rules)) {
  in_stage(PipelineStage::Setup, [&] { config_.validate(); });
}

GuideSession GuideSession::from_config(const PipelineConfig& config) {
  return in_stage(PipelineStage::Setup, [&] {
    AsrClientOptions asr;
    asr.endpoint = config.asr_endpoint;
    asr.language_tag = config.language_tag;
    asr.retries = config.asr_retries;
    asr.retry_delay = config.asr_retry_delay;
    std::optional<GenderModel> model;
    if (!config.model_path.empty()) model = load_model_file(config.model_path);
    RuleTable rules = config.rules_path ? load_rules_file(*config.rules_path) : default_rules();
    return GuideSession(config, std::make_shared<AsrClient>(std::move(asr)),
                        std::make_shared<ToneSynthesizer>(config.sample_rate_hz), std::move(model), std::move(rules));
  });
}

TurnRecord GuideSession::run_turn(const PcmSignal& audio, std::string source) {
  TurnRecord record;
  record.input_source = std::move(source);
  record.from_audio = true;
  record.state_before = context_.state;

  // Both stages read the same const signal.
  record.transcript = in_stage(PipelineStage::Recognition, [&] { return recognizer_->recognize(audio); });
  if (model_) {
    record.feature = in_stage(PipelineStage::GenderIdentification, [&] { return peak_feature(audio, config_.band); });
    record.gender = classify(*model_, *record.feature);
    context_.visitor_gender = record.gender;
  }

  const auto transition = in_stage(PipelineStage::Dialogue, [&] {
    record.condition = interpret_utterance(context_.state, record.transcript.text, engine_.rules());
    if (!record.condition) return Transition{context_, {}, {}};
    return engine_.advance(context_, *record.condition, record.transcript.text);
  });
  return finish_turn(std::move(record), transition);
}

TurnRecord GuideSession::run_text_turn(std::string_view text) {
  TurnRecord record;
  record.input_source = std::string(text);
  record.state_before = context_.state;
  record.transcript = Transcript{std::string(detail::trim(text)), std::nullopt};
  if (record.transcript.text.empty()) {
    record.state_after = context_.state;
    return record;
  }
  const auto transition = in_stage(PipelineStage::Dialogue, [&] {
    record.condition = interpret_utterance(context_.state, record.transcript.text, engine_.rules());
    if (!record.condition) return Transition{context_, {}, {}};
    return engine_.advance(context_, *record.condition, record.transcript.text);
  });
  return finish_turn(std::move(record), transition);
}

TurnRecord GuideSession::inject(Condition condition, std::string_view utterance, std::string source) {
  TurnRecord record;
  record.input_source = std::move(source);
  record.state_before = context_.state;
  record.condition = condition;
  const auto transition = in_stage(PipelineStage::Dialogue, [&] { return engine_.advance(context_, condition, utterance); });
  return finish_turn(std::move(record), transition);
}

TurnRecord GuideSession::face_absent(double seconds) {
  TurnRecord record;
  record.input_source = "<absent " + detail::format_double(seconds) + " s>";
  record.state_before = context_.state;
  const auto transition = in_stage(PipelineStage::Dialogue, [&] { return engine_.face_absent(context_, seconds); });
  if (!transition.steps.empty()) record.condition = Condition::Timeout20s;
  return finish_turn(std::move(record), transition);
}

TurnRecord GuideSession::finish_turn(TurnRecord record, const Transition& transition) {
  ++turn_counter_;
  context_ = transition.context;
  record.state_after = context_.state;
  record.actions = transition.actions;
  record.steps = transition.steps;

  std::vector<int16_t> speech;
  uint32_t rate = config_.sample_rate_hz;
  bool spoke = false;
  in_stage(PipelineStage::Synthesis, [&] {
    for (const auto& a : record.actions) {
      if (const auto* s = std::get_if<action::Speak>(&a)) {
        const auto signal = synthesizer_->synthesize(s->text);
        rate = signal.sample_rate_hz();
        speech.insert(speech.end(), signal.samples().begin(), signal.samples().end());
        spoke = true;
      }
    }
  });

  if (spoke && !config_.output_dir.empty()) {
    in_stage(PipelineStage::Output, [&] {
      std::error_code ec;
      std::filesystem::create_directories(config_.output_dir, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + config_.output_dir.string() + ": " + ec.message());
      const auto path = config_.output_dir / turn_file_name(turn_counter_);
      write_wav_file(path, PcmSignal(std::move(speech), rate));
      record.output_wav = path;
    });
  }
  return record;
}

std::vector<std::string> describe_turn(const TurnRecord& record) {
  std::vector<std::string> lines;
  if (record.from_audio) {
    lines.push_back("INPUT " + record.input_source);
    lines.push_back("TRANSCRIPT \"" + record.transcript.text + "\"");
  }
  if (record.feature) lines.push_back("PEAK " + detail::format_double(record.feature->peak_frequency_hz) + " Hz");
  if (record.gender) lines.push_back("GENDER " + std::string(to_string(*record.gender)));
  Transition t{{}, record.actions, record.steps};
  for (auto& line : trace_lines(t)) lines.push_back(std::move(line));
  if (record.output_wav) lines.push_back("WAV " + record.output_wav->string());
  return lines;
}

int run_conversation(GuideSession& session, std::istream& in, std::ostream& out, std::ostream& err) {
  int status = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = detail::trim(line);
    try {
      TurnRecord record;
      if (text == "/quit") break;
      if (text == "/person") {
        record = session.inject(Condition::A, {}, "/person");
      } else if (text.starts_with("/face")) {
        const auto name = detail::trim(text.substr(5));
        if (name.empty() || name == "unknown") {
          record = session.inject(Condition::NotB, {}, "/face unknown");
        } else {
          record = session.inject(Condition::B, name, "/face");
        }
      } else if (text == "/timeout") {
        record = session.inject(Condition::Timeout20s, {}, "/timeout");
      } else if (text.starts_with("/absent")) {
        const auto seconds = detail::parse_double(text.substr(7));
        if (!seconds || *seconds < 0) {
          err << "error: /absent needs a non-negative number of seconds\n";
          status = 1;
          continue;
        }
        record = session.face_absent(*seconds);
      } else if (text.starts_with("/wav")) {
        const std::string path(detail::trim(text.substr(4)));
        const auto audio = [&] {
          try {
            return read_wav_file(path);
          } catch (const Error& e) {
            throw StageError(PipelineStage::Setup, e);
          }
        }();
        record = session.run_turn(audio, path);
      } else if (!text.empty() && text.front() == '/') {
        err << "error: unknown command " << text << '\n';
        status = 1;
        continue;
      } else {
        record = session.run_text_turn(text);
      }
      for (const auto& l : describe_turn(record)) out << l << '\n';
      out.flush();
    } catch (const Error& e) {
      err << "error " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

}  // namespace guide
