#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guide/config.hpp"
#include "guide/dialogue_engine.hpp"
#include "guide/errors.hpp"
#include "guide/gender_id.hpp"
#include "guide/qa_responder.hpp"
#include "guide/speech_services.hpp"

namespace guide {

enum class PipelineStage { Setup, Recognition, GenderIdentification, Dialogue, Synthesis, Output };

std::string_view to_string(PipelineStage stage) noexcept;

/// A library error annotated with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(PipelineStage stage, const Error& cause);

  PipelineStage stage() const noexcept { return stage_; }

 private:
  PipelineStage stage_;
};

struct TurnRecord {
  std::string input_source;
  bool from_audio = false;
  Transcript transcript;
  std::optional<SpectralFeature> feature;
  std::optional<GenderLabel> gender;
  std::optional<Condition> condition;
  DialogueState state_before = DialogueState::Standby;
  DialogueState state_after = DialogueState::Standby;
  std::vector<RobotAction> actions;
  std::vector<Step> steps;
  std::optional<std::filesystem::path> output_wav;
};

/// Maps what the visitor said to the condition the current state waits
/// for. Returns nothing in states that only react to vision events.
std::optional<Condition> interpret_utterance(DialogueState state, std::string_view utterance, const RuleTable& rules);

/// One visitor conversation: audio or typed input in, robot actions out.
///
/// Audio turns run recognition and gender identification on the same
/// signal; the transcript drives the dialogue, and the gender only picks
/// the honorific. Speak actions are synthesized to
/// `<output_dir>/turn_NNN.wav` when an output directory is configured.
class GuideSession {
 public:
  GuideSession(PipelineConfig config, std::shared_ptr<const SpeechRecognizer> recognizer,
               std::shared_ptr<const SpeechSynthesizer> synthesizer, std::optional<GenderModel> model,
               RuleTable rules = default_rules());

  /// Builds the HTTP recognizer, the tone synthesizer, and loads the model
  /// and rule files named in the config. Errors are tagged Setup.
  static GuideSession from_config(const PipelineConfig& config);

  TurnRecord run_turn(const PcmSignal& audio, std::string source = "<audio>");
  /// Typed input skips recognition and gender identification. Blank input
  /// changes nothing.
  TurnRecord run_text_turn(std::string_view text);
  /// Feeds a condition directly, as the vision side would.
  TurnRecord inject(Condition condition, std::string_view utterance = {}, std::string source = "<event>");
  TurnRecord face_absent(double seconds);

  const SessionContext& context() const noexcept { return context_; }
  const PipelineConfig& config() const noexcept { return config_; }
  const std::optional<GenderModel>& model() const noexcept { return model_; }

 private:
  TurnRecord finish_turn(TurnRecord record, const Transition& transition);

  PipelineConfig config_;
  std::shared_ptr<const SpeechRecognizer> recognizer_;
  std::shared_ptr<const SpeechSynthesizer> synthesizer_;
  std::optional<GenderModel> model_;
  DialogueEngine engine_;
  SessionContext context_;
  int turn_counter_ = 0;
};

/// Line-driven conversation loop. Lines starting with '/' are commands:
///   /person          a visitor stands in view (A)
///   /face <name>     face recognized as name (B); `/face unknown` is !B
///   /timeout         face out of view for 20 s
///   /absent <sec>    face out of view for that many seconds
///   /wav <path>      an audio turn from a WAV file
///   /quit            stop
/// Anything else is a typed utterance. Writes trace lines to out and errors
/// to err. Returns 0, or 1 if any turn failed.
int run_conversation(GuideSession& session, std::istream& in, std::ostream& out, std::ostream& err);

/// The lines run_conversation prints for one turn.
std::vector<std::string> describe_turn(const TurnRecord& record);

}  // namespace guide
