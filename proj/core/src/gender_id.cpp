#include "guide/gender_id.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "guide/errors.hpp"
#include "text_util.hpp"

namespace guide {

namespace {

double mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::string join_peaks(std::span<const double> peaks) {
  std::string out;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (i) out += ',';
    out += detail::format_double(peaks[i]);
  }
  return out;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedModelFile, what); }

std::vector<double> parse_peaks(const std::string& key, std::string_view value) {
  std::vector<double> peaks;
  if (detail::trim(value).empty()) malformed(key + " is empty");
  for (auto item : detail::split(value, ',')) {
    const auto parsed = detail::parse_double(item);
    if (!parsed || !std::isfinite(*parsed)) malformed(key + " has a non-numeric entry '" + std::string(item) + "'");
    peaks.push_back(*parsed);
  }
  return peaks;
}

double parse_scalar(const std::string& key, std::string_view value) {
  const auto parsed = detail::parse_double(value);
  if (!parsed || !std::isfinite(*parsed)) malformed(key + " is not a number");
  return *parsed;
}

}  // namespace

std::string_view to_string(GenderLabel label) noexcept {
  return label == GenderLabel::Female ? "female" : "male";
}

std::optional<GenderLabel> parse_gender_label(std::string_view text) {
  std::string lower;
  for (char c : detail::trim(text)) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "female" || lower == "f") return GenderLabel::Female;
  if (lower == "male" || lower == "m") return GenderLabel::Male;
  return std::nullopt;
}

GenderModel::GenderModel(std::vector<double> male, std::vector<double> female, FrequencyBand band)
    : male_peaks_hz_(std::move(male)), female_peaks_hz_(std::move(female)), band_(band) {
  threshold_hz_ = (mean(male_peaks_hz_) + mean(female_peaks_hz_)) / 2.0;
}

GenderModel GenderModel::from_peaks(std::vector<double> male_peaks_hz, std::vector<double> female_peaks_hz,
                                    FrequencyBand band) {
  if (male_peaks_hz.empty()) throw Error(ErrorCode::EmptyClass, "no male training samples");
  if (female_peaks_hz.empty()) throw Error(ErrorCode::EmptyClass, "no female training samples");
  return GenderModel(std::move(male_peaks_hz), std::move(female_peaks_hz), band);
}

long GenderModel::display_threshold_hz() const noexcept { return std::lround(threshold_hz_); }

double GenderModel::male_mean_hz() const noexcept { return mean(male_peaks_hz_); }
double GenderModel::female_mean_hz() const noexcept { return mean(female_peaks_hz_); }

std::vector<std::string> GenderModel::warnings() const {
  std::vector<std::string> out;
  const double male = male_mean_hz();
  const double female = female_mean_hz();
  if (male == female) {
    out.push_back("class means are equal; the threshold cannot separate the classes");
  } else if (male > female) {
    out.push_back("male mean exceeds female mean; classification will be inverted");
  }
  const double male_max = *std::max_element(male_peaks_hz_.begin(), male_peaks_hz_.end());
  const double female_min = *std::min_element(female_peaks_hz_.begin(), female_peaks_hz_.end());
  if (male_max >= female_min) {
    out.push_back("training classes overlap: highest male peak " + detail::format_double(male_max) +
                  " Hz >= lowest female peak " + detail::format_double(female_min) + " Hz");
  }
  return out;
}

GenderModel train(std::span<const PcmSignal> male_samples, std::span<const PcmSignal> female_samples,
                  FrequencyBand band) {
  if (male_samples.empty()) throw Error(ErrorCode::EmptyClass, "no male training samples");
  if (female_samples.empty()) throw Error(ErrorCode::EmptyClass, "no female training samples");
  auto peaks = [&](std::span<const PcmSignal> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(peak_feature(s, band).peak_frequency_hz);
    return out;
  };
  return GenderModel::from_peaks(peaks(male_samples), peaks(female_samples), band);
}

GenderModel train_from_peaks(std::span<const double> male_peaks_hz, std::span<const double> female_peaks_hz,
                             FrequencyBand band) {
  return GenderModel::from_peaks({male_peaks_hz.begin(), male_peaks_hz.end()},
                                 {female_peaks_hz.begin(), female_peaks_hz.end()}, band);
}

GenderLabel classify_frequency(const GenderModel& model, double peak_frequency_hz) noexcept {
  return peak_frequency_hz > model.threshold_hz() ? GenderLabel::Female : GenderLabel::Male;
}

GenderLabel classify(const GenderModel& model, const SpectralFeature& feature) noexcept {
  return classify_frequency(model, feature.peak_frequency_hz);
}

std::size_t EvaluationReport::correct() const noexcept {
  return static_cast<std::size_t>(std::count_if(per_sample.begin(), per_sample.end(),
                                                [](const EvaluationOutcome& o) { return o.correct(); }));
}

EvaluationReport evaluate(const GenderModel& model, std::span<const LabeledFeature> labeled) {
  if (labeled.empty()) throw Error(ErrorCode::EmptyClass, "no labeled samples to evaluate");
  EvaluationReport report;
  report.per_sample.reserve(labeled.size());
  for (const auto& item : labeled) report.per_sample.push_back({item.expected, classify(model, item.feature)});
  report.accuracy_percent = 100.0 * static_cast<double>(report.correct()) / static_cast<double>(report.total());
  return report;
}

std::string save_model(const GenderModel& model) {
  std::ostringstream out;
  out << "threshold_hz = " << detail::format_double(model.threshold_hz()) << '\n'
      << "band_low_hz = " << detail::format_double(model.band().low_hz) << '\n'
      << "band_high_hz = " << detail::format_double(model.band().high_hz) << '\n'
      << "male_peaks_hz = " << join_peaks(model.male_peaks_hz()) << '\n'
      << "female_peaks_hz = " << join_peaks(model.female_peaks_hz()) << '\n';
  return out.str();
}

GenderModel load_model(std::string_view text) {
  static const std::set<std::string> kKeys{"threshold_hz", "band_low_hz", "band_high_hz", "male_peaks_hz",
                                           "female_peaks_hz"};
  const auto parsed = detail::parse_key_values(text);
  if (parsed.bad_line) malformed("line " + std::to_string(*parsed.bad_line) + " is not 'key = value'");

  std::map<std::string, std::string> values;
  for (const auto& entry : parsed.entries) {
    if (!kKeys.contains(entry.key)) malformed("unknown key '" + entry.key + "'");
    if (!values.emplace(entry.key, entry.value).second) malformed("duplicate key '" + entry.key + "'");
  }
  for (const auto& key : kKeys) {
    if (!values.contains(key)) malformed("missing key '" + key + "'");
  }

  const FrequencyBand band{parse_scalar("band_low_hz", values["band_low_hz"]),
                           parse_scalar("band_high_hz", values["band_high_hz"])};
  if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz)) malformed("band is not an increasing range");

  auto model = GenderModel::from_peaks(parse_peaks("male_peaks_hz", values["male_peaks_hz"]),
                                       parse_peaks("female_peaks_hz", values["female_peaks_hz"]), band);
  const double stored = parse_scalar("threshold_hz", values["threshold_hz"]);
  if (std::abs(stored - model.threshold_hz()) > 1e-9 * std::max(1.0, std::abs(model.threshold_hz()))) {
    malformed("threshold_hz " + detail::format_double(stored) + " disagrees with the peak midpoint " +
              detail::format_double(model.threshold_hz()));
  }
  return model;
}

GenderModel load_model_file(const std::filesystem::path& path) { return load_model(detail::read_text_file(path)); }

void save_model_file(const std::filesystem::path& path, const GenderModel& model) {
  detail::write_text_file(path, save_model(model));
}

}  // namespace guide
