#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acu/manipulation.hpp"
#include "acu/scoring.hpp"
#include "acu/trace_io.hpp"

namespace acu {

inline constexpr int kReportSchemaVersion = 1;

struct ReportError {
  std::string code;
  std::string message;
  bool operator==(const ReportError&) const = default;
};

// Classified method next to the method the session was meant to perform.
struct Label {
  std::string name;
  std::string actual;
  std::string target;
  bool operator==(const Label&) const = default;
};

struct TrajectoryPoint {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double speed = 0.0;
};

struct TwistSnapshot {
  std::string phase;  // "start" or "end" of the first rotation
  double t = 0.0;
  HandJoints joints;
};

// Everything the classifiers extracted from one session. Fields stay empty
// when the corresponding stage failed; the failure is listed in `errors`.
struct SessionAnalysis {
  std::optional<InsertionEvent> insertion;
  std::optional<PenetrationSignal> signal;
  std::vector<LiftThrustCycle> cycles;
  std::optional<LiftThrustClassification> lift_thrust;
  std::optional<TwistSequence> twist;
  std::optional<Method> twist_method;
  std::optional<MoxaClassification> moxa;
  std::optional<double> press_deviation;
  std::vector<ReportError> errors;
};

struct SessionReport {
  int schema_version = kReportSchemaVersion;
  std::string session_id;
  Technique technique = Technique::Acupuncture;
  AcupointId target;
  double full_score = 100.0;
  std::string primary;  // name of the score that stands for the whole session
  std::vector<TechniqueScore> scores;
  std::vector<Label> labels;
  std::vector<std::array<double, 2>> depth_vs_time;
  std::vector<std::array<double, 2>> speed_profile;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<TwistSnapshot> twist_snapshots;
  std::vector<ReportError> errors;

  // Total of the primary score; 0 when it could not be computed.
  double total() const;
};

SessionReport build_report(const Session& session, const SessionAnalysis& analysis, std::vector<TechniqueScore> scores,
                           std::vector<Label> labels, double full_score, std::string primary);

enum class ReportFormat { Json, Csv };
ReportFormat parse_report_format(std::string_view s);  // throws UnsupportedFormat

struct EmittedFile {
  std::string name;
  std::string bytes;
};

// json: a single canonical document (sorted keys, values rounded to 6 decimals).
// csv: one file per non-empty series, header row "t,<columns>".
std::vector<EmittedFile> emit(const SessionReport& report, ReportFormat format);
std::string emit_json(const SessionReport& report);

nlohmann::json report_to_json(const SessionReport& report);
SessionReport report_from_json(const nlohmann::json& j);

// Value rounded to 6 decimals, with -0 folded to 0.
double round6(double v);

}  // namespace acu
