#pragma once

#include <optional>

#include "acu/anatomy.hpp"
#include "acu/manipulation.hpp"
#include "acu/report.hpp"
#include "acu/scoring.hpp"
#include "acu/trace_io.hpp"

namespace acu {

// What the trainee was asked to do. Unset fields fall back to the trace header.
struct EvaluationTargets {
  std::optional<Method> method;
  std::optional<MoxaType> moxa_type;
  std::optional<InsertionClass> insertion;
};

struct EvaluationContext {
  ScoringConfig scoring;
  Thresholds thresholds;
  bool contact_radius_from_region = true;  // use the target's PC radius
  const AcupointTable* table = nullptr;     // optional; supplies region and needling
};

SessionAnalysis analyze(const Session& session, const Thresholds& thresholds);

// Classify, score and assemble the report for one session. Classification
// failures end up in report.errors; only an unset target throws (InvalidInput).
SessionReport evaluate(const Session& session, const EvaluationTargets& targets, const EvaluationContext& ctx);

// Thresholds with the contact radius replaced by the precise-criterion radius
// of the target's region (if the target is in the table).
Thresholds thresholds_for_target(const AcupointId& target, const EvaluationContext& ctx);

}  // namespace acu
