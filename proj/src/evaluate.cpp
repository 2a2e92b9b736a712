#include "acu/evaluate.hpp"

#include <algorithm>

namespace acu {

namespace {

ReportError to_report_error(const Error& e) { return {std::string(to_string(e.code())), e.message()}; }

void analyze_needle(const NeedleSession& s, const Thresholds& thr, SessionAnalysis& a) {
  a.insertion = detect_insertion(s, thr);
  a.signal = penetration_signal(s, *a.insertion, thr);
  if (s.manipulation == NeedleManipulation::LiftThrust) {
    a.cycles = segment_lift_thrust(*a.signal, thr);
    a.lift_thrust = classify_lift_thrust(a.cycles, thr.speed_margin);
  } else {
    a.twist = segment_twists(s, thr, a.insertion->start_index);
    a.twist_method = classify_twist(*a.twist);
  }
}

const AcupointDef* lookup(const AcupointId& id, const EvaluationContext& ctx) {
  return ctx.table ? ctx.table->find(id) : nullptr;
}

ScoringConfig config_for(const AcupointId& id, const EvaluationContext& ctx) {
  const auto* def = lookup(id, ctx);
  if (def && def->needling) return ctx.scoring.with_needling(*def->needling);
  return ctx.scoring;
}

// Deep and shallow depths from the first two cycles, in the order the
// classified method prescribes.
std::pair<double, double> deep_and_shallow(const std::vector<LiftThrustCycle>& c, LiftThrustMethod m) {
  const double first = c[0].depth;
  const double second = c[1].depth;
  switch (m) {
    case LiftThrustMethod::Reinforce: return {first, second};
    case LiftThrustMethod::Reduce: return {second, first};
    case LiftThrustMethod::Ineffective: break;
  }
  return {std::max(first, second), std::min(first, second)};
}

std::string name_or_empty(const auto& opt) { return opt ? std::string(to_string(*opt)) : std::string(); }

}  // namespace

Thresholds thresholds_for_target(const AcupointId& target, const EvaluationContext& ctx) {
  Thresholds thr = ctx.thresholds;
  if (!ctx.contact_radius_from_region) return thr;
  if (const auto* def = lookup(target, ctx)) thr.contact_radius = ctx.scoring.radii(def->region).r_min;
  return thr;
}

SessionAnalysis analyze(const Session& session, const Thresholds& thresholds) {
  SessionAnalysis a;
  try {
    if (const auto* s = std::get_if<NeedleSession>(&session)) {
      analyze_needle(*s, thresholds, a);
    } else if (const auto* s = std::get_if<MoxaSession>(&session)) {
      a.moxa = classify_moxibustion(*s, thresholds);
    } else {
      a.press_deviation = pressing_deviation(std::get<PressSession>(session));
    }
  } catch (const Error& e) {
    a.errors.push_back(to_report_error(e));
  }
  return a;
}

SessionReport evaluate(const Session& session, const EvaluationTargets& targets, const EvaluationContext& ctx) {
  std::vector<TechniqueScore> scores;
  std::vector<Label> labels;
  std::string primary;
  SessionAnalysis analysis;
  double full_score = ctx.scoring.full_score;

  if (const auto* s = std::get_if<NeedleSession>(&session)) {
    const auto method = targets.method ? targets.method : s->target_method;
    if (!method) throw Error(ErrorCode::InvalidInput, "no target method given for needle session " + s->session_id);
    const auto insertion_target = targets.insertion ? targets.insertion : s->target_insertion;
    const ScoringConfig cfg = config_for(s->target, ctx);
    full_score = cfg.full_score;
    analysis = analyze(session, thresholds_for_target(s->target, ctx));
    const bool twist = s->manipulation == NeedleManipulation::Twist;
    primary = twist ? "twist" : "lift_thrust";

    try {
      if (analysis.insertion) {
        labels.push_back({"insertion", std::string(to_string(analysis.insertion->insertion_class)),
                          name_or_empty(insertion_target)});
        if (insertion_target) scores.push_back(score_insertion(analysis.insertion->angle_deg, *insertion_target, cfg));
      }
      if (analysis.lift_thrust) {
        const auto actual = analysis.lift_thrust->method;
        const auto [deep, shallow] = deep_and_shallow(analysis.cycles, actual);
        labels.push_back({primary, std::string(to_string(actual)), std::string(to_string(*method))});
        scores.push_back(score_lift_thrust(deep, shallow, actual, *method, cfg));
      } else if (analysis.twist_method) {
        labels.push_back({primary, std::string(to_string(*analysis.twist_method)), std::string(to_string(*method))});
        scores.push_back(score_twist(analysis.twist->n_total, *analysis.twist_method, *method, cfg));
      } else {
        labels.push_back({primary, "", std::string(to_string(*method))});
      }
    } catch (const Error& e) {
      analysis.errors.push_back(to_report_error(e));
    }
  } else if (const auto* s = std::get_if<MoxaSession>(&session)) {
    const auto type = targets.moxa_type ? targets.moxa_type : s->target_type;
    if (!type) throw Error(ErrorCode::InvalidInput, "no target moxibustion type given for session " + s->session_id);
    analysis = analyze(session, ctx.thresholds);
    primary = "moxibustion";
    try {
      if (analysis.moxa) {
        labels.push_back({primary, std::string(to_string(analysis.moxa->type)), std::string(to_string(*type))});
        scores.push_back(score_moxibustion(analysis.moxa->d_moxi, analysis.moxa->type, *type, ctx.scoring));
      } else {
        labels.push_back({primary, "", std::string(to_string(*type))});
      }
    } catch (const Error& e) {
      analysis.errors.push_back(to_report_error(e));
    }
  } else {
    const auto& press = std::get<PressSession>(session);
    analysis = analyze(session, ctx.thresholds);
    primary = "acupressure";
    Region region = Region::Hand;
    if (press.region) {
      region = *press.region;
    } else if (const auto* def = lookup(press.target, ctx)) {
      region = def->region;
    }
    try {
      if (analysis.press_deviation)
        scores.push_back(score_acupressure_technique(*analysis.press_deviation, region, ctx.scoring));
    } catch (const Error& e) {
      analysis.errors.push_back(to_report_error(e));
    }
  }
  return build_report(session, analysis, std::move(scores), std::move(labels), full_score, std::move(primary));
}

}  // namespace acu
