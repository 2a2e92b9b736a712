#include "acu/report.hpp"

#include <cmath>
#include <sstream>

#include "json_util.hpp"

namespace acu {

using nlohmann::json;

namespace {

// Central difference over the neighbouring samples, one-sided at the ends.
std::vector<double> derivative(const std::vector<double>& t, const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    out[i] = (v[hi] - v[lo]) / (t[hi] - t[lo]);
  }
  return out;
}

template <typename Samples, typename Get>
std::vector<TrajectoryPoint> trajectory_of(const Samples& samples, Get position) {
  std::vector<TrajectoryPoint> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == samples.size() ? i : i + 1;
    const double dt = samples[hi].t - samples[lo].t;
    const double speed = dt > 0.0 ? (position(samples[hi]) - position(samples[lo])).norm() / dt : 0.0;
    out.push_back({samples[i].t, position(samples[i]), speed});
  }
  return out;
}

void rounded(json& j) {
  if (j.is_number_float()) {
    j = round6(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) rounded(child);
  }
}

std::string number(double v) { return json(round6(v)).dump(); }

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("report: missing '") + key + "'");
  return j.at(key);
}

}  // namespace

double round6(double v) {
  if (!std::isfinite(v)) return v;
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

double SessionReport::total() const {
  for (const auto& s : scores)
    if (s.name == primary) return s.total;
  return 0.0;
}

SessionReport build_report(const Session& session, const SessionAnalysis& analysis, std::vector<TechniqueScore> scores,
                           std::vector<Label> labels, double full_score, std::string primary) {
  SessionReport r;
  r.session_id = session_id(session);
  r.full_score = full_score;
  r.primary = std::move(primary);
  r.scores = std::move(scores);
  r.labels = std::move(labels);
  r.errors = analysis.errors;

  if (analysis.signal) {
    const auto& sig = *analysis.signal;
    const auto velocity = derivative(sig.t, sig.smoothed);
    for (std::size_t i = 0; i < sig.t.size(); ++i) {
      r.depth_vs_time.push_back({sig.t[i], sig.depth[i]});
      r.speed_profile.push_back({sig.t[i], velocity[i]});
    }
  }

  if (const auto* s = std::get_if<NeedleSession>(&session)) {
    r.technique = Technique::Acupuncture;
    r.target = s->target;
    if (analysis.twist && !analysis.twist->rotations.empty()) {
      const auto& first = analysis.twist->rotations.front();
      r.twist_snapshots.push_back({"start", s->samples[first.start_index].t, s->samples[first.start_index].hand});
      r.twist_snapshots.push_back({"end", s->samples[first.end_index].t, s->samples[first.end_index].hand});
    }
  } else if (const auto* s = std::get_if<MoxaSession>(&session)) {
    r.technique = Technique::Moxibustion;
    r.target = s->target;
    r.trajectory = trajectory_of(s->samples, [](const MoxaSample& m) { return m.head; });
    if (analysis.moxa) {
      for (std::size_t i = 0; i < r.trajectory.size(); ++i) r.trajectory[i].speed = analysis.moxa->speed[i];
    }
    for (const auto& p : r.trajectory) r.speed_profile.push_back({p.t, p.speed});
  } else if (const auto* s = std::get_if<PressSession>(&session)) {
    r.technique = Technique::Acupressure;
    r.target = s->target;
    r.trajectory = trajectory_of(s->samples, [](const PressSample& p) { return p.press; });
  }
  return r;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported format '" + std::string(s) + "'");
}

json report_to_json(const SessionReport& r) {
  json scores = json::array();
  for (const auto& s : r.scores)
    scores.push_back({{"name", s.name}, {"raw", s.raw}, {"weight", s.weight}, {"total", s.total}, {"breakdown", s.breakdown}});
  json labels = json::array();
  for (const auto& l : r.labels) labels.push_back({{"name", l.name}, {"actual", l.actual}, {"target", l.target}});
  json errors = json::array();
  for (const auto& e : r.errors) errors.push_back({{"code", e.code}, {"message", e.message}});

  json trajectory = json::array();
  for (const auto& p : r.trajectory)
    trajectory.push_back({{"t", p.t}, {"position", detail::vec3_to_json(p.position)}, {"speed", p.speed}});
  json snapshots = json::array();
  for (const auto& snap : r.twist_snapshots) {
    json joints = json::object();
    for (const auto& [name, p] : snap.joints) joints[name] = detail::vec3_to_json(p);
    snapshots.push_back({{"phase", snap.phase}, {"t", snap.t}, {"joints", joints}});
  }

  json j{{"schema_version", r.schema_version},
         {"session_id", r.session_id},
         {"technique", to_string(r.technique)},
         {"target", r.target},
         {"full_score", r.full_score},
         {"primary", r.primary},
         {"total", r.total()},
         {"scores", scores},
         {"labels", labels},
         {"errors", errors},
         {"series",
          {{"depth_vs_time", r.depth_vs_time},
           {"speed_profile", r.speed_profile},
           {"trajectory", trajectory},
           {"twist_snapshots", snapshots}}}};
  rounded(j);
  return j;
}

std::string emit_json(const SessionReport& report) { return report_to_json(report).dump(2) + "\n"; }

SessionReport report_from_json(const json& j) {
  try {
    SessionReport r;
    r.schema_version = field(j, "schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion)
      throw Error(ErrorCode::InvalidInput, "unsupported report schema_version " + std::to_string(r.schema_version));
    r.session_id = field(j, "session_id").get<std::string>();
    const auto technique = parse_technique(field(j, "technique").get<std::string>());
    if (!technique) throw Error(ErrorCode::InvalidInput, "report: unknown technique");
    r.technique = *technique;
    r.target = field(j, "target").get<std::string>();
    r.full_score = field(j, "full_score").get<double>();
    r.primary = field(j, "primary").get<std::string>();
    for (const auto& s : field(j, "scores")) {
      TechniqueScore ts;
      ts.name = field(s, "name").get<std::string>();
      ts.raw = field(s, "raw").get<double>();
      ts.weight = field(s, "weight").get<double>();
      ts.total = field(s, "total").get<double>();
      ts.breakdown = field(s, "breakdown").get<std::map<std::string, double>>();
      r.scores.push_back(std::move(ts));
    }
    for (const auto& l : field(j, "labels"))
      r.labels.push_back({field(l, "name").get<std::string>(), field(l, "actual").get<std::string>(),
                          field(l, "target").get<std::string>()});
    for (const auto& e : field(j, "errors"))
      r.errors.push_back({field(e, "code").get<std::string>(), field(e, "message").get<std::string>()});

    const auto& series = field(j, "series");
    r.depth_vs_time = field(series, "depth_vs_time").get<std::vector<std::array<double, 2>>>();
    r.speed_profile = field(series, "speed_profile").get<std::vector<std::array<double, 2>>>();
    for (const auto& p : field(series, "trajectory"))
      r.trajectory.push_back({field(p, "t").get<double>(),
                              detail::vec3_from_json(field(p, "position"), ErrorCode::InvalidInput, "trajectory"),
                              field(p, "speed").get<double>()});
    for (const auto& snap : field(series, "twist_snapshots")) {
      TwistSnapshot ts;
      ts.phase = field(snap, "phase").get<std::string>();
      ts.t = field(snap, "t").get<double>();
      for (const auto& [name, p] : field(snap, "joints").items())
        ts.joints.emplace(name, detail::vec3_from_json(p, ErrorCode::InvalidInput, "snapshot joint"));
      r.twist_snapshots.push_back(std::move(ts));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("report: ") + e.what());
  }
}

std::vector<EmittedFile> emit(const SessionReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return {{"report.json", emit_json(report)}};

  std::vector<EmittedFile> files;
  auto add = [&files](std::string name, const std::ostringstream& os) { files.push_back({std::move(name), os.str()}); };

  std::ostringstream scores;
  scores << "name,raw,weight,total\n";
  for (const auto& s : report.scores)
    scores << s.name << ',' << number(s.raw) << ',' << number(s.weight) << ',' << number(s.total) << '\n';
  add("scores.csv", scores);

  if (!report.depth_vs_time.empty()) {
    std::ostringstream os;
    os << "t,depth\n";
    for (const auto& [t, d] : report.depth_vs_time) os << number(t) << ',' << number(d) << '\n';
    add("depth_vs_time.csv", os);
  }
  if (!report.speed_profile.empty()) {
    std::ostringstream os;
    os << "t,speed\n";
    for (const auto& [t, v] : report.speed_profile) os << number(t) << ',' << number(v) << '\n';
    add("speed_profile.csv", os);
  }
  if (!report.trajectory.empty()) {
    std::ostringstream os;
    os << "t,x,y,z,speed\n";
    for (const auto& p : report.trajectory)
      os << number(p.t) << ',' << number(p.position.x()) << ',' << number(p.position.y()) << ','
         << number(p.position.z()) << ',' << number(p.speed) << '\n';
    add("trajectory.csv", os);
  }
  if (!report.twist_snapshots.empty()) {
    std::ostringstream os;
    os << "t,phase,joint,x,y,z\n";
    for (const auto& snap : report.twist_snapshots)
      for (const auto& [name, p] : snap.joints)
        os << number(snap.t) << ',' << snap.phase << ',' << name << ',' << number(p.x()) << ',' << number(p.y())
           << ',' << number(p.z()) << '\n';
    add("twist_snapshots.csv", os);
  }
  return files;
}

}  // namespace acu
