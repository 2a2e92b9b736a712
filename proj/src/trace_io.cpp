#include "acu/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json_util.hpp"

namespace acu {

using nlohmann::json;

namespace {

constexpr auto kBad = ErrorCode::InvalidInput;

Vec3 vec(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw Error(kBad, where + ": missing '" + key + "'");
  return detail::vec3_from_json(obj.at(key), kBad, where + " '" + key + "'");
}

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) throw Error(kBad, where + ": missing numeric '" + key + "'");
  return obj.at(key).get<double>();
}

std::string text(const json& obj, const char* key, const std::string& fallback = "") {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw Error(kBad, std::string("header '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

std::string infer_kind(const json& header, const json* first_sample) {
  if (header.contains("kind")) return text(header, "kind");
  if (first_sample) {
    if (first_sample->contains("tip")) return "needle";
    if (first_sample->contains("head")) return "moxa";
    if (first_sample->contains("press")) return "press";
  }
  throw Error(kBad, "cannot determine trace kind; add \"kind\" to the header");
}

NeedleSession parse_needle(const json& h, const std::vector<json>& lines) {
  NeedleSession s;
  s.session_id = text(h, "session_id", "session");
  s.target = text(h, "target");
  s.skin_point = vec(h, "skin_point", "header");
  s.skin_normal = vec(h, "skin_normal", "header");
  const auto manip = text(h, "manipulation", "lift_thrust");
  if (manip == "lift_thrust")
    s.manipulation = NeedleManipulation::LiftThrust;
  else if (manip == "twist")
    s.manipulation = NeedleManipulation::Twist;
  else
    throw Error(kBad, "unknown manipulation '" + manip + "'");
  if (h.contains("target_method")) {
    s.target_method = parse_method(text(h, "target_method"));
    if (!s.target_method) throw Error(kBad, "unknown target_method");
  }
  if (h.contains("target_insertion")) {
    s.target_insertion = parse_insertion_class(text(h, "target_insertion"));
    if (!s.target_insertion) throw Error(kBad, "unknown target_insertion");
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const std::string where = "sample " + std::to_string(i + 1);
    NeedleSample smp;
    smp.t = number(l, "t", where);
    smp.tip = vec(l, "tip", where);
    smp.direction = vec(l, "dir", where);
    if (l.contains("hand")) {
      if (!l.at("hand").is_object()) throw Error(kBad, where + ": 'hand' must be an object");
      for (const auto& [name, p] : l.at("hand").items())
        smp.hand.emplace(name, detail::vec3_from_json(p, kBad, where + " hand " + name));
    }
    s.samples.push_back(std::move(smp));
  }
  return s;
}

MoxaSession parse_moxa(const json& h, const std::vector<json>& lines) {
  MoxaSession s;
  s.session_id = text(h, "session_id", "session");
  s.target = text(h, "target");
  s.target_pos = vec(h, "target_pos", "header");
  s.skin_normal = vec(h, "skin_normal", "header");
  if (h.contains("target_type")) {
    s.target_type = parse_moxa_type(text(h, "target_type"));
    if (!s.target_type) throw Error(kBad, "unknown target_type");
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "sample " + std::to_string(i + 1);
    s.samples.push_back({number(lines[i], "t", where), vec(lines[i], "head", where)});
  }
  return s;
}

PressSession parse_press(const json& h, const std::vector<json>& lines) {
  PressSession s;
  s.session_id = text(h, "session_id", "session");
  s.target = text(h, "target");
  s.target_pos = vec(h, "target_pos", "header");
  if (h.contains("region")) {
    s.region = parse_region(text(h, "region"));
    if (!s.region) throw Error(kBad, "unknown region");
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "sample " + std::to_string(i + 1);
    s.samples.push_back({number(lines[i], "t", where), vec(lines[i], "press", where)});
  }
  return s;
}

}  // namespace

const std::string& session_id(const Session& s) {
  return std::visit([](const auto& v) -> const std::string& { return v.session_id; }, s);
}

Session read_trace(std::istream& in) {
  std::vector<json> objects;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      objects.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(kBad, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!objects.back().is_object()) throw Error(kBad, "line " + std::to_string(lineno) + ": expected an object");
  }
  if (objects.empty()) throw Error(kBad, "empty trace");
  const json header = objects.front();
  const std::vector<json> samples(objects.begin() + 1, objects.end());
  const auto kind = infer_kind(header, samples.empty() ? nullptr : &samples.front());

  try {
    if (kind == "needle") {
      auto s = parse_needle(header, samples);
      s.validate();
      return s;
    }
    if (kind == "moxa") {
      auto s = parse_moxa(header, samples);
      s.validate();
      return s;
    }
    if (kind == "press") {
      auto s = parse_press(header, samples);
      s.validate();
      return s;
    }
  } catch (const json::exception& e) {
    throw Error(kBad, e.what());
  }
  throw Error(kBad, "unknown trace kind '" + kind + "'");
}

Session read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(kBad, "cannot open trace " + path);
  return read_trace(in);
}

void write_trace(std::ostream& out, const Session& session) {
  std::visit(
      [&out](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        json h;
        h["session_id"] = s.session_id;
        h["target"] = s.target;
        if constexpr (std::is_same_v<T, NeedleSession>) {
          h["kind"] = "needle";
          h["skin_point"] = detail::vec3_to_json(s.skin_point);
          h["skin_normal"] = detail::vec3_to_json(s.skin_normal);
          h["manipulation"] = s.manipulation == NeedleManipulation::Twist ? "twist" : "lift_thrust";
          if (s.target_method) h["target_method"] = to_string(*s.target_method);
          if (s.target_insertion) h["target_insertion"] = to_string(*s.target_insertion);
          out << h.dump() << '\n';
          for (const auto& smp : s.samples) {
            json l{{"t", smp.t}, {"tip", detail::vec3_to_json(smp.tip)}, {"dir", detail::vec3_to_json(smp.direction)}};
            if (!smp.hand.empty()) {
              json hand = json::object();
              for (const auto& [name, p] : smp.hand) hand[name] = detail::vec3_to_json(p);
              l["hand"] = hand;
            }
            out << l.dump() << '\n';
          }
        } else if constexpr (std::is_same_v<T, MoxaSession>) {
          h["kind"] = "moxa";
          h["target_pos"] = detail::vec3_to_json(s.target_pos);
          h["skin_normal"] = detail::vec3_to_json(s.skin_normal);
          if (s.target_type) h["target_type"] = to_string(*s.target_type);
          out << h.dump() << '\n';
          for (const auto& smp : s.samples)
            out << json{{"t", smp.t}, {"head", detail::vec3_to_json(smp.head)}}.dump() << '\n';
        } else {
          h["kind"] = "press";
          h["target_pos"] = detail::vec3_to_json(s.target_pos);
          if (s.region) h["region"] = to_string(*s.region);
          out << h.dump() << '\n';
          for (const auto& smp : s.samples)
            out << json{{"t", smp.t}, {"press", detail::vec3_to_json(smp.press)}}.dump() << '\n';
        }
      },
      session);
}

std::string trace_to_string(const Session& session) {
  std::ostringstream os;
  write_trace(os, session);
  return os.str();
}

}  // namespace acu
