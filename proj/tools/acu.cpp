// acu: locate acupoints, score manipulation traces, generate synthetic traces.
//
// Exit codes: 0 ok, 2 input error, 3 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "acu/config.hpp"
#include "acu/evaluate.hpp"
#include "acu/projection.hpp"
#include "acu/report.hpp"
#include "acu/synth.hpp"
#include "acu/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

bool g_json_errors = false;

int exit_code_for(acu::ErrorCode code) { return code == acu::ErrorCode::InvalidConfig ? kExitConfig : kExitInput; }

int report_error(const std::string& code, const std::string& message, int exit_code) {
  if (g_json_errors) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}}}, {"exit_code", exit_code}}.dump() << '\n';
  } else {
    std::cerr << "acu: " << code << ": " << message << '\n';
  }
  return exit_code;
}

int report_error(const acu::Error& e) {
  return report_error(std::string(acu::to_string(e.code())), e.message(), exit_code_for(e.code()));
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw acu::Error(acu::ErrorCode::InvalidInput, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json parse_json(const std::string& text, const std::string& what, acu::ErrorCode code) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw acu::Error(code, what + ": " + e.what());
  }
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw acu::Error(acu::ErrorCode::InvalidInput, "cannot write " + path);
  out << bytes;
}

acu::GlobalConfig load_config(const std::string& flag) {
  std::string path = flag;
  if (path.empty()) {
    if (const char* env = std::getenv("ACU_CONFIG"); env && *env) path = env;
  }
  if (path.empty()) return acu::GlobalConfig{};
  return acu::GlobalConfig::load(path);
}

// ---- locate ----------------------------------------------------------------

struct LocateOptions {
  std::string skeleton;
  std::string table;
  std::string intrinsics;
  std::string format = "json";
  std::string out;
};

bool is_image_space(const json& j) {
  if (!j.contains("joints") || !j.at("joints").is_object()) return false;
  const auto& joints = j.at("joints");
  return std::any_of(joints.begin(), joints.end(), [](const json& v) { return v.is_object(); });
}

int cmd_locate(const LocateOptions& opt, const acu::GlobalConfig& cfg) {
  const auto format = acu::parse_report_format(opt.format);
  const acu::AcupointTable table = opt.table.empty() ? cfg.table : acu::AcupointTable::load(opt.table);

  std::optional<acu::CameraIntrinsics> intrinsics = cfg.intrinsics;
  if (!opt.intrinsics.empty())
    intrinsics = acu::CameraIntrinsics::from_json(
        parse_json(read_input(opt.intrinsics), opt.intrinsics, acu::ErrorCode::InvalidConfig));

  const json input = parse_json(read_input(opt.skeleton), opt.skeleton, acu::ErrorCode::InvalidInput);
  acu::SkeletonFrame frame;
  if (is_image_space(input)) {
    if (!intrinsics)
      throw acu::Error(acu::ErrorCode::InvalidConfig, "image-space skeleton needs camera intrinsics");
    frame = acu::frame_from_image_json(input, *intrinsics, cfg.min_joint_confidence);
  } else {
    frame = acu::SkeletonFrame::from_json(input, cfg.min_joint_confidence);
  }

  const auto result = acu::locate_all(table, frame);
  if (format == acu::ReportFormat::Json) {
    json points = json::object();
    for (const auto& [id, p] : result.positions)
      points[id] = {acu::round6(p.x()), acu::round6(p.y()), acu::round6(p.z())};
    json failures = json::array();
    for (const auto& f : result.failures)
      failures.push_back({{"id", f.id}, {"code", acu::to_string(f.code)}, {"message", f.message}});
    const json doc{{"table_version", table.version()},
                   {"timestamp", acu::round6(frame.timestamp)},
                   {"acupoints", points},
                   {"failures", failures}};
    write_output(opt.out, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "id,x,y,z\n";
    for (const auto& [id, p] : result.positions)
      os << id << ',' << json(acu::round6(p.x())).dump() << ',' << json(acu::round6(p.y())).dump() << ','
         << json(acu::round6(p.z())).dump() << '\n';
    write_output(opt.out, os.str());
  }

  if (!result.failures.empty()) {
    const auto& f = result.failures.front();
    return report_error(std::string(acu::to_string(f.code)),
                        std::to_string(result.failures.size()) + " acupoint(s) could not be located; first: " + f.id +
                            " (" + f.message + ")",
                        kExitInput);
  }
  return kExitOk;
}

// ---- score -----------------------------------------------------------------

struct ScoreOptions {
  std::vector<std::string> traces;
  std::string batch;
  std::string target_method;
  std::string target_type;
  std::string target_insertion;
  std::string format = "json";
  std::string out;
  unsigned jobs = 0;
};

acu::EvaluationTargets parse_targets(const ScoreOptions& opt) {
  acu::EvaluationTargets t;
  if (!opt.target_method.empty()) {
    t.method = acu::parse_method(opt.target_method);
    if (!t.method) throw acu::Error(acu::ErrorCode::InvalidInput, "unknown --target-method " + opt.target_method);
  }
  if (!opt.target_type.empty()) {
    t.moxa_type = acu::parse_moxa_type(opt.target_type);
    if (!t.moxa_type) throw acu::Error(acu::ErrorCode::InvalidInput, "unknown --target-type " + opt.target_type);
  }
  if (!opt.target_insertion.empty()) {
    t.insertion = acu::parse_insertion_class(opt.target_insertion);
    if (!t.insertion)
      throw acu::Error(acu::ErrorCode::InvalidInput, "unknown --target-insertion " + opt.target_insertion);
  }
  return t;
}

std::string summary_line(const acu::SessionReport& r) {
  std::string label = "-";
  for (const auto& l : r.labels)
    if (l.name == r.primary && !l.actual.empty()) label = l.actual;
  std::ostringstream os;
  os << r.session_id << ' ' << acu::to_string(r.technique) << ' ' << label << ' ' << json(acu::round6(r.total())).dump()
     << '/' << json(acu::round6(r.full_score)).dump();
  if (!r.errors.empty()) os << " [" << r.errors.front().code << ']';
  return os.str();
}

struct Outcome {
  std::optional<acu::SessionReport> report;
  std::optional<acu::Error> error;
};

Outcome score_one(const std::string& path, const acu::EvaluationTargets& targets, const acu::EvaluationContext& ctx) {
  try {
    std::istringstream in(read_input(path));
    const auto session = acu::read_trace(in);
    return {acu::evaluate(session, targets, ctx), std::nullopt};
  } catch (const acu::Error& e) {
    return {std::nullopt, acu::Error(e.code(), path + ": " + e.message())};
  }
}

std::vector<std::string> batch_inputs(const std::string& dir) {
  if (!fs::is_directory(dir)) throw acu::Error(acu::ErrorCode::InvalidInput, "not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw acu::Error(acu::ErrorCode::InvalidInput, "no .jsonl traces in " + dir);
  return files;
}

// Evaluates every input on a small worker pool; results keep input order.
std::vector<Outcome> score_all(const std::vector<std::string>& inputs, const acu::EvaluationTargets& targets,
                               const acu::EvaluationContext& ctx, unsigned jobs) {
  std::vector<Outcome> outcomes(inputs.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) outcomes[i] = score_one(inputs[i], targets, ctx);
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return outcomes;
}

std::string stem_of(const std::string& path) { return path == "-" ? "stdin" : fs::path(path).stem().string(); }

int cmd_score(const ScoreOptions& opt, const acu::GlobalConfig& cfg) {
  const auto format = acu::parse_report_format(opt.format);
  const auto targets = parse_targets(opt);
  const auto ctx = cfg.context();

  const bool batch = !opt.batch.empty();
  if (batch && !opt.traces.empty()) throw acu::Error(acu::ErrorCode::InvalidInput, "give traces or --batch, not both");
  const auto inputs = batch ? batch_inputs(opt.batch) : opt.traces;
  if (inputs.empty()) throw acu::Error(acu::ErrorCode::InvalidInput, "no trace given");

  const auto outcomes = score_all(inputs, targets, ctx, opt.jobs);

  std::string out_dir = opt.out.empty() ? cfg.output_dir : opt.out;
  const bool single_to_stream = !batch && inputs.size() == 1 && format == acu::ReportFormat::Json;
  if (!single_to_stream && out_dir.empty()) out_dir = ".";
  std::ostream& summary = single_to_stream && (opt.out.empty() || opt.out == "-") ? std::cerr : std::cout;

  int status = kExitOk;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.error) {
      status = std::max(status, report_error(*o.error));
      continue;
    }
    const auto files = acu::emit(*o.report, format);
    if (single_to_stream) {
      write_output(opt.out, files.front().bytes);
    } else {
      const std::string prefix = stem_of(inputs[i]);
      for (const auto& f : files) write_output((fs::path(out_dir) / (prefix + "." + f.name)).string(), f.bytes);
    }
    summary << summary_line(*o.report) << '\n';
  }
  return status;
}

// ---- synth -----------------------------------------------------------------

struct SynthOptions {
  std::string spec;
  std::string technique;
  std::string label;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_sigma;
  std::string out;
};

int cmd_synth(const SynthOptions& opt) {
  acu::SynthSpec spec;
  if (!opt.spec.empty()) {
    spec = acu::SynthSpec::from_json(parse_json(read_input(opt.spec), opt.spec, acu::ErrorCode::InvalidSpec));
  } else {
    if (opt.technique.empty()) throw acu::Error(acu::ErrorCode::InvalidSpec, "give a spec file or --technique");
    json j{{"technique", opt.technique}};
    if (!opt.label.empty()) j["label"] = opt.label;
    spec = acu::SynthSpec::from_json(j);
  }
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.noise_sigma) spec.noise_sigma = *opt.noise_sigma;
  write_output(opt.out, acu::trace_to_string(acu::generate(spec)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acupoint localization and acupuncture/moxibustion technique scoring"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Global configuration file (falls back to $ACU_CONFIG)");
  app.add_flag("--json-errors", g_json_errors, "Write errors to stderr as JSON");

  LocateOptions lo;
  auto* locate = app.add_subcommand("locate", "Locate acupoints on a skeleton frame");
  locate->add_option("skeleton", lo.skeleton, "Skeleton JSON file, or - for stdin")->required();
  locate->add_option("--table", lo.table, "Acupoint table JSON (overrides the config)");
  locate->add_option("--intrinsics", lo.intrinsics, "Camera intrinsics JSON for image-space skeletons");
  locate->add_option("--format", lo.format, "json or csv");
  locate->add_option("--out", lo.out, "Output file (default stdout)");

  ScoreOptions so;
  auto* score = app.add_subcommand("score", "Classify and score manipulation traces");
  score->add_option("traces", so.traces, "Trace JSON-lines files, or - for stdin");
  score->add_option("--batch", so.batch, "Score every .jsonl trace in a directory");
  score->add_option("--target-method", so.target_method, "reinforce or reduce");
  score->add_option("--target-type", so.target_type, "mild, sparrow or whirling");
  score->add_option("--target-insertion", so.target_insertion, "perpendicular, oblique or transverse");
  score->add_option("--format", so.format, "json or csv");
  score->add_option("--out", so.out, "Report file for a single JSON report, otherwise a directory");
  score->add_option("--jobs", so.jobs, "Worker threads for batch scoring (default: all cores)");

  SynthOptions yo;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic trace");
  synth->add_option("spec", yo.spec, "Synth spec JSON file, or - for stdin");
  synth->add_option("--technique", yo.technique, "lift_thrust, twist or moxibustion (when no spec file)");
  synth->add_option("--label", yo.label, "reinforce, reduce, mild, sparrow or whirling");
  synth->add_option("--seed", yo.seed, "Noise seed");
  synth->add_option("--noise-sigma", yo.noise_sigma, "Positional noise in cm");
  synth->add_option("--out", yo.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), kExitInput);
  }

  try {
    if (synth->parsed()) return cmd_synth(yo);
    const auto cfg = load_config(config_path);
    if (locate->parsed()) return cmd_locate(lo, cfg);
    return cmd_score(so, cfg);
  } catch (const acu::Error& e) {
    return report_error(e);
  } catch (const fs::filesystem_error& e) {
    return report_error("InvalidInput", e.what(), kExitInput);
  }
}
