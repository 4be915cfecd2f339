#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tutor/content.hpp"
#include "tutor/demo_pack.hpp"
#include "tutor/event_codec.hpp"
#include "tutor/http_api.hpp"
#include "tutor/replay.hpp"
#include "tutor/rule_codec.hpp"
#include "tutor/simulate.hpp"

namespace fs = std::filesystem;
using tutor::ErrorCode;
using Json = nlohmann::ordered_json;

namespace {

enum class Format { Text, Ndjson };

tutor::ApiServer* g_server = nullptr;

void diagnostic(Format format, std::string_view code, const std::string& subject, const std::string& detail) {
  if (format == Format::Ndjson) {
    std::cerr << Json{{"code", code}, {"subject", subject}, {"detail", detail}}.dump() << "\n";
  } else {
    std::cerr << code << ": " << subject << (detail.empty() ? "" : ": " + detail) << "\n";
  }
}

bool io_error(ErrorCode code) { return code == ErrorCode::MissingManifest || code == ErrorCode::MalformedFile; }

tutor::RuleSet rules_for(const fs::path& pack_root) {
  auto rules = tutor::load_rules(pack_root);
  return rules ? *rules : tutor::default_policy();
}

tutor::KnowledgeLevel parse_threshold(const std::string& name) {
  auto level = tutor::parse_level(name);
  if (!level) throw tutor::TutorError(ErrorCode::InvalidField, "threshold", name);
  return *level;
}

int run_validate(const fs::path& root, Format format) {
  const auto report = tutor::load_pack_checked(root);
  int status = 0;
  for (const auto& d : report.diagnostics) {
    diagnostic(format, tutor::to_string(d.code), d.subject, d.detail);
    status = std::max(status, io_error(d.code) ? 2 : 1);
  }
  if (!report.pack) return status == 0 ? 2 : status;

  try {
    for (const auto& d : tutor::validate_rules(rules_for(root))) {
      diagnostic(format, tutor::diagnostic_name(d.kind), d.rule_id, d.detail);
      status = std::max(status, 1);
    }
  } catch (const tutor::TutorError& e) {
    diagnostic(format, tutor::to_string(e.code()), e.subject(), e.detail());
    status = std::max(status, io_error(e.code()) ? 2 : 1);
  }
  if (status == 0) {
    const auto& pack = *report.pack;
    if (format == Format::Ndjson) {
      std::cout << Json{{"pack_id", pack.pack_id},
                        {"version", pack.version},
                        {"concepts", pack.concepts.size()},
                        {"lessons", pack.lessons.size()},
                        {"questions", pack.questions.size()},
                        {"status", "ok"}}
                       .dump()
                << "\n";
    } else {
      std::cout << pack.pack_id << " " << pack.version << ": " << pack.concepts.size() << " concepts, "
                << pack.lessons.size() << " lessons, " << pack.questions.size() << " questions; ok\n";
    }
  }
  return status;
}

int run_seed(const fs::path& root, const std::optional<fs::path>& glossary, Format format) {
  const auto pack = tutor::demo_pack();
  tutor::write_pack(pack, root);
  fs::create_directories(root / "rules");
  std::ofstream(root / "rules" / "default.json") << tutor::rules_to_json(tutor::default_policy()).dump(2) << "\n";
  if (glossary) std::ofstream(*glossary) << tutor::demo_glossary();
  if (format == Format::Ndjson) {
    std::cout << Json{{"pack", root.string()}, {"pack_id", pack.pack_id}}.dump() << "\n";
  } else {
    std::cout << "wrote " << pack.pack_id << " to " << root.string() << "\n";
  }
  return 0;
}

int run_simulate(const fs::path& root, tutor::CohortSpec spec, const std::optional<fs::path>& out,
                 const std::optional<fs::path>& log, Format format) {
  const auto pack = tutor::load_pack(root);
  spec.keep_events = log.has_value();
  const auto report = tutor::simulate(pack, rules_for(root), spec);
  const auto text = format == Format::Ndjson ? tutor::report_ndjson(report) : tutor::report_text(report);
  if (out) {
    std::ofstream(*out) << tutor::report_ndjson(report);
  }
  std::cout << text;
  if (log) {
    std::ofstream file(*log);
    for (const auto& learner : report.learners) {
      for (const auto& event : learner.events) file << tutor::encode_event(event) << "\n";
    }
  }
  return 0;
}

int run_replay(const fs::path& path, tutor::KnowledgeLevel threshold, Format format) {
  if (!fs::exists(path)) {
    diagnostic(format, "MissingFile", path.string(), "");
    return 2;
  }
  const auto report = tutor::verify_log(path, tutor::ModelConfig{threshold});
  if (const auto& v = report.violation) {
    if (format == Format::Ndjson) {
      std::cerr << Json{{"invariant", v->invariant},
                        {"code", tutor::to_string(v->code)},
                        {"learner_id", v->learner_id},
                        {"sequence_no", v->sequence_no},
                        {"message", v->message}}
                       .dump()
                << "\n";
    } else {
      std::cerr << v->invariant << " violated (" << tutor::to_string(v->code) << ") for " << v->learner_id
                << " at sequence " << v->sequence_no << ": " << v->message << "\n";
    }
    return 1;
  }
  if (format == Format::Ndjson) {
    std::cout << Json{{"events", report.events}, {"learners", report.states.size()}, {"status", "ok"}}.dump() << "\n";
  } else {
    std::cout << report.events << " events, " << report.states.size() << " learners; ok\n";
  }
  return 0;
}

int run_serve(const fs::path& root, const std::string& listen, const fs::path& log, tutor::TutorConfig config) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw tutor::TutorError(ErrorCode::InvalidField, "listen", listen);
  const auto host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));

  config.event_log = log;
  tutor::Tutor service(tutor::load_pack(root), rules_for(root), tutor::backend_from_env(), config);
  tutor::ApiServer server(service);
  if (!server.bind(host, port)) {
    std::cerr << "cannot listen on " << listen << "\n";
    return 2;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << "listening on " << listen << "\n";
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive tutor: content packs, cohort simulation, event-log replay and the HTTP service"};
  app.require_subcommand(1);
  app.fallthrough();

  Format format = Format::Text;
  const std::map<std::string, Format> formats{{"text", Format::Text}, {"ndjson", Format::Ndjson}};
  app.add_option("--format", format, "Output format")->transform(CLI::CheckedTransformer(formats))->capture_default_str();

  fs::path pack_root;
  std::string threshold = "Good";

  auto* validate = app.add_subcommand("validate", "Check a content pack and its rules");
  validate->add_option("pack", pack_root, "Content pack directory")->required();

  auto* seed = app.add_subcommand("seed", "Write the demo content pack");
  std::optional<fs::path> glossary;
  seed->add_option("dir", pack_root, "Destination directory")->required();
  seed->add_option("--glossary", glossary, "Also write a demo glossary (TSV) here");

  auto* simulate = app.add_subcommand("simulate", "Run a synthetic-learner cohort");
  tutor::CohortSpec spec;
  std::optional<fs::path> out;
  std::optional<fs::path> log;
  simulate->add_option("pack", pack_root, "Content pack directory")->required();
  simulate->add_option("--count", spec.count, "Learners")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--ability", spec.ability, "Probability of a correct answer")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--seed", spec.seed, "Run seed")->capture_default_str();
  simulate->add_option("--step-cap", spec.step_cap, "Steps per learner")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--threshold", threshold, "Advancement threshold level")->capture_default_str();
  simulate->add_option("--out", out, "Write the NDJSON report here");
  simulate->add_option("--log", log, "Write the combined event log here");

  auto* replay = app.add_subcommand("replay", "Rebuild and verify an event log");
  fs::path log_path;
  replay->add_option("log", log_path, "Event log (NDJSON)")->required();
  replay->add_option("--threshold", threshold, "Advancement threshold level")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Serve the /v1 HTTP API");
  std::string listen = "127.0.0.1:8080";
  fs::path serve_log = "events.ndjson";
  tutor::TutorConfig config;
  serve->add_option("--pack", pack_root, "Content pack directory")->required();
  serve->add_option("--listen", listen, "host:port")->capture_default_str();
  serve->add_option("--log", serve_log, "Event log (NDJSON)")->capture_default_str();
  serve->add_option("--threshold", threshold, "Advancement threshold level")->capture_default_str();
  serve->add_option("--seed-salt", config.seed_salt, "Mixed into question selection seeds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(pack_root, format);
    if (seed->parsed()) return run_seed(pack_root, glossary, format);
    if (simulate->parsed()) {
      spec.model.advancement_threshold = parse_threshold(threshold);
      return run_simulate(pack_root, spec, out, log, format);
    }
    if (replay->parsed()) return run_replay(log_path, parse_threshold(threshold), format);
    if (serve->parsed()) {
      config.model.advancement_threshold = parse_threshold(threshold);
      return run_serve(pack_root, listen, serve_log, config);
    }
  } catch (const tutor::TutorError& e) {
    diagnostic(format, tutor::to_string(e.code()), e.subject(), e.detail());
    return io_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
