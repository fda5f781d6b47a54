#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chaoslab/errors.hpp"
#include "json.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chaoslab::cli;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int run_command(const std::string& target, const RunOptions& options, const std::string& out_dir_flag) {
  std::string text;
  std::string label = target;
  json config;
  if (target.rfind("preset:", 0) == 0) {
    try {
      config = preset_config(target.substr(7));
    } catch (const SchemaError& e) {
      std::cerr << target << ":1: schema error: " << e.what() << "\n";
      return kExitSchema;
    }
    text = config.dump(2);
  } else {
    std::ifstream in(target);
    if (!in) {
      std::cerr << target << ":1: schema error: cannot read config file\n";
      return kExitSchema;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    try {
      config = json::parse(text);
    } catch (const json::parse_error& e) {
      std::cerr << label << ":" << line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)
                << ": schema error: invalid JSON: " << e.what() << "\n";
      return kExitSchema;
    }
  }

  RunOutcome outcome;
  try {
    outcome = run_experiment(config, options);
  } catch (const SchemaError& e) {
    std::cerr << label << ":" << locate_line(text, e.pointer()) << ": schema error at '" << e.pointer()
              << "': " << e.what() << "\n";
    return kExitSchema;
  } catch (const chaoslab::numeric_error& e) {
    std::cerr << label << ": numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << label << ":" << locate_line(text, "/experiment") << ": schema error: " << e.what() << "\n";
    return kExitSchema;
  }

  std::string out_dir = out_dir_flag;
  if (out_dir.empty())
    if (const char* env = std::getenv("CHAOSLAB_OUT_DIR")) out_dir = env;
  if (out_dir.empty()) out_dir = ".";
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path json_path = fs::path(out_dir) / (outcome.name + ".json");
  json record = outcome.record;
  record["timestamp"] = utc_timestamp();
  {
    std::ofstream out(json_path);
    if (!out) {
      std::cerr << "cannot write " << json_path.string() << "\n";
      return kExitSchema;
    }
    out << record.dump(2) << "\n";
  }
  std::cout << "wrote " << json_path.string() << "\n";
  if (outcome.csv) {
    const fs::path csv_path = fs::path(out_dir) / (outcome.name + ".csv");
    std::ofstream(csv_path) << *outcome.csv;
    std::cout << "wrote " << csv_path.string() << "\n";
  }
  for (const auto& a : outcome.asserts)
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.path << " " << a.op << " " << a.expected.dump()
              << " (actual " << a.actual.dump() << ")\n";
  std::cout << "status: " << (outcome.asserts_ok ? "pass" : "fail") << "\n";
  return outcome.asserts_ok ? kExitOk : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: disorder chaos and superconcentration experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::string target;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  auto* run = app.add_subcommand("run", "Run an experiment config (a JSON file or preset:<name>)");
  run->add_option("config", target, "Config path or preset:<name>")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the master seed");
  auto* threads_opt = run->add_option("--threads", threads, "Override the worker count")->check(CLI::PositiveNumber);
  run->add_option("--out-dir", out_dir, "Output directory (env CHAOSLAB_OUT_DIR, default .)");

  auto* list = app.add_subcommand("list-presets", "List built-in experiment presets");
  std::string shown;
  auto* show = app.add_subcommand("show-preset", "Print the config of a preset");
  show->add_option("name", shown)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  if (*list) {
    for (const auto& [name, description] : presets()) std::cout << name << "  " << description << "\n";
    return kExitOk;
  }
  if (*show) {
    try {
      std::cout << preset_config(shown).dump(2) << "\n";
    } catch (const SchemaError& e) {
      std::cerr << e.what() << "\n";
      return kExitSchema;
    }
    return kExitOk;
  }
  RunOptions options;
  if (*seed_opt) options.seed = seed;
  if (*threads_opt) options.threads = threads;
  return run_command(target, options, out_dir);
}
