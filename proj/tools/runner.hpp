#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace chaoslab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssert = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitNumeric = 3;

// Config problem tied to a JSON pointer into the config document.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : std::runtime_error(message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct AssertResult {
  std::string path;
  std::string op;
  nlohmann::json expected;
  nlohmann::json actual;
  bool pass = false;
};

struct RunOutcome {
  nlohmann::json record;            // full result record, timestamp excluded
  std::optional<std::string> csv;   // curve table when requested and available
  std::vector<AssertResult> asserts;
  bool asserts_ok = true;
  std::string name;                 // base name of the output files
};

// Validates the whole config, then runs it. Throws SchemaError before any
// computation when a field is missing, mistyped or out of range.
RunOutcome run_experiment(const nlohmann::json& config, const RunOptions& options = {});

std::vector<std::pair<std::string, std::string>> presets();
nlohmann::json preset_config(const std::string& name);

// 1-based line of the member addressed by `pointer` in the raw config text;
// falls back to the deepest ancestor found, then to line 1.
int locate_line(const std::string& text, const std::string& pointer);

std::string version_string();

}  // namespace chaoslab::cli
