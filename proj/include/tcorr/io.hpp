#pragma once

#include "tcorr/classical.hpp"
#include "tcorr/gpt_machine.hpp"
#include "tcorr/quantum.hpp"
#include "tcorr/sequences.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcorr {

inline constexpr const char* kToolkitVersion = "0.1.0";

// malformed file or schema mismatch
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// well-formed file whose payload fails the owning module's validity checks
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// plain decimal, 12 significant digits; emission format for results and tables
std::string format_number(double v);

// Exactly one payload. Machine files keep full double precision so that
// load -> save -> load is the identity.
struct MachineFile {
  std::optional<ClassicalMachine> classical;
  std::optional<QuantumMachine> quantum;
  std::optional<GptMachine> gpt;
  std::string name;
  std::string description;
};

MachineFile parse_machine(const nlohmann::json& j);
nlohmann::json machine_json(const MachineFile& mf);
MachineFile load_machine_file(const std::string& path);
void save_machine_file(const MachineFile& mf, const std::string& path);

int file_n_inputs(const MachineFile& mf);
int file_n_outputs(const MachineFile& mf);
CorrelationTable file_table(const MachineFile& mf, int L);

// columns inputs,outputs,probability; sequences as undelimited symbol strings
std::string table_csv(const CorrelationTable& t);
nlohmann::json table_json(const CorrelationTable& t);
CorrelationTable parse_table(const nlohmann::json& j);

struct RunManifest {
  std::string command;
  nlohmann::json flags = nlohmann::json::object();
  std::uint64_t seed = 42;
  std::string version = kToolkitVersion;
  double wall_time_s = 0.0;
  std::vector<std::string> outputs;
};

nlohmann::json manifest_json(const RunManifest& m);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tcorr
