#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace canopy::harness {

inline constexpr int kLogVersion = 1;

/// JSON Lines: a header {"type":"header","version",...,"config"}, then
/// records with strictly increasing "t", then {"type":"summary",...}.
class RunLogWriter {
 public:
  explicit RunLogWriter(std::ostream& os) : os_(os) {}

  void header(const nlohmann::json& config);
  /// Throws std::logic_error if t does not increase.
  void record(const nlohmann::json& rec);
  void summary(const nlohmann::json& metrics);

 private:
  void line(const nlohmann::json& j);

  std::ostream& os_;
  std::optional<double> last_t_;
};

struct RunLogContents {
  nlohmann::json header;
  std::vector<nlohmann::json> records;
  std::vector<std::string> record_lines;  // raw text of each record
  std::optional<nlohmann::json> summary;
};

/// Throws std::runtime_error with the line number on malformed logs.
RunLogContents read_run_log(std::istream& is);
RunLogContents read_run_log_file(const std::string& path);

}  // namespace canopy::harness
