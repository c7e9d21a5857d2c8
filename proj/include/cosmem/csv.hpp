#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "cosmem/errors.hpp"

namespace cosmem {

// Line-oriented reader for the toolkit's comma-separated inputs. The first
// non-comment line must be the expected header; '#' lines and blank lines are
// skipped everywhere. Comment lines of the form `# key: value` before the
// header are surfaced as directives (the neutron schema uses them for
// monitor_id / corrected).
class CsvReader {
public:
  CsvReader(std::istream& in, std::string expected_header);

  // Advances to the next data row; returns false at end of input. Fields are
  // valid until the next call.
  bool next_row();

  const std::vector<std::string>& fields() const { return fields_; }
  std::size_t line_number() const { return line_; }

  // Directive comments seen before the header, as (key, value) pairs.
  const std::vector<std::pair<std::string, std::string>>& directives() const {
    return directives_;
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw ParseError(ParseError::Kind::malformed_row, line_, reason);
  }

private:
  std::istream& in_;
  std::string expected_header_;
  std::string buf_;
  std::vector<std::string> fields_;
  std::vector<std::pair<std::string, std::string>> directives_;
  std::size_t line_ = 0;
  bool header_seen_ = false;
};

void split_fields(std::string_view line, std::vector<std::string>& out);

// Strict numeric field parsers; throw ParseError::malformed_row via caller.
bool parse_u64_field(std::string_view s, std::uint64_t& out);
bool parse_u32_field(std::string_view s, std::uint32_t& out);
bool parse_double_field(std::string_view s, double& out);

} // namespace cosmem
