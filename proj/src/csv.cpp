#include "cosmem/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace cosmem {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

} // namespace

void split_fields(std::string_view line, std::vector<std::string>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(trim(line.substr(start)));
      return;
    }
    out.emplace_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

CsvReader::CsvReader(std::istream& in, std::string expected_header)
    : in_(in), expected_header_(std::move(expected_header)) {}

bool CsvReader::next_row() {
  while (std::getline(in_, buf_)) {
    ++line_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    std::string_view sv = trim(buf_);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      if (!header_seen_) {
        std::string_view body = trim(sv.substr(1));
        std::size_t colon = body.find(':');
        if (colon != std::string_view::npos) {
          directives_.emplace_back(std::string(trim(body.substr(0, colon))),
                                   std::string(trim(body.substr(colon + 1))));
        }
      }
      continue;
    }
    if (!header_seen_) {
      header_seen_ = true;
      if (std::string(sv) != expected_header_) {
        fail("expected header '" + expected_header_ + "', got '" +
             std::string(sv) + "'");
      }
      continue;
    }
    split_fields(sv, fields_);
    return true;
  }
  if (!header_seen_) {
    ++line_;
    fail("missing header '" + expected_header_ + "'");
  }
  return false;
}

bool parse_u64_field(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_u32_field(std::string_view s, std::uint32_t& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_double_field(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return false;
  return std::isfinite(out);
}

} // namespace cosmem
