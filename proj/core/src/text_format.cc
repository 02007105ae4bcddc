// Copyright 2026 The LightMC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lightmc/text_format.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <system_error>

#include "lightmc/error.h"

namespace lightmc::text {

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw Error(ErrorCode::kInvalidArg, "cannot format real");
  }
  return std::string(buf, end);
}

double ParseDouble(std::string_view token) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  // from_chars rejects a leading '+', which other writers do emit.
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParseError,
                "not a real number: '" + std::string(token) + "'");
  }
  return value;
}

long long ParseInt(std::string_view token) {
  long long value = 0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParseError,
                "not an integer: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                 line[pos] == '\r')) {
      ++pos;
    }
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' &&
           line[pos] != '\r') {
      ++pos;
    }
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

void WriteRow(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ' ';
    out << FormatDouble(values[i]);
  }
  out << '\n';
}

std::string ReadLine(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParseError,
                "unexpected end of input while reading " + std::string(what));
  }
  return line;
}

std::vector<double> ReadRow(std::istream& in, std::size_t count,
                            std::string_view what) {
  std::string line = ReadLine(in, what);
  auto tokens = SplitWhitespace(line);
  if (tokens.size() != count) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + ": expected " + std::to_string(count) +
                    " values, got " + std::to_string(tokens.size()));
  }
  std::vector<double> values;
  values.reserve(count);
  for (auto token : tokens) values.push_back(ParseDouble(token));
  return values;
}

}  // namespace lightmc::text
