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

#ifndef LIGHTMC_TEXT_FORMAT_H_
#define LIGHTMC_TEXT_FORMAT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Helpers shared by the versioned text formats (codebook, decoder, ensemble).
// Reals are written in shortest round-trip form so that reload is exact.
namespace lightmc::text {

std::string FormatDouble(double value);
double ParseDouble(std::string_view token);
long long ParseInt(std::string_view token);

std::vector<std::string_view> SplitWhitespace(std::string_view line);

// Writes values separated by single spaces, newline terminated.
void WriteRow(std::ostream& out, std::span<const double> values);

// Reads the next line, throwing ParseError on EOF. `what` names the thing
// being read for the diagnostic.
std::string ReadLine(std::istream& in, std::string_view what);

// Reads exactly `count` reals from one line.
std::vector<double> ReadRow(std::istream& in, std::size_t count,
                            std::string_view what);

}  // namespace lightmc::text

#endif  // LIGHTMC_TEXT_FORMAT_H_
