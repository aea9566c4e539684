/*
 * Copyright 2026 The RMFT Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rmft {

// RFC 4180 field: quoted only when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view value);

void write_csv_row(std::ostream& out, std::initializer_list<std::string_view> fields);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Parses RFC 4180 text (LF or CRLF record separators). A trailing newline
// does not produce an empty record.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);

}  // namespace rmft
