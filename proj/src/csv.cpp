// Copyright 2026 The eitcool Authors
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

#include "eitcool/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace eitcool::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
  return {buf, end};
}

Writer::Writer(std::ostream& os, std::initializer_list<std::string_view> header)
    : os_(os), columns_(header.size()) {
  for (auto h : header) field(h);
  end_row();
}

Writer& Writer::raw(std::string_view value) {
  if (current_ > 0) os_ << ',';
  os_ << value;
  ++current_;
  return *this;
}

Writer& Writer::field(double value) { return raw(format(value)); }

Writer& Writer::field(long long value) { return raw(std::to_string(value)); }

// Text is quoted only when it has to be.
Writer& Writer::field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return raw(value);
  std::string q = "\"";
  for (char c : value) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return raw(q);
}

void Writer::end_row() {
  if (current_ != columns_) throw std::logic_error("csv: row has the wrong number of fields");
  os_ << '\n';
  current_ = 0;
}

}  // namespace eitcool::csv
