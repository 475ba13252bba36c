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

#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eitcool::csv {

/// %.17g, locale independent. Non-finite values print as nan / inf / -inf.
std::string format(double value);

/// Comma-separated rows with a header and LF line endings.
class Writer {
 public:
  Writer(std::ostream& os, std::initializer_list<std::string_view> header);

  Writer& field(double value);
  Writer& field(long long value);
  Writer& field(std::string_view value);
  void end_row();

 private:
  Writer& raw(std::string_view value);

  std::ostream& os_;
  std::size_t columns_;
  std::size_t current_ = 0;
};

}  // namespace eitcool::csv
