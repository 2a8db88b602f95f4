// Copyright 2026 The modaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MODAUDIT_CSV_H_
#define MODAUDIT_CSV_H_

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace modaudit {

// RFC 4180 reader: quoted fields may contain the delimiter, doubled quotes
// and line breaks; CRLF and LF both end a record. A leading UTF-8 BOM is
// skipped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char delimiter = ',');

  // False at end of input. Throws IngestionError on an unterminated quote.
  bool ReadRow(std::vector<std::string>& row);
  // Physical line where the last returned row started.
  std::size_t line() const { return row_line_; }

 private:
  int Get();
  int Peek();

  std::istream& in_;
  char delim_;
  std::size_t line_ = 1;
  std::size_t row_line_ = 0;
  bool first_ = true;
};

}  // namespace modaudit

#endif  // MODAUDIT_CSV_H_
