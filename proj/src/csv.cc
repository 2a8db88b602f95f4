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

#include "modaudit/csv.h"

#include "modaudit/errors.h"

namespace modaudit {

CsvReader::CsvReader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

int CsvReader::Get() {
  int c = in_.get();
  if (c == '\n') ++line_;
  return c;
}

int CsvReader::Peek() { return in_.peek(); }

bool CsvReader::ReadRow(std::vector<std::string>& row) {
  row.clear();
  if (first_) {
    first_ = false;
    if (Peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.clear();
        in_.seekg(0);
      }
    }
  }
  if (Peek() == EOF) return false;
  row_line_ = line_;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  while (true) {
    int c = Get();
    if (quoted) {
      if (c == EOF) {
        throw IngestionError("unterminated quoted field starting on line " +
                             std::to_string(row_line_));
      }
      if (c == '"') {
        if (Peek() == '"') {
          Get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == EOF || c == '\n') {
      row.push_back(std::move(field));
      return true;
    }
    if (c == '\r') {
      if (Peek() == '\n') Get();
      row.push_back(std::move(field));
      return true;
    }
    if (c == delim_) {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
      continue;
    }
    field_started = true;
    field.push_back(static_cast<char>(c));
  }
}

}  // namespace modaudit
