#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace washscan::csv {

/// Splits one CSV line into fields. Double quotes delimit fields that
/// contain commas or quotes; embedded quotes are doubled. Returns false on
/// broken quoting (unterminated quote, text after a closing quote).
inline bool split(std::string_view line, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (true) {
    field.clear();
    if (i < n && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (line[i] == '"') {
          if (i + 1 < n && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          field.push_back(line[i]);
          ++i;
        }
      }
      if (!closed) return false;
      if (i < n && line[i] != ',') return false;
    } else {
      while (i < n && line[i] != ',') {
        if (line[i] == '"') return false;
        field.push_back(line[i]);
        ++i;
      }
    }
    out.push_back(field);
    if (i >= n) break;
    ++i;  // consume ','
    if (i == n) {  // trailing comma: one empty field
      out.emplace_back();
      break;
    }
  }
  return true;
}

inline bool needs_quoting(std::string_view field) {
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
  }
  return false;
}

inline void append_field(std::string& buf, std::string_view field) {
  if (!needs_quoting(field)) {
    buf.append(field);
    return;
  }
  buf.push_back('"');
  for (char c : field) {
    if (c == '"') buf.push_back('"');
    buf.push_back(c);
  }
  buf.push_back('"');
}

/// Appends one row (newline-terminated) to buf.
inline void append_row(std::string& buf, const std::vector<std::string_view>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) buf.push_back(',');
    append_field(buf, fields[i]);
  }
  buf.push_back('\n');
}

}  // namespace washscan::csv
