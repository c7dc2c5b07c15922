#include "fairens/csvio.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fairens {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) {
    std::ostringstream os;
    os << "csv line " << lineno << ": unterminated quote";
    throw ParseError(os.str());
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& label_column) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> raw;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line, lineno);
    if (header.empty()) {
      for (auto& f : fields) header.push_back(trim(f));
      continue;
    }
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "csv line " << lineno << ": expected " << header.size() << " fields, got "
         << fields.size();
      throw ParseError(os.str());
    }
    for (auto& f : fields) f = trim(f);
    raw.push_back(std::move(fields));
  }
  if (header.empty()) throw ParseError("csv: missing header row");
  if (raw.empty()) throw ParseError("csv: no data rows");

  std::size_t label_idx = header.size() - 1;
  if (!label_column.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == label_column) { label_idx = i; found = true; }
    if (!found) throw SchemaError("csv: label column '" + label_column + "' not found");
  }

  const std::size_t n = raw.size();
  Dataset d;
  d.weights.assign(n, 1.0);
  for (std::size_t c = 0; c < header.size(); ++c) {
    bool numeric = true;
    double tmp;
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& s = raw[r][c];
      if (is_missing_categorical(s)) continue;
      if (!parse_number(s, tmp)) { numeric = false; break; }
    }
    Column col;
    if (numeric) {
      col.kind = ColumnKind::numeric;
      col.num.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& s = raw[r][c];
        if (is_missing_categorical(s)) {
          col.num[r] = std::nan("");
        } else {
          parse_number(s, col.num[r]);
        }
      }
    } else {
      col.kind = ColumnKind::categorical;
      col.cat.resize(n);
      for (std::size_t r = 0; r < n; ++r) col.cat[r] = raw[r][c];
    }
    if (c == label_idx) {
      d.labels = std::move(col);
    } else {
      d.names.push_back(header[c]);
      d.cols.push_back(std::move(col));
    }
  }
  d.check();
  return d;
}

Dataset load_csv(const std::filesystem::path& file, const std::string& label_column) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open csv file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), label_column);
}

FairnessInfo load_fairness_info(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open fairness info file: " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("fairness info " + file.string() + ": " + e.what());
  }
  return FairnessInfo::from_json(j);
}

namespace {

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

std::string csv_escape(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

std::string format_cell(const Column& col, std::size_t i) {
  if (col.kind == ColumnKind::numeric) {
    if (is_missing_numeric(col.num[i])) return "";
    std::ostringstream os;
    os.precision(17);
    os << col.num[i];
    return os.str();
  }
  return csv_escape(col.cat[i]);
}

}  // namespace

std::string to_csv(const Dataset& d, const std::string& label_column) {
  std::ostringstream os;
  for (const auto& n : d.names) os << csv_escape(n) << ",";
  os << csv_escape(label_column) << "\n";
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (const auto& c : d.cols) os << format_cell(c, i) << ",";
    os << format_cell(d.labels, i) << "\n";
  }
  return os.str();
}

}  // namespace fairens
