#include "fairens/arff.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace fairens {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(std::size_t lineno, const std::string& msg) {
  std::ostringstream os;
  os << "arff line " << lineno << ": " << msg;
  throw ParseError(os.str());
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                        (s.front() == '"' && s.back() == '"')))
    return s.substr(1, s.size() - 2);
  return s;
}

// Splits a data row on commas, honoring single/double quotes.
std::vector<std::string> split_row(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char ch : line) {
    if (quote) {
      if (ch == quote) quote = 0;
      else cur.push_back(ch);
    } else if (ch == '\'' || ch == '"') {
      quote = ch;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quote) fail(lineno, "unterminated quote");
  out.push_back(trim(cur));
  return out;
}

struct AttrSpec {
  std::string name;
  bool numeric = false;
  std::vector<std::string> nominal;
};

}  // namespace

Dataset parse_arff(const std::string& text, const std::string& target) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<AttrSpec> attrs;
  bool in_data = false;
  std::vector<std::vector<std::string>> rows;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;

    if (!in_data) {
      std::string low = lower(t);
      if (low.rfind("@relation", 0) == 0) continue;
      if (low.rfind("@attribute", 0) == 0) {
        std::string rest = trim(t.substr(10));
        // attribute name may be quoted and contain spaces
        std::string name;
        std::size_t pos = 0;
        if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
          char q = rest[0];
          std::size_t end = rest.find(q, 1);
          if (end == std::string::npos) fail(lineno, "unterminated attribute name quote");
          name = rest.substr(1, end - 1);
          pos = end + 1;
        } else {
          std::size_t end = rest.find_first_of(" \t");
          if (end == std::string::npos) fail(lineno, "attribute without a type");
          name = rest.substr(0, end);
          pos = end;
        }
        std::string type = trim(rest.substr(pos));
        AttrSpec a;
        a.name = name;
        std::string tl = lower(type);
        if (tl == "numeric" || tl == "real" || tl == "integer") {
          a.numeric = true;
        } else if (!type.empty() && type[0] == '{') {
          std::size_t close = type.rfind('}');
          if (close == std::string::npos) fail(lineno, "unterminated nominal spec");
          auto vals = split_row(type.substr(1, close - 1), lineno);
          for (auto& v : vals) a.nominal.push_back(unquote(v));
          if (a.nominal.empty()) fail(lineno, "empty nominal spec");
        } else {
          fail(lineno, "unsupported attribute type '" + type +
                           "' (only numeric and nominal attributes are supported)");
        }
        attrs.push_back(std::move(a));
        continue;
      }
      if (low.rfind("@data", 0) == 0) {
        if (attrs.empty()) fail(lineno, "@data before any @attribute");
        in_data = true;
        continue;
      }
      fail(lineno, "unrecognized header directive");
    } else {
      if (t[0] == '{')
        fail(lineno, "sparse ARFF rows are not supported");
      auto fields = split_row(t, lineno);
      if (fields.size() != attrs.size()) {
        std::ostringstream os;
        os << "expected " << attrs.size() << " values, got " << fields.size();
        fail(lineno, os.str());
      }
      rows.push_back(std::move(fields));
    }
  }
  if (!in_data) throw ParseError("arff: missing @data section");
  if (rows.empty()) throw ParseError("arff: no data rows");

  std::size_t label_idx = attrs.size() - 1;
  if (!target.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < attrs.size(); ++i)
      if (attrs[i].name == target) { label_idx = i; found = true; }
    if (!found) throw SchemaError("arff: target attribute '" + target + "' not found");
  } else {
    for (std::size_t i = 0; i < attrs.size(); ++i)
      if (lower(attrs[i].name) == "class") label_idx = i;
  }

  const std::size_t n = rows.size();
  Dataset d;
  d.weights.assign(n, 1.0);
  for (std::size_t c = 0; c < attrs.size(); ++c) {
    Column col;
    if (attrs[c].numeric) {
      col.kind = ColumnKind::numeric;
      col.num.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& s = rows[r][c];
        if (s == "?" || s.empty()) {
          col.num[r] = std::nan("");
        } else {
          errno = 0;
          char* end = nullptr;
          double v = std::strtod(s.c_str(), &end);
          if (errno != 0 || end != s.c_str() + s.size()) {
            std::ostringstream os;
            os << "arff: value '" << s << "' in numeric attribute '" << attrs[c].name
               << "' is not a number";
            throw ParseError(os.str());
          }
          col.num[r] = v;
        }
      }
    } else {
      col.kind = ColumnKind::categorical;
      col.cat.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        std::string s = unquote(rows[r][c]);
        if (s == "?") s = "";
        col.cat[r] = s;
      }
    }
    if (c == label_idx) {
      d.labels = std::move(col);
    } else {
      d.names.push_back(attrs[c].name);
      d.cols.push_back(std::move(col));
    }
  }
  d.check();
  return d;
}

}  // namespace fairens
