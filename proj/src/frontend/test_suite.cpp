#include "paver/test_suite.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "paver/error.hpp"

namespace paver {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::int64_t> int_list(const std::string &text, const std::string &where) {
  std::vector<std::int64_t> out;
  if (trim(text).empty())
    return out;
  for (const auto &item : split(text, ',')) {
    const std::string t = trim(item);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
      throw_input(where + ": '" + t + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

std::string field(const std::string &part, const std::string &key, const std::string &where) {
  const std::string t = trim(part);
  if (t.rfind(key + ":", 0) != 0)
    throw_input(where + ": expected '" + key + ":' field");
  return t.substr(key.size() + 1);
}

std::string join(const std::vector<std::int64_t> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

} // namespace

TestSuite parse_suite(const std::string &text, const std::string &path) {
  TestSuite suite;
  std::set<std::string> names;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const std::string where = path + ":" + std::to_string(lineno);
    auto parts = split(t, '|');
    if (parts.size() != 3)
      throw_input(where + ": expected 'name | input: ... | expect: ...'");
    TestCase tc;
    tc.name = trim(parts[0]);
    if (tc.name.empty())
      throw_input(where + ": empty test name");
    if (!names.insert(tc.name).second)
      throw_input(where + ": duplicate test name '" + tc.name + "'");
    tc.input = int_list(field(parts[1], "input", where), where);
    const std::string expect = trim(field(parts[2], "expect", where));
    if (expect.rfind("FAULT", 0) == 0) {
      tc.expect_fault = true;
      const std::string kind = trim(expect.substr(5));
      if (!kind.empty()) {
        tc.fault_kind = parse_fault_kind(kind);
        if (!tc.fault_kind)
          throw_input(where + ": unknown fault kind '" + kind + "'");
      }
    } else {
      tc.expected = int_list(expect, where);
    }
    suite.cases.push_back(std::move(tc));
  }
  return suite;
}

TestSuite load_suite(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw_input("cannot read test suite '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_suite(ss.str(), path);
}

std::string format_suite(const TestSuite &suite) {
  std::string out;
  for (const auto &tc : suite.cases) {
    out += tc.name + " | input: " + join(tc.input) + " | expect: ";
    if (tc.expect_fault) {
      out += "FAULT";
      if (tc.fault_kind)
        out += " " + to_string(*tc.fault_kind);
    } else {
      out += join(tc.expected);
    }
    out += "\n";
  }
  return out;
}

} // namespace paver
