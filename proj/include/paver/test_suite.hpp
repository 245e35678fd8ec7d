#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paver/interpreter.hpp"
#include "paver/ir.hpp"

namespace paver {

struct TestCase {
  std::string name;
  std::vector<std::int64_t> input;
  bool expect_fault = false;
  std::optional<FaultKind> fault_kind; // only when expect_fault
  std::vector<std::int64_t> expected;  // printed output, exact match
};

struct Exploit {
  std::vector<std::int64_t> input;
  FaultKind kind = FaultKind::Oob;
  StatementId statement = 0; // the vulnerable statement
};

struct TestSuite {
  std::vector<TestCase> cases;
  std::optional<Exploit> exploit;
};

/// Parses the line-oriented suite format:
///
///   name | input: 1,2,3 | expect: 4,5
///   boom | input: 9     | expect: FAULT oob
///
/// Blank lines and lines starting with '#' are ignored. Case names must be
/// unique. Throws paver::Error (Input) with the offending line number.
TestSuite parse_suite(const std::string &text, const std::string &path = "<suite>");
TestSuite load_suite(const std::string &path);

std::string format_suite(const TestSuite &suite);

} // namespace paver
