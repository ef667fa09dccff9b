// SPDX-License-Identifier: Apache-2.0
#include "irforge/shell.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace irforge;
using namespace irforge::testing;

TEST_CASE("shell: corpus agrees with a POSIX reference splitter") {
  const auto corpus = read_json_file(fixture("shell_split_corpus.json"));
  REQUIRE(corpus.size() >= 30);
  for (const auto& c : corpus) {
    const std::string input = c.at("input");
    CAPTURE(input);
    if (c.contains("tokens")) {
      CHECK(shell_split(input) == c.at("tokens").get<std::vector<std::string>>());
    } else {
      CHECK(error_kind_of([&] { shell_split(input); }) == ErrorKind::Malformed);
    }
  }
}

TEST_CASE("shell: quoting round trips") {
  const std::vector<std::string> words = {"", "plain", "two words", "it's", "say \"hi\"",
                                          "back\\slash", "$HOME", "tab\there", "-DX=\"a b\"",
                                          "«BUILD»/x", "\n"};
  std::string line;
  for (const auto& w : words)
    line += shell_quote(w) + " ";
  CHECK(shell_split(line) == words);
}
