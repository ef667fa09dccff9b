// SPDX-License-Identifier: Apache-2.0
#include "irforge/shell.hpp"

#include "irforge/error.hpp"

#include <cctype>

namespace irforge {

std::vector<std::string> shell_split(std::string_view cmd) {
  std::vector<std::string> words;
  std::string cur;
  bool in_word = false;
  for (size_t i = 0; i < cmd.size(); ++i) {
    const char c = cmd[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (in_word) {
        words.push_back(std::move(cur));
        cur.clear();
        in_word = false;
      }
      continue;
    }
    in_word = true;
    if (c == '\'') {
      const size_t close = cmd.find('\'', i + 1);
      if (close == std::string_view::npos)
        throw Error(ErrorKind::Malformed, "unterminated single quote in command");
      cur.append(cmd.substr(i + 1, close - i - 1));
      i = close;
    } else if (c == '"') {
      size_t j = i + 1;
      for (;; ++j) {
        if (j >= cmd.size())
          throw Error(ErrorKind::Malformed, "unterminated double quote in command");
        if (cmd[j] == '"')
          break;
        if (cmd[j] == '\\' && j + 1 < cmd.size() && (cmd[j + 1] == '"' || cmd[j + 1] == '\\')) {
          cur.push_back(cmd[++j]);
          continue;
        }
        cur.push_back(cmd[j]);
      }
      i = j;
    } else if (c == '\\') {
      if (i + 1 < cmd.size())
        cur.push_back(cmd[++i]);
      else
        throw Error(ErrorKind::Malformed, "trailing backslash in command");
    } else {
      cur.push_back(c);
    }
  }
  if (in_word)
    words.push_back(std::move(cur));
  return words;
}

std::string shell_quote(std::string_view word) {
  if (!word.empty() && word.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                              "0123456789-_./=:+,@%") == std::string_view::npos)
    return std::string(word);
  std::string out = "'";
  for (char c : word) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  return out + "'";
}

} // namespace irforge
