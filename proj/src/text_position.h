// Copyright 2026 The klgame Authors.
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

#ifndef KLGAME_SRC_TEXT_POSITION_H_
#define KLGAME_SRC_TEXT_POSITION_H_

#include <cstddef>
#include <string>
#include <utility>

namespace klgame::internal {

// 1-based line and column of a byte offset.
inline std::pair<int, int> LineColumn(const std::string& text, std::size_t offset) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// nlohmann reports the byte count consumed when the error was detected.
inline std::pair<int, int> JsonErrorPosition(const std::string& text, std::size_t byte) {
  return LineColumn(text, byte == 0 ? 0 : byte - 1);
}

}  // namespace klgame::internal

#endif  // KLGAME_SRC_TEXT_POSITION_H_
