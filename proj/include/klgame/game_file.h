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

// Plain-text matrix games: one whitespace-separated payoff row per line, '#'
// starts a comment, and optional "mu_ref" / "nu_ref" lines give references
// (uniform otherwise).
//
//   # matching pennies
//   1 -1
//   -1 1
//   mu_ref 0.5 0.5

#ifndef KLGAME_GAME_FILE_H_
#define KLGAME_GAME_FILE_H_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "klgame/matrix_game.h"

namespace klgame {

struct GameFile {
  Eigen::MatrixXd payoff;
  std::optional<Simplex> mu_ref;
  std::optional<Simplex> nu_ref;

  KLMatrixGame ToGame(double beta) const;
};

// Throws ParseError with the 1-based line and column of the first problem.
GameFile ParseGameFile(const std::string& text);
GameFile LoadGameFile(const std::string& path);

}  // namespace klgame

#endif  // KLGAME_GAME_FILE_H_
