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

#include "klgame/game_file.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "klgame/errors.h"

namespace klgame {
namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> Tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t k = 0;
  while (k < line.size()) {
    if (line[k] == '#') break;
    if (line[k] == ' ' || line[k] == '\t' || line[k] == '\r') {
      ++k;
      continue;
    }
    const size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r' &&
           line[k] != '#') {
      ++k;
    }
    out.push_back({line.substr(start, k - start), static_cast<int>(start) + 1});
  }
  return out;
}

double ToNumber(const Token& token, int line) {
  double value = 0.0;
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  if (*first == '+') ++first;
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || end != last || !std::isfinite(value)) {
    throw ParseError(line, token.column, "expected a finite number, got '" + token.text + "'");
  }
  return value;
}

}  // namespace

KLMatrixGame GameFile::ToGame(double beta) const {
  return KLMatrixGame(payoff, beta,
                      mu_ref.value_or(Simplex::Uniform(static_cast<int>(payoff.rows()))),
                      nu_ref.value_or(Simplex::Uniform(static_cast<int>(payoff.cols()))));
}

GameFile ParseGameFile(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::optional<Eigen::VectorXd> refs[2];
  int ref_lines[2] = {0, 0};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<Token> tokens = Tokenize(line);
    if (tokens.empty()) continue;
    const bool is_mu = tokens[0].text == "mu_ref";
    const bool is_nu = tokens[0].text == "nu_ref";
    if (is_mu || is_nu) {
      const int which = is_mu ? 0 : 1;
      if (refs[which]) throw ParseError(line_no, 1, tokens[0].text + " given twice");
      if (tokens.size() < 2) throw ParseError(line_no, 1, tokens[0].text + " needs weights");
      Eigen::VectorXd w(tokens.size() - 1);
      for (size_t k = 1; k < tokens.size(); ++k) w[k - 1] = ToNumber(tokens[k], line_no);
      refs[which] = std::move(w);
      ref_lines[which] = line_no;
      continue;
    }
    std::vector<double> row;
    for (const Token& token : tokens) row.push_back(ToNumber(token, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      const int column = row.size() > rows.front().size()
                             ? tokens[rows.front().size()].column
                             : static_cast<int>(line.size()) + 1;
      throw ParseError(line_no, column,
                       "row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no + 1, 1, "no payoff rows");

  GameFile game;
  game.payoff.resize(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) game.payoff(r, c) = rows[r][c];
  }
  const Eigen::Index sizes[2] = {game.payoff.rows(), game.payoff.cols()};
  for (int which = 0; which < 2; ++which) {
    if (!refs[which]) continue;
    if (refs[which]->size() != sizes[which]) {
      throw ParseError(ref_lines[which], 1, "reference size does not match the payoff");
    }
    try {
      (which == 0 ? game.mu_ref : game.nu_ref) = Simplex::FromWeights(*refs[which]);
    } catch (const InvalidArgument& e) {
      throw ParseError(ref_lines[which], 1, e.what());
    }
  }
  return game;
}

GameFile LoadGameFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseGameFile(buffer.str());
}

}  // namespace klgame
