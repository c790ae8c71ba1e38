#pragma once

#include <array>
#include <cstdint>
#include <vector>

// Host-side Connect-4 rules and a negamax identical to fixtures/connect4.pl,
// used to validate moves and to compute expected game checksums.
namespace plb::c4 {

inline constexpr int kColumns = 7;
inline constexpr int kRows = 6;

using Board = std::array<std::vector<char>, kColumns>;  // columns, bottom first

char to_move(const Board& b);
bool playable(const Board& b, int col);
void play(Board& b, int col, char piece);
bool wins(const Board& b, int col, char piece);  // through the top piece of col
bool full(const Board& b);
/// -1 when no move is possible.
int best_move(const Board& b, int depth);

struct Game {
  std::vector<int> moves;
  std::int64_t checksum = 0;  // sum of ply * (column + 1)
};

Game self_play(int plies, int depth);

}  // namespace plb::c4
