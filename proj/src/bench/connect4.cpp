#include "bench/connect4.hpp"

namespace plb::c4 {

namespace {

constexpr int kOrder[kColumns] = {3, 2, 4, 1, 5, 0, 6};
constexpr int kNone = -100000;

bool cell(const Board& b, int c, int r, char p) {
  return c >= 0 && c < kColumns && r >= 0 && r < static_cast<int>(b[c].size()) && b[c][r] == p;
}

int run(const Board& b, int c, int r, char p, int dc, int dr) {
  int n = 0;
  while (cell(b, c + dc, r + dr, p)) {
    c += dc;
    r += dr;
    ++n;
  }
  return n;
}

char other(char p) { return p == 'x' ? 'o' : 'x'; }

int search(const Board& b, char p, int depth, int* move);

int score(Board& b2, int col, char p, int depth) {
  if (wins(b2, col, p)) return 1000 + depth;
  if (depth <= 1) return 0;
  if (full(b2)) return 0;
  return -search(b2, other(p), depth - 1, nullptr);
}

int search(const Board& b, char p, int depth, int* move) {
  int best = kNone;
  int best_col = -1;
  for (int c : kOrder) {
    if (!playable(b, c)) continue;
    Board b2 = b;
    play(b2, c, p);
    int s = score(b2, c, p, depth);
    if (s > best) {
      best = s;
      best_col = c;
    }
  }
  if (move != nullptr) *move = best_col;
  return best;
}

}  // namespace

char to_move(const Board& b) {
  std::size_t n = 0;
  for (const auto& col : b) n += col.size();
  return n % 2 == 0 ? 'x' : 'o';
}

bool playable(const Board& b, int col) {
  return col >= 0 && col < kColumns && static_cast<int>(b[col].size()) < kRows;
}

void play(Board& b, int col, char piece) { b[col].push_back(piece); }

bool wins(const Board& b, int col, char p) {
  int r = static_cast<int>(b[col].size()) - 1;
  if (r < 0 || b[col][r] != p) return false;
  static constexpr int dirs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  for (const auto& d : dirs) {
    if (run(b, col, r, p, d[0], d[1]) + run(b, col, r, p, -d[0], -d[1]) + 1 >= 4) return true;
  }
  return false;
}

bool full(const Board& b) {
  for (int c = 0; c < kColumns; ++c) {
    if (playable(b, c)) return false;
  }
  return true;
}

int best_move(const Board& b, int depth) {
  int move = -1;
  search(b, to_move(b), depth, &move);
  return move;
}

Game self_play(int plies, int depth) {
  Game g;
  Board b;
  for (int ply = 1; ply <= plies; ++ply) {
    int m = best_move(b, depth);
    if (m < 0) break;
    char p = to_move(b);
    play(b, m, p);
    g.moves.push_back(m);
    g.checksum += static_cast<std::int64_t>(ply) * (m + 1);
    if (wins(b, m, p)) break;
  }
  return g;
}

}  // namespace plb::c4
