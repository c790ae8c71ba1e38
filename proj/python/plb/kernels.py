"""Pure-Python micro kernels and the drivers that run kernels through the bridge.

Every kernel returns a checkable value: the same one for the host-only
version, the deep-conversion driver and the no-conversion driver.
"""

from __future__ import annotations

from . import _core

MICRO = ("SmallFunc", "L1A0R", "L1A1R", "NdL1A1R", "TCons", "Lists")
LIST_SIZE = _core.LIST_SIZE


def expected(name, k):
    if name in ("SmallFunc", "NdL1A1R"):
        return k * (k + 1) // 2
    if name == "L1A0R":
        return "done"
    if name in ("L1A1R", "TCons"):
        return k
    if name == "Lists":
        return (k // LIST_SIZE) * LIST_SIZE
    if name == "connect4":
        return _core.connect4_checksum(k, _core.CONNECT4_DEPTH)
    raise ValueError(f"no expected value for {name}")


# Host-only versions ---------------------------------------------------------

def _inc(x):
    return x + 1


def _countdown(n):
    while n > 0:
        n -= 1


def _counter(k):
    i = 0
    while i < k:
        i += 1
        yield i


def host_kernel(name, k):
    """Run a micro kernel natively in Python."""
    if name == "SmallFunc":
        return sum(_inc(i) for i in range(k))
    if name == "L1A0R":
        _countdown(k)
        return "done"
    if name == "L1A1R":
        acc = 0
        for _ in range(k):
            acc += 1
        return acc
    if name == "NdL1A1R":
        return sum(_counter(k))
    if name == "TCons":
        from . import Record

        t = "nil"
        for n in range(1, k + 1):
            t = Record("t", n, t)
        depth = 0
        while isinstance(t, Record):
            depth += 1
            t = t.fields[1]
        return depth
    if name == "Lists":
        xs = list(range(1, LIST_SIZE + 1))
        return sum(list(reversed(xs))[0] for _ in range(k // LIST_SIZE))
    raise ValueError(f"unknown micro benchmark {name}")


# Bridge drivers -------------------------------------------------------------

def _connect4(engine, k, nc):
    depth = _core.CONNECT4_DEPTH
    board = [[] for _ in range(7)]
    term = engine.make_term(board) if nc else board
    total = 0
    for ply in range(1, k + 1):
        if all(len(c) == 6 for c in board):
            break
        answer = engine.query_once("best_move(B, D, M), play_move(B, M, B2)", {"B": term, "D": depth}, nc=nc)
        if answer is None:
            raise _core.BenchmarkError("connect4: no move on a playable board")
        move, after = answer["M"], answer["B2"]
        if not isinstance(move, int) or not 0 <= move < 7 or len(board[move]) >= 6:
            raise _core.BenchmarkError(f"connect4: illegal move {move!r}")
        piece = "x" if sum(len(c) for c in board) % 2 == 0 else "o"
        board[move].append(piece)
        if not nc and after != board:
            raise _core.BenchmarkError("connect4: board mismatch")
        term = after
        total += ply * (move + 1)
        if _wins(board, move, piece):
            break
    return total


def _wins(board, col, piece):
    row = len(board[col]) - 1

    def at(c, r):
        return 0 <= c < 7 and 0 <= r < len(board[c]) and board[c][r] == piece

    for dc, dr in ((0, 1), (1, 0), (1, 1), (1, -1)):
        n = 1
        for s in (1, -1):
            c, r = col + s * dc, row + s * dr
            while at(c, r):
                n += 1
                c, r = c + s * dc, r + s * dr
        if n >= 4:
            return True
    return False


def cross_driver(name, k, engine, nc=False):
    """Run a kernel from Python through ``engine`` (a BoundEngine).

    The engine must hold the kernel's program: the micro fixture for micro
    kernels, ``connect4`` for connect4.
    """
    from . import OpaqueTerm, V

    db = engine.db
    call = (lambda p: p.nc) if nc else (lambda p: p)
    if name == "SmallFunc":
        return sum(call(db.inc)(i, V) for i in range(k))
    if name == "L1A0R":
        return call(db.l1a0r)(k, V)
    if name == "L1A1R":
        return call(db.l1a1r)(k, V)
    if name == "NdL1A1R":
        return sum(db.nd.iter(k, V, nc=nc))
    if name == "TCons":
        t = call(db.tcons)(k, V)
        if nc:
            return t.arg(0) if isinstance(t, OpaqueTerm) else 0
        depth = 0
        while not isinstance(t, str):
            depth += 1
            t = t.fields[1]
        return depth
    if name == "Lists":
        xs = list(range(1, LIST_SIZE + 1))
        arg = engine.make_term(xs) if nc else xs
        total = 0
        for _ in range(k // LIST_SIZE):
            r = call(db.rev)(arg, V)
            total += r.arg(0) if nc else r[0]
        return total
    if name == "connect4":
        return _connect4(engine, k, nc)
    raise ValueError(f"no Python driver for {name}")
