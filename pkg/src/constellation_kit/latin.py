"""Latin squares, MOLS, transversal search, and the order-6 mate certificate.

A LatinSquare holds an n x n grid of symbols 0..n-1; whether it actually is
Latin is checked by validate_squares, so broken grids can be diagnosed rather
than rejected at construction. A PartialSquare allows absent cells (None).
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .affine import Line, ParallelClass, make_class, make_line
from .errors import (
    EmptyInput,
    NotLatin,
    NotOrthogonalInput,
    NotTransversalFoliation,
    OrderMismatch,
    OrderOutOfRange,
    ParseError,
    PartialClash,
)
from .gf import field_for_order


@dataclass(frozen=True)
class LatinSquare:
    n: int
    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.grid) != self.n or any(len(r) != self.n for r in self.grid):
            raise ParseError(f"grid is not {self.n}x{self.n}")
        if any(not 0 <= s < self.n for r in self.grid for s in r):
            raise ParseError("symbol out of range")


@dataclass(frozen=True)
class PartialSquare:
    n: int
    grid: tuple[tuple[Optional[int], ...], ...]

    def __post_init__(self):
        if len(self.grid) != self.n or any(len(r) != self.n for r in self.grid):
            raise ParseError(f"grid is not {self.n}x{self.n}")
        if any(
            s is not None and not 0 <= s < self.n for r in self.grid for s in r
        ):
            raise ParseError("symbol out of range")


def make_square(rows) -> LatinSquare:
    grid = tuple(tuple(r) for r in rows)
    return LatinSquare(len(grid), grid)


@dataclass(frozen=True)
class SquareCheck:
    latin: bool
    orthogonal: Optional[bool] = None


def is_latin(A: LatinSquare) -> bool:
    full = set(range(A.n))
    return all(set(r) == full for r in A.grid) and all(
        {A.grid[r][c] for r in range(A.n)} == full for c in range(A.n)
    )


def validate_squares(A: LatinSquare, B: LatinSquare | None = None) -> SquareCheck:
    if B is not None and B.n != A.n:
        raise OrderMismatch(f"orders differ: {A.n} vs {B.n}")
    latin = is_latin(A) and (B is None or is_latin(B))
    if B is None:
        return SquareCheck(latin)
    pairs = {
        (A.grid[r][c], B.grid[r][c]) for r in range(A.n) for c in range(A.n)
    }
    return SquareCheck(latin, len(pairs) == A.n * A.n)


def mols_prime_power(q: int) -> list[LatinSquare]:
    """The q-1 pairwise-orthogonal squares L_a[r][c] = a*r + c over GF(q)."""
    F = field_for_order(q)
    return [
        make_square(
            [[F.add(F.mul(a, r), c) for c in F.elements] for r in F.elements]
        )
        for a in F.elements
        if a != 0
    ]


def macneish_product(
    As: list[LatinSquare], Bs: list[LatinSquare]
) -> list[LatinSquare]:
    """Direct products pairing As[i] with Bs[i]; min(|As|,|Bs|) MOLS of
    composite order."""
    if not As or not Bs:
        raise EmptyInput("both MOLS lists must be non-empty")
    for squares in (As, Bs):
        for i in range(len(squares)):
            for j in range(i + 1, len(squares)):
                chk = validate_squares(squares[i], squares[j])
                if not (chk.latin and chk.orthogonal):
                    raise NotOrthogonalInput(
                        f"input squares {i},{j} are not orthogonal MOLS"
                    )
        if len(squares) == 1 and not is_latin(squares[0]):
            raise NotOrthogonalInput("input square is not Latin")
    n, m = As[0].n, Bs[0].n
    out = []
    for A, B in zip(As, Bs):
        grid = [
            [
                A.grid[r1][c1] * m + B.grid[r2][c2]
                for c1 in range(n)
                for c2 in range(m)
            ]
            for r1 in range(n)
            for r2 in range(m)
        ]
        out.append(make_square(grid))
    return out


# -- foliation bridge --

def square_to_foliation(A: LatinSquare) -> ParallelClass:
    """Level sets of the grid as a foliation of the n^2 points; line s holds
    the cells carrying symbol s. Compatible with the row and column
    foliations by the Latin property."""
    if not is_latin(A):
        raise NotLatin("input grid is not a Latin square")
    n = A.n
    cells: list[list[int]] = [[] for _ in range(n)]
    for r in range(n):
        for c in range(n):
            cells[A.grid[r][c]].append(r * n + c)
    return make_class(n, [make_line(n, pts) for pts in cells], sort=False)


def foliation_to_square(cl: ParallelClass) -> LatinSquare:
    """Invert square_to_foliation; line index becomes the symbol."""
    n = cl.order
    if len(cl.lines) != n:
        raise NotTransversalFoliation(f"need a full foliation of {n} lines")
    grid = [[-1] * n for _ in range(n)]
    for s, ln in enumerate(cl.lines):
        rows_seen: set[int] = set()
        cols_seen: set[int] = set()
        for p in ln.points:
            r, c = divmod(p, n)
            if r in rows_seen or c in cols_seen:
                raise NotTransversalFoliation(
                    f"line {s} repeats grid row or column"
                )
            rows_seen.add(r)
            cols_seen.add(c)
            grid[r][c] = s
    return make_square(grid)


def latin_foliation_bridge(direction: str, x):
    if direction == "to_foliation":
        return square_to_foliation(x)
    if direction == "from_foliation":
        return foliation_to_square(x)
    raise ValueError(f"unknown direction {direction!r}")


# -- transversals and orthogonal mates --

def transversals(A: LatinSquare) -> list[tuple[int, ...]]:
    """All cell sets hitting each row, column, and symbol once. Each
    transversal is the tuple (column chosen in row 0, row 1, ...)."""
    n = A.n
    out: list[tuple[int, ...]] = []
    cols_used = [False] * n
    syms_used = [False] * n
    pick: list[int] = []

    def rec(r: int) -> None:
        if r == n:
            out.append(tuple(pick))
            return
        for c in range(n):
            s = A.grid[r][c]
            if not cols_used[c] and not syms_used[s]:
                cols_used[c] = syms_used[s] = True
                pick.append(c)
                rec(r + 1)
                pick.pop()
                cols_used[c] = syms_used[s] = False

    rec(0)
    return out


def _disjoint_transversal_cover(n: int, trs: list[tuple[int, ...]]):
    """Exact cover: pick n pairwise-disjoint transversals covering every cell.

    Cells are elements r*n+c; DFS branches on the uncovered cell hit by the
    fewest remaining transversals.
    """
    if len(trs) < n:
        return None
    masks = []
    for t in trs:
        m = 0
        for r, c in enumerate(t):
            m |= 1 << (r * n + c)
        masks.append(m)
    full = (1 << (n * n)) - 1
    by_cell: list[list[int]] = [[] for _ in range(n * n)]
    for ti, m in enumerate(masks):
        for cell in range(n * n):
            if m >> cell & 1:
                by_cell[cell].append(ti)

    chosen: list[int] = []

    def rec(covered: int) -> bool:
        if covered == full:
            return True
        best_cell, best = -1, None
        for cell in range(n * n):
            if covered >> cell & 1:
                continue
            cand = [ti for ti in by_cell[cell] if not masks[ti] & covered]
            if best is None or len(cand) < len(best):
                best_cell, best = cell, cand
                if not cand:
                    return False
        for ti in best:
            chosen.append(ti)
            if rec(covered | masks[ti]):
                return True
            chosen.pop()
        return False

    if rec(0):
        return [trs[i] for i in chosen]
    return None


def find_orthogonal_mate(A: LatinSquare) -> Optional[LatinSquare]:
    """An orthogonal mate via decomposition into n disjoint transversals, or
    None if no decomposition exists."""
    if not is_latin(A):
        raise NotLatin("input grid is not a Latin square")
    cover = _disjoint_transversal_cover(A.n, transversals(A))
    if cover is None:
        return None
    grid = [[-1] * A.n for _ in range(A.n)]
    for sym, t in enumerate(cover):
        for r, c in enumerate(t):
            grid[r][c] = sym
    return make_square(grid)


# -- enumeration and the order-6 certificate --

def enumerate_reduced_latin(n: int) -> Iterator[LatinSquare]:
    """Reduced Latin squares of order n (first row and column in natural
    order), in lexicographic grid order."""
    if not 2 <= n <= 7:
        raise OrderOutOfRange(f"order must be in 2..7, got {n}")
    grid = [list(range(n))] + [[-1] * n for _ in range(n - 1)]
    col_used = [1 << c for c in range(n)]  # symbol bitmask per column

    def rec_cell(r: int, c: int):
        if c == n:
            yield from rec_row(r + 1)
            return
        row_used = grid[r][:c]
        for s in range(n):
            if s in row_used or col_used[c] >> s & 1:
                continue
            grid[r][c] = s
            col_used[c] |= 1 << s
            yield from rec_cell(r, c + 1)
            col_used[c] ^= 1 << s
        grid[r][c] = -1

    def rec_row(r: int):
        if r == n:
            yield make_square(grid)
            return
        if col_used[0] >> r & 1:
            return
        grid[r][0] = r
        col_used[0] |= 1 << r
        yield from rec_cell(r, 1)
        col_used[0] ^= 1 << r
        grid[r][0] = -1

    yield from rec_row(1)


def count_all_latin(n: int) -> int:
    """Unrestricted Latin square count by backtracking (independent oracle
    for the reduced-count identity total = n! * (n-1)! * reduced)."""
    count = 0
    col_used = [0] * n
    grid_row = [[-1] * n for _ in range(n)]

    def rec(r: int, c: int) -> None:
        nonlocal count
        if r == n:
            count += 1
            return
        nr, nc = (r, c + 1) if c + 1 < n else (r + 1, 0)
        row_used = grid_row[r][:c]
        for s in range(n):
            if s in row_used or col_used[c] >> s & 1:
                continue
            grid_row[r][c] = s
            col_used[c] |= 1 << s
            rec(nr, nc)
            col_used[c] ^= 1 << s
        grid_row[r][c] = -1

    rec(0, 0)
    return count


@dataclass(frozen=True)
class MateCertificate:
    order: int
    squares_examined: int
    mates_found: int
    transversal_hist: dict[int, int]  # transversal count -> squares
    elapsed: float
    digest: str

    @property
    def asserts_nonexistence(self) -> bool:
        return self.mates_found == 0


def _square_bytes(A: LatinSquare) -> bytes:
    return bytes(s for row in A.grid for s in row)


def _digest_step(prev: bytes, A: LatinSquare) -> bytes:
    return hashlib.sha256(prev + _square_bytes(A)).digest()


def _digest_seed(n: int) -> bytes:
    return hashlib.sha256(f"reduced-latin-{n}".encode()).digest()


def _examine(args):
    n, grid = args
    A = LatinSquare(n, grid)
    trs = transversals(A)
    mate = _disjoint_transversal_cover(n, trs) is not None
    return len(trs), mate


def _write_checkpoint(path: str, state: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(state, fh)
    os.replace(tmp, path)


def certify_no_mates(
    n: int,
    workers: int = 1,
    checkpoint: str | None = None,
    checkpoint_every: int = 500,
) -> MateCertificate:
    """Run find_orthogonal_mate's transversal/exact-cover check over every
    reduced Latin square of order n; mates_found = 0 certifies that no
    order-n Graeco-Latin square exists (any orthogonal pair can be normalized
    so its first member is reduced)."""
    start = time.monotonic()
    next_index = 0
    examined = 0
    mates = 0
    hist: dict[int, int] = {}
    digest = _digest_seed(n)
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            state = json.load(fh)
        if state["order"] == n:
            next_index = state["next_index"]
            examined = state["examined"]
            mates = state["mates"]
            hist = {int(k): v for k, v in state["hist"].items()}
            digest = bytes.fromhex(state["digest"])

    stream = enumerate_reduced_latin(n)
    for _ in range(next_index):
        next(stream)

    def record(A: LatinSquare, ntr: int, mate: bool) -> None:
        nonlocal examined, mates, digest, next_index
        digest = _digest_step(digest, A)
        examined += 1
        next_index += 1
        hist[ntr] = hist.get(ntr, 0) + 1
        if mate:
            mates += 1
        if checkpoint and examined % checkpoint_every == 0:
            _write_checkpoint(
                checkpoint,
                {
                    "order": n,
                    "next_index": next_index,
                    "examined": examined,
                    "mates": mates,
                    "hist": hist,
                    "digest": digest.hex(),
                },
            )

    if workers <= 1:
        for A in stream:
            ntr, mate = _examine((n, A.grid))
            record(A, ntr, mate)
    else:
        import multiprocessing as mp

        squares = list(stream)  # 9408 at order 6; fine to hold
        with mp.Pool(workers) as pool:
            results = pool.imap(
                _examine, ((n, A.grid) for A in squares), chunksize=64
            )
            for A, (ntr, mate) in zip(squares, results):
                record(A, ntr, mate)

    if checkpoint:
        _write_checkpoint(
            checkpoint,
            {
                "order": n,
                "next_index": next_index,
                "examined": examined,
                "mates": mates,
                "hist": hist,
                "digest": digest.hex(),
            },
        )
    return MateCertificate(
        order=n,
        squares_examined=examined,
        mates_found=mates,
        transversal_hist=dict(sorted(hist.items())),
        elapsed=time.monotonic() - start,
        digest=digest.hex(),
    )


def certify_no_mols6(
    workers: int = 1, checkpoint: str | None = None
) -> MateCertificate:
    return certify_no_mates(6, workers=workers, checkpoint=checkpoint)


# -- Graeco-Latin text format --

def parse_graeco_latin(text: str) -> tuple[LatinSquare, PartialSquare]:
    """Parse n rows of n cells; each cell is a 1-based symbol digit followed
    by a second symbol digit or '.'."""
    rows = [ln.split() for ln in text.strip("\n").split("\n")]
    n = len(rows)
    if n < 2 or any(len(r) != n for r in rows):
        raise ParseError("grid text is not square")
    first: list[list[int]] = []
    second: list[list[Optional[int]]] = []
    for r in rows:
        frow: list[int] = []
        srow: list[Optional[int]] = []
        for cell in r:
            if len(cell) != 2:
                raise ParseError(f"cell {cell!r} is not two characters")
            a, b = cell[0], cell[1]
            if not a.isdigit() or not 1 <= int(a) <= n:
                raise ParseError(f"first symbol {a!r} out of range 1..{n}")
            frow.append(int(a) - 1)
            if b == ".":
                srow.append(None)
            elif b.isdigit() and 1 <= int(b) <= n:
                srow.append(int(b) - 1)
            else:
                raise ParseError(f"second symbol {b!r} out of range 1..{n}")
        first.append(frow)
        second.append(srow)
    A = make_square(first)
    if not is_latin(A):
        raise NotLatin("first symbols do not form a Latin square")
    P = PartialSquare(n, tuple(tuple(r) for r in second))
    for r in range(n):
        seen = [s for s in P.grid[r] if s is not None]
        if len(seen) != len(set(seen)):
            raise PartialClash(f"second symbols repeat in row {r}")
    for c in range(n):
        seen = [P.grid[r][c] for r in range(n) if P.grid[r][c] is not None]
        if len(seen) != len(set(seen)):
            raise PartialClash(f"second symbols repeat in column {c}")
    return A, P


def render_graeco_latin(A: LatinSquare, P: PartialSquare) -> str:
    if P.n != A.n:
        raise OrderMismatch(f"orders differ: {A.n} vs {P.n}")
    lines = []
    for r in range(A.n):
        cells = []
        for c in range(A.n):
            s = P.grid[r][c]
            cells.append(f"{A.grid[r][c] + 1}{'.' if s is None else s + 1}")
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"
