"""Exact linear programming over the rationals.

A small dense two-phase simplex used to decide feasibility of the linear
systems produced by the justification searches.  Strict inequalities are
handled by the callers via an auxiliary slack variable whose maximum is
required to be positive.  Bland's rule guarantees termination; every
pivot stays in `fractions.Fraction`, so the answers are exact.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Unbounded(Exception):
    """The objective is unbounded above on the feasible region."""


def maximize(objective, a_ub=(), b_ub=(), a_eq=(), b_eq=()):
    """Maximize ``objective . x`` subject to ``a_ub x <= b_ub``,
    ``a_eq x = b_eq`` and ``x >= 0``.

    Returns ``(value, x)`` with exact rationals, or ``None`` when the
    constraints are infeasible.  Raises :class:`Unbounded` if the
    objective can grow without limit.
    """
    n = len(objective)
    rows = []
    senses = []
    for row, rhs in zip(a_ub, b_ub, strict=True):
        if len(row) != n:
            raise ValueError("inequality row length mismatch")
        rows.append((list(map(Fraction, row)), Fraction(rhs)))
        senses.append("<=")
    for row, rhs in zip(a_eq, b_eq, strict=True):
        if len(row) != n:
            raise ValueError("equality row length mismatch")
        rows.append((list(map(Fraction, row)), Fraction(rhs)))
        senses.append("=")

    # Canonical form: flip rows so every right-hand side is nonnegative,
    # add a slack column per inequality and an artificial column per row
    # that still lacks an identity column.
    m = len(rows)
    slack_count = senses.count("<=")
    prepared = []
    slack_idx = 0
    for (coeffs, rhs), sense in zip(rows, senses):
        flip = rhs < 0
        if flip:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
        slacks = [ZERO] * slack_count
        if sense == "<=":
            slacks[slack_idx] = -ONE if flip else ONE
            slack_idx += 1
        needs_art = sense == "=" or flip
        prepared.append((coeffs + slacks, rhs, needs_art))

    art_count = sum(1 for _, _, needs in prepared if needs)
    cols = n + slack_count + art_count
    art_cols = set(range(n + slack_count, cols))
    table = []
    basis = []
    art_seen = 0
    for body, rhs, needs_art in prepared:
        row = body + [ZERO] * art_count + [rhs]
        if needs_art:
            col = n + slack_count + art_seen
            row[col] = ONE
            basis.append(col)
            art_seen += 1
        else:
            basis.append(n + body[n:].index(ONE))
        table.append(row)

    def pivot(r, c):
        piv = table[r][c]
        table[r] = [v / piv for v in table[r]]
        for i in range(m):
            if i != r and table[i][c] != 0:
                factor = table[i][c]
                table[i] = [a - factor * b for a, b in zip(table[i], table[r])]
        basis[r] = c

    def run_phase(costs, allowed):
        while True:
            entering = None
            for j in range(cols):
                if j not in allowed:
                    continue
                zj = sum(costs[basis[i]] * table[i][j] for i in range(m))
                if zj - costs[j] < 0:
                    entering = j  # Bland: smallest eligible index
                    break
            if entering is None:
                return
            leaving = None
            best = None
            for i in range(m):
                if table[i][entering] > 0:
                    ratio = table[i][cols] / table[i][entering]
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and basis[i] < basis[leaving])
                    ):
                        best = ratio
                        leaving = i
            if leaving is None:
                raise Unbounded()
            pivot(leaving, entering)

    if art_cols:
        costs1 = [ZERO] * cols
        for j in art_cols:
            costs1[j] = -ONE
        run_phase(costs1, allowed=set(range(cols)))
        if sum(table[i][cols] for i in range(m) if basis[i] in art_cols) != 0:
            return None
        # Drive zero-valued artificials out of the basis where possible;
        # rows without a candidate column are redundant and stay put.
        for i in range(m):
            if basis[i] in art_cols:
                for j in range(n + slack_count):
                    if table[i][j] != 0:
                        pivot(i, j)
                        break

    costs2 = list(map(Fraction, objective)) + [ZERO] * (cols - n)
    run_phase(costs2, allowed=set(range(cols)) - art_cols)

    solution = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            solution[basis[i]] = table[i][cols]
    value = sum(c * x for c, x in zip(map(Fraction, objective), solution))
    return value, solution


def feasible(a_ub=(), b_ub=(), a_eq=(), b_eq=(), n=None):
    """Decide feasibility of ``a_ub x <= b_ub``, ``a_eq x = b_eq``,
    ``x >= 0`` and return a witness or ``None``."""
    if n is None:
        if a_ub:
            n = len(a_ub[0])
        elif a_eq:
            n = len(a_eq[0])
        else:
            return []
    result = maximize([ZERO] * n, a_ub, b_ub, a_eq, b_eq)
    if result is None:
        return None
    return result[1]
