"""Minimal competition-style front end for the internal solver.

``python -m xorcount.solver FILE`` prints an ``s`` status line and a ``v``
line, exiting 10 (SAT) or 20 (UNSAT).  Useful as a stand-in external solver.
"""

import sys

from ..formula import DimacsError, read_dimacs
from . import Status, solve_internal


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m xorcount.solver FILE", file=sys.stderr)
        return 1
    try:
        f = read_dimacs(argv[0])
    except (OSError, DimacsError) as exc:
        print(f"c error: {exc}", file=sys.stderr)
        return 1
    verdict = solve_internal(f)
    if verdict.status is Status.SAT:
        print("s SATISFIABLE")
        lits = [v if b else -v for v, b in enumerate(verdict.witness, start=1)]
        print("v " + " ".join(map(str, lits)) + " 0")
        return 10
    print("s UNSATISFIABLE")
    return 20


if __name__ == "__main__":
    sys.exit(main())
