"""Run a builtin agent as an external stdio-protocol process.

Usage: ``python3 -m luxsim.external greedy`` (any ``make_agent`` name).
Mostly useful for testing the protocol and as a reference agent skeleton.
"""

import sys

from .agents import make_agent
from .protocol import agent_loop


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    name = argv[0] if argv else "null"
    agent_loop(make_agent(name))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
