"""Exception hierarchy shared by the frontend, analyzer and simulator."""

from __future__ import annotations


class HyperpolyError(Exception):
    """Base class; ``pos`` is a (line, column) pair when known."""

    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.message = message
        self.pos = pos
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.pos is None:
            return self.message
        return f"{self.pos[0]}:{self.pos[1]}: {self.message}"


class LexError(HyperpolyError):
    pass


class ParseError(HyperpolyError):
    pass


class AnalysisError(HyperpolyError):
    pass


class SimulationError(HyperpolyError):
    pass
