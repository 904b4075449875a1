from enum import IntEnum, StrEnum


class GenKind(IntEnum):
    F = 1
    KPLUS = 2
    KMINUS = 3
    E = 4
    # coideal generator, only meaningful inside a case context
    B = 5


class Block(StrEnum):
    E = "E"
    F = "F"


class CaseVariant(StrEnum):
    I = "I"
    IIA = "IIA"
    IID = "IID"
    IIE = "IIE"
    III = "III"


class Direction(StrEnum):
    TAU = "tau"
    TAU_MINUS = "tau_minus"


class LusztigDirection(StrEnum):
    FORWARD = "forward"
    INVERSE = "inverse"


class CheckStatus(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"
