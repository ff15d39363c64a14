"""Exception hierarchy shared by every module."""


class GroupError(Exception):
    """Base class for all errors raised by sigmasub."""


# table / construction
class MalformedTable(GroupError):
    pass


class NotAssociative(GroupError):
    def __init__(self, triple):
        self.triple = triple
        a, b, c = triple
        super().__init__(f"(x*y)*z != x*(y*z) for x={a}, y={b}, z={c}")


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    def __init__(self, element):
        self.element = element
        super().__init__(f"element {element} has no two-sided inverse")


class InvalidPermutation(GroupError):
    pass


class OrderCapExceeded(GroupError):
    pass


class InvalidAction(GroupError):
    pass


# subgroup calculus
class NotContained(GroupError):
    pass


class NotNormal(GroupError):
    pass


class NotNormalSection(GroupError):
    pass


class SubgroupCapExceeded(GroupError):
    pass


class NotFound(GroupError):
    pass


class NotSoluble(GroupError):
    pass


class TrivialGroup(GroupError):
    pass


# sigma theory
class NotSigmaSoluble(GroupError):
    pass


class NotChiefFactor(GroupError):
    pass


class HallSetCapExceeded(GroupError):
    pass


# file ingestion
class ParseError(GroupError):
    pass


class ValidationError(GroupError):
    pass
