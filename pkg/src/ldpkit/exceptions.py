"""Exception hierarchy. Every error raised on purpose by ldpkit derives from LdpError."""


class LdpError(Exception):
    pass


class UnknownLanguage(LdpError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotEnoughLines(LdpError, ValueError):
    pass


class InvalidSizes(LdpError, ValueError):
    pass


class MissingCorpus(LdpError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MixedTargetLanguage(LdpError, ValueError):
    pass


class NeedTriplets(LdpError, ValueError):
    pass


class NoTargetSegment(LdpError, ValueError):
    pass


class BadTemplate(LdpError, ValueError):
    pass


class UnparsableRating(LdpError, ValueError):
    pass


class BackendError(LdpError):
    pass


class TransportError(BackendError):
    pass


class AuthError(BackendError):
    pass


class RateLimited(BackendError):
    pass


class BadTable(LdpError, ValueError):
    pass


class NotEnoughPairs(LdpError, ValueError):
    pass


class Misaligned(LdpError, ValueError):
    pass


class NoSegments(LdpError, ValueError):
    pass


class ZeroDenominator(LdpError, ZeroDivisionError):
    pass


class NeedSeedData(LdpError, ValueError):
    pass


class EmptyText(LdpError, ValueError):
    pass


class ConfigError(LdpError, ValueError):
    pass
