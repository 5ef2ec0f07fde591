"""Exception types shared across the package.

Protocol failures carry a short ``code``.  Codes are for local logs and the
harness transcript only; on the wire every CN/gNB failure collapses into the
same abort frame.
"""


class ProtocolError(Exception):
    code = "protocol-error"

    def __init__(self, detail: str = ""):
        super().__init__(detail or self.code)
        self.detail = detail


class StaleTimestamp(ProtocolError):
    code = "stale-timestamp"


class BadCertificate(ProtocolError):
    code = "bad-certificate"


class ExpiredCertificate(ProtocolError):
    code = "expired-certificate"


class NotInList(ProtocolError):
    code = "not-in-list"


class BadSignature(ProtocolError):
    code = "bad-signature"


class BadProof(ProtocolError):
    code = "bad-proof"


class DuplicateMessage(ProtocolError):
    """Replay inside the freshness window, caught by a seen-message cache."""

    code = "duplicate"


class DecryptFail(ProtocolError):
    code = "decrypt-fail"


class AckMismatch(ProtocolError):
    code = "ack-mismatch"


class NoUid(ProtocolError):
    code = "no-uid"


class Aborted(ProtocolError):
    """The peer answered with the opaque abort frame."""

    code = "aborted"


class UnexpectedMessage(ProtocolError):
    code = "unexpected-message"


# registration / provisioning failures (never on the wire)


class RegistrationError(Exception):
    code = "registration-error"


class DoubleSetup(RegistrationError):
    code = "double-setup"


class DuplicateGnb(RegistrationError):
    code = "duplicate-gnb"


class ExpiredExp(RegistrationError):
    code = "expired-exp"


class DuplicateUser(RegistrationError):
    code = "duplicate-user"


class UnknownUser(RegistrationError):
    code = "unknown-user"


class UnknownTag(RegistrationError):
    code = "unknown-tag"


class VersionRegression(RegistrationError):
    code = "version-regression"


class NotProvisioned(RegistrationError):
    code = "not-provisioned"


# cryptographic primitive failures


class InvalidOpening(ValueError):
    """Commitment opening does not match."""


class DecryptionError(ValueError):
    """Ciphertext failed authentication or is malformed."""


class SanitizationError(ValueError):
    """Sanitizer asked to touch a block outside the admissible set."""


class TrapdoorMismatch(ValueError):
    pass


class UnsupportedSecurityLevel(ValueError):
    pass


# wire decoding


class DecodeError(ValueError):
    code = "decode-error"


class Truncated(DecodeError):
    code = "truncated"


class BadTag(DecodeError):
    code = "bad-tag"


class LengthOverflow(DecodeError):
    code = "length-overflow"


class Malformed(DecodeError):
    code = "malformed"
