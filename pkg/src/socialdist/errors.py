"""Exception hierarchy shared across the estimation engine and the harness."""


class SocialDistError(Exception):
    """Base class for every error raised by this package."""


class InvalidPixel(SocialDistError):
    """Pixel coordinates outside the image bounds."""


class DegeneratePair(SocialDistError):
    """Keypoint pair collapsed to zero image-plane length; cannot range."""


class NoUsableKeypoints(SocialDistError):
    """No keypoint pair of the person passes the confidence/visibility gate."""


class MissingAnnotationFile(SocialDistError):
    def __init__(self, path):
        super().__init__(f"required annotation file missing: {path}")
        self.path = path


class DanglingReference(SocialDistError):
    """A tag refers to an entity that does not exist in its scope."""

    def __init__(self, tag, context=""):
        msg = f"dangling reference to {tag!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.tag = tag
        self.context = context


class ParseError(SocialDistError):
    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


class MalformedDetection(SocialDistError):
    """A detection violates the interchange contract (e.g. no anchors)."""


class EmptyEvaluation(SocialDistError):
    """Aggregation was asked to summarize zero per-image results."""


class InvalidScene(SocialDistError):
    """Scene synthesis preconditions violated (e.g. person behind camera)."""
