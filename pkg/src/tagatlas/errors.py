"""Exception types shared across the pipeline."""


class DataError(Exception):
    """Unrecoverable problem with input data or produced artifacts.

    The CLI maps this to exit code 2.
    """


class UnknownHashtag(KeyError):
    """Queried hashtag is not present in the atlas.

    Recoverable: the service maps it to a 404 response, the CLI to a
    nonzero exit with an ``unknown-hashtag`` message.
    """

    def __init__(self, tag: str):
        super().__init__(tag)
        self.tag = tag

    def __str__(self) -> str:
        return f"unknown-hashtag: {self.tag}"
