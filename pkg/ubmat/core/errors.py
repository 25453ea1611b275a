"""Exception root shared by every ubmat service."""


class UBMatError(Exception):
    """Base class for expected, user-facing failures."""

    exit_code = 5


class InputFormatError(UBMatError):
    """A file or inline value could not be parsed."""

    exit_code = 3

    def __init__(self, message: str, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
                if column is not None:
                    where += f":{column}"
            where += ": "
        super().__init__(f"{where}{message}")
