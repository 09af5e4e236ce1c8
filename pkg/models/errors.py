class GamError(Exception):
    """Base class for every error raised by the metrics engine"""


class InputError(GamError):
    """Invalid input values: ranges, shapes, counts, empty sets"""


class DatasetParseError(InputError):
    """Malformed text input, located by 1-based line number"""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        location = ''
        if path:
            location += f'{path}: '
        if line is not None:
            location += f'line {line}: '
        super().__init__(f'{location}{message}')


class LabelTypeError(InputError):
    """A classification metric received regression labels, or the reverse"""


class SpecError(InputError):
    """Invalid synthetic dataset specification"""


class InvariantViolation(GamError):
    """An internal postcondition did not hold"""
