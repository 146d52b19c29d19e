import math


class CompensatedSum:
    """
    Running sum with Neumaier's improvement of Kahan summation.

    Block totals computed with math.fsum are carried across blocks through this
    accumulator, so the error stays bounded by a few ulps of the result no
    matter how many blocks a stream has.
    """

    __slots__ = ("_sum", "_carry")

    def __init__(self, value: float = 0.0):
        self._sum = float(value)
        self._carry = 0.0

    def add(self, value: float) -> "CompensatedSum":
        value = float(value)
        total = self._sum + value
        if abs(self._sum) >= abs(value):
            self._carry += (self._sum - total) + value
        else:
            self._carry += (value - total) + self._sum
        self._sum = total
        return self

    def __iadd__(self, value: float) -> "CompensatedSum":
        return self.add(value)

    @property
    def value(self) -> float:
        return self._sum + self._carry

    def __repr__(self):
        return f"CompensatedSum({self.value!r})"


class ComplexCompensatedSum:
    """Pair of compensated sums for the real and imaginary parts."""

    __slots__ = ("real", "imag")

    def __init__(self):
        self.real = CompensatedSum()
        self.imag = CompensatedSum()

    def add(self, value: complex) -> "ComplexCompensatedSum":
        self.real.add(value.real)
        self.imag.add(value.imag)
        return self

    @property
    def value(self) -> complex:
        return complex(self.real.value, self.imag.value)


def exact_complex_sum(values) -> complex:
    """Correctly rounded sum, part by part, of a complex numpy array."""
    return complex(math.fsum(values.real), math.fsum(values.imag))
